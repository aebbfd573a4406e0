// Acceptance checks, one per criterion: `acceptance N` prints a single
// "criterion N PASS|FAIL ..." line and exits non-zero on failure.
// `acceptance all` runs every criterion in turn.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nanopair/cda.hpp"
#include "nanopair/error.hpp"
#include "nanopair/materials.hpp"
#include "nanopair/multipole.hpp"
#include "nanopair/photon_stats.hpp"
#include "nanopair/sfg.hpp"
#include "nanopair/spdc.hpp"

using namespace nanopair;
namespace ps = nanopair::photon_stats;

namespace {

// Pinned tolerances and budgets.
constexpr double kMieTolerance = 0.05;
constexpr double kMieBudgetS = 120.0;
constexpr double kIrQLow = 6.3, kIrQHigh = 11.7;
constexpr double kPumpQLow = 36.0, kPumpQHigh = 68.0;
constexpr double kSpectrumBudgetS = 15 * 60.0;
constexpr double kRateLow = 340.0, kRateHigh = 430.0;
constexpr double kStrongEntry = 0.7, kWeakEntry = 0.3, kCrossedTolerance = 0.02;
constexpr int kSeeds = 20, kSeedsRequired = 18;
constexpr double kMinZ = 5.0;
constexpr double kFwhmNs = 2.0, kFwhmTolNs = 0.3;
constexpr double kSeedBudgetS = 60.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Dielectric spheres against the Mie series.
Outcome mie_equivalence() {
  struct Point {
    double m, x;
  };
  const std::vector<Point> points{{1.5, 0.5}, {1.5, 1.5}, {1.5, 3.0}, {2.0, 1.0}, {2.0, 2.0},
                                  {2.5, 1.0}, {2.5, 2.0}, {3.0, 0.8}, {3.0, 1.5}, {3.5, 0.6},
                                  {3.5, 1.2}, {3.6, 1.0}};
  constexpr double kWavelength = 1000.0;
  constexpr double kSitesPerRadius = 12.0;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string worst_at;
  int within = 0;
  for (const auto& p : points) {
    const double r = p.x * kWavelength / (2.0 * kPi);
    const auto material = materials::constant_index("sphere", {p.m, 0.0});
    const double spacing = std::min(r / kSitesPerRadius,
                                    cda::max_spacing_nm({p.m, 0.0}, kWavelength));
    const auto lattice = cda::discretize(cda::Geometry::sphere(r), spacing, kWavelength, material);
    const auto inc = cda::incident_field(lattice, cda::PlaneWave{}, PolarizationState::H(), 1.0);
    const auto pol = cda::solve_polarizations(lattice, inc);
    const double q = cda::cross_sections(lattice, inc, pol).q_sca;
    const double ref = cda::mie_reference(r, {p.m, 0.0}, kWavelength).q_sca;
    const double err = std::abs(q / ref - 1.0);
    if (err <= kMieTolerance) ++within;
    if (err > worst) {
      worst = err;
      worst_at = "m=" + fmt("%.2f", p.m) + " x=" + fmt("%.2f", p.x);
    }
  }
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = worst <= kMieTolerance && points.size() >= 10 && t < kMieBudgetS;
  o.detail = std::to_string(within) + "/" + std::to_string(points.size()) + " spheres within tolerance, max |dQsca|/Qsca " + fmt("%.4f", worst) +
             " at " + worst_at + " (limit " + fmt("%.2f", kMieTolerance) + "), " + fmt("%.1f", t) +
             " s (limit " + fmt("%.0f", kMieBudgetS) + " s)";
  return o;
}

std::string dominant(const cda::SpectrumEntry& e) {
  return e.partials.at("ED") >= e.partials.at("MD") ? "ED" : "MD";
}

const cda::SpectrumEntry& peak_entry(const cda::ScatteringSpectrum& sp) {
  return *std::max_element(sp.entries.begin(), sp.entries.end(),
                           [](const auto& a, const auto& b) { return a.q_sca < b.q_sca; });
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (double l = lo; l <= hi + 1e-9; l += step) g.push_back(l);
  return g;
}

// Default cylinder: MD resonance in the IR and a sharp ED resonance in the
// pump band, both at the default discretization.
Outcome cylinder_spectrum() {
  const auto cylinder = cda::Geometry::cylinder();
  const auto& material = materials::algaas_x018();
  std::ostringstream detail;
  bool pass = true;

  const auto t0 = std::chrono::steady_clock::now();
  const auto ir_grid = grid(1400.0, 1700.0, 10.0);
  const auto ir = cda::scattering_spectrum(cylinder, ir_grid, material);
  const double t_ir = seconds_since(t0);
  const auto& ir_peak = peak_entry(ir);
  detail << ir_grid.size() << "-point IR spectrum in " << fmt("%.0f", t_ir) << " s; ";
  try {
    const auto fit = multipole::fit_resonance(ir, multipole::Channel::MD, 1400.0, 1700.0);
    const bool ok = fit.q >= kIrQLow && fit.q <= kIrQHigh && dominant(ir_peak) == "MD";
    pass = pass && ok;
    detail << "IR MD fit l0=" << fmt("%.1f", fit.lambda0_nm) << " Q=" << fmt("%.2f", fit.q) << " [" << kIrQLow
           << ", " << kIrQHigh << "], dominant " << dominant(ir_peak) << " at " << ir_peak.wavelength_nm
           << " nm; ";
  } catch (const FitError& e) {
    pass = false;
    detail << "IR fit failed: " << e.what() << "; ";
  }
  pass = pass && t_ir < kSpectrumBudgetS;

  // Pump band, restarted GMRES with a bounded iteration budget per point.
  // Points that do not converge are reported and left out of the fit.
  const auto t1 = std::chrono::steady_clock::now();
  cda::SpectrumOptions pump_opt;
  pump_opt.solver.method = cda::KrylovMethod::Gmres;
  pump_opt.solver.max_iterations = 1000;
  const auto pump_grid = grid(760.0, 820.0, 5.0);
  cda::ScatteringSpectrum pump;
  double worst_residual = 0.0;
  for (double wl : pump_grid) {
    try {
      const auto one = cda::scattering_spectrum(cylinder, std::vector<double>{wl}, material, pump_opt);
      pump.entries.push_back(one.entries.front());
    } catch (const ConvergenceError& e) {
      worst_residual = std::max(worst_residual, e.residual());
    }
  }
  detail << "pump band " << pump.entries.size() << "/" << pump_grid.size() << " points converged";
  if (pump.entries.size() < pump_grid.size()) {
    pass = false;
    detail << " (worst residual " << fmt("%.2g", worst_residual) << ")";
  }
  try {
    if (pump.entries.empty()) throw FitError("no converged pump points");
    const auto& pk = peak_entry(pump);
    const auto fit = multipole::fit_resonance(pump, multipole::Channel::Total, 760.0, 820.0);
    const bool ok = fit.q >= kPumpQLow && fit.q <= kPumpQHigh && dominant(pk) == "ED";
    pass = pass && ok;
    detail << ", fit l0=" << fmt("%.1f", fit.lambda0_nm) << " Q=" << fmt("%.1f", fit.q) << " [" << kPumpQLow
           << ", " << kPumpQHigh << "], dominant " << dominant(pk) << " at " << pk.wavelength_nm << " nm (ED "
           << fmt("%.2f", pk.partials.at("ED")) << ", MD " << fmt("%.2f", pk.partials.at("MD")) << ")";
  } catch (const FitError& e) {
    pass = false;
    detail << ", pump fit failed: " << e.what();
  }
  detail << " in " << fmt("%.0f", seconds_since(t1)) << " s";
  return {pass, detail.str()};
}

// Pair rate from the stated efficiency, spots and pump power.
Outcome pair_rate_reproduction() {
  const double eta = 1.8e-5;
  const double area = sfg::spot_area_m2(1000.0);
  const double xi = sfg::sfg_efficiency(eta * 1e-6, 1e-3, 1e-3, area, area).xi_m4_per_w;
  spdc::SpdcInputs in;
  in.xi_m4_per_w = xi;
  const auto p = spdc::predict(in);
  std::ostringstream detail;
  detail << "Xi=" << fmt("%.4g", xi) << " m^4/W, " << in.pump_nm << " -> " << in.signal_nm << " + " << in.idler_nm
         << " nm: " << fmt("%.4g", p.pair_rate_hz) << " Hz (band [" << kRateLow << ", " << kRateHigh << "])";
  try {
    spdc::check_energy_conservation(785.0, 1520.0, 1560.0);
  } catch (const ValidationError&) {
    detail << "; 785/1520/1560 rejected, 1/1520+1/1560 = 1/"
           << fmt("%.2f", sfg::sum_frequency_wavelength_nm(1520.0, 1560.0));
  }
  return {p.pair_rate_hz >= kRateLow && p.pair_rate_hz <= kRateHigh, detail.str()};
}

sfg::SfgModel default_sfg_model() {
  return sfg::SfgModel(cda::Geometry::cylinder(), materials::algaas_x018(), materials::chi2_tensor(100.0),
                       sfg::SfgSetup{});
}

Outcome polarization_map() {
  const auto model = default_sfg_model();
  const auto map_h = sfg::sfg_map_16(model, sfg::Analyzer::H);
  const auto map_v = sfg::sfg_map_16(model, sfg::Analyzer::V);
  const auto& n = map_h.normalized;
  const double vv = n[1][1], rr = n[2][2], ll = n[3][3], hh = n[0][0];
  const double crossed = std::abs(map_v.power_w[0][0] / map_h.power_w[1][1] - 1.0);
  const bool pass = vv >= kStrongEntry && rr >= kStrongEntry && ll >= kStrongEntry && hh <= kWeakEntry &&
                    crossed <= kCrossedTolerance;
  std::ostringstream detail;
  detail << "H analyzer, normalized VV=" << fmt("%.3f", vv) << " RR=" << fmt("%.3f", rr) << " LL="
         << fmt("%.3f", ll) << " (need >= " << kStrongEntry << "), HH=" << fmt("%.3f", hh) << " (need <= "
         << kWeakEntry << "), (H,H)->V vs (V,V)->H differ by " << fmt("%.4f", crossed) << " (limit "
         << kCrossedTolerance << ")";
  return {pass, detail.str()};
}

Outcome off_axis_emission() {
  const auto model = default_sfg_model();
  const double na = 0.7;
  const auto basis = model.basis_far_fields(sfg::pupil_grid(na, 101));
  const auto far = sfg::SfgModel::combine(basis, PolarizationState::V(), PolarizationState::V());
  const auto img = sfg::bfp_image(far, na, sfg::Analyzer::H);
  const auto it = std::max_element(img.intensity.begin(), img.intensity.end());
  const int idx = static_cast<int>(it - img.intensity.begin());
  const int row = idx / img.pixels, col = idx % img.pixels;
  const int centre = img.pixels / 2;
  const double pitch = 2.0 * img.half_width / (img.pixels - 1);
  const double rho = pitch * std::hypot(row - centre, col - centre);
  std::ostringstream detail;
  detail << "VV->H image at " << fmt("%.2f", model.sum_wavelength_nm()) << " nm, max at row " << row << " col "
         << col << " (|u_t|=" << fmt("%.3f", rho) << "), centre/max " << fmt("%.3g", img.at(centre, centre) / *it);
  return {!(row == centre && col == centre) && *it > img.at(centre, centre), detail.str()};
}

Outcome detection_round_trip() {
  int contained = 0, peak_ok = 0, z_ok = 0, fwhm_ok = 0;
  double worst_time = 0.0, min_z = 1e300, fwhm_lo = 1e300, fwhm_hi = 0.0;
  int expected_bin = -1;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    ps::ExperimentConfig c;
    c.pair_rate_hz = 35.0;
    c.seed = static_cast<std::uint64_t>(seed);
    const auto t0 = std::chrono::steady_clock::now();
    const auto [a, b] = ps::simulate_timetags(c);
    const auto h = ps::correlate(a, b, c.bin_width_ps, c.bins, 0, c.duration_s);
    expected_bin = static_cast<int>(std::floor(c.delay_ns * 1e3 / static_cast<double>(c.bin_width_ps)));
    const int peak = static_cast<int>(std::max_element(h.counts.begin(), h.counts.end()) - h.counts.begin());
    const auto window = ps::peak_window(h, peak, 1);
    const auto sig = ps::peak_significance(h, window);
    const auto fit = ps::fit_thermal(h, window);
    const auto est = ps::invert_rate(h, {c.eta_arm, c.split}, window, &fit);
    worst_time = std::max(worst_time, seconds_since(t0));
    if (!est.upper_limit && est.ci_low_hz <= 35.0 && est.ci_high_hz >= 35.0) ++contained;
    if (peak == expected_bin) ++peak_ok;
    if (sig.z >= kMinZ) ++z_ok;
    if (std::abs(fit.fwhm_ns() - kFwhmNs) <= kFwhmTolNs) ++fwhm_ok;
    min_z = std::min(min_z, sig.z);
    fwhm_lo = std::min(fwhm_lo, fit.fwhm_ns());
    fwhm_hi = std::max(fwhm_hi, fit.fwhm_ns());
  }
  const bool pass = contained >= kSeedsRequired && peak_ok == kSeeds && z_ok == kSeeds && fwhm_ok == kSeeds &&
                    worst_time < kSeedBudgetS;
  std::ostringstream detail;
  detail << "CI contains 35 Hz in " << contained << "/" << kSeeds << " (need " << kSeedsRequired << "), peak at bin "
         << expected_bin << " in " << peak_ok << "/" << kSeeds << ", min z " << fmt("%.1f", min_z) << " (need "
         << kMinZ << "), FWHM " << fmt("%.2f", fwhm_lo) << ".." << fmt("%.2f", fwhm_hi) << " ns (need "
         << kFwhmNs << " +- " << kFwhmTolNs << "), slowest seed " << fmt("%.1f", worst_time) << " s";
  return {pass, detail.str()};
}

ps::TimeTagStream poisson(int channel, double rate_hz, double duration_s, std::mt19937_64& rng) {
  ps::TimeTagStream s{channel, {}};
  std::exponential_distribution<double> gap(rate_hz);
  for (double t = gap(rng); t < duration_s; t += gap(rng)) s.times_ps.push_back(static_cast<std::uint64_t>(t * 1e12));
  return s;
}

Outcome statistical_nulls() {
  std::mt19937_64 rng(20240601);
  const double T = 1000.0;
  const auto a = poisson(1, 1e4, T, rng);
  const auto b = poisson(2, 1e4, T, rng);
  const auto h = ps::correlate(a, b, 162, 300, 0, T);
  const auto g = ps::g2(h);
  double mean = 0.0;
  for (double v : g) mean += v;
  mean /= static_cast<double>(g.size());
  const double accidental = static_cast<double>(h.singles1) * static_cast<double>(h.singles2) * 162e-12 / T;
  const double sigma = 1.0 / std::sqrt(accidental * static_cast<double>(g.size()));
  const bool g2_ok = std::abs(mean - 1.0) <= 3.0 * sigma;

  // 10^3-event streams over 10 us, with a window that straddles zero delay.
  const auto s1 = poisson(1, 1e8, 1e-5, rng);
  const auto s2 = poisson(2, 1e8, 1e-5, rng);
  const std::int64_t width = 162, offset = -24300;
  const int bins = 300;
  const auto sweep = ps::correlate(s1, s2, width, bins, offset, 1e-5);
  std::vector<std::uint64_t> brute(bins, 0);
  for (auto t1 : s1.times_ps)
    for (auto t2 : s2.times_ps) {
      const std::int64_t d = static_cast<std::int64_t>(t2) - static_cast<std::int64_t>(t1) - offset;
      if (d >= 0 && d < width * bins) ++brute[static_cast<std::size_t>(d / width)];
    }
  const bool brute_ok = brute == sweep.counts;
  std::ostringstream detail;
  detail << "g2 mean " << fmt("%.4f", mean) << " (1 +- " << fmt("%.4f", 3.0 * sigma) << "), brute force on "
         << s1.size() << "x" << s2.size() << " events " << (brute_ok ? "identical" : "DIFFERENT") << " ("
         << sweep.total() << " pairs)";
  return {g2_ok && brute_ok, detail.str()};
}

// Items that cannot be reproduced here, and what stands in for them.
Outcome stated_limits() {
  std::ostringstream detail;
  detail << "not reproduced: absolute experimental coincidence counts (loss budget unpublished; eta_arm is an input), "
            "experimental RR/LL dimming (fabrication non-uniformity), 1.4 GHz/Wm normalization "
            "(definition unavailable); ";
  // Stand-ins: a non-default loss budget round trip and the normalization rule in the report.
  ps::ExperimentConfig c;
  c.pair_rate_hz = 9.0;
  c.eta_arm = 0.05;
  c.seed = 9;
  const auto [a, b] = ps::simulate_timetags(c);
  const auto h = ps::correlate(a, b, c.bin_width_ps, c.bins, 0, c.duration_s);
  const auto window = ps::peak_window(h, ps::bin_of_delay(h, c.delay_ns), 1);
  const auto fit = ps::fit_thermal(h, window);
  const auto est = ps::invert_rate(h, {c.eta_arm, c.split}, window, &fit);
  const bool trip = est.ci_low_hz <= 9.0 && est.ci_high_hz >= 9.0;

  spdc::SpdcInputs in;
  in.xi_m4_per_w = 1.777e-28;
  const auto p = spdc::predict(in);
  const double measured = spdc::normalized_rate(35.0, 2e-3, 400e-9);
  const bool rule = !p.normalization_rule.empty() && !p.normalized_units.empty();
  detail << "9 Hz round trip at eta_arm 0.05: " << fmt("%.2f", est.rate_hz) << " Hz [" << fmt("%.2f", est.ci_low_hz)
         << ", " << fmt("%.2f", est.ci_high_hz) << "]; normalization rule '" << p.normalization_rule << "' gives "
         << fmt("%.4g", measured) << " " << p.normalized_units << " for 35 Hz";
  return {trip && rule, detail.str()};
}

const std::vector<std::function<Outcome()>> kCriteria{
    mie_equivalence,      cylinder_spectrum,    pair_rate_reproduction, polarization_map,
    off_axis_emission,    detection_round_trip, statistical_nulls,      stated_limits};

bool run(int n) {
  Outcome o;
  try {
    o = kCriteria[static_cast<std::size_t>(n - 1)]();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  std::printf("criterion %d %s %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const int count = static_cast<int>(kCriteria.size());
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <1-%d|all>\n", count);
    return 2;
  }
  const std::string arg = argv[1];
  if (arg == "all") {
    bool ok = true;
    for (int n = 1; n <= count; ++n) ok = run(n) && ok;
    return ok ? 0 : 1;
  }
  const int n = std::atoi(arg.c_str());
  if (n < 1 || n > count) {
    std::fprintf(stderr, "unknown criterion '%s'\n", arg.c_str());
    return 2;
  }
  return run(n) ? 0 : 1;
}
