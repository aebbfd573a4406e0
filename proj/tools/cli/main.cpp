// nanopair: command-line front end.
//
//   nanopair spectrum    [--config F] [--out D] [--threads N] [--set s.k=v]...
//   nanopair sfg         ...
//   nanopair spdc        ...
//   nanopair coincidence ... [--seed S]
//   nanopair analyze     ... FILE [FILE]
//
// Exit codes: 0 success, 2 usage or config error, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "nanopair/cda.hpp"
#include "nanopair/error.hpp"
#include "nanopair/materials.hpp"
#include "nanopair/multipole.hpp"
#include "nanopair/photon_stats.hpp"
#include "nanopair/sfg.hpp"
#include "nanopair/spdc.hpp"

namespace fs = std::filesystem;
using namespace nanopair;
using cli::get;
using cli::json;
using cli::UsageError;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Context {
  json config;
  fs::path out_dir;
};

// One-line config echo for text outputs.
std::string config_line(const Context& ctx) { return "config " + ctx.config.dump(); }

std::ofstream open_output(const Context& ctx, const std::string& name, bool binary = false) {
  fs::create_directories(ctx.out_dir);
  const auto path = ctx.out_dir / name;
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

void write_json(const Context& ctx, const std::string& name, json body) {
  body["config"] = ctx.config;
  body["seed"] = ctx.config["detection"]["seed"];
  auto out = open_output(ctx, name);
  out << body.dump(2) << '\n';
}

// Non-finite values become null so every report stays valid JSON.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

cda::Geometry make_geometry(const json& c) {
  const auto shape = get<std::string>(c, "geometry", "shape");
  if (shape == "cylinder") {
    const double d = get<double>(c, "geometry", "diameter_nm");
    const double h = get<double>(c, "geometry", "height_nm");
    if (!(d > 0.0) || !(h > 0.0)) throw UsageError("cylinder dimensions must be positive");
    return cda::Geometry::cylinder(d, h);
  }
  if (shape == "sphere") {
    const double r = get<double>(c, "geometry", "radius_nm");
    if (!(r > 0.0)) throw UsageError("sphere radius must be positive");
    return cda::Geometry::sphere(r);
  }
  throw UsageError("geometry.shape must be 'cylinder' or 'sphere', got '" + shape + "'");
}

materials::DispersionModel make_dispersion(const json& c) {
  const json& m = c.at("materials");
  if (!m.at("constant_index").is_null()) {
    const auto v = get<std::vector<double>>(c, "materials", "constant_index");
    if (v.size() != 2) throw UsageError("materials.constant_index expects [n, k]");
    return materials::constant_index("constant", {v[0], v[1]});
  }
  if (!m.at("table").is_null()) return materials::load_dispersion_table(get<std::string>(c, "materials", "table"));
  return materials::algaas_x018();
}

materials::Chi2Tensor make_chi2(const json& c) {
  const double deg = get<double>(c, "materials", "crystal_rotation_z_deg");
  const double t = deg * kPi / 180.0;
  Mat3 r;
  r << std::cos(t), -std::sin(t), 0.0, std::sin(t), std::cos(t), 0.0, 0.0, 0.0, 1.0;
  return materials::chi2_tensor(get<double>(c, "materials", "d14_pm_per_v"), r);
}

cda::KrylovMethod parse_method(const std::string& name) {
  if (name == "cocg") return cda::KrylovMethod::Cocg;
  if (name == "gmres") return cda::KrylovMethod::Gmres;
  if (name == "bicgstab") return cda::KrylovMethod::Bicgstab;
  throw UsageError("solver method must be cocg, gmres or bicgstab, got '" + name + "'");
}

cda::SolverOptions make_solver(const json& c) {
  cda::SolverOptions s;
  s.tolerance = get<double>(c, "solver", "tolerance");
  s.max_iterations = get<int>(c, "solver", "max_iterations");
  s.restart = get<int>(c, "solver", "restart");
  s.method = parse_method(get<std::string>(c, "solver", "method"));
  const auto backend = get<std::string>(c, "solver", "backend");
  if (backend == "auto") s.backend = cda::GreenBackend::Auto;
  else if (backend == "direct") s.backend = cda::GreenBackend::Direct;
  else if (backend == "fft") s.backend = cda::GreenBackend::Fft;
  else throw UsageError("solver.backend must be auto, direct or fft");
  if (!(s.tolerance > 0.0) || s.max_iterations < 1 || s.restart < 1) {
    throw UsageError("solver tolerance, max_iterations and restart must be positive");
  }
  return s;
}

unsigned threads_of(const json& c) {
  const int t = get<int>(c, "solver", "threads");
  if (t < 0) throw UsageError("solver.threads must be >= 0");
  return static_cast<unsigned>(t);
}

std::vector<double> grid(const json& c, const char* window_key, const char* step_key) {
  const auto w = get<std::vector<double>>(c, "solver", window_key);
  const double step = get<double>(c, "solver", step_key);
  if (w.size() != 2) throw UsageError(std::string("solver.") + window_key + " expects [lo, hi]");
  std::vector<double> out;
  if (step <= 0.0) return out;
  const auto n = static_cast<long>(std::floor((w[1] - w[0]) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(w[0] + static_cast<double>(i) * step);
  return out;
}

json fit_report(const cda::ScatteringSpectrum& sp, double lo, double hi) {
  json out;
  const std::pair<const char*, multipole::Channel> channels[] = {
      {"total", multipole::Channel::Total}, {"ED", multipole::Channel::ED}, {"MD", multipole::Channel::MD}};
  for (const auto& [name, channel] : channels) {
    try {
      const auto f = multipole::fit_resonance(sp, channel, lo, hi);
      out[name] = {{"lambda0_nm", f.lambda0_nm}, {"fwhm_nm", f.fwhm_nm}, {"q", f.q},
                   {"amplitude", f.amplitude}, {"baseline", f.baseline}, {"residual", f.residual}};
    } catch (const FitError& e) {
      out[name] = {{"error", e.what()}};
    }
  }
  // Dominant dipole channel at the entry nearest the Q_sca maximum.
  const cda::SpectrumEntry* peak = nullptr;
  for (const auto& e : sp.entries)
    if (e.wavelength_nm >= lo && e.wavelength_nm <= hi && (!peak || e.q_sca > peak->q_sca)) peak = &e;
  if (peak) {
    out["peak_lambda_nm"] = peak->wavelength_nm;
    out["peak_q_sca"] = peak->q_sca;
    out["dominant"] = peak->partials.at("ED") >= peak->partials.at("MD") ? "ED" : "MD";
  }
  return out;
}

int cmd_spectrum(const Context& ctx) {
  const json& c = ctx.config;
  const auto geometry = make_geometry(c);
  const auto dispersion = make_dispersion(c);

  cda::SpectrumOptions base;
  base.solver = make_solver(c);
  base.threads = threads_of(c);
  base.background_index = get<double>(c, "materials", "background_index");
  base.volume_match = get<bool>(c, "solver", "volume_match") ? cda::VolumeMatch::On : cda::VolumeMatch::Off;
  base.spacing_nm = get<double>(c, "solver", "spacing_nm");
  base.polarization = PolarizationState::from_label(get<std::string>(c, "solver", "polarization"));
  const auto excitation = get<std::string>(c, "solver", "excitation");
  if (excitation == "gaussian") base.excitation = cda::GaussianBeam{get<double>(c, "sfg", "waist_nm")};
  else if (excitation != "plane") throw UsageError("solver.excitation must be plane or gaussian");

  cda::ScatteringSpectrum spectrum;
  auto run = [&](const std::vector<double>& wl, const cda::SpectrumOptions& opt) {
    const auto part = cda::scattering_spectrum(geometry, wl, dispersion, opt);
    spectrum.entries.insert(spectrum.entries.end(), part.entries.begin(), part.entries.end());
  };

  const auto ir_window = get<std::vector<double>>(c, "solver", "ir_window_nm");
  const auto pump_window = get<std::vector<double>>(c, "solver", "pump_window_nm");
  if (!c["solver"]["wavelengths_nm"].is_null()) {
    const auto wl = get<std::vector<double>>(c, "solver", "wavelengths_nm");
    if (wl.empty()) throw UsageError("solver.wavelengths_nm is empty");
    run(wl, base);
  } else {
    const auto ir = grid(c, "ir_window_nm", "ir_step_nm");
    const auto pump = grid(c, "pump_window_nm", "pump_step_nm");
    if (ir.empty() && pump.empty()) throw UsageError("wavelength grid is empty");
    if (!pump.empty()) {
      auto opt = base;
      opt.solver.method = parse_method(get<std::string>(c, "solver", "pump_method"));
      if (const double a = get<double>(c, "solver", "pump_spacing_nm"); a > 0.0) opt.spacing_nm = a;
      run(pump, opt);
    }
    if (!ir.empty()) run(ir, base);
  }
  std::sort(spectrum.entries.begin(), spectrum.entries.end(),
            [](const auto& a, const auto& b) { return a.wavelength_nm < b.wavelength_nm; });

  {
    auto out = open_output(ctx, "spectrum.csv");
    out << "# " << config_line(ctx) << '\n';
    cda::write_spectrum_csv(out, spectrum);
  }

  json report;
  json entries = json::array();
  for (const auto& e : spectrum.entries) entries.push_back({{"lambda_nm", e.wavelength_nm}, {"iterations", e.iterations}});
  report["solves"] = entries;
  report["fits"]["ir"] = fit_report(spectrum, ir_window.at(0), ir_window.at(1));
  report["fits"]["pump"] = fit_report(spectrum, pump_window.at(0), pump_window.at(1));

  // Oracle comparison for homogeneous spheres.
  if (std::holds_alternative<cda::Sphere>(geometry.shape())) {
    const double r = std::get<cda::Sphere>(geometry.shape()).radius_nm;
    const double nb = base.background_index;
    json mie = json::array();
    double worst = 0.0;
    for (const auto& e : spectrum.entries) {
      const auto m = cda::mie_reference(r, dispersion.index_at(e.wavelength_nm) / nb, e.wavelength_nm / nb);
      const double rel = std::abs(e.q_sca / m.q_sca - 1.0);
      worst = std::max(worst, rel);
      mie.push_back({{"lambda_nm", e.wavelength_nm}, {"q_sca", e.q_sca}, {"q_sca_mie", m.q_sca}, {"rel_error", rel}});
    }
    report["mie"] = {{"points", mie}, {"max_rel_error", worst}};
  }
  write_json(ctx, "spectrum_fits.json", report);
  std::cout << "spectrum: " << spectrum.entries.size() << " wavelengths -> " << ctx.out_dir.string() << '\n';
  return 0;
}

sfg::Analyzer analyzer_of(const json& c) {
  return sfg::analyzer_from_label(get<std::string>(c, "sfg", "analyzer"));
}

int cmd_sfg(const Context& ctx) {
  const json& c = ctx.config;
  const double na = get<double>(c, "sfg", "na");
  if (!(na > 0.0) || na > 1.0) throw UsageError("sfg.na must lie in (0, 1]");
  const int pixels = get<int>(c, "sfg", "pixels");
  if (pixels < 2) throw UsageError("sfg.pixels must be >= 2");
  const auto analyzer = analyzer_of(c);

  sfg::SfgSetup setup;
  setup.signal_nm = get<double>(c, "sfg", "signal_nm");
  setup.idler_nm = get<double>(c, "sfg", "idler_nm");
  setup.signal_power_w = get<double>(c, "sfg", "signal_power_w");
  setup.idler_power_w = get<double>(c, "sfg", "idler_power_w");
  setup.waist_nm = get<double>(c, "sfg", "waist_nm");
  setup.spacing_nm = get<double>(c, "solver", "spacing_nm");
  setup.solver = make_solver(c);
  setup.threads = threads_of(c);
  if (!(setup.signal_power_w > 0.0) || !(setup.idler_power_w > 0.0)) {
    throw UsageError("sfg input powers must be positive");
  }

  const sfg::SfgModel model(make_geometry(c), make_dispersion(c), make_chi2(c), setup);
  const auto map = sfg::sfg_map_16(model, analyzer, na, get<int>(c, "sfg", "n_theta"), get<int>(c, "sfg", "n_phi"));
  const std::vector<std::string> comments = {config_line(ctx)};
  {
    auto out = open_output(ctx, "sfg_map.csv");
    sfg::write_map_csv(out, map, true, comments);
  }

  const auto pupil = sfg::pupil_grid(na, pixels);
  const auto basis = model.basis_far_fields(pupil);
  json images = json::array();
  for (const char* s : sfg::kMapLabels)
    for (const char* i : sfg::kMapLabels) {
      const auto far = sfg::SfgModel::combine(basis, PolarizationState::from_label(s), PolarizationState::from_label(i));
      const auto img = sfg::bfp_image(far, na, analyzer);
      const std::string name = std::string("bfp_") + s + i + ".pgm";
      auto out = open_output(ctx, name);
      sfg::write_pgm(out, img, comments);
      const auto peak = std::max_element(img.intensity.begin(), img.intensity.end()) - img.intensity.begin();
      const int row = static_cast<int>(peak) / pixels, col = static_cast<int>(peak) % pixels;
      const double pitch = pupil.pixel_pitch();
      images.push_back({{"file", name}, {"signal", s}, {"idler", i},
                        {"peak_w_per_sr", img.intensity[static_cast<std::size_t>(peak)]},
                        {"peak_ux", -na + col * pitch}, {"peak_uy", na - row * pitch}});
    }

  // Efficiency of the strongest map entry from the full radiated power.
  int best_s = 0, best_i = 0;
  for (int s = 0; s < 4; ++s)
    for (int i = 0; i < 4; ++i)
      if (map.power_w[s][i] > map.power_w[best_s][best_i]) best_s = s, best_i = i;
  const auto ps = PolarizationState::from_label(sfg::kMapLabels[best_s]);
  const auto pi = PolarizationState::from_label(sfg::kMapLabels[best_i]);
  const auto nl = model.nonlinear_polarization(ps, pi);
  const double p_total = sfg::radiated_power(nl, setup.solver.backend);
  const auto cone = sfg::cone_quadrature(na, get<int>(c, "sfg", "n_theta"), get<int>(c, "sfg", "n_phi"));
  const auto far = sfg::far_field(nl, cone);
  const double area = sfg::spot_area_m2(setup.waist_nm);
  const auto eff = sfg::sfg_efficiency(p_total, setup.signal_power_w, setup.idler_power_w, area, area,
                                       sfg::integrated_power(far, sfg::Analyzer::H),
                                       sfg::integrated_power(far, sfg::Analyzer::V));

  const double range = get<double>(c, "sfg", "delay_range_fs");
  const double step = get<double>(c, "sfg", "delay_step_fs");
  if (!(step > 0.0) || range < 0.0) throw UsageError("sfg delay range must be >= 0 and step > 0");
  std::vector<double> delays;
  for (long k = -static_cast<long>(std::floor(range / step + 1e-9)); k * step <= range + 1e-9; ++k)
    delays.push_back(static_cast<double>(k) * step);
  const auto scan = sfg::delay_scan(get<double>(c, "sfg", "pulse_fwhm_fs"), delays);
  {
    auto out = open_output(ctx, "delay_scan.csv");
    out << "# " << config_line(ctx) << "\ndelay_fs,relative_sfg\n" << std::setprecision(10);
    for (std::size_t k = 0; k < delays.size(); ++k) out << delays[k] << ',' << scan[k] << '\n';
  }

  json report;
  report["sum_wavelength_nm"] = model.sum_wavelength_nm();
  report["sites"] = model.lattice()->size();
  report["spacing_nm"] = model.lattice()->spacing_nm;
  report["analyzer"] = sfg::to_string(analyzer);
  report["na"] = na;
  report["labels"] = sfg::kMapLabels;
  report["map_power_w"] = map.power_w;
  report["map_normalized"] = map.normalized;
  report["bfp"] = {{"pixels", pixels}, {"u_per_pixel", pupil.pixel_pitch()}, {"u_range", {-na, na}},
                   {"row0", "u_y = +na"}, {"images", images}};
  report["efficiency"] = {{"signal", sfg::kMapLabels[best_s]}, {"idler", sfg::kMapLabels[best_i]},
                          {"p_sf_total_w", eff.p_sf_w}, {"p_sf_collected_h_w", eff.p_sf_h_w},
                          {"p_sf_collected_v_w", eff.p_sf_v_w}, {"eta_per_w", eff.eta_per_w},
                          {"xi_m4_per_w", eff.xi_m4_per_w}, {"spot_area_m2", area}};
  write_json(ctx, "sfg.json", report);
  std::cout << "sfg: map and 16 images -> " << ctx.out_dir.string() << '\n';
  return 0;
}

int cmd_spdc(const Context& ctx) {
  const json& c = ctx.config;
  const double eta = get<double>(c, "spdc", "efficiency_per_w");
  const double spot = get<double>(c, "spdc", "spot_radius_nm");
  if (!(spot > 0.0)) throw UsageError("spdc.spot_radius_nm must be positive");
  const double area = sfg::spot_area_m2(spot);

  spdc::SpdcInputs in;
  in.xi_m4_per_w = eta * area * area;
  in.pump_nm = get<double>(c, "spdc", "pump_nm");
  in.signal_nm = get<double>(c, "spdc", "signal_nm");
  in.idler_nm = get<double>(c, "spdc", "idler_nm");
  in.bandwidth_nm = get<double>(c, "spdc", "bandwidth_nm");
  in.pump_power_w = get<double>(c, "spdc", "pump_power_w");
  in.pump_waist_nm = spot;
  in.length_nm = get<double>(c, "spdc", "length_nm");
  in.normalization = spdc::normalization_from_string(get<std::string>(c, "spdc", "normalization"));
  const auto p = spdc::predict(in);

  const double measured = get<double>(c, "detection", "pair_rate_hz");
  json report;
  report["pair_rate_hz"] = p.pair_rate_hz;
  report["xi_m4_per_w"] = in.xi_m4_per_w;
  report["efficiency_per_w"] = eta;
  report["spot_area_m2"] = area;
  report["pump"] = {{"wavelength_nm", in.pump_nm}, {"power_w", in.pump_power_w},
                    {"intensity_w_per_m2", p.pump_intensity_w_per_m2}, {"spot_area_m2", p.pump_area_m2}};
  report["signal_nm"] = in.signal_nm;
  report["idler_nm"] = in.idler_nm;
  report["bandwidth_nm"] = in.bandwidth_nm;
  report["normalized_rate"] = p.normalized_rate;
  report["normalized_units"] = p.normalized_units;
  report["normalization_rule"] = p.normalization_rule;
  report["normalization_length_m"] = in.length_nm * 1e-9;
  report["detection_rate_hz"] = measured;
  report["detection_rate_normalized"] =
      spdc::normalized_rate(measured, in.pump_power_w, in.length_nm * 1e-9, in.normalization);
  report["note"] =
      "normalized rates follow normalization_rule; the stored-energy normalization quoted as 1.4 GHz/(W*m) "
      "is not reproduced by this rule";
  write_json(ctx, "spdc.json", report);
  std::cout << "spdc: pair rate " << p.pair_rate_hz << " Hz -> " << ctx.out_dir.string() << '\n';
  return 0;
}

photon_stats::ExperimentConfig experiment_of(const json& c) {
  photon_stats::ExperimentConfig e;
  e.pair_rate_hz = get<double>(c, "detection", "pair_rate_hz");
  e.eta_arm = get<double>(c, "detection", "eta_arm");
  e.split = get<double>(c, "detection", "split");
  e.dark_rate_hz = get<double>(c, "detection", "dark_rate_hz");
  e.delay_ns = get<double>(c, "detection", "delay_ns");
  e.bin_width_ps = get<std::int64_t>(c, "detection", "bin_width_ps");
  e.bins = get<int>(c, "detection", "bins");
  e.duration_s = get<double>(c, "detection", "duration_s");
  e.thermal.pair_rate_hz = get<double>(c, "detection", "thermal_rate_hz");
  e.thermal.sigma_ns = get<double>(c, "detection", "thermal_sigma_ns");
  e.jitter_ps = get<double>(c, "detection", "jitter_ps");
  e.dead_time_ns = get<double>(c, "detection", "dead_time_ns");
  e.seed = get<std::uint64_t>(c, "detection", "seed");
  e.validate();
  return e;
}

json analyse(const Context& ctx, const photon_stats::TimeTagStream& s1, const photon_stats::TimeTagStream& s2) {
  namespace ps = photon_stats;
  const auto e = experiment_of(ctx.config);
  const int half = get<int>(ctx.config, "detection", "peak_half_width");
  if (half < 0) throw UsageError("detection.peak_half_width must be >= 0");
  const auto h = ps::correlate(s1, s2, e.bin_width_ps, e.bins, 0, e.duration_s);
  {
    auto out = open_output(ctx, "histogram.csv");
    out << "# " << config_line(ctx) << '\n';
    ps::write_histogram_csv(out, h);
  }

  json r;
  r["singles"] = {s1.size(), s2.size()};
  r["duration_s"] = e.duration_s;
  r["total_coincidences"] = h.total();
  const int expected_bin = ps::bin_of_delay(h, e.delay_ns);
  r["expected_peak_bin"] = expected_bin;

  int peak = expected_bin >= 0 ? expected_bin : 0;
  for (int b = 0; b < h.bins(); ++b)
    if (h.counts[static_cast<std::size_t>(b)] > h.counts[static_cast<std::size_t>(peak)]) peak = b;
  const auto window = ps::peak_window(h, peak, half);
  r["peak_window"] = {window.lo, window.hi};

  try {
    const auto g = ps::g2(h);
    r["g2_peak"] = number(g[static_cast<std::size_t>(peak)]);
  } catch (const ValidationError& err) {
    r["g2_peak"] = nullptr;
    r["g2_note"] = err.what();
  }

  try {
    const auto s = ps::peak_significance(h, window);
    r["peak_bin"] = s.peak_bin;
    r["peak_counts"] = s.peak_counts;
    r["background_per_bin"] = s.background;
    r["z"] = number(s.z);
    r["p_value"] = number(s.p_value);
  } catch (const ValidationError& err) {
    r["peak_bin"] = peak;
    r["significance_note"] = err.what();
  }

  std::optional<ps::ThermalFit> fit;
  try {
    fit = ps::fit_thermal(h, window);
    r["thermal_fit"] = {{"center_ns", fit->center_ps * 1e-3}, {"sigma_ns", fit->sigma_ps * 1e-3},
                        {"fwhm_ns", fit->fwhm_ns()}, {"amplitude", fit->amplitude},
                        {"baseline", fit->baseline}, {"residual", fit->residual}};
  } catch (const FitError& err) {
    r["thermal_fit"] = {{"error", err.what()}};
  }

  const auto rate = ps::invert_rate(h, {e.eta_arm, e.split}, window, fit ? &*fit : nullptr);
  r["inverted_rate_hz"] = rate.rate_hz;
  r["ci"] = {rate.ci_low_hz, rate.ci_high_hz};
  r["upper_limit"] = rate.upper_limit;
  r["window_counts"] = rate.window_counts;
  r["background_counts"] = rate.background_counts;
  r["background_sigma"] = rate.background_sigma;
  r["excess_counts"] = rate.excess_counts;
  r["background_model"] = fit ? "thermal_fit" : "median";
  return r;
}

int cmd_coincidence(const Context& ctx) {
  namespace ps = photon_stats;
  const auto e = experiment_of(ctx.config);
  const auto [s1, s2] = ps::simulate_timetags(e);
  const auto format = get<std::string>(ctx.config, "output", "timetags");
  if (format == "binary") {
    auto out = open_output(ctx, "timetags.ttg", true);
    ps::write_timetags_binary(out, {s1, s2});
  } else if (format == "csv") {
    auto out = open_output(ctx, "timetags.csv");
    ps::write_timetags_csv(out, {s1, s2});
  } else if (format != "none") {
    throw UsageError("output.timetags must be binary, csv or none");
  }
  json r = analyse(ctx, s1, s2);
  r["expected_peak_counts"] = ps::expected_peak_counts(e);
  write_json(ctx, "analysis.json", r);
  std::cout << "coincidence: rate " << r["inverted_rate_hz"].get<double>() << " Hz -> " << ctx.out_dir.string()
            << '\n';
  return 0;
}

int cmd_analyze(const Context& ctx, const std::vector<std::string>& files) {
  namespace ps = photon_stats;
  const auto ids = get<std::vector<int>>(ctx.config, "detection", "channels");
  if (ids.size() != 2) throw UsageError("detection.channels expects two channel ids");
  ps::TimeTagStream s1{ids[0], {}}, s2{ids[1], {}};
  for (const auto& f : files)
    for (auto& s : ps::read_timetags(f)) {
      auto& dst = s.channel == ids[0] ? s1 : s.channel == ids[1] ? s2 : s;
      if (&dst == &s) continue;
      if (!dst.times_ps.empty()) throw UsageError("channel " + std::to_string(s.channel) + " appears in more than one file");
      dst.times_ps = std::move(s.times_ps);
    }
  json r = analyse(ctx, s1, s2);
  r["inputs"] = files;
  write_json(ctx, "analysis.json", r);
  std::cout << "analyze: " << s1.size() << " + " << s2.size() << " events -> " << ctx.out_dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nanoantenna photon-pair source laboratory"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::vector<std::string> overrides, files;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "random seed (overrides detection.seed)");
    sub->add_option("--threads", threads, "worker cap (overrides solver.threads)")->check(CLI::NonNegativeNumber);
    sub->add_option("--set", overrides, "override, section.key=value")->take_all();
  };
  auto* spectrum = app.add_subcommand("spectrum", "scattering spectrum with multipole partials and resonance fits");
  auto* sfg_cmd = app.add_subcommand("sfg", "4x4 SFG polarization map and back-focal-plane images");
  auto* spdc_cmd = app.add_subcommand("spdc", "pair-rate prediction from the SFG efficiency");
  auto* coincidence = app.add_subcommand("coincidence", "simulate time tags and analyse coincidences");
  auto* analyze = app.add_subcommand("analyze", "analyse recorded time-tag files");
  for (auto* sub : {spectrum, sfg_cmd, spdc_cmd, coincidence, analyze}) common(sub);
  analyze->add_option("files", files, "time-tag files (TTG1 binary or CSV)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    Context ctx;
    auto all = overrides;
    if (seed) all.push_back("detection.seed=" + std::to_string(*seed));
    if (threads) all.push_back("solver.threads=" + std::to_string(*threads));
    ctx.config = cli::resolve_config(config_path, all);
    if (!out_dir.empty()) ctx.config["output"]["dir"] = out_dir;
    ctx.out_dir = get<std::string>(ctx.config, "output", "dir");

    if (*spectrum) return cmd_spectrum(ctx);
    if (*sfg_cmd) return cmd_sfg(ctx);
    if (*spdc_cmd) return cmd_spdc(ctx);
    if (*coincidence) return cmd_coincidence(ctx);
    return cmd_analyze(ctx, files);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const FitError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
