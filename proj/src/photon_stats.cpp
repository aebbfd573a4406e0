#include "nanopair/photon_stats.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>

#include <boost/math/special_functions/gamma.hpp>
#include <Eigen/Core>

#include "levmar.hpp"
#include "nanopair/error.hpp"
#include "nanopair/types.hpp"

namespace nanopair::photon_stats {

namespace {

constexpr double kPsPerSecond = 1e12;

void require_rate(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string(name) + " must be a finite non-negative number");
  }
}

void require_sorted(const TimeTagStream& s, const char* name) {
  if (!std::is_sorted(s.times_ps.begin(), s.times_ps.end())) {
    throw ValidationError(std::string(name) + " is not sorted by time");
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// Background counts per bin outside `exclude`.
std::vector<double> background_bins(const CoincidenceHistogram& h, BinRange exclude) {
  std::vector<double> out;
  for (int b = 0; b < h.bins(); ++b) {
    if (!exclude.contains(b)) out.push_back(static_cast<double>(h.counts[static_cast<std::size_t>(b)]));
  }
  return out;
}

double robust_level(const std::vector<double>& bg) {
  double mu = median(bg);
  if (mu == 0.0 && !bg.empty()) {
    double s = 0.0;
    for (double v : bg) s += v;
    mu = s / static_cast<double>(bg.size());
  }
  return mu;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Drops events closer than dead_ps to the previous accepted event.
void apply_dead_time(std::vector<std::uint64_t>& t, std::uint64_t dead_ps) {
  if (dead_ps == 0 || t.empty()) return;
  std::size_t keep = 1;
  std::uint64_t last = t[0];
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] - last >= dead_ps) {
      t[keep++] = t[i];
      last = t[i];
    }
  }
  t.resize(keep);
}

}  // namespace

void ExperimentConfig::validate() const {
  require_rate(pair_rate_hz, "pair rate");
  require_rate(dark_rate_hz, "dark rate");
  require_rate(thermal.pair_rate_hz, "thermal pair rate");
  require_rate(jitter_ps, "jitter");
  require_rate(dead_time_ns, "dead time");
  if (!(eta_arm >= 0.0 && eta_arm <= 1.0)) throw ValidationError("eta_arm must lie in [0, 1]");
  if (!(split >= 0.0 && split <= 1.0)) throw ValidationError("splitter ratio must lie in [0, 1]");
  if (bins < 1) throw ValidationError("bins must be >= 1");
  if (bin_width_ps <= 0) throw ValidationError("bin width must be positive");
  if (!(duration_s > 0.0) || duration_s * kPsPerSecond > 9e18) {
    throw ValidationError("duration must be positive and below ~100 days");
  }
  if (!(thermal.sigma_ns > 0.0)) throw ValidationError("thermal sigma must be positive");
  if (!std::isfinite(delay_ns) || delay_ns < 0.0) throw ValidationError("delay must be >= 0");
}

std::pair<TimeTagStream, TimeTagStream> simulate_timetags(const ExperimentConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto horizon = static_cast<std::int64_t>(std::llround(config.duration_s * kPsPerSecond));
  const auto delay = static_cast<std::int64_t>(std::llround(config.delay_ns * 1e3));
  std::array<std::vector<std::uint64_t>, 2> events;

  auto record = [&](int detector, double t_ps) {
    auto ti = static_cast<std::int64_t>(std::llround(t_ps));
    if (detector == 1) ti += delay;
    if (ti >= 0 && ti < horizon) events[static_cast<std::size_t>(detector)].push_back(static_cast<std::uint64_t>(ti));
  };

  // Poisson arrivals of `rate` over the run; body(t_ps) per arrival.
  auto poisson = [&](double rate, auto&& body) {
    if (rate <= 0.0) return;
    std::exponential_distribution<double> gap(rate);
    for (double t = gap(rng); t < config.duration_s; t += gap(rng)) body(t * kPsPerSecond);
  };

  // Photon pairs, thinned to those with at least one detected photon:
  // outcomes (first only, second only, both) in proportion η(1−η), η(1−η), η².
  auto pairs = [&](double rate, double spread_ps) {
    const double eta = config.eta_arm;
    const double any = 1.0 - (1.0 - eta) * (1.0 - eta);
    if (any <= 0.0) return;
    const double p_single = eta * (1.0 - eta) / any;
    poisson(rate * any, [&](double t) {
      const double u = uniform(rng);
      const bool first = u < p_single || u >= 2.0 * p_single;
      const bool second = u >= p_single;
      const double offset = spread_ps > 0.0 ? spread_ps * gauss(rng) : 0.0;
      if (first) record(uniform(rng) < config.split ? 0 : 1, t);
      if (second) record(uniform(rng) < config.split ? 0 : 1, t + offset);
    });
  };

  pairs(config.pair_rate_hz, config.jitter_ps);
  pairs(config.thermal.pair_rate_hz, config.thermal.sigma_ns * 1e3);
  for (int d = 0; d < 2; ++d) poisson(config.dark_rate_hz, [&](double t) { record(d, t); });

  const auto dead = static_cast<std::uint64_t>(std::llround(config.dead_time_ns * 1e3));
  std::pair<TimeTagStream, TimeTagStream> out;
  out.first.channel = 1;
  out.second.channel = 2;
  for (int d = 0; d < 2; ++d) {
    auto& t = events[static_cast<std::size_t>(d)];
    std::sort(t.begin(), t.end());
    apply_dead_time(t, dead);
  }
  out.first.times_ps = std::move(events[0]);
  out.second.times_ps = std::move(events[1]);
  return out;
}

std::uint64_t CoincidenceHistogram::total() const {
  std::uint64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

CoincidenceHistogram correlate(const TimeTagStream& s1, const TimeTagStream& s2,
                               std::int64_t bin_width_ps, int bins, std::int64_t offset_ps,
                               double duration_s, TimeSlice slice) {
  if (bin_width_ps <= 0) throw ValidationError("bin width must be positive");
  if (bins < 1) throw ValidationError("bins must be >= 1");
  require_sorted(s1, "stream 1");
  require_sorted(s2, "stream 2");

  CoincidenceHistogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  h.bin_width_ps = bin_width_ps;
  h.offset_ps = offset_ps;
  h.duration_s = duration_s;
  const std::int64_t span = bin_width_ps * bins;

  const auto& a = s1.times_ps;
  const auto& b = s2.times_ps;
  const auto first = std::lower_bound(a.begin(), a.end(), slice.begin_ps);
  const auto last = std::lower_bound(first, a.end(), slice.end_ps);
  h.singles1 = static_cast<std::uint64_t>(last - first);
  h.singles2 = static_cast<std::uint64_t>(
      std::lower_bound(b.begin(), b.end(), slice.end_ps) -
      std::lower_bound(b.begin(), b.end(), slice.begin_ps));

  std::size_t lo = 0;
  for (auto it = first; it != last; ++it) {
    const std::int64_t start = static_cast<std::int64_t>(*it) + offset_ps;
    while (lo < b.size() && static_cast<std::int64_t>(b[lo]) < start) ++lo;
    for (std::size_t j = lo; j < b.size(); ++j) {
      const std::int64_t d = static_cast<std::int64_t>(b[j]) - start;
      if (d >= span) break;
      ++h.counts[static_cast<std::size_t>(d / bin_width_ps)];
    }
  }
  return h;
}

CoincidenceHistogram merge(const CoincidenceHistogram& a, const CoincidenceHistogram& b) {
  if (a.counts.size() != b.counts.size() || a.bin_width_ps != b.bin_width_ps ||
      a.offset_ps != b.offset_ps) {
    throw ValidationError("cannot merge histograms with different binning");
  }
  CoincidenceHistogram out = a;
  for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] += b.counts[i];
  out.singles1 += b.singles1;
  out.singles2 += b.singles2;
  out.duration_s += b.duration_s;
  return out;
}

std::vector<double> g2(const CoincidenceHistogram& h) {
  if (h.singles1 == 0 || h.singles2 == 0) throw ValidationError("g2 needs non-zero singles on both channels");
  if (!(h.duration_s > 0.0)) throw ValidationError("g2 needs a positive duration");
  const double tau_s = static_cast<double>(h.bin_width_ps) / kPsPerSecond;
  const double accidental = static_cast<double>(h.singles1) * static_cast<double>(h.singles2) *
                            tau_s / h.duration_s;
  std::vector<double> out(h.counts.size());
  for (std::size_t b = 0; b < out.size(); ++b) out[b] = static_cast<double>(h.counts[b]) / accidental;
  return out;
}

BinRange peak_window(const CoincidenceHistogram& h, int peak_bin, int half_width) {
  if (peak_bin < 0 || peak_bin >= h.bins()) throw ValidationError("peak bin outside the histogram");
  if (half_width < 0) throw ValidationError("window half width must be >= 0");
  return {std::max(0, peak_bin - half_width), std::min(h.bins() - 1, peak_bin + half_width)};
}

int bin_of_delay(const CoincidenceHistogram& h, double delay_ns) {
  const double rel = delay_ns * 1e3 - static_cast<double>(h.offset_ps);
  if (rel < 0.0) return -1;
  const auto b = static_cast<long long>(std::floor(rel / static_cast<double>(h.bin_width_ps)));
  return b < h.bins() ? static_cast<int>(b) : -1;
}

Significance peak_significance(const CoincidenceHistogram& h, BinRange exclude) {
  const int lo = std::max(exclude.lo, 0), hi = std::min(exclude.hi, h.bins() - 1);
  if (lo > hi) throw ValidationError("peak range does not overlap the histogram");
  const auto bg = background_bins(h, {lo, hi});
  if (bg.size() < 20) {
    throw ValidationError("peak significance needs >= 20 background bins, got " +
                          std::to_string(bg.size()));
  }
  Significance s;
  s.background_bins = static_cast<int>(bg.size());
  s.peak_bin = lo;
  for (int b = lo; b <= hi; ++b) {
    if (h.counts[static_cast<std::size_t>(b)] > h.counts[static_cast<std::size_t>(s.peak_bin)]) s.peak_bin = b;
  }
  s.peak_counts = h.counts[static_cast<std::size_t>(s.peak_bin)];
  s.background = std::max(robust_level(bg), 1.0 / static_cast<double>(bg.size()));
  const double k = static_cast<double>(s.peak_counts);
  s.z = (k - s.background) / std::sqrt(s.background);
  // P(X >= k) for Poisson(μ) is the regularized lower incomplete gamma P(k, μ).
  s.p_value = s.peak_counts == 0 ? 1.0 : boost::math::gamma_p(k, s.background);
  return s;
}

double ThermalFit::expected(const CoincidenceHistogram& h, int b) const {
  const double lo = static_cast<double>(h.delay_ps(b));
  const double hi = lo + static_cast<double>(h.bin_width_ps);
  const double tau = static_cast<double>(h.bin_width_ps);
  const double mass = normal_cdf((hi - center_ps) / sigma_ps) - normal_cdf((lo - center_ps) / sigma_ps);
  return baseline + amplitude * sigma_ps * std::sqrt(2.0 * kPi) / tau * mass;
}

std::pair<double, double> ThermalFit::expected_sum(const CoincidenceHistogram& h,
                                                   BinRange range) const {
  auto sum = [&](const ThermalFit& f) {
    double total = 0.0;
    for (int b = std::max(range.lo, 0); b <= std::min(range.hi, h.bins() - 1); ++b) total += f.expected(h, b);
    return total;
  };
  const double value = sum(*this);
  std::array<double, 4> grad{};
  for (int j = 0; j < 4; ++j) {
    ThermalFit up = *this, down = *this;
    double step = 0.0;
    switch (j) {
      case 0:
        step = 1e-4 * sigma_ps;
        up.center_ps += step;
        down.center_ps -= step;
        break;
      case 1:
        step = 1e-4;
        up.sigma_ps *= std::exp(step);
        down.sigma_ps *= std::exp(-step);
        break;
      case 2:
        step = 1e-4 * std::max(std::abs(amplitude), 1.0);
        up.amplitude += step;
        down.amplitude -= step;
        break;
      default:
        step = 1e-4 * std::max(std::abs(baseline), 1.0);
        up.baseline += step;
        down.baseline -= step;
        break;
    }
    grad[static_cast<std::size_t>(j)] = (sum(up) - sum(down)) / (2.0 * step);
  }
  double variance = 0.0;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) variance += grad[a] * covariance[a][b] * grad[b];
  return {value, std::max(variance, 0.0)};
}

ThermalFit fit_thermal(const CoincidenceHistogram& h, BinRange exclude) {
  std::vector<int> used;
  for (int b = 0; b < h.bins(); ++b)
    if (!exclude.contains(b)) used.push_back(b);
  if (used.size() < 5) throw FitError("thermal fit needs at least 5 bins outside the peak");

  std::vector<double> y;
  for (int b : used) y.push_back(static_cast<double>(h.counts[static_cast<std::size_t>(b)]));
  const double tau = static_cast<double>(h.bin_width_ps);
  auto centre = [&](int b) { return static_cast<double>(h.delay_ps(b)) + 0.5 * tau; };

  // Moments of the excess over the median seed the fit.
  const double base0 = median(y);
  double w = 0.0, m1 = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < used.size(); ++i) {
    const double e = std::max(y[i] - base0, 0.0);
    w += e;
    m1 += e * centre(used[i]);
    peak = std::max(peak, e);
  }
  const double span = tau * h.bins();
  double c0 = centre(h.bins() / 2), s0 = span / 10.0;
  if (w > 0.0) {
    c0 = m1 / w;
    double m2 = 0.0;
    for (std::size_t i = 0; i < used.size(); ++i) {
      const double e = std::max(y[i] - base0, 0.0);
      m2 += e * (centre(used[i]) - c0) * (centre(used[i]) - c0);
    }
    s0 = std::clamp(std::sqrt(m2 / w), tau, span / 4.0);
  }

  ThermalFit fit;
  auto unpack = [&](const Eigen::VectorXd& p) {
    fit.center_ps = p[0];
    fit.sigma_ps = std::exp(p[1]);
    fit.amplitude = p[2];
    fit.baseline = p[3];
  };
  Eigen::VectorXd p(4);
  p << c0, std::log(s0), peak, base0;
  auto residual = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    unpack(q);
    for (std::size_t i = 0; i < used.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] = fit.expected(h, used[i]) - y[i];
    }
  };
  const auto lm = detail::levenberg_marquardt(residual, p, static_cast<int>(used.size()), 2000);
  unpack(lm.params);
  fit.residual = std::sqrt(2.0 * lm.cost / static_cast<double>(used.size()));

  // Sandwich covariance of the unweighted fit with Poisson variance per bin.
  const auto m = static_cast<Eigen::Index>(used.size());
  Eigen::MatrixXd jac(m, 4);
  Eigen::VectorXd var(m), rp(m), rm(m);
  for (int j = 0; j < 4; ++j) {
    const double step = 1e-6 * std::max(std::abs(lm.params[j]), 1.0);
    Eigen::VectorXd q = lm.params;
    q[j] += step;
    residual(q, rp);
    q[j] -= 2.0 * step;
    residual(q, rm);
    jac.col(j) = (rp - rm) / (2.0 * step);
  }
  unpack(lm.params);
  for (Eigen::Index i = 0; i < m; ++i) var[i] = std::max(fit.expected(h, used[static_cast<std::size_t>(i)]), 0.0);
  const Eigen::MatrixXd bread =
      (jac.transpose() * jac).completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::MatrixXd cov = bread * (jac.transpose() * var.asDiagonal() * jac) * bread;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) fit.covariance[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = cov(a, b);
  if (!lm.converged || !std::isfinite(fit.center_ps) || !std::isfinite(fit.sigma_ps) ||
      !std::isfinite(fit.amplitude)) {
    std::ostringstream msg;
    msg << "thermal fit did not converge (RMS residual " << fit.residual << " counts)";
    throw FitError(msg.str());
  }
  return fit;
}

RateEstimate invert_rate(const CoincidenceHistogram& h, const Losses& losses, BinRange window,
                         const ThermalFit* thermal) {
  if (!(losses.eta_arm > 0.0 && losses.eta_arm <= 1.0)) throw ValidationError("eta_arm must lie in (0, 1]");
  if (!(losses.split > 0.0 && losses.split < 1.0)) throw ValidationError("splitter ratio must lie in (0, 1)");
  if (!(h.duration_s > 0.0)) throw ValidationError("histogram duration must be positive");
  const int lo = std::max(window.lo, 0), hi = std::min(window.hi, h.bins() - 1);
  if (lo > hi) throw ValidationError("rate window does not overlap the histogram");

  RateEstimate est;
  for (int b = lo; b <= hi; ++b) est.window_counts += static_cast<double>(h.counts[static_cast<std::size_t>(b)]);
  double var_b = 0.0;
  if (thermal) {
    std::tie(est.background_counts, var_b) = thermal->expected_sum(h, {lo, hi});
  } else {
    const auto bg = background_bins(h, {lo, hi});
    const double level = robust_level(bg);
    const double w = hi - lo + 1;
    est.background_counts = level * w;
    // Median of n Poisson bins: variance ≈ (π/2) μ / n per bin.
    if (!bg.empty()) var_b = w * w * 0.5 * kPi * level / static_cast<double>(bg.size());
  }
  est.background_sigma = std::sqrt(var_b);
  est.excess_counts = est.window_counts - est.background_counts;

  const double factor = h.duration_s * losses.eta_arm * losses.eta_arm * 2.0 * losses.split *
                        (1.0 - losses.split);
  if (est.excess_counts <= 0.0) {
    // Classical 95% upper limit on the source counts.
    const double n_up = boost::math::gamma_p_inv(est.window_counts + 1.0, 0.95);
    const double s_up = n_up - est.background_counts > 0.0 ? n_up - est.background_counts : n_up;
    est.upper_limit = true;
    est.rate_hz = 0.0;
    est.ci_low_hz = 0.0;
    est.ci_high_hz = s_up / factor;
    return est;
  }
  const double half = 1.959963984540054 * std::sqrt(est.window_counts + var_b);
  est.rate_hz = est.excess_counts / factor;
  est.ci_low_hz = std::max(0.0, est.excess_counts - half) / factor;
  est.ci_high_hz = (est.excess_counts + half) / factor;
  return est;
}

double expected_peak_counts(const ExperimentConfig& c) {
  return c.pair_rate_hz * c.duration_s * c.eta_arm * c.eta_arm * 2.0 * c.split * (1.0 - c.split);
}

namespace {

struct Record {
  std::uint64_t time;
  int channel;
};

std::vector<Record> interleave(const std::vector<TimeTagStream>& streams) {
  std::vector<Record> all;
  for (const auto& s : streams) {
    if (s.channel < 0 || s.channel > 255) throw ValidationError("channel ids must fit in one byte");
    require_sorted(s, "time-tag stream");
    for (auto t : s.times_ps) all.push_back({t, s.channel});
  }
  std::stable_sort(all.begin(), all.end(), [](const Record& a, const Record& b) { return a.time < b.time; });
  return all;
}

std::vector<TimeTagStream> collect(std::map<int, std::vector<std::uint64_t>>&& by_channel) {
  std::vector<TimeTagStream> out;
  for (auto& [ch, t] : by_channel) out.push_back({ch, std::move(t)});
  return out;
}

}  // namespace

void write_timetags_binary(std::ostream& out, const std::vector<TimeTagStream>& streams) {
  out.write("TTG1", 4);
  for (const auto& r : interleave(streams)) {
    std::array<char, 9> buf{};
    buf[0] = static_cast<char>(static_cast<unsigned char>(r.channel));
    for (int i = 0; i < 8; ++i) buf[static_cast<std::size_t>(1 + i)] = static_cast<char>((r.time >> (8 * i)) & 0xff);
    out.write(buf.data(), 9);
  }
}

void write_timetags_csv(std::ostream& out, const std::vector<TimeTagStream>& streams) {
  out << "channel,time_ps\n";
  for (const auto& r : interleave(streams)) out << r.channel << ',' << r.time << '\n';
}

std::vector<TimeTagStream> read_timetags_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (in.gcount() != 4 || std::string(magic.data(), 4) != "TTG1") {
    throw ParseError("time-tag file: missing TTG1 magic", 0);
  }
  std::map<int, std::vector<std::uint64_t>> by_channel;
  std::size_t offset = 4;
  std::array<unsigned char, 9> rec{};
  while (true) {
    in.read(reinterpret_cast<char*>(rec.data()), 9);
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    if (got < 9) {
      throw ParseError("time-tag file: truncated record at byte " + std::to_string(offset), offset);
    }
    std::uint64_t t = 0;
    for (int i = 0; i < 8; ++i) t |= static_cast<std::uint64_t>(rec[static_cast<std::size_t>(1 + i)]) << (8 * i);
    auto& v = by_channel[rec[0]];
    if (!v.empty() && t < v.back()) {
      throw ParseError("time-tag file: time decreases on channel " + std::to_string(rec[0]) +
                           " at byte " + std::to_string(offset),
                       offset);
    }
    v.push_back(t);
    offset += 9;
  }
  return collect(std::move(by_channel));
}

std::vector<TimeTagStream> read_timetags_csv(std::istream& in) {
  std::map<int, std::vector<std::uint64_t>> by_channel;
  std::string line;
  std::size_t offset = 0;
  bool header = true;
  while (std::getline(in, line)) {
    const std::size_t here = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line == "channel,time_ps") continue;
    }
    const auto comma = line.find(',');
    int ch = -1;
    std::uint64_t t = 0;
    const char* end = line.data() + line.size();
    bool ok = comma != std::string::npos;
    if (ok) {
      auto r1 = std::from_chars(line.data(), line.data() + comma, ch);
      auto r2 = std::from_chars(line.data() + comma + 1, end, t);
      ok = r1.ec == std::errc() && r1.ptr == line.data() + comma && r2.ec == std::errc() &&
           r2.ptr == end && ch >= 0 && ch <= 255;
    }
    if (!ok) {
      throw ParseError("time-tag CSV: malformed record at byte " + std::to_string(here) + ": '" +
                           line + "'",
                       here);
    }
    auto& v = by_channel[ch];
    if (!v.empty() && t < v.back()) {
      throw ParseError("time-tag CSV: time decreases on channel " + std::to_string(ch) +
                           " at byte " + std::to_string(here),
                       here);
    }
    v.push_back(t);
  }
  return collect(std::move(by_channel));
}

std::vector<TimeTagStream> read_timetags(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open time-tag file " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  const bool binary = in.gcount() == 4 && std::string(magic.data(), 4) == "TTG1";
  in.clear();
  in.seekg(0);
  return binary ? read_timetags_binary(in) : read_timetags_csv(in);
}

void write_histogram_csv(std::ostream& out, const CoincidenceHistogram& h) {
  out << "bin_index,delay_ps,counts\n";
  for (int b = 0; b < h.bins(); ++b) {
    out << b << ',' << h.delay_ps(b) << ',' << h.counts[static_cast<std::size_t>(b)] << '\n';
  }
}

}  // namespace nanopair::photon_stats
