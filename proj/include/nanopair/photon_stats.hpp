#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

namespace nanopair::photon_stats {

struct ThermalBackground {
  double pair_rate_hz = 250.0;  // emitted; detected through the same losses as SPDC pairs
  double sigma_ns = 0.85;       // Gaussian spread of the pair time difference
};

/// Two-detector coincidence experiment behind a beam splitter.
struct ExperimentConfig {
  double pair_rate_hz = 35.0;
  double eta_arm = 0.02;       // collection × filters × fibre × detector, per photon
  double split = 0.5;          // probability of routing to detector 1
  double dark_rate_hz = 5.0;   // per detector
  double delay_ns = 26.5;      // added to every detector-2 time
  std::int64_t bin_width_ps = 162;
  int bins = 300;
  double duration_s = 86400.0;
  ThermalBackground thermal;
  double jitter_ps = 50.0;        // Gaussian spread of the SPDC pair time difference
  double dead_time_ns = 10000.0;  // per detector, non-paralyzable
  std::uint64_t seed = 1;

  /// Throws ValidationError on negative rates, η or split outside [0, 1],
  /// bins < 1, non-positive bin width or duration.
  void validate() const;
};

struct TimeTagStream {
  int channel = 0;
  std::vector<std::uint64_t> times_ps;  // sorted ascending

  std::size_t size() const noexcept { return times_ps.size(); }
};

/// Event-driven Monte Carlo of both detector streams; identical seeds give
/// identical streams.
std::pair<TimeTagStream, TimeTagStream> simulate_timetags(const ExperimentConfig& config);

/// Start events of stream 1 taken from [begin_ps, end_ps).
struct TimeSlice {
  std::uint64_t begin_ps = 0;
  std::uint64_t end_ps = std::numeric_limits<std::uint64_t>::max();
};

struct CoincidenceHistogram {
  std::vector<std::uint64_t> counts;
  std::int64_t bin_width_ps = 0;
  std::int64_t offset_ps = 0;  // delay of the left edge of bin 0
  std::uint64_t singles1 = 0;
  std::uint64_t singles2 = 0;
  double duration_s = 0.0;

  int bins() const noexcept { return static_cast<int>(counts.size()); }
  std::uint64_t total() const;
  /// Left edge of bin b in ps of t₂ − t₁.
  std::int64_t delay_ps(int b) const { return offset_ps + b * bin_width_ps; }
};

/// Histogram of t₂ − t₁ − offset over [0, bins·τ_c) by a sorted two-pointer
/// sweep, counting every pair in the window. Only stream-1 events inside
/// `slice` start a search, and singles are counted inside the slice too, so
/// histograms of disjoint slices merge to the full-stream histogram.
/// Throws ValidationError for unsorted streams or a non-positive bin width.
CoincidenceHistogram correlate(const TimeTagStream& s1, const TimeTagStream& s2,
                               std::int64_t bin_width_ps, int bins, std::int64_t offset_ps = 0,
                               double duration_s = 0.0, TimeSlice slice = {});

/// Bin-wise sum; binning must match.
CoincidenceHistogram merge(const CoincidenceHistogram& a, const CoincidenceHistogram& b);

/// g²[b] = counts[b] T / (N₁ N₂ τ_c). Throws ValidationError for zero
/// singles or duration.
std::vector<double> g2(const CoincidenceHistogram& h);

/// Inclusive bin range.
struct BinRange {
  int lo = 0;
  int hi = -1;

  bool contains(int b) const noexcept { return b >= lo && b <= hi; }
  int width() const noexcept { return hi - lo + 1; }
};

/// Peak bin ±half_width, clipped to the histogram.
BinRange peak_window(const CoincidenceHistogram& h, int peak_bin, int half_width = 1);

/// Bin containing a given delay (floor), or -1 outside the histogram.
int bin_of_delay(const CoincidenceHistogram& h, double delay_ns);

struct Significance {
  int peak_bin = -1;
  std::uint64_t peak_counts = 0;
  double background = 0.0;  // μ per bin
  double z = 0.0;
  double p_value = 1.0;     // P(X >= peak | μ)
  int background_bins = 0;
};

/// Highest bin inside `exclude` against the per-bin background of all other
/// bins: the median, or the mean if the median is zero, floored at 1/n_bg.
/// Throws ValidationError with fewer than 20 background bins.
Significance peak_significance(const CoincidenceHistogram& h, BinRange exclude);

struct ThermalFit {
  double center_ps = 0.0;  // in t₂ − t₁
  double sigma_ps = 0.0;
  double amplitude = 0.0;  // counts per bin at the centre
  double baseline = 0.0;   // counts per bin
  double residual = 0.0;   // RMS over fitted bins
  /// Covariance of (center_ps, ln sigma_ps, amplitude, baseline) under
  /// Poisson bin noise.
  std::array<std::array<double, 4>, 4> covariance{};
  double fwhm_ns() const { return 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma_ps * 1e-3; }
  /// Expected counts in bin b from the fitted model.
  double expected(const CoincidenceHistogram& h, int b) const;
  /// Expected counts summed over `range`, and the variance of that sum from
  /// the parameter covariance.
  std::pair<double, double> expected_sum(const CoincidenceHistogram& h, BinRange range) const;
};

/// Least-squares Gaussian + baseline over all bins outside `exclude`.
/// Throws FitError (with the residual) if the fit does not converge.
ThermalFit fit_thermal(const CoincidenceHistogram& h, BinRange exclude = {});

struct Losses {
  double eta_arm = 0.02;
  double split = 0.5;
};

struct RateEstimate {
  double rate_hz = 0.0;
  double ci_low_hz = 0.0;
  double ci_high_hz = 0.0;
  bool upper_limit = false;  // true: rate_hz is zero and ci_high_hz a 95% upper bound
  double window_counts = 0.0;
  double background_counts = 0.0;
  double background_sigma = 0.0;  // uncertainty of background_counts
  double excess_counts = 0.0;
};

/// Generated pair rate from the excess counts in `window`:
///   R = (N − B) / T / (η² · 2 s (1 − s))
/// B comes from the thermal fit when `thermal` is given, else from the
/// median background. The 95% interval uses Var = N + σ_B², with σ_B from
/// the fit covariance or the spread of the background bins.
RateEstimate invert_rate(const CoincidenceHistogram& h, const Losses& losses, BinRange window,
                         const ThermalFit* thermal = nullptr);

/// Expected SPDC coincidences over the run, R T η² 2 s (1 − s).
double expected_peak_counts(const ExperimentConfig& config);

// Time-tag files.

/// Binary: magic "TTG1", then records of (u8 channel, u64 little-endian ps).
/// Times must be nondecreasing per channel.
void write_timetags_binary(std::ostream& out, const std::vector<TimeTagStream>& streams);
/// CSV with header `channel,time_ps`.
void write_timetags_csv(std::ostream& out, const std::vector<TimeTagStream>& streams);

/// Returns one stream per channel seen, ordered by channel id. Throws
/// ParseError carrying the byte offset of the offending record.
std::vector<TimeTagStream> read_timetags_binary(std::istream& in);
std::vector<TimeTagStream> read_timetags_csv(std::istream& in);
/// Picks the format from the leading magic.
std::vector<TimeTagStream> read_timetags(const std::filesystem::path& path);

/// CSV `bin_index,delay_ps,counts`.
void write_histogram_csv(std::ostream& out, const CoincidenceHistogram& h);

}  // namespace nanopair::photon_stats
