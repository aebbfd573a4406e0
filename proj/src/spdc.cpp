#include "nanopair/spdc.hpp"

#include <cmath>

#include "nanopair/error.hpp"
#include "nanopair/types.hpp"

namespace nanopair::spdc {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive");
}

}  // namespace

void check_energy_conservation(double pump_nm, double signal_nm, double idler_nm) {
  require_positive(pump_nm, "pump wavelength");
  require_positive(signal_nm, "signal wavelength");
  require_positive(idler_nm, "idler wavelength");
  const double mismatch = std::abs(1.0 / signal_nm + 1.0 / idler_nm - 1.0 / pump_nm) * pump_nm;
  if (mismatch > 1e-6) {
    throw ValidationError("energy conservation violated: 1/λs + 1/λi differs from 1/λp by " +
                          std::to_string(mismatch) + " relative (signal " + std::to_string(signal_nm) +
                          " nm, idler " + std::to_string(idler_nm) + " nm, pump " +
                          std::to_string(pump_nm) + " nm)");
  }
}

double pair_rate(double xi_m4_per_w, double pump_nm, double signal_nm, double idler_nm,
                 double bandwidth_nm, double pump_intensity_w_per_m2) {
  check_energy_conservation(pump_nm, signal_nm, idler_nm);
  require_positive(bandwidth_nm, "bandwidth");
  if (!(xi_m4_per_w >= 0.0)) throw ValidationError("SFG efficiency must be non-negative");
  if (!(pump_intensity_w_per_m2 >= 0.0)) throw ValidationError("pump intensity must be non-negative");
  const double lp = pump_nm * 1e-9, ls = signal_nm * 1e-9, li = idler_nm * 1e-9;
  const double spectral = std::pow(lp, 4) / (std::pow(ls, 3) * std::pow(li, 3));
  const double modes = si::kSpeedOfLight * bandwidth_nm * 1e-9 / (ls * ls);
  return pump_intensity_w_per_m2 * 2.0 * kPi * xi_m4_per_w * spectral * modes;
}

EmissionMap emission_map(const sfg::FarFieldMap& far) {
  EmissionMap map;
  map.grid = far.grid;
  map.values.resize(far.values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < far.values.size(); ++i) {
    map.values[i] = far.values[i].squaredNorm();
    total += map.values[i];
  }
  if (total > 0.0)
    for (double& v : map.values) v /= total;
  return map;
}

std::string describe(Normalization rule) {
  switch (rule) {
    case Normalization::PowerLength:
      return "pair_rate / (pump_power * length)";
    case Normalization::Power:
      return "pair_rate / pump_power";
  }
  return {};
}

Normalization normalization_from_string(const std::string& name) {
  if (name == "power_length") return Normalization::PowerLength;
  if (name == "power") return Normalization::Power;
  throw ValidationError("unknown normalization '" + name + "' (expected power_length or power)");
}

double normalized_rate(double rate_hz, double pump_power_w, double length_m, Normalization rule) {
  if (!(rate_hz >= 0.0)) throw ValidationError("rate must be non-negative");
  require_positive(pump_power_w, "pump power");
  if (rule == Normalization::Power) return rate_hz / pump_power_w;
  require_positive(length_m, "normalization length");
  return rate_hz / (pump_power_w * length_m);
}

SpdcPrediction predict(const SpdcInputs& in) {
  require_positive(in.pump_power_w, "pump power");
  require_positive(in.pump_waist_nm, "pump waist");
  SpdcPrediction out;
  out.inputs = in;
  out.pump_area_m2 = sfg::spot_area_m2(in.pump_waist_nm);
  out.pump_intensity_w_per_m2 = in.pump_power_w / out.pump_area_m2;
  out.pair_rate_hz = pair_rate(in.xi_m4_per_w, in.pump_nm, in.signal_nm, in.idler_nm, in.bandwidth_nm,
                               out.pump_intensity_w_per_m2);
  out.normalized_rate = normalized_rate(out.pair_rate_hz, in.pump_power_w, in.length_nm * 1e-9, in.normalization);
  out.normalized_units = in.normalization == Normalization::Power ? "Hz/W" : "Hz/(W*m)";
  out.normalization_rule = describe(in.normalization);
  return out;
}

}  // namespace nanopair::spdc
