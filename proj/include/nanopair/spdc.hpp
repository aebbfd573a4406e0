#pragma once

#include <string>
#include <vector>

#include "nanopair/sfg.hpp"

namespace nanopair::spdc {

/// Throws ValidationError unless 1/λ_s + 1/λ_i = 1/λ_p to 1e-6 relative.
void check_energy_conservation(double pump_nm, double signal_nm, double idler_nm);

/// Pair generation rate from the SFG efficiency of the reversed process:
///   dN/dt = Φ_p · 2π Ξ · λ_p⁴/(λ_s³ λ_i³) · c Δλ/λ_s²
/// with Ξ in m⁴/W, Φ_p in W/m² and wavelengths in nm. Hz.
double pair_rate(double xi_m4_per_w, double pump_nm, double signal_nm, double idler_nm,
                 double bandwidth_nm, double pump_intensity_w_per_m2);

/// SPDC emission per direction in relative units, proportional to |E|² of
/// the reversed SFG field and summing to 1 over the grid.
struct EmissionMap {
  sfg::DirectionGrid grid;
  std::vector<double> values;
  std::string units = "relative";
};

/// Uses the analyzer-free intensity. An all-zero field gives an all-zero map.
EmissionMap emission_map(const sfg::FarFieldMap& far);

enum class Normalization {
  PowerLength,  // rate / (P_pump · L)
  Power,        // rate / P_pump
};

std::string describe(Normalization rule);
Normalization normalization_from_string(const std::string& name);

/// Rate divided by pump power (and length for PowerLength). Throws
/// ValidationError for non-positive denominators or a negative rate.
double normalized_rate(double rate_hz, double pump_power_w, double length_m,
                       Normalization rule = Normalization::PowerLength);

struct SpdcInputs {
  double xi_m4_per_w = 0.0;
  double pump_nm = 785.0;
  double signal_nm = 1570.0;
  double idler_nm = 1570.0;
  double bandwidth_nm = 150.0;
  double pump_power_w = 2e-3;
  double pump_waist_nm = 1000.0;  // 1/e² radius of the pump spot
  double length_nm = 400.0;       // normalization length, the cylinder height
  Normalization normalization = Normalization::PowerLength;
};

struct SpdcPrediction {
  SpdcInputs inputs;
  double pair_rate_hz = 0.0;
  double pump_intensity_w_per_m2 = 0.0;
  double pump_area_m2 = 0.0;
  double normalized_rate = 0.0;
  std::string normalized_units;
  std::string normalization_rule;
};

/// Φ_p = P / (π w²), then pair_rate and normalized_rate.
SpdcPrediction predict(const SpdcInputs& inputs);

}  // namespace nanopair::spdc
