#include "config.hpp"

#include <fstream>

namespace nanopair::cli {

json default_config() {
  return json{
      {"geometry", {{"shape", "cylinder"}, {"diameter_nm", 430.0}, {"height_nm", 400.0}, {"radius_nm", 100.0}}},
      {"materials",
       {{"table", nullptr},
        {"constant_index", nullptr},
        {"background_index", 1.0},
        {"d14_pm_per_v", 100.0},
        {"crystal_rotation_z_deg", 0.0}}},
      {"solver",
       {{"method", "cocg"},
        {"restart", 300},
        {"tolerance", 1e-6},
        {"max_iterations", 3000},
        {"backend", "auto"},
        {"spacing_nm", 0.0},
        {"volume_match", true},
        {"threads", 0},
        {"excitation", "plane"},
        {"polarization", "H"},
        {"wavelengths_nm", nullptr},
        {"ir_window_nm", {1400.0, 1700.0}},
        {"ir_step_nm", 10.0},
        {"pump_window_nm", {740.0, 820.0}},
        {"pump_step_nm", 5.0},
        {"pump_spacing_nm", 0.0},
        {"pump_method", "gmres"}}},
      {"sfg",
       {{"signal_nm", 1520.0},
        {"idler_nm", 1560.0},
        {"signal_power_w", 1e-3},
        {"idler_power_w", 1e-3},
        {"waist_nm", 1000.0},
        {"na", 0.7},
        {"analyzer", "H"},
        {"pixels", 101},
        {"n_theta", 32},
        {"n_phi", 64},
        {"pulse_fwhm_fs", 80.0},
        {"delay_range_fs", 300.0},
        {"delay_step_fs", 10.0}}},
      {"spdc",
       {{"efficiency_per_w", 1.8e-5},
        {"spot_radius_nm", 1000.0},
        {"pump_nm", 785.0},
        {"signal_nm", 1570.0},
        {"idler_nm", 1570.0},
        {"bandwidth_nm", 150.0},
        {"pump_power_w", 2e-3},
        {"normalization", "power_length"},
        {"length_nm", 400.0}}},
      {"detection",
       {{"pair_rate_hz", 35.0},
        {"eta_arm", 0.02},
        {"split", 0.5},
        {"dark_rate_hz", 5.0},
        {"delay_ns", 26.5},
        {"bin_width_ps", 162},
        {"bins", 300},
        {"duration_s", 86400.0},
        {"thermal_rate_hz", 250.0},
        {"thermal_sigma_ns", 0.85},
        {"jitter_ps", 50.0},
        {"dead_time_ns", 10000.0},
        {"peak_half_width", 1},
        {"channels", {1, 2}},
        {"seed", 1}}},
      {"output", {{"dir", "out"}, {"timetags", "binary"}}},
  };
}

namespace {

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) {
    // Integer defaults stay integral; floating defaults take any number.
    return a.is_number_float() || !b.is_number_float();
  }
  return a.type() == b.type();
}

}  // namespace

void merge_config(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw UsageError("config" + (path.empty() ? "" : " " + path) + " must be an object");
  for (const auto& [key, value] : user.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw UsageError("unknown config key '" + where + "'");
    json& slot = base[key];
    if (slot.is_object()) {
      merge_config(slot, value, where);
    } else if (slot.is_null() || value.is_null() || same_kind(slot, value)) {
      slot = value;
    } else {
      throw UsageError("config key '" + where + "' expects " + std::string(slot.type_name()) + ", got " +
                       value.type_name());
    }
  }
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq || dot == 0 || dot + 1 == eq) {
    throw UsageError("--set expects section.key=value, got '" + assignment + "'");
  }
  const std::string section = assignment.substr(0, dot);
  const std::string key = assignment.substr(dot + 1, eq - dot - 1);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  merge_config(config, json{{section, json{{key, value}}}});
}

json resolve_config(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
  json config = default_config();
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw UsageError("cannot open config file " + file.string());
    json user = json::parse(in, nullptr, false, true);
    if (user.is_discarded()) throw UsageError("config file " + file.string() + " is not valid JSON");
    merge_config(config, user);
  }
  for (const auto& o : overrides) apply_override(config, o);
  return config;
}

}  // namespace nanopair::cli
