#include "nanopair/polarization.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "nanopair/error.hpp"

namespace nanopair {

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

PolarizationState PolarizationState::H() { return {Eigen::Vector2cd(1.0, 0.0), "H"}; }
PolarizationState PolarizationState::V() { return {Eigen::Vector2cd(0.0, 1.0), "V"}; }
PolarizationState PolarizationState::R() {
  return {Eigen::Vector2cd(kInvSqrt2, -kI * kInvSqrt2), "R"};
}
PolarizationState PolarizationState::L() {
  return {Eigen::Vector2cd(kInvSqrt2, kI * kInvSqrt2), "L"};
}

PolarizationState PolarizationState::from_label(const std::string& label) {
  std::string up = label;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "H") return H();
  if (up == "V") return V();
  if (up == "R") return R();
  if (up == "L") return L();
  throw ValidationError("unknown polarization label '" + label + "' (expected H, V, R or L)");
}

PolarizationState PolarizationState::custom(const Eigen::Vector2cd& jones, std::string label) {
  const double norm = jones.norm();
  if (!(std::abs(norm - 1.0) <= 1e-12)) {
    throw ValidationError("Jones vector must have unit norm (got " + std::to_string(norm) + ")");
  }
  return {jones, std::move(label)};
}

}  // namespace nanopair
