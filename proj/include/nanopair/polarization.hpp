#pragma once

#include <string>

#include <Eigen/Core>

#include "nanopair/types.hpp"

namespace nanopair {

/// Transverse Jones vector for a beam travelling along -z, lab frame
/// x = H = crystal [100]. Handedness: R = (x - iy)/sqrt(2), L = (x + iy)/sqrt(2).
class PolarizationState {
 public:
  static PolarizationState H();
  static PolarizationState V();
  static PolarizationState R();
  static PolarizationState L();

  /// Accepts "H", "V", "R", "L" (case-insensitive); throws ValidationError otherwise.
  static PolarizationState from_label(const std::string& label);

  /// Throws ValidationError unless |jones| = 1 within 1e-12.
  static PolarizationState custom(const Eigen::Vector2cd& jones, std::string label = "custom");

  const Eigen::Vector2cd& jones() const noexcept { return jones_; }
  const std::string& label() const noexcept { return label_; }

  /// Jones vector embedded in 3D: (j_x, j_y, 0).
  CVec3 vector() const { return {jones_[0], jones_[1], 0.0}; }

 private:
  PolarizationState(const Eigen::Vector2cd& jones, std::string label)
      : jones_(jones), label_(std::move(label)) {}

  Eigen::Vector2cd jones_;
  std::string label_;
};

}  // namespace nanopair
