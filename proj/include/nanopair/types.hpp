#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Core>

namespace nanopair {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

namespace si {
inline constexpr double kSpeedOfLight = 299792458.0;     // m/s
inline constexpr double kEpsilon0 = 8.8541878128e-12;    // F/m
inline constexpr double kPlanck = 6.62607015e-34;        // J s
}  // namespace si

}  // namespace nanopair
