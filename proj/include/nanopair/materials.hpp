#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nanopair/types.hpp"

namespace nanopair::materials {

struct DispersionSample {
  double wavelength_nm;
  cplx index;
};

/// Tabulated complex refractive index n(λ).
///
/// Real and imaginary parts are interpolated independently with a monotone
/// (Fritsch-Carlson) cubic Hermite spline, so the interpolant never
/// overshoots the tabulated values and a run of zero absorption stays
/// exactly zero.
class DispersionModel {
 public:
  /// Throws ValidationError unless there are at least two samples with
  /// strictly increasing wavelengths and Im(n) >= 0.
  DispersionModel(std::string material_id, std::vector<DispersionSample> samples);

  const std::string& material_id() const noexcept { return id_; }
  std::span<const DispersionSample> samples() const noexcept { return samples_; }
  double min_wavelength_nm() const noexcept { return samples_.front().wavelength_nm; }
  double max_wavelength_nm() const noexcept { return samples_.back().wavelength_nm; }

  /// Throws RangeError when λ is outside the tabulated span.
  cplx index_at(double wavelength_nm) const;

 private:
  std::string id_;
  std::vector<DispersionSample> samples_;
  std::vector<double> slope_re_;
  std::vector<double> slope_im_;
};

cplx refractive_index(const DispersionModel& model, double wavelength_nm);

/// Parses `wavelength_nm n_real n_imag` lines; `#` starts a comment.
/// ParseError offsets are 1-based line numbers.
DispersionModel parse_dispersion_table(std::istream& in, std::string material_id);
DispersionModel load_dispersion_table(const std::filesystem::path& path);

/// Bundled Al0.18Ga0.82As table (700-2000 nm), see data/algaas_x018.txt.
const DispersionModel& algaas_x018();

/// Two-sample table with a wavelength-independent index, for spheres and tests.
DispersionModel constant_index(std::string material_id, cplx index,
                               double min_wavelength_nm = 1.0,
                               double max_wavelength_nm = 1.0e6);

/// Rank-3 second-order susceptibility in pm/V, lab frame.
class Chi2Tensor {
 public:
  Chi2Tensor() { components_.fill(0.0); }

  double operator()(int i, int j, int k) const { return components_[offset(i, j, k)]; }
  double& operator()(int i, int j, int k) { return components_[offset(i, j, k)]; }

  const Mat3& crystal_rotation() const noexcept { return rotation_; }
  void set_crystal_rotation(const Mat3& r) { rotation_ = r; }

  /// Contracts the tensor with two fields: out_i = Σ_jk χ_ijk a_j b_k (pm/V units kept).
  CVec3 contract(const CVec3& a, const CVec3& b) const;

 private:
  static constexpr int offset(int i, int j, int k) { return 9 * i + 3 * j + k; }
  std::array<double, 27> components_;
  Mat3 rotation_ = Mat3::Identity();
};

/// Zincblende tensor: χ_ijk = 2·d14 for every permutation of (x, y, z) in the
/// crystal frame, zero otherwise; each index then rotated into the lab frame.
/// Throws ValidationError if `rotation` is not orthonormal within 1e-9.
Chi2Tensor chi2_tensor(double d14_pm_per_v, const Mat3& rotation = Mat3::Identity());

}  // namespace nanopair::materials
