#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nanopair/cda.hpp"
#include "nanopair/materials.hpp"
#include "nanopair/polarization.hpp"
#include "nanopair/types.hpp"

namespace nanopair::sfg {

/// Sum frequency of two inputs, 1/λ = 1/λ_s + 1/λ_i.
double sum_frequency_wavelength_nm(double signal_nm, double idler_nm);

/// Second-order source at the sum frequency, in C/m² (SI):
///   P_i = ε₀ Σ_jk χ_ijk (E_s,j E_i,k + E_s,k E_i,j)
/// with the input fields in V/m and χ in pm/V. The inputs must be incident or
/// internal fields sampled on the same lattice; λ_SF must satisfy energy
/// conservation to 1e-9 relative.
cda::FieldMap nonlinear_polarization(const cda::FieldMap& signal, const cda::FieldMap& idler,
                                     const materials::Chi2Tensor& chi2, double sum_wavelength_nm);

/// Overload taking λ_SF from the two inputs.
cda::FieldMap nonlinear_polarization(const cda::FieldMap& signal, const cda::FieldMap& idler,
                                     const materials::Chi2Tensor& chi2);

/// Set of emission directions. Quadrature grids carry solid-angle weights;
/// pupil grids carry a pixel index per direction instead.
struct DirectionGrid {
  std::vector<Vec3> directions;
  std::vector<double> weights;  // sr, empty for pupil grids

  int pixels = 0;          // pupil grids: image side length
  double half_width = 0;   // pupil grids: û_x, û_y span [-half_width, half_width]
  std::vector<int> pixel;  // pupil grids: row-major pixel index per direction

  std::size_t size() const noexcept { return directions.size(); }
  bool is_pupil() const noexcept { return pixels > 0; }
  /// Direction cosines per pixel step.
  double pixel_pitch() const { return pixels > 1 ? 2.0 * half_width / (pixels - 1) : 0.0; }
};

/// Upward (û_z > 0) pixel centres on a pixels×pixels grid spanning
/// [-half_width, half_width] in û_x and û_y; only pixels with
/// û_x² + û_y² <= min(half_width, 1)² are included. Row 0 is û_y = +half_width.
DirectionGrid pupil_grid(double half_width, int pixels = 101);

/// Gauss-Legendre in θ over [0, asin(na)] times uniform φ, upward hemisphere.
DirectionGrid cone_quadrature(double na, int n_theta = 32, int n_phi = 64);

/// Gauss-Legendre in θ over the full sphere times uniform φ.
DirectionGrid sphere_quadrature(int n_theta = 48, int n_phi = 96);

/// Radiated field per direction, scaled so that |E|² is the power per solid
/// angle in W/sr.
struct FarFieldMap {
  DirectionGrid grid;
  std::vector<CVec3> values;
  double wavelength_nm = 0.0;
};

/// Free-space radiation of the per-site dipoles d_j = P_j·V_cell:
///   E(û) = sqrt(c k⁴ / (32π² ε₀)) Σ_j [d_j − (û·d_j)û] exp(−i k û·r_j)
FarFieldMap far_field(const cda::FieldMap& nonlinear, const DirectionGrid& grid);

/// Power radiated by the dipole set, evaluated directly from the imaginary
/// part of the Green tensor (no angular grid). W.
double radiated_power(const cda::FieldMap& nonlinear,
                      cda::GreenBackend backend = cda::GreenBackend::Auto);

enum class Analyzer { None, H, V };

Analyzer analyzer_from_label(const std::string& label);
std::string to_string(Analyzer analyzer);

/// Fraction of the field passed by the analyzer after an aplanatic
/// objective: θ̂ maps to the radial and φ̂ to the azimuthal pupil direction.
double analyzed_intensity(const Vec3& direction, const CVec3& field, Analyzer analyzer);

/// Sum of weight · analyzed intensity over a quadrature grid (W).
double integrated_power(const FarFieldMap& far, Analyzer analyzer = Analyzer::None);

struct BfpImage {
  int pixels = 0;
  double half_width = 0.0;
  double na = 0.0;
  Analyzer analyzer = Analyzer::None;
  std::vector<double> intensity;  // W/sr, row-major, row 0 at û_y = +half_width

  double at(int row, int col) const { return intensity[static_cast<std::size_t>(row * pixels + col)]; }
};

/// Analyzer-projected intensity on the pupil grid of `far`, zero outside the
/// NA disk. Throws ValidationError for NA outside (0, 1] or a non-pupil grid.
BfpImage bfp_image(const FarFieldMap& far, double na, Analyzer analyzer);

/// ASCII PGM (P2), maxval 65535, scaled to the image maximum. Comment lines
/// carry `comments` verbatim.
void write_pgm(std::ostream& out, const BfpImage& image, std::span<const std::string> comments = {});

struct SfgResult {
  double p_sf_w = 0.0;
  double p_sf_h_w = 0.0;
  double p_sf_v_w = 0.0;
  double eta_per_w = 0.0;      // P_SF / (P_s P_i)
  double xi_m4_per_w = 0.0;    // η A_s A_i
};

/// η = P_SF/(P_s P_i) and Ξ = η A_s A_i. Throws ValidationError unless the
/// input powers and areas are positive.
SfgResult sfg_efficiency(double p_sf_w, double p_signal_w, double p_idler_w, double area_signal_m2,
                         double area_idler_m2, double p_sf_h_w = 0.0, double p_sf_v_w = 0.0);

/// Peak field of a Gaussian beam carrying `power_w` with 1/e² intensity
/// radius `waist_nm`, in vacuum. V/m.
double gaussian_peak_field(double power_w, double waist_nm);

/// 1/e² spot area π w². m².
double spot_area_m2(double waist_nm);

struct SfgSetup {
  double signal_nm = 1520.0;
  double idler_nm = 1560.0;
  double signal_power_w = 1e-3;
  double idler_power_w = 1e-3;
  double waist_nm = 1000.0;   // both beams
  double spacing_nm = 0.0;    // <= 0 picks the default for the shorter input
  cda::SolverOptions solver;
  unsigned threads = 0;
};

/// Linear solves for H and V at both input wavelengths on one shared
/// lattice, in vacuum. Any other input polarization is a combination of these by
/// linearity, and any far field a bilinear combination of the four
/// H/V pairings.
class SfgModel {
 public:
  SfgModel(const cda::Geometry& geometry, const materials::DispersionModel& dispersion,
           const materials::Chi2Tensor& chi2, const SfgSetup& setup);

  const SfgSetup& setup() const noexcept { return setup_; }
  double sum_wavelength_nm() const noexcept { return lambda_sf_; }
  const std::shared_ptr<const cda::LatticeGeometry>& lattice() const noexcept { return lattice_; }

  /// Internal field for an input polarization; `idler` selects the beam.
  cda::FieldMap internal_field(const PolarizationState& polarization, bool idler) const;

  cda::FieldMap nonlinear_polarization(const PolarizationState& signal,
                                       const PolarizationState& idler) const;

  /// Far fields of the H/V pairings HH, HV, VH, VV (signal first).
  std::array<FarFieldMap, 4> basis_far_fields(const DirectionGrid& grid) const;

  /// Far field for arbitrary input states from the four basis maps.
  static FarFieldMap combine(const std::array<FarFieldMap, 4>& basis, const PolarizationState& signal,
                             const PolarizationState& idler);

 private:
  SfgSetup setup_;
  materials::Chi2Tensor chi2_;
  double lambda_sf_ = 0.0;
  std::shared_ptr<const cda::LatticeGeometry> lattice_;
  std::array<cda::FieldMap, 4> fields_;  // signal H, signal V, idler H, idler V
};

/// Labels of the map axes, in order.
inline constexpr std::array<const char*, 4> kMapLabels = {"H", "V", "R", "L"};

struct SfgMap {
  std::array<std::array<double, 4>, 4> power_w{};     // [signal][idler]
  std::array<std::array<double, 4>, 4> normalized{};  // max entry = 1
  Analyzer analyzer = Analyzer::H;
  double na = 0.7;
};

/// Collected SFG power within `na` for all 16 input combinations.
SfgMap sfg_map_16(const SfgModel& model, Analyzer analyzer = Analyzer::H, double na = 0.7,
                  int n_theta = 32, int n_phi = 64);

/// 4×4 CSV with H,V,R,L labels, rows = signal, columns = idler.
void write_map_csv(std::ostream& out, const SfgMap& map, bool normalized = true,
                   std::span<const std::string> comments = {});

/// Relative SFG signal versus signal-idler delay for two Gaussian pulses of
/// the given intensity FWHM: numerical overlap of the two envelopes,
/// normalized to 1 at zero delay.
std::vector<double> delay_scan(double pulse_fwhm_fs, std::span<const double> delays_fs);

}  // namespace nanopair::sfg
