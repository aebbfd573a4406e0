#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nanopair/materials.hpp"
#include "nanopair/polarization.hpp"
#include "nanopair/types.hpp"

// Coupled-dipole (discrete-dipole) scattering solver.
//
// Units: lengths in nm, fields in the caller's amplitude unit (V/m in the
// SFG pipeline). Dipole moments follow the Gaussian-style convention
// P = α E with α in nm³, so that the field of a dipole is G·P with the
// free-space dyadic G below and cross sections come out in nm².
// Time dependence exp(-iωt).
namespace nanopair::cda {

struct Cylinder {
  double diameter_nm = 430.0;
  double height_nm = 400.0;
};

struct Sphere {
  double radius_nm = 100.0;
};

/// Cylinder axis along z, centred on the origin.
class Geometry {
 public:
  static Geometry cylinder(double diameter_nm = 430.0, double height_nm = 400.0,
                           std::string material_id = "Al0.18Ga0.82As");
  static Geometry sphere(double radius_nm, std::string material_id = "sphere");

  const std::variant<Cylinder, Sphere>& shape() const noexcept { return shape_; }
  const std::string& material_id() const noexcept { return material_id_; }

  bool contains(const Vec3& point_nm) const;
  double volume_nm3() const;
  /// Radius of the geometric cross-section used for efficiencies (πr²).
  double cross_section_radius_nm() const;
  /// Full extent along x, y, z.
  Vec3 extent_nm() const;

 private:
  Geometry(std::variant<Cylinder, Sphere> shape, std::string material_id);
  std::variant<Cylinder, Sphere> shape_;
  std::string material_id_;
};

/// Wavelength-independent part of a discretization: cubic lattice sites
/// clipped to the shape, positions centred on the origin.
///
/// With volume matching on, the requested grid selects the sites and the
/// spacing is then rescaled so that N·d³ equals the shape volume.
struct LatticeGeometry {
  double spacing_nm = 0.0;          // effective spacing d used by the solver
  double nominal_spacing_nm = 0.0;  // requested grid spacing a
  std::array<int, 3> dims{};                 // bounding box in cells
  std::vector<std::array<int, 3>> cells;     // integer coordinates, one per site
  std::vector<Vec3> positions_nm;
  double cross_section_radius_nm = 0.0;
  double shape_volume_nm3 = 0.0;

  std::size_t size() const noexcept { return cells.size(); }
};

enum class VolumeMatch { Off, On };

std::shared_ptr<const LatticeGeometry> discretize_geometry(const Geometry& geometry,
                                                           double spacing_nm,
                                                           VolumeMatch match = VolumeMatch::On);

struct DipoleLattice {
  std::shared_ptr<const LatticeGeometry> geometry;
  double wavelength_nm = 0.0;
  double background_index = 1.0;
  cplx material_index{1.0, 0.0};   // absolute n(λ)
  cplx relative_permittivity{1.0, 0.0};  // (n / n_bg)²
  std::vector<cplx> polarizability;      // nm³, isotropic, one per site

  std::size_t size() const noexcept { return geometry->size(); }
  double spacing_nm() const noexcept { return geometry->spacing_nm; }
  /// k in the background medium, nm⁻¹.
  double wavenumber() const noexcept { return 2.0 * kPi * background_index / wavelength_nm; }
};

/// Largest spacing satisfying |m| k a <= 0.5.
double max_spacing_nm(cplx material_index, double wavelength_nm, double background_index = 1.0);

/// 15 nm for λ >= 1400 nm, 12 nm below.
double default_spacing_nm(double wavelength_nm);

/// Lattice-dispersion-relation polarizability with radiative correction.
cplx ldr_polarizability(cplx relative_permittivity, double spacing_nm, double wavenumber);

/// Throws ValidationError if the validity rule fails (message names the
/// largest admissible spacing) or if the shape is not resolved by the lattice.
DipoleLattice discretize(const Geometry& geometry, double spacing_nm, double wavelength_nm,
                         const materials::DispersionModel& dispersion,
                         double background_index = 1.0, VolumeMatch match = VolumeMatch::On);

/// Attaches λ-dependent polarizabilities to an existing lattice geometry.
DipoleLattice assign_polarizability(std::shared_ptr<const LatticeGeometry> geometry,
                                    double wavelength_nm,
                                    const materials::DispersionModel& dispersion,
                                    double background_index = 1.0);

enum class FieldKind { Incident, InducedDipole, Internal, NonlinearPolarization };

/// Complex 3-vector per lattice site.
struct FieldMap {
  std::shared_ptr<const LatticeGeometry> lattice;
  std::vector<CVec3> values;
  double wavelength_nm = 0.0;
  FieldKind kind = FieldKind::Incident;
  /// |E₀| of the exciting beam (peak at focus), carried along for normalization.
  double reference_amplitude = 0.0;

  std::size_t size() const noexcept { return values.size(); }
};

struct PlaneWave {};
struct GaussianBeam {
  double waist_nm = 1000.0;  // 1/e field radius at focus
};
using Excitation = std::variant<PlaneWave, GaussianBeam>;

/// Beam travelling along -z, focus (if any) at z = 0.
FieldMap incident_field(const DipoleLattice& lattice, const Excitation& excitation,
                        const PolarizationState& polarization, double amplitude);

/// Free-space dyadic: field at r produced by a unit dipole at the origin.
CMat3 green_tensor(const Vec3& r_nm, double wavenumber);

enum class GreenBackend { Auto, Direct, Fft };

/// Cocg works on the symmetrized system and needs one product per step.
/// Gmres (restarted) is slower per step but converges near strong
/// resonances where Cocg stalls. Bicgstab is the general fallback.
enum class KrylovMethod { Cocg, Gmres, Bicgstab };

struct SolverOptions {
  double tolerance = 1e-6;
  int max_iterations = 3000;
  GreenBackend backend = GreenBackend::Auto;
  KrylovMethod method = KrylovMethod::Cocg;
  int restart = 300;  // Gmres basis size
};

struct SolverReport {
  int iterations = 0;
  double residual = 0.0;
};

/// Solves P_j = α_j [E_inc,j + Σ_{k≠j} G(r_j - r_k) P_k] matrix-free with
/// the chosen Krylov method; BiCGSTAB then polishes on the unscaled system
/// so the tolerance applies to the true residual. Throws ConvergenceError (carrying the last residual) if the
/// relative residual is still above tolerance after max_iterations.
FieldMap solve_polarizations(const DipoleLattice& lattice, const FieldMap& incident,
                             const SolverOptions& options = {}, SolverReport* report = nullptr);

/// Applies the coupling sum Σ_{k≠j} G_jk P_k with the chosen backend.
std::vector<CVec3> apply_interaction(const DipoleLattice& lattice, std::span<const CVec3> dipoles,
                                     GreenBackend backend = GreenBackend::Auto);

/// Macroscopic field inside the particle, E_j = 4π P_j / (a³ (ε - 1)).
FieldMap internal_field(const DipoleLattice& lattice, const FieldMap& polarizations);

struct CrossSections {
  double c_ext = 0.0;  // nm²
  double c_abs = 0.0;
  double c_sca = 0.0;
  double q_ext = 0.0;  // / (π r²)
  double q_abs = 0.0;
  double q_sca = 0.0;
};

CrossSections cross_sections(const DipoleLattice& lattice, const FieldMap& incident,
                             const FieldMap& polarizations);

struct SpectrumEntry {
  double wavelength_nm = 0.0;
  double q_ext = 0.0;
  double q_abs = 0.0;
  double q_sca = 0.0;
  std::map<std::string, double> partials;  // ED, MD, EQ, MQ
  int iterations = 0;
};

struct ScatteringSpectrum {
  std::vector<SpectrumEntry> entries;
};

struct SpectrumOptions {
  Excitation excitation = PlaneWave{};
  PolarizationState polarization = PolarizationState::H();
  double spacing_nm = 0.0;  // <= 0 picks default_spacing_nm(λ)
  double background_index = 1.0;
  VolumeMatch volume_match = VolumeMatch::On;
  SolverOptions solver;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Independent solve per wavelength (run concurrently), with multipole
/// partials attached. Solver failures are rethrown with the wavelength
/// prepended to the message.
ScatteringSpectrum scattering_spectrum(const Geometry& geometry,
                                       std::span<const double> wavelengths_nm,
                                       const materials::DispersionModel& dispersion,
                                       const SpectrumOptions& options = {});

/// `lambda_nm,Q_ext,Q_abs,Q_sca,Q_ED,Q_MD[,Q_EQ,Q_MQ]`
void write_spectrum_csv(std::ostream& out, const ScatteringSpectrum& spectrum,
                        bool with_quadrupoles = true);

struct MieResult {
  double size_parameter = 0.0;
  double q_sca = 0.0;
  double q_ext = 0.0;
  std::vector<cplx> a;  // electric coefficients, a[0] = a_1
  std::vector<cplx> b;  // magnetic coefficients
};

/// Mie series for a homogeneous sphere (relative index m) in a
/// non-absorbing medium; λ is the wavelength in that medium.
MieResult mie_reference(double radius_nm, cplx relative_index, double wavelength_nm);

}  // namespace nanopair::cda
