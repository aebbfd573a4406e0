#include <cmath>
#include <sstream>

#include "nanopair/cda.hpp"
#include "nanopair/error.hpp"

namespace nanopair::cda {

Geometry::Geometry(std::variant<Cylinder, Sphere> shape, std::string material_id)
    : shape_(shape), material_id_(std::move(material_id)) {}

Geometry Geometry::cylinder(double diameter_nm, double height_nm, std::string material_id) {
  if (!(diameter_nm > 0.0) || !(height_nm > 0.0)) {
    throw ValidationError("cylinder dimensions must be positive");
  }
  return Geometry(Cylinder{diameter_nm, height_nm}, std::move(material_id));
}

Geometry Geometry::sphere(double radius_nm, std::string material_id) {
  if (!(radius_nm > 0.0)) throw ValidationError("sphere radius must be positive");
  return Geometry(Sphere{radius_nm}, std::move(material_id));
}

bool Geometry::contains(const Vec3& p) const {
  if (const auto* c = std::get_if<Cylinder>(&shape_)) {
    const double r = 0.5 * c->diameter_nm;
    return p.x() * p.x() + p.y() * p.y() <= r * r * (1 + 1e-12) &&
           std::abs(p.z()) <= 0.5 * c->height_nm * (1 + 1e-12);
  }
  const auto& s = std::get<Sphere>(shape_);
  return p.squaredNorm() <= s.radius_nm * s.radius_nm * (1 + 1e-12);
}

double Geometry::volume_nm3() const {
  if (const auto* c = std::get_if<Cylinder>(&shape_)) {
    return kPi * 0.25 * c->diameter_nm * c->diameter_nm * c->height_nm;
  }
  const double r = std::get<Sphere>(shape_).radius_nm;
  return 4.0 / 3.0 * kPi * r * r * r;
}

double Geometry::cross_section_radius_nm() const {
  if (const auto* c = std::get_if<Cylinder>(&shape_)) return 0.5 * c->diameter_nm;
  return std::get<Sphere>(shape_).radius_nm;
}

Vec3 Geometry::extent_nm() const {
  if (const auto* c = std::get_if<Cylinder>(&shape_)) {
    return {c->diameter_nm, c->diameter_nm, c->height_nm};
  }
  const double d = 2.0 * std::get<Sphere>(shape_).radius_nm;
  return {d, d, d};
}

std::shared_ptr<const LatticeGeometry> discretize_geometry(const Geometry& geometry,
                                                           double spacing_nm,
                                                           VolumeMatch match) {
  if (!(spacing_nm > 0.0)) throw ValidationError("lattice spacing must be positive");
  const Vec3 extent = geometry.extent_nm();
  if (extent.minCoeff() < 2.0 * spacing_nm) {
    std::ostringstream msg;
    msg << "shape unresolved: smallest dimension " << extent.minCoeff()
        << " nm is less than two lattice spacings (a = " << spacing_nm << " nm)";
    throw ValidationError(msg.str());
  }

  auto lattice = std::make_shared<LatticeGeometry>();
  lattice->spacing_nm = spacing_nm;
  lattice->nominal_spacing_nm = spacing_nm;
  lattice->cross_section_radius_nm = geometry.cross_section_radius_nm();
  lattice->shape_volume_nm3 = geometry.volume_nm3();
  for (int axis = 0; axis < 3; ++axis) {
    lattice->dims[axis] = static_cast<int>(std::ceil(extent[axis] / spacing_nm - 1e-9));
  }
  const auto& dims = lattice->dims;
  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int k = 0; k < dims[2]; ++k) {
        const Vec3 p{(i - 0.5 * (dims[0] - 1)) * spacing_nm, (j - 0.5 * (dims[1] - 1)) * spacing_nm,
                     (k - 0.5 * (dims[2] - 1)) * spacing_nm};
        if (geometry.contains(p)) {
          lattice->cells.push_back({i, j, k});
          lattice->positions_nm.push_back(p);
        }
      }
    }
  }
  if (lattice->cells.empty()) {
    throw ValidationError("discretization produced no lattice sites");
  }
  if (match == VolumeMatch::On) {
    const double d = std::cbrt(lattice->shape_volume_nm3 / static_cast<double>(lattice->size()));
    lattice->spacing_nm = d;
    for (auto& p : lattice->positions_nm) p *= d / spacing_nm;
  }
  return lattice;
}

double max_spacing_nm(cplx material_index, double wavelength_nm, double background_index) {
  const double m = std::abs(material_index / background_index);
  const double k = 2.0 * kPi * background_index / wavelength_nm;
  return 0.5 / (m * k);
}

double default_spacing_nm(double wavelength_nm) { return wavelength_nm >= 1400.0 ? 15.0 : 12.0; }

cplx ldr_polarizability(cplx eps, double a, double k) {
  // Draine & Goodman lattice dispersion relation; the S-term vanishes for
  // propagation along a lattice axis with transverse polarization.
  constexpr double b1 = -1.891531;
  constexpr double b2 = 0.1648469;
  const cplx alpha_cm = 3.0 * a * a * a / (4.0 * kPi) * (eps - 1.0) / (eps + 2.0);
  const double ka = k * a;
  const cplx correction = (b1 + eps * b2) * ka * ka - 2.0 / 3.0 * kI * ka * ka * ka;
  return alpha_cm / (1.0 + alpha_cm / (a * a * a) * correction);
}

namespace {

void require_valid_spacing(cplx n, double wavelength_nm, double background_index, double a) {
  const double a_max = max_spacing_nm(n, wavelength_nm, background_index);
  if (a > a_max * (1 + 1e-12)) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "lattice too coarse at " << wavelength_nm << " nm: |m|ka = " << 0.5 * a / a_max
        << " > 0.5; use spacing a <= " << std::fixed << a_max << " nm";
    throw ValidationError(msg.str());
  }
}

}  // namespace

DipoleLattice assign_polarizability(std::shared_ptr<const LatticeGeometry> geometry,
                                    double wavelength_nm,
                                    const materials::DispersionModel& dispersion,
                                    double background_index) {
  if (!(wavelength_nm > 0.0)) throw ValidationError("wavelength must be positive");
  if (!(background_index > 0.0)) throw ValidationError("background index must be positive");
  const cplx n = dispersion.index_at(wavelength_nm);
  const double a = geometry->spacing_nm;
  require_valid_spacing(n, wavelength_nm, background_index, a);

  DipoleLattice lattice;
  lattice.geometry = std::move(geometry);
  lattice.wavelength_nm = wavelength_nm;
  lattice.background_index = background_index;
  lattice.material_index = n;
  lattice.relative_permittivity = (n / background_index) * (n / background_index);
  const cplx alpha = ldr_polarizability(lattice.relative_permittivity, a, lattice.wavenumber());
  lattice.polarizability.assign(lattice.geometry->size(), alpha);
  return lattice;
}

DipoleLattice discretize(const Geometry& geometry, double spacing_nm, double wavelength_nm,
                         const materials::DispersionModel& dispersion, double background_index,
                         VolumeMatch match) {
  if (!(wavelength_nm > 0.0)) throw ValidationError("wavelength must be positive");
  require_valid_spacing(dispersion.index_at(wavelength_nm), wavelength_nm, background_index,
                        spacing_nm);
  return assign_polarizability(discretize_geometry(geometry, spacing_nm, match), wavelength_nm,
                               dispersion, background_index);
}

}  // namespace nanopair::cda
