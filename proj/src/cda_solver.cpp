#include <algorithm>
#include <cmath>
#include <sstream>

#include "interaction.hpp"
#include "krylov.hpp"
#include "nanopair/cda.hpp"
#include "nanopair/error.hpp"

namespace nanopair::cda {

namespace {

void require_same_lattice(const DipoleLattice& lattice, const FieldMap& field, const char* what) {
  if (field.size() != lattice.size()) {
    throw ValidationError(std::string(what) + " has " + std::to_string(field.size()) +
                          " sites, lattice has " + std::to_string(lattice.size()));
  }
  if (field.lattice && field.lattice != lattice.geometry &&
      (field.lattice->spacing_nm != lattice.spacing_nm() ||
       field.lattice->cells != lattice.geometry->cells)) {
    throw ValidationError(std::string(what) + " was sampled on a different lattice");
  }
}

void require_same_wavelength(const DipoleLattice& lattice, const FieldMap& field,
                             const char* what) {
  if (std::abs(field.wavelength_nm - lattice.wavelength_nm) > 1e-9 * lattice.wavelength_nm) {
    std::ostringstream msg;
    msg << what << " is at " << field.wavelength_nm << " nm, lattice at "
        << lattice.wavelength_nm << " nm";
    throw ValidationError(msg.str());
  }
}

std::span<const cplx> flat(std::span<const CVec3> v) {
  return {reinterpret_cast<const cplx*>(v.data()), 3 * v.size()};
}
std::span<cplx> flat(std::span<CVec3> v) { return {reinterpret_cast<cplx*>(v.data()), 3 * v.size()}; }

}  // namespace

FieldMap incident_field(const DipoleLattice& lattice, const Excitation& excitation,
                        const PolarizationState& polarization, double amplitude) {
  // Re-validate in case the state was built by hand.
  const auto checked = PolarizationState::custom(polarization.jones(), polarization.label());
  const CVec3 jones = checked.vector();
  const double k = lattice.wavenumber();

  FieldMap field;
  field.lattice = lattice.geometry;
  field.wavelength_nm = lattice.wavelength_nm;
  field.kind = FieldKind::Incident;
  field.reference_amplitude = std::abs(amplitude);
  field.values.reserve(lattice.size());

  for (const Vec3& r : lattice.geometry->positions_nm) {
    const double zp = -r.z();  // propagation coordinate
    cplx envelope;
    if (const auto* g = std::get_if<GaussianBeam>(&excitation)) {
      if (!(g->waist_nm > 0.0)) throw ValidationError("Gaussian waist must be positive");
      const double w0 = g->waist_nm;
      const double zr = kPi * w0 * w0 * lattice.background_index / lattice.wavelength_nm;
      const double rho2 = r.x() * r.x() + r.y() * r.y();
      // q-parameter form of the paraxial fundamental mode: q = z' - i z_R.
      const cplx q(zp, -zr);
      const cplx q0(0.0, -zr);
      envelope = (q0 / q) * std::exp(kI * k * zp + kI * k * rho2 / (2.0 * q));
    } else {
      envelope = std::exp(kI * k * zp);
    }
    field.values.push_back(amplitude * envelope * jones);
  }
  return field;
}

std::vector<CVec3> apply_interaction(const DipoleLattice& lattice, std::span<const CVec3> dipoles,
                                     GreenBackend backend) {
  if (dipoles.size() != lattice.size()) throw ValidationError("dipole count does not match lattice");
  auto op = detail::make_interaction(*lattice.geometry, lattice.wavenumber(), backend);
  std::vector<CVec3> out(dipoles.size());
  op->apply(flat(dipoles), flat(std::span<CVec3>(out)));
  return out;
}

FieldMap solve_polarizations(const DipoleLattice& lattice, const FieldMap& incident,
                             const SolverOptions& options, SolverReport* report) {
  require_same_lattice(lattice, incident, "incident field");
  require_same_wavelength(lattice, incident, "incident field");

  const std::size_t n = lattice.size();
  auto op = detail::make_interaction(*lattice.geometry, lattice.wavenumber(), options.backend);
  std::vector<cplx> scaled(3 * n);
  std::vector<cplx> coupled(3 * n);

  // Unknown: exciting field x_j = P_j / α_j; operator x − G(α∘x).
  auto matvec = [&](std::span<const cplx> x, std::span<cplx> y) {
    for (std::size_t j = 0; j < n; ++j)
      for (int c = 0; c < 3; ++c) scaled[3 * j + c] = lattice.polarizability[j] * x[3 * j + c];
    op->apply(scaled, coupled);
    for (std::size_t i = 0; i < 3 * n; ++i) y[i] = x[i] - coupled[i];
  };

  const auto rhs = flat(std::span<const CVec3>(incident.values));
  std::vector<cplx> x(rhs.begin(), rhs.end());
  nanopair::detail::KrylovResult krylov;
  if (options.method == KrylovMethod::Gmres) {
    krylov = nanopair::detail::gmres(matvec, rhs, x, options.tolerance, options.max_iterations,
                                     options.restart);
  } else if (options.method == KrylovMethod::Cocg) {
    // z = √α∘x turns the operator into z − √α∘G(√α∘z), complex symmetric
    // because G is.
    std::vector<cplx> root(n);
    for (std::size_t j = 0; j < n; ++j) root[j] = std::sqrt(lattice.polarizability[j]);
    auto sym = [&](std::span<const cplx> z, std::span<cplx> y) {
      for (std::size_t j = 0; j < n; ++j)
        for (int c = 0; c < 3; ++c) scaled[3 * j + c] = root[j] * z[3 * j + c];
      op->apply(scaled, coupled);
      for (std::size_t j = 0; j < n; ++j)
        for (int c = 0; c < 3; ++c) y[3 * j + c] = z[3 * j + c] - root[j] * coupled[3 * j + c];
    };
    std::vector<cplx> zb(3 * n), z(3 * n);
    for (std::size_t j = 0; j < n; ++j)
      for (int c = 0; c < 3; ++c) {
        zb[3 * j + c] = root[j] * rhs[3 * j + c];
        z[3 * j + c] = zb[3 * j + c];
      }
    krylov = nanopair::detail::cocg(sym, zb, z, options.tolerance, options.max_iterations);
    for (std::size_t j = 0; j < n; ++j)
      for (int c = 0; c < 3; ++c) x[3 * j + c] = z[3 * j + c] / root[j];
  }
  // The contract is on the unscaled residual; finish (or run) BiCGSTAB there.
  const int used = krylov.iterations;
  krylov = nanopair::detail::bicgstab(matvec, rhs, x, options.tolerance,
                                      std::max(0, options.max_iterations - used));
  krylov.iterations += used;
  if (report != nullptr) {
    report->iterations = krylov.iterations;
    report->residual = krylov.residual;
  }
  if (!krylov.converged) {
    std::ostringstream msg;
    msg << "coupled-dipole solve did not converge in " << krylov.iterations
        << " iterations (relative residual " << krylov.residual << ", tolerance "
        << options.tolerance << ")";
    throw ConvergenceError(msg.str(), krylov.residual);
  }

  FieldMap out;
  out.lattice = lattice.geometry;
  out.wavelength_nm = lattice.wavelength_nm;
  out.kind = FieldKind::InducedDipole;
  out.reference_amplitude = incident.reference_amplitude;
  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    for (int c = 0; c < 3; ++c) out.values[j][c] = lattice.polarizability[j] * x[3 * j + c];
  return out;
}

FieldMap internal_field(const DipoleLattice& lattice, const FieldMap& polarizations) {
  require_same_lattice(lattice, polarizations, "polarization map");
  if (polarizations.kind != FieldKind::InducedDipole) {
    throw ValidationError("internal_field expects induced dipole moments");
  }
  const cplx chi = lattice.relative_permittivity - 1.0;
  if (std::abs(chi) == 0.0) throw ValidationError("index-matched lattice has no polarization");
  const double a = lattice.spacing_nm();
  const cplx scale = 4.0 * kPi / (a * a * a * chi);

  FieldMap out = polarizations;
  out.kind = FieldKind::Internal;
  for (auto& v : out.values) v *= scale;
  return out;
}

CrossSections cross_sections(const DipoleLattice& lattice, const FieldMap& incident,
                             const FieldMap& polarizations) {
  require_same_lattice(lattice, incident, "incident field");
  require_same_lattice(lattice, polarizations, "polarization map");
  require_same_wavelength(lattice, incident, "incident field");
  require_same_wavelength(lattice, polarizations, "polarization map");

  CrossSections cs;
  const double e0 = incident.reference_amplitude;
  if (e0 == 0.0) return cs;
  const double k = lattice.wavenumber();
  double ext = 0.0, abs_sum = 0.0;
  for (std::size_t j = 0; j < lattice.size(); ++j) {
    const CVec3& p = polarizations.values[j];
    ext += std::imag(incident.values[j].dot(p));  // Eigen dot conjugates the left operand
    const cplx inv_alpha = 1.0 / lattice.polarizability[j];
    abs_sum += p.squaredNorm() * (-std::imag(inv_alpha) - 2.0 / 3.0 * k * k * k);
  }
  const double scale = 4.0 * kPi * k / (e0 * e0);
  cs.c_ext = scale * ext;
  cs.c_abs = scale * abs_sum;
  cs.c_sca = cs.c_ext - cs.c_abs;
  const double r = lattice.geometry->cross_section_radius_nm;
  const double area = kPi * r * r;
  cs.q_ext = cs.c_ext / area;
  cs.q_abs = cs.c_abs / area;
  cs.q_sca = cs.c_sca / area;
  return cs;
}

}  // namespace nanopair::cda
