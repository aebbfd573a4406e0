#include "nanopair/sfg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/legendre.hpp>

#include "interaction.hpp"
#include "nanopair/error.hpp"
#include "nanopair/parallel.hpp"

namespace nanopair::sfg {

namespace {

constexpr double kNm = 1e-9;

void require_same_lattice(const cda::FieldMap& a, const cda::FieldMap& b) {
  if (a.size() != b.size()) {
    throw ValidationError("signal and idler fields have different site counts (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (!a.lattice || !b.lattice) throw ValidationError("field is not attached to a lattice");
  if (a.lattice != b.lattice &&
      (a.lattice->spacing_nm != b.lattice->spacing_nm || a.lattice->cells != b.lattice->cells)) {
    throw ValidationError("signal and idler fields were sampled on different lattices");
  }
}

void require_field_kind(const cda::FieldMap& f, const char* what) {
  if (f.kind != cda::FieldKind::Incident && f.kind != cda::FieldKind::Internal) {
    throw ValidationError(std::string(what) + " must be an incident or internal field");
  }
}

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  x.clear();
  w.clear();
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime(n, z);
    const double wz = 2.0 / ((1.0 - z * z) * dp * dp);
    x.push_back(z);
    w.push_back(wz);
    if (z != 0.0) {
      x.push_back(-z);
      w.push_back(wz);
    }
  }
}

DirectionGrid theta_phi_grid(double theta_lo, double theta_hi, int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) throw ValidationError("quadrature orders must be positive");
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  DirectionGrid grid;
  const double half = 0.5 * (theta_hi - theta_lo);
  const double mid = 0.5 * (theta_hi + theta_lo);
  const double dphi = 2.0 * kPi / n_phi;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double theta = mid + half * x[t];
    const double st = std::sin(theta), ct = std::cos(theta);
    for (int p = 0; p < n_phi; ++p) {
      const double phi = (p + 0.5) * dphi;
      grid.directions.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
      grid.weights.push_back(half * w[t] * st * dphi);
    }
  }
  return grid;
}

// Per-site dipoles d_j = P_j · V_cell in C·m.
std::vector<CVec3> site_dipoles(const cda::FieldMap& nonlinear) {
  const double a = nonlinear.lattice->spacing_nm * kNm;
  const double volume = a * a * a;
  std::vector<CVec3> d(nonlinear.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = nonlinear.values[j] * volume;
  return d;
}

double far_field_prefactor(double wavelength_nm) {
  const double k = 2.0 * kPi / (wavelength_nm * kNm);
  return std::sqrt(si::kSpeedOfLight * k * k * k * k / (32.0 * kPi * kPi * si::kEpsilon0));
}

// Σ_j d_j exp(−i k û·r_j) for several dipole sets sharing one lattice, using
// separable per-axis phases.
template <std::size_t M>
void radiate(const cda::LatticeGeometry& lattice, double wavelength_nm,
             const std::array<const std::vector<CVec3>*, M>& dipoles, const DirectionGrid& grid,
             std::array<std::vector<CVec3>*, M> out, double scale) {
  const double k = 2.0 * kPi / wavelength_nm;
  const double a = lattice.spacing_nm;
  std::array<std::vector<cplx>, 3> phase;
  for (int ax = 0; ax < 3; ++ax) phase[ax].resize(static_cast<std::size_t>(lattice.dims[ax]));
  for (auto* o : out) o->assign(grid.size(), CVec3::Zero());

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Vec3& u = grid.directions[g];
    for (int ax = 0; ax < 3; ++ax) {
      const double centre = 0.5 * (lattice.dims[ax] - 1);
      for (int i = 0; i < lattice.dims[ax]; ++i) {
        phase[ax][static_cast<std::size_t>(i)] = std::polar(1.0, -k * u[ax] * (i - centre) * a);
      }
    }
    std::array<CVec3, M> sum;
    for (auto& s : sum) s.setZero();
    for (std::size_t j = 0; j < lattice.size(); ++j) {
      const auto& c = lattice.cells[j];
      const cplx ph = phase[0][static_cast<std::size_t>(c[0])] *
                      phase[1][static_cast<std::size_t>(c[1])] *
                      phase[2][static_cast<std::size_t>(c[2])];
      for (std::size_t m = 0; m < M; ++m) sum[m] += (*dipoles[m])[j] * ph;
    }
    const CVec3 uc = u.cast<cplx>();
    for (std::size_t m = 0; m < M; ++m) {
      const cplx along = uc.dot(sum[m]);
      (*out[m])[g] = scale * (sum[m] - along * uc);
    }
  }
}

}  // namespace

double sum_frequency_wavelength_nm(double signal_nm, double idler_nm) {
  if (!(signal_nm > 0.0) || !(idler_nm > 0.0)) throw ValidationError("wavelengths must be positive");
  return 1.0 / (1.0 / signal_nm + 1.0 / idler_nm);
}

cda::FieldMap nonlinear_polarization(const cda::FieldMap& signal, const cda::FieldMap& idler,
                                     const materials::Chi2Tensor& chi2, double sum_wavelength_nm) {
  require_same_lattice(signal, idler);
  require_field_kind(signal, "signal field");
  require_field_kind(idler, "idler field");
  const double expected = 1.0 / signal.wavelength_nm + 1.0 / idler.wavelength_nm;
  if (!(sum_wavelength_nm > 0.0) ||
      std::abs(1.0 / sum_wavelength_nm - expected) > 1e-9 * expected) {
    std::ostringstream msg;
    msg << "energy conservation violated: 1/" << sum_wavelength_nm << " != 1/"
        << signal.wavelength_nm << " + 1/" << idler.wavelength_nm;
    throw ValidationError(msg.str());
  }

  cda::FieldMap out;
  out.lattice = signal.lattice;
  out.wavelength_nm = sum_wavelength_nm;
  out.kind = cda::FieldKind::NonlinearPolarization;
  out.reference_amplitude = signal.reference_amplitude * idler.reference_amplitude;
  out.values.resize(signal.size());
  const double scale = si::kEpsilon0 * 1e-12;  // χ in pm/V
  for (std::size_t j = 0; j < signal.size(); ++j) {
    const CVec3& es = signal.values[j];
    const CVec3& ei = idler.values[j];
    out.values[j] = scale * (chi2.contract(es, ei) + chi2.contract(ei, es));
  }
  return out;
}

cda::FieldMap nonlinear_polarization(const cda::FieldMap& signal, const cda::FieldMap& idler,
                                     const materials::Chi2Tensor& chi2) {
  return nonlinear_polarization(
      signal, idler, chi2, sum_frequency_wavelength_nm(signal.wavelength_nm, idler.wavelength_nm));
}

DirectionGrid pupil_grid(double half_width, int pixels) {
  if (!(half_width > 0.0)) throw ValidationError("pupil half width must be positive");
  if (pixels < 2) throw ValidationError("pupil grid needs at least 2 pixels per side");
  DirectionGrid grid;
  grid.pixels = pixels;
  grid.half_width = half_width;
  const double pitch = grid.pixel_pitch();
  const double rmax = std::min(half_width, 1.0);
  for (int row = 0; row < pixels; ++row) {
    const double uy = half_width - row * pitch;
    for (int col = 0; col < pixels; ++col) {
      const double ux = -half_width + col * pitch;
      const double rho2 = ux * ux + uy * uy;
      if (rho2 > rmax * rmax * (1 + 1e-12) || rho2 >= 1.0) continue;
      grid.directions.emplace_back(ux, uy, std::sqrt(1.0 - rho2));
      grid.pixel.push_back(row * pixels + col);
    }
  }
  return grid;
}

DirectionGrid cone_quadrature(double na, int n_theta, int n_phi) {
  if (!(na > 0.0) || na > 1.0) throw ValidationError("NA must lie in (0, 1]");
  return theta_phi_grid(0.0, std::asin(na), n_theta, n_phi);
}

DirectionGrid sphere_quadrature(int n_theta, int n_phi) {
  return theta_phi_grid(0.0, kPi, n_theta, n_phi);
}

FarFieldMap far_field(const cda::FieldMap& nonlinear, const DirectionGrid& grid) {
  if (nonlinear.kind != cda::FieldKind::NonlinearPolarization) {
    throw ValidationError("far_field expects a nonlinear polarization map");
  }
  if (grid.size() == 0) throw ValidationError("direction grid is empty");
  if (!nonlinear.lattice) throw ValidationError("field is not attached to a lattice");
  const auto d = site_dipoles(nonlinear);
  FarFieldMap far;
  far.grid = grid;
  far.wavelength_nm = nonlinear.wavelength_nm;
  radiate<1>(*nonlinear.lattice, nonlinear.wavelength_nm, {&d}, grid, {&far.values},
             far_field_prefactor(nonlinear.wavelength_nm));
  return far;
}

double radiated_power(const cda::FieldMap& nonlinear, cda::GreenBackend backend) {
  if (nonlinear.kind != cda::FieldKind::NonlinearPolarization) {
    throw ValidationError("radiated_power expects a nonlinear polarization map");
  }
  const auto d = site_dipoles(nonlinear);
  const double k_nm = 2.0 * kPi / nonlinear.wavelength_nm;
  auto op = cda::detail::make_interaction(*nonlinear.lattice, k_nm, backend);
  std::vector<CVec3> gd(d.size());
  op->apply({reinterpret_cast<const cplx*>(d.data()), 3 * d.size()},
            {reinterpret_cast<cplx*>(gd.data()), 3 * gd.size()});
  // Σ_jk d_j† Im G_jk d_k = Im Σ_j d_j† (G d)_j for symmetric G; the self
  // term is Im G(0) = (2/3) k³.
  double self = 0.0;
  cplx cross{};
  for (std::size_t j = 0; j < d.size(); ++j) {
    self += d[j].squaredNorm();
    cross += d[j].dot(gd[j]);
  }
  const double k = k_nm / kNm;
  const double total = self + 1.5 / (k_nm * k_nm * k_nm) * std::imag(cross);
  return si::kSpeedOfLight * k * k * k * k / (12.0 * kPi * si::kEpsilon0) * total;
}

Analyzer analyzer_from_label(const std::string& label) {
  std::string up;
  for (char c : label) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (up == "H") return Analyzer::H;
  if (up == "V") return Analyzer::V;
  if (up == "NONE" || up.empty()) return Analyzer::None;
  throw ValidationError("unknown analyzer '" + label + "' (expected H, V or none)");
}

std::string to_string(Analyzer analyzer) {
  switch (analyzer) {
    case Analyzer::H:
      return "H";
    case Analyzer::V:
      return "V";
    case Analyzer::None:
      break;
  }
  return "none";
}

double analyzed_intensity(const Vec3& u, const CVec3& field, Analyzer analyzer) {
  if (analyzer == Analyzer::None) return field.squaredNorm();
  const double rho = std::hypot(u.x(), u.y());
  const double cphi = rho > 0.0 ? u.x() / rho : 1.0;
  const double sphi = rho > 0.0 ? u.y() / rho : 0.0;
  const double ct = u.z(), st = rho;
  const Vec3 theta_hat(ct * cphi, ct * sphi, -st);
  const Vec3 phi_hat(-sphi, cphi, 0.0);
  const cplx e_theta = field.x() * theta_hat.x() + field.y() * theta_hat.y() + field.z() * theta_hat.z();
  const cplx e_phi = field.x() * phi_hat.x() + field.y() * phi_hat.y();
  const cplx out = analyzer == Analyzer::H ? e_theta * cphi - e_phi * sphi
                                           : e_theta * sphi + e_phi * cphi;
  return std::norm(out);
}

double integrated_power(const FarFieldMap& far, Analyzer analyzer) {
  if (far.grid.weights.size() != far.values.size()) {
    throw ValidationError("far field was not sampled on a quadrature grid");
  }
  double sum = 0.0;
  for (std::size_t g = 0; g < far.values.size(); ++g) {
    sum += far.grid.weights[g] * analyzed_intensity(far.grid.directions[g], far.values[g], analyzer);
  }
  return sum;
}

BfpImage bfp_image(const FarFieldMap& far, double na, Analyzer analyzer) {
  if (!(na > 0.0) || na > 1.0) throw ValidationError("NA must lie in (0, 1]");
  if (!far.grid.is_pupil()) throw ValidationError("far field was not sampled on a pupil grid");
  BfpImage img;
  img.pixels = far.grid.pixels;
  img.half_width = far.grid.half_width;
  img.na = na;
  img.analyzer = analyzer;
  img.intensity.assign(static_cast<std::size_t>(img.pixels * img.pixels), 0.0);
  for (std::size_t g = 0; g < far.values.size(); ++g) {
    const Vec3& u = far.grid.directions[g];
    if (u.x() * u.x() + u.y() * u.y() > na * na) continue;
    img.intensity[static_cast<std::size_t>(far.grid.pixel[g])] =
        analyzed_intensity(u, far.values[g], analyzer);
  }
  return img;
}

void write_pgm(std::ostream& out, const BfpImage& image, std::span<const std::string> comments) {
  constexpr int kMax = 65535;
  const double peak = image.intensity.empty()
                          ? 0.0
                          : *std::max_element(image.intensity.begin(), image.intensity.end());
  out << "P2\n";
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "# analyzer " << to_string(image.analyzer) << " na " << image.na << " u_per_pixel "
      << std::setprecision(10) << 2.0 * image.half_width / (image.pixels - 1) << " peak_w_per_sr "
      << peak << '\n';
  out << image.pixels << ' ' << image.pixels << '\n' << kMax << '\n';
  for (int r = 0; r < image.pixels; ++r) {
    for (int c = 0; c < image.pixels; ++c) {
      const double v = peak > 0.0 ? image.at(r, c) / peak : 0.0;
      out << (c ? " " : "") << static_cast<int>(std::lround(v * kMax));
    }
    out << '\n';
  }
}

SfgResult sfg_efficiency(double p_sf_w, double p_signal_w, double p_idler_w, double area_signal_m2,
                         double area_idler_m2, double p_sf_h_w, double p_sf_v_w) {
  if (!(p_signal_w > 0.0) || !(p_idler_w > 0.0)) {
    throw ValidationError("signal and idler powers must be positive");
  }
  if (!(area_signal_m2 > 0.0) || !(area_idler_m2 > 0.0)) {
    throw ValidationError("spot areas must be positive");
  }
  if (p_sf_w < 0.0) throw ValidationError("SFG power must be non-negative");
  SfgResult r;
  r.p_sf_w = p_sf_w;
  r.p_sf_h_w = p_sf_h_w;
  r.p_sf_v_w = p_sf_v_w;
  r.eta_per_w = p_sf_w / (p_signal_w * p_idler_w);
  r.xi_m4_per_w = r.eta_per_w * area_signal_m2 * area_idler_m2;
  return r;
}

double gaussian_peak_field(double power_w, double waist_nm) {
  if (power_w < 0.0) throw ValidationError("beam power must be non-negative");
  const double w = waist_nm * kNm;
  const double peak_intensity = 2.0 * power_w / (kPi * w * w);
  return std::sqrt(2.0 * peak_intensity / (si::kSpeedOfLight * si::kEpsilon0));
}

double spot_area_m2(double waist_nm) {
  const double w = waist_nm * kNm;
  return kPi * w * w;
}

SfgModel::SfgModel(const cda::Geometry& geometry, const materials::DispersionModel& dispersion,
                   const materials::Chi2Tensor& chi2, const SfgSetup& setup)
    : setup_(setup), chi2_(chi2) {
  lambda_sf_ = sum_frequency_wavelength_nm(setup.signal_nm, setup.idler_nm);
  if (!(setup.waist_nm > 0.0)) throw ValidationError("beam waist must be positive");
  const double a = setup.spacing_nm > 0.0
                       ? setup.spacing_nm
                       : cda::default_spacing_nm(std::min(setup.signal_nm, setup.idler_nm));
  lattice_ = cda::discretize_geometry(geometry, a);

  const std::array<double, 4> wavelengths = {setup.signal_nm, setup.signal_nm, setup.idler_nm,
                                             setup.idler_nm};
  const std::array<double, 4> powers = {setup.signal_power_w, setup.signal_power_w,
                                        setup.idler_power_w, setup.idler_power_w};
  parallel_for(4, setup.threads, [&](std::size_t job) {
    const auto lattice = cda::assign_polarizability(lattice_, wavelengths[job], dispersion);
    const auto pol = job % 2 == 0 ? PolarizationState::H() : PolarizationState::V();
    const auto incident =
        cda::incident_field(lattice, cda::GaussianBeam{setup.waist_nm}, pol,
                            gaussian_peak_field(powers[job], setup.waist_nm));
    const auto dipoles = cda::solve_polarizations(lattice, incident, setup.solver);
    fields_[job] = cda::internal_field(lattice, dipoles);
  });
}

cda::FieldMap SfgModel::internal_field(const PolarizationState& polarization, bool idler) const {
  const auto& h = fields_[idler ? 2 : 0];
  const auto& v = fields_[idler ? 3 : 1];
  const cplx jx = polarization.jones()[0], jy = polarization.jones()[1];
  cda::FieldMap out = h;
  for (std::size_t j = 0; j < out.size(); ++j) out.values[j] = jx * h.values[j] + jy * v.values[j];
  return out;
}

cda::FieldMap SfgModel::nonlinear_polarization(const PolarizationState& signal,
                                               const PolarizationState& idler) const {
  return sfg::nonlinear_polarization(internal_field(signal, false), internal_field(idler, true),
                                     chi2_, lambda_sf_);
}

std::array<FarFieldMap, 4> SfgModel::basis_far_fields(const DirectionGrid& grid) const {
  if (grid.size() == 0) throw ValidationError("direction grid is empty");
  std::array<std::vector<CVec3>, 4> dipoles;
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 2; ++i) {
      const auto p = sfg::nonlinear_polarization(fields_[static_cast<std::size_t>(s)],
                                                 fields_[static_cast<std::size_t>(2 + i)], chi2_,
                                                 lambda_sf_);
      dipoles[static_cast<std::size_t>(2 * s + i)] = site_dipoles(p);
    }
  std::array<FarFieldMap, 4> out;
  for (auto& f : out) {
    f.grid = grid;
    f.wavelength_nm = lambda_sf_;
  }
  radiate<4>(*lattice_, lambda_sf_, {&dipoles[0], &dipoles[1], &dipoles[2], &dipoles[3]}, grid,
             {&out[0].values, &out[1].values, &out[2].values, &out[3].values},
             far_field_prefactor(lambda_sf_));
  return out;
}

FarFieldMap SfgModel::combine(const std::array<FarFieldMap, 4>& basis,
                              const PolarizationState& signal, const PolarizationState& idler) {
  FarFieldMap out;
  out.grid = basis[0].grid;
  out.wavelength_nm = basis[0].wavelength_nm;
  out.values.assign(basis[0].values.size(), CVec3::Zero());
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 2; ++i) {
      const cplx c = signal.jones()[s] * idler.jones()[i];
      if (c == cplx{}) continue;
      const auto& b = basis[static_cast<std::size_t>(2 * s + i)].values;
      for (std::size_t g = 0; g < b.size(); ++g) out.values[g] += c * b[g];
    }
  return out;
}

SfgMap sfg_map_16(const SfgModel& model, Analyzer analyzer, double na, int n_theta, int n_phi) {
  const auto grid = cone_quadrature(na, n_theta, n_phi);
  const auto basis = model.basis_far_fields(grid);
  SfgMap map;
  map.analyzer = analyzer;
  map.na = na;
  double peak = 0.0;
  for (int s = 0; s < 4; ++s)
    for (int i = 0; i < 4; ++i) {
      const auto far = SfgModel::combine(basis, PolarizationState::from_label(kMapLabels[s]),
                                         PolarizationState::from_label(kMapLabels[i]));
      map.power_w[s][i] = integrated_power(far, analyzer);
      peak = std::max(peak, map.power_w[s][i]);
    }
  for (int s = 0; s < 4; ++s)
    for (int i = 0; i < 4; ++i) map.normalized[s][i] = peak > 0.0 ? map.power_w[s][i] / peak : 0.0;
  return map;
}

void write_map_csv(std::ostream& out, const SfgMap& map, bool normalized,
                   std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "signal\\idler";
  for (const char* l : kMapLabels) out << ',' << l;
  out << '\n';
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(10);
  for (int s = 0; s < 4; ++s) {
    out << kMapLabels[s];
    for (int i = 0; i < 4; ++i) out << ',' << (normalized ? map.normalized[s][i] : map.power_w[s][i]);
    out << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

std::vector<double> delay_scan(double pulse_fwhm_fs, std::span<const double> delays_fs) {
  if (!(pulse_fwhm_fs > 0.0)) throw ValidationError("pulse FWHM must be positive");
  const double c = 4.0 * std::log(2.0) / (pulse_fwhm_fs * pulse_fwhm_fs);
  auto envelope = [c](double t) { return std::exp(-c * t * t); };
  const double dt = pulse_fwhm_fs / 200.0;
  const int half = 1200;  // ±6 FWHM
  auto overlap = [&](double tau) {
    double s = 0.0;
    for (int n = -half; n <= half; ++n) {
      const double t = n * dt;
      s += envelope(t) * envelope(t - tau);
    }
    return s * dt;
  };
  const double norm = overlap(0.0);
  std::vector<double> out;
  out.reserve(delays_fs.size());
  for (double tau : delays_fs) out.push_back(overlap(tau) / norm);
  return out;
}

}  // namespace nanopair::sfg
