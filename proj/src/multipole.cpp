#include "nanopair/multipole.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levmar.hpp"
#include "nanopair/error.hpp"

namespace nanopair::multipole {

MultipoleMoments decompose(const cda::DipoleLattice& lattice, const cda::FieldMap& polarizations) {
  if (polarizations.size() != lattice.size()) {
    throw ValidationError("polarization map has " + std::to_string(polarizations.size()) +
                          " sites, lattice has " + std::to_string(lattice.size()));
  }
  const double k = lattice.wavenumber();
  const auto& positions = lattice.geometry->positions_nm;

  MultipoleMoments mm;
  mm.wavelength_nm = lattice.wavelength_nm;
  CVec3 toroidal = CVec3::Zero();
  for (std::size_t j = 0; j < lattice.size(); ++j) {
    const CVec3 r = positions[j].cast<cplx>();
    const CVec3& p = polarizations.values[j];
    const cplx rp = r.transpose() * p;  // unconjugated r·p
    const double r2 = positions[j].squaredNorm();
    mm.p += p;
    toroidal += rp * r - 2.0 * r2 * p;
    const CVec3 rxp = r.cross(p);
    mm.m += rxp;
    mm.q_e += r * p.transpose() + p * r.transpose() - (2.0 / 3.0) * rp * CMat3::Identity();
    mm.q_m += rxp * r.transpose() + r * rxp.transpose();
  }
  mm.p += (k * k / 10.0) * toroidal;
  mm.m *= -0.5 * kI * k;
  mm.q_e *= 3.0;
  mm.q_m *= k / (3.0 * kI);

  const double e0 = polarizations.reference_amplitude;
  const double radius = lattice.geometry->cross_section_radius_nm;
  const double area = kPi * radius * radius;
  double ed = 0, md = 0, eq = 0, mq = 0;
  if (e0 > 0.0) {
    const double k4 = k * k * k * k;
    const double k6 = k4 * k * k;
    const double norm = 1.0 / (e0 * e0 * area);
    ed = 8.0 * kPi / 3.0 * k4 * mm.p.squaredNorm() * norm;
    md = 8.0 * kPi / 3.0 * k4 * mm.m.squaredNorm() * norm;
    eq = kPi * k6 / 45.0 * mm.q_e.squaredNorm() * norm;
    mq = kPi * k6 / 5.0 * mm.q_m.squaredNorm() * norm;
  }
  mm.partial_q = {{"ED", ed}, {"MD", md}, {"EQ", eq}, {"MQ", mq}};
  return mm;
}

std::array<double, 6> dipole_components(const MultipoleMoments& mm) {
  return {std::abs(mm.m.x()), std::abs(mm.m.y()), std::abs(mm.m.z()),
          std::abs(mm.p.x()), std::abs(mm.p.y()), std::abs(mm.p.z())};
}

ResonanceFit fit_lorentzian(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw ValidationError("fit_lorentzian: x and y lengths differ");
  if (n < 7) throw FitError("resonance fit needs at least 7 points, got " + std::to_string(n));
  for (std::size_t i = 1; i < n; ++i)
    if (!(x[i] > x[i - 1])) throw ValidationError("fit_lorentzian: wavelengths must increase");

  const auto imax = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  if (imax == 0 || imax == n - 1 || !(y[imax] > y[imax - 1] || y[imax] > y[imax + 1])) {
    throw FitError("no local maximum inside the fit window");
  }
  const double ymin = *std::min_element(y.begin(), y.end());
  const double amp0 = y[imax] - ymin;
  const double half = ymin + 0.5 * amp0;

  auto crossing = [&](int dir) -> double {
    for (std::size_t i = imax; (dir < 0 ? i > 0 : i + 1 < n); i += dir) {
      const std::size_t j = i + dir;
      if (y[j] <= half) return x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    }
    return dir < 0 ? x.front() : x.back();
  };
  const double left = crossing(-1);
  const double right = crossing(+1);
  double fwhm0 = right - left;
  if (!(fwhm0 > 0.0)) fwhm0 = x[std::min(imax + 1, n - 1)] - x[imax - 1];

  Eigen::VectorXd p(4);
  p << x[imax], fwhm0, amp0, ymin;
  auto residual = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    const double hw = 0.5 * q[1];
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (x[i] - q[0]) / hw;
      r[static_cast<Eigen::Index>(i)] = q[3] + q[2] / (1.0 + u * u) - y[i];
    }
  };
  const auto lm = detail::levenberg_marquardt(residual, p, static_cast<int>(n));

  ResonanceFit fit;
  fit.lambda0_nm = lm.params[0];
  fit.fwhm_nm = std::abs(lm.params[1]);
  fit.amplitude = lm.params[2];
  fit.baseline = lm.params[3];
  fit.residual = std::sqrt(2.0 * lm.cost / static_cast<double>(n));
  if (!(fit.fwhm_nm > 0.0) || !std::isfinite(fit.lambda0_nm)) {
    throw FitError("resonance fit degenerated (zero width)");
  }
  if (fit.lambda0_nm < x.front() || fit.lambda0_nm > x.back()) {
    std::ostringstream msg;
    msg << "fitted resonance centre " << fit.lambda0_nm << " nm left the window [" << x.front()
        << ", " << x.back() << "] nm";
    throw FitError(msg.str());
  }
  fit.q = fit.lambda0_nm / fit.fwhm_nm;
  return fit;
}

ResonanceFit fit_resonance(const cda::ScatteringSpectrum& spectrum, Channel channel, double lo_nm,
                           double hi_nm) {
  std::vector<double> x, y;
  for (const auto& e : spectrum.entries) {
    if (e.wavelength_nm < lo_nm || e.wavelength_nm > hi_nm) continue;
    x.push_back(e.wavelength_nm);
    switch (channel) {
      case Channel::Total:
        y.push_back(e.q_sca);
        break;
      case Channel::ED:
        y.push_back(e.partials.at("ED"));
        break;
      case Channel::MD:
        y.push_back(e.partials.at("MD"));
        break;
    }
  }
  return fit_lorentzian(x, y);
}

}  // namespace nanopair::multipole
