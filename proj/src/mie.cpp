#include <cmath>

#include "nanopair/cda.hpp"
#include "nanopair/error.hpp"

namespace nanopair::cda {

// Bohren & Huffman formulation: logarithmic derivative D_n(mx) by downward
// recurrence, Riccati-Bessel ψ_n, χ_n by upward recurrence.
MieResult mie_reference(double radius_nm, cplx m, double wavelength_nm) {
  if (!(radius_nm > 0.0) || !(wavelength_nm > 0.0)) {
    throw ValidationError("Mie radius and wavelength must be positive");
  }
  MieResult out;
  const double x = 2.0 * kPi * radius_nm / wavelength_nm;
  out.size_parameter = x;
  const int nstop = static_cast<int>(std::ceil(x + 4.0 * std::cbrt(x) + 2.0));
  const cplx mx = m * x;
  const int nmx = static_cast<int>(std::max(static_cast<double>(nstop), std::abs(mx))) + 16;

  std::vector<cplx> d(nmx + 1);
  d[nmx] = 0.0;
  for (int n = nmx; n >= 1; --n) {
    const double nn = n;
    d[n - 1] = nn / mx - 1.0 / (d[n] + nn / mx);
  }

  double psi0 = std::cos(x), psi1 = std::sin(x);
  double chi0 = -std::sin(x), chi1 = std::cos(x);
  cplx xi1(psi1, -chi1);
  double q_sca = 0.0, q_ext = 0.0;
  for (int n = 1; n <= nstop; ++n) {
    const double nn = n;
    const double psi = (2.0 * nn - 1.0) * psi1 / x - psi0;
    const double chi = (2.0 * nn - 1.0) * chi1 / x - chi0;
    const cplx xi(psi, -chi);
    const cplx an = ((d[n] / m + nn / x) * psi - psi1) / ((d[n] / m + nn / x) * xi - xi1);
    const cplx bn = ((d[n] * m + nn / x) * psi - psi1) / ((d[n] * m + nn / x) * xi - xi1);
    out.a.push_back(an);
    out.b.push_back(bn);
    q_sca += (2.0 * nn + 1.0) * (std::norm(an) + std::norm(bn));
    q_ext += (2.0 * nn + 1.0) * std::real(an + bn);
    psi0 = psi1;
    psi1 = psi;
    chi0 = chi1;
    chi1 = chi;
    xi1 = cplx(psi1, -chi1);
  }
  out.q_sca = 2.0 / (x * x) * q_sca;
  out.q_ext = 2.0 / (x * x) * q_ext;
  return out;
}

}  // namespace nanopair::cda
