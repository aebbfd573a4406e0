#pragma once

#include <array>
#include <map>
#include <span>
#include <string>

#include "nanopair/cda.hpp"
#include "nanopair/types.hpp"

namespace nanopair::multipole {

/// Cartesian multipoles of an induced dipole distribution about the origin.
///
/// All moments share the unit of the lattice dipoles (Gaussian style);
/// the magnetic moments are expressed as m/c so that electric and magnetic
/// terms of the same order radiate with the same prefactor.
struct MultipoleMoments {
  CVec3 p = CVec3::Zero();        // electric dipole incl. toroidal correction
  CVec3 m = CVec3::Zero();        // magnetic dipole
  CMat3 q_e = CMat3::Zero();      // electric quadrupole (traceless, symmetric)
  CMat3 q_m = CMat3::Zero();      // magnetic quadrupole (traceless, symmetric)
  double wavelength_nm = 0.0;
  std::map<std::string, double> partial_q;  // ED, MD, EQ, MQ scattering efficiencies
};

/// Long-wavelength multipole sums with the first-order toroidal correction
/// to the electric dipole. Partial efficiencies are normalized by |E₀|² of
/// the exciting beam and by π r² of the lattice's geometric cross section.
MultipoleMoments decompose(const cda::DipoleLattice& lattice, const cda::FieldMap& polarizations);

/// |m_x|, |m_y|, |m_z|, |p_x|, |p_y|, |p_z|.
std::array<double, 6> dipole_components(const MultipoleMoments& moments);

struct ResonanceFit {
  double lambda0_nm = 0.0;
  double fwhm_nm = 0.0;
  double q = 0.0;  // λ₀ / FWHM
  double amplitude = 0.0;
  double baseline = 0.0;
  double residual = 0.0;  // RMS of the fit residuals
};

/// Least-squares Lorentzian + constant baseline, initialized from the
/// discrete maximum. Needs >= 7 points with the maximum strictly inside the
/// window; throws FitError otherwise.
ResonanceFit fit_lorentzian(std::span<const double> wavelengths_nm, std::span<const double> values);

enum class Channel { Total, ED, MD };

/// Fits one channel of a spectrum restricted to [lo, hi] nm (inclusive).
ResonanceFit fit_resonance(const cda::ScatteringSpectrum& spectrum, Channel channel,
                           double lo_nm, double hi_nm);

}  // namespace nanopair::multipole
