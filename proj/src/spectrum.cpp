#include <iomanip>
#include <ostream>
#include <sstream>

#include "nanopair/cda.hpp"
#include "nanopair/error.hpp"
#include "nanopair/multipole.hpp"
#include "nanopair/parallel.hpp"

namespace nanopair::cda {

namespace {

template <class E>
[[noreturn]] void rethrow_annotated(const E& e, double wavelength_nm) {
  std::ostringstream msg;
  msg << "at " << wavelength_nm << " nm: " << e.what();
  if constexpr (std::is_same_v<E, ConvergenceError>) {
    throw ConvergenceError(msg.str(), e.residual());
  } else {
    throw E(msg.str());
  }
}

}  // namespace

ScatteringSpectrum scattering_spectrum(const Geometry& geometry,
                                       std::span<const double> wavelengths_nm,
                                       const materials::DispersionModel& dispersion,
                                       const SpectrumOptions& options) {
  if (wavelengths_nm.empty()) throw ValidationError("wavelength grid is empty");
  for (std::size_t i = 1; i < wavelengths_nm.size(); ++i) {
    if (!(wavelengths_nm[i] > wavelengths_nm[i - 1])) {
      throw ValidationError("wavelength grid must be strictly increasing");
    }
  }

  ScatteringSpectrum spectrum;
  spectrum.entries.resize(wavelengths_nm.size());
  parallel_for(wavelengths_nm.size(), options.threads, [&](std::size_t i) {
    const double lambda = wavelengths_nm[i];
    try {
      const double a = options.spacing_nm > 0.0 ? options.spacing_nm : default_spacing_nm(lambda);
      const auto lattice =
          discretize(geometry, a, lambda, dispersion, options.background_index, options.volume_match);
      const auto incident = incident_field(lattice, options.excitation, options.polarization, 1.0);
      SolverReport report;
      const auto dipoles = solve_polarizations(lattice, incident, options.solver, &report);
      const auto cs = cross_sections(lattice, incident, dipoles);
      const auto moments = multipole::decompose(lattice, dipoles);

      SpectrumEntry& e = spectrum.entries[i];
      e.wavelength_nm = lambda;
      e.q_ext = cs.q_ext;
      e.q_abs = cs.q_abs;
      e.q_sca = cs.q_sca;
      e.partials = moments.partial_q;
      e.iterations = report.iterations;
    } catch (const ConvergenceError& e) {
      rethrow_annotated(e, lambda);
    } catch (const ValidationError& e) {
      rethrow_annotated(e, lambda);
    } catch (const RangeError& e) {
      rethrow_annotated(e, lambda);
    }
  });
  return spectrum;
}

void write_spectrum_csv(std::ostream& out, const ScatteringSpectrum& spectrum,
                        bool with_quadrupoles) {
  out << "lambda_nm,Q_ext,Q_abs,Q_sca,Q_ED,Q_MD";
  if (with_quadrupoles) out << ",Q_EQ,Q_MQ";
  out << '\n';
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(10);
  for (const auto& e : spectrum.entries) {
    auto part = [&](const char* name) {
      auto it = e.partials.find(name);
      return it == e.partials.end() ? 0.0 : it->second;
    };
    out << e.wavelength_nm << ',' << e.q_ext << ',' << e.q_abs << ',' << e.q_sca << ','
        << part("ED") << ',' << part("MD");
    if (with_quadrupoles) out << ',' << part("EQ") << ',' << part("MQ");
    out << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

}  // namespace nanopair::cda
