#include <doctest.h>

#include <sstream>

#include "nanopair/cda.hpp"
#include "nanopair/error.hpp"

using namespace nanopair;
using namespace nanopair::cda;

namespace {

double rel(double a, double b) { return std::abs(a / b - 1.0); }

struct Solved {
  DipoleLattice lattice;
  FieldMap incident;
  FieldMap dipoles;
  SolverReport report;
};

Solved solve(const Geometry& g, double a, double wl, const materials::DispersionModel& m,
             const PolarizationState& pol = PolarizationState::H(), SolverOptions opt = {}) {
  Solved s{discretize(g, a, wl, m), {}, {}, {}};
  s.incident = incident_field(s.lattice, PlaneWave{}, pol, 1.0);
  s.dipoles = solve_polarizations(s.lattice, s.incident, opt, &s.report);
  return s;
}

}  // namespace

// Reference efficiencies from an independent scipy Riccati-Bessel
// implementation (tests/oracles/mie_oracle.py).
TEST_CASE("Mie series matches the independent oracle") {
  struct Case {
    double r;
    cplx m;
    double wl;
    double q_sca;
    double q_ext;
  };
  const Case cases[] = {
      {100, {3.5, 0}, 1000, 3.921364889440e-01, 3.921364889440e-01},
      {1, {1.5, 0}, 1000, 3.595270587103e-10, 3.595270587103e-10},
      {150, {1.5, 0.1}, 600, 7.397566966526e-01, 1.251777848193e+00},
      {200, {3.3, 0}, 1550, 1.793367441736e+00, 1.793367441736e+00},
      {80, {2.0, 0}, 500, 8.131160983930e-01, 8.131160983930e-01},
      {240, {3.29, 0}, 1550, 5.732249610967e+00, 5.732249610967e+00},
  };
  for (const auto& c : cases) {
    const auto mie = mie_reference(c.r, c.m, c.wl);
    CHECK(rel(mie.q_sca, c.q_sca) < 1e-9);
    CHECK(rel(mie.q_ext, c.q_ext) < 1e-9);
  }
}

TEST_CASE("Mie limits") {
  const double x = 2 * kPi * 1.0 / 1000.0;
  const cplx m = 1.5;
  const double rayleigh = 8.0 / 3.0 * std::pow(x, 4) * std::norm((m * m - 1.0) / (m * m + 2.0));
  CHECK(rel(mie_reference(1.0, m, 1000.0).q_sca, rayleigh) < 0.01);
  const auto matched = mie_reference(300.0, 1.0, 800.0);
  CHECK(std::abs(matched.q_sca) < 1e-14);
  CHECK(std::abs(matched.q_ext) < 1e-14);
}

TEST_CASE("Green tensor is symmetric and reciprocal") {
  const Vec3 r(13.0, -7.0, 21.0);
  const double k = 2 * kPi / 800.0;
  const CMat3 g = green_tensor(r, k);
  CHECK((g - g.transpose()).norm() < 1e-15 * g.norm());
  CHECK((g - green_tensor(-r, k)).norm() < 1e-15 * g.norm());
}

TEST_CASE("incident field conventions") {
  const auto lat = discretize(Geometry::sphere(60.0), 10.0, 1000.0, materials::constant_index("s", 2.0));
  const auto h = incident_field(lat, PlaneWave{}, PolarizationState::H(), 2.0);
  CHECK(h.reference_amplitude == 2.0);
  for (std::size_t j = 0; j < lat.size(); ++j) {
    CHECK(std::abs(h.values[j].x()) == doctest::Approx(2.0));
    CHECK(std::abs(h.values[j].y()) == 0.0);
    CHECK(std::abs(h.values[j].z()) == 0.0);
  }
  const auto r = incident_field(lat, PlaneWave{}, PolarizationState::R(), 1.0);
  const CVec3 v = r.values[0] / r.values[0].x();
  CHECK(v.y().real() == doctest::Approx(0.0));
  CHECK(v.y().imag() == doctest::Approx(-1.0));
}

TEST_CASE("zero excitation gives zero dipoles") {
  const auto lat = discretize(Geometry::sphere(60.0), 10.0, 1000.0, materials::constant_index("s", 3.0));
  auto inc = incident_field(lat, PlaneWave{}, PolarizationState::H(), 0.0);
  SolverReport rep;
  const auto p = solve_polarizations(lat, inc, {}, &rep);
  CHECK(rep.residual == 0.0);
  for (const auto& v : p.values) CHECK(v.norm() == 0.0);
}

TEST_CASE("linearity in the incident amplitude") {
  const auto m = materials::constant_index("s", {3.0, 0.05});
  const auto base = solve(Geometry::sphere(80.0), 10.0, 900.0, m, PolarizationState::H(), {1e-10, 3000});
  const auto q0 = cross_sections(base.lattice, base.incident, base.dipoles);
  for (const cplx alpha : {cplx(2.0), cplx(0, 1), cplx(0.5, -0.5)}) {
    auto inc = base.incident;
    for (auto& v : inc.values) v *= alpha;
    inc.reference_amplitude *= std::abs(alpha);
    const auto p = solve_polarizations(base.lattice, inc, {1e-10, 3000});
    double worst = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j)
      worst = std::max(worst, (p.values[j] - alpha * base.dipoles.values[j]).norm() / base.dipoles.values[j].norm());
    CHECK(worst < 1e-7);
    const auto q = cross_sections(base.lattice, inc, p);
    CHECK(rel(q.q_sca, q0.q_sca) < 1e-7);
    CHECK(rel(q.q_ext, q0.q_ext) < 1e-7);
  }
}

TEST_CASE("extinction equals absorption plus scattering") {
  const auto m = materials::constant_index("s", {2.5, 0.2});
  const auto s = solve(Geometry::sphere(90.0), 10.0, 800.0, m);
  const auto q = cross_sections(s.lattice, s.incident, s.dipoles);
  CHECK(q.q_abs > 0.0);
  CHECK(q.q_sca > 0.0);
  CHECK(std::abs(q.q_ext - q.q_abs - q.q_sca) <= 1e-6 * q.q_ext);
}

TEST_CASE("direct and FFT interaction agree") {
  const auto lat = discretize(Geometry::cylinder(200.0, 160.0), 12.0, 1200.0, materials::algaas_x018());
  std::vector<CVec3> d(lat.size());
  for (std::size_t j = 0; j < d.size(); ++j)
    d[j] = CVec3(cplx(std::sin(0.1 * j), 0.3), cplx(1.0, std::cos(0.07 * j)), cplx(0.2 * (j % 5), -0.1));
  const auto a = apply_interaction(lat, d, GreenBackend::Direct);
  const auto b = apply_interaction(lat, d, GreenBackend::Fft);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    num += (a[j] - b[j]).squaredNorm();
    den += a[j].squaredNorm();
  }
  CHECK(std::sqrt(num / den) < 1e-10);
}

TEST_CASE("Krylov methods agree") {
  const auto m = materials::constant_index("s", 3.5);
  SolverOptions cocg{1e-9, 3000, GreenBackend::Auto, KrylovMethod::Cocg};
  SolverOptions gmres{1e-9, 3000, GreenBackend::Auto, KrylovMethod::Gmres, 50};
  SolverOptions bicg{1e-9, 3000, GreenBackend::Auto, KrylovMethod::Bicgstab};
  const auto a = solve(Geometry::sphere(100.0), 10.0, 1000.0, m, PolarizationState::H(), cocg);
  const auto b = solve(Geometry::sphere(100.0), 10.0, 1000.0, m, PolarizationState::H(), gmres);
  const auto c = solve(Geometry::sphere(100.0), 10.0, 1000.0, m, PolarizationState::H(), bicg);
  const double qa = cross_sections(a.lattice, a.incident, a.dipoles).q_sca;
  CHECK(rel(cross_sections(b.lattice, b.incident, b.dipoles).q_sca, qa) < 1e-7);
  CHECK(rel(cross_sections(c.lattice, c.incident, c.dipoles).q_sca, qa) < 1e-7);
  CHECK(a.report.residual <= 1e-9);
  CHECK(b.report.residual <= 1e-9);
  CHECK(c.report.residual <= 1e-9);
}

TEST_CASE("non-convergence is reported with the residual") {
  const auto m = materials::constant_index("s", 3.5);
  const auto lat = discretize(Geometry::sphere(100.0), 10.0, 1000.0, m);
  const auto inc = incident_field(lat, PlaneWave{}, PolarizationState::H(), 1.0);
  try {
    solve_polarizations(lat, inc, {1e-12, 2});
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual() > 1e-12);
  }
}

TEST_CASE("validity rule names the admissible spacing") {
  const auto m = materials::constant_index("s", 3.5);
  try {
    discretize(Geometry::sphere(100.0), 30.0, 1000.0, m);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("22.7") != std::string::npos);
  }
  CHECK(max_spacing_nm(3.5, 1000.0) == doctest::Approx(0.5 * 1000.0 / (2 * kPi * 3.5)));
  CHECK_THROWS_AS(discretize(Geometry::cylinder(430, 400), 0.0, 1550, materials::algaas_x018()), ValidationError);
}

TEST_CASE("volume matching preserves the shape volume") {
  const auto g = Geometry::cylinder();
  const auto on = discretize_geometry(g, 15.0, VolumeMatch::On);
  const auto off = discretize_geometry(g, 15.0, VolumeMatch::Off);
  CHECK(on->size() == off->size());
  CHECK(on->size() * std::pow(on->spacing_nm, 3) == doctest::Approx(g.volume_nm3()).epsilon(1e-12));
  CHECK(off->spacing_nm == 15.0);
  CHECK(on->nominal_spacing_nm == 15.0);
  for (const auto& p : on->positions_nm) CHECK(g.contains(p));
}

TEST_CASE("sphere efficiency within 5% of Mie") {
  const auto m = materials::constant_index("s", 3.5);
  const auto s = solve(Geometry::sphere(100.0), 10.0, 1000.0, m);
  const auto q = cross_sections(s.lattice, s.incident, s.dipoles);
  CHECK(rel(q.q_sca, mie_reference(100.0, 3.5, 1000.0).q_sca) < 0.05);
}

TEST_CASE("H and V efficiencies agree for a cylinder") {
  const auto g = Geometry::cylinder(250.0, 200.0);
  const auto h = solve(g, 12.0, 1100.0, materials::algaas_x018(), PolarizationState::H());
  const auto v = solve(g, 12.0, 1100.0, materials::algaas_x018(), PolarizationState::V());
  CHECK(rel(cross_sections(h.lattice, h.incident, h.dipoles).q_sca,
            cross_sections(v.lattice, v.incident, v.dipoles).q_sca) < 0.02);
}

TEST_CASE("spectrum input checks and CSV layout") {
  const auto m = materials::constant_index("s", 2.0);
  std::vector<double> none;
  CHECK_THROWS_AS(scattering_spectrum(Geometry::sphere(50.0), none, m), ValidationError);
  std::vector<double> unsorted = {700.0, 600.0};
  CHECK_THROWS_AS(scattering_spectrum(Geometry::sphere(50.0), unsorted, m), ValidationError);

  std::vector<double> wl = {600.0, 700.0};
  SpectrumOptions opt;
  opt.spacing_nm = 10.0;
  const auto sp = scattering_spectrum(Geometry::sphere(50.0), wl, m, opt);
  REQUIRE(sp.entries.size() == 2);
  for (const auto& e : sp.entries) {
    CHECK(std::abs(e.q_ext - e.q_abs - e.q_sca) <= 1e-6 * e.q_ext);
    CHECK(e.partials.count("ED") == 1);
    CHECK(e.partials.count("MD") == 1);
  }
  std::ostringstream csv;
  write_spectrum_csv(csv, sp);
  CHECK(csv.str().rfind("lambda_nm,Q_ext,Q_abs,Q_sca,Q_ED,Q_MD,Q_EQ,Q_MQ\n", 0) == 0);

  std::vector<double> out_of_table = {300.0};
  try {
    scattering_spectrum(Geometry::cylinder(), out_of_table, materials::algaas_x018());
    FAIL("expected RangeError");
  } catch (const RangeError& e) {
    CHECK(std::string(e.what()).find("300") != std::string::npos);
  }
}
