#include <doctest.h>

#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "nanopair/error.hpp"
#include "nanopair/materials.hpp"

using namespace nanopair;
using namespace nanopair::materials;

namespace {

Mat3 rotation_z(double deg) {
  return Eigen::AngleAxisd(deg * kPi / 180.0, Vec3::UnitZ()).toRotationMatrix();
}

bool distinct(int i, int j, int k) { return i != j && j != k && i != k; }

}  // namespace

TEST_CASE("zincblende tensor in the crystal frame") {
  const auto chi = chi2_tensor(100.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(chi(i, j, k) == doctest::Approx(distinct(i, j, k) ? 200.0 : 0.0));
}

TEST_CASE("zero nonlinearity stays zero under rotation") {
  const auto chi = chi2_tensor(0.0, rotation_z(37.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(chi(i, j, k) == 0.0);
}

TEST_CASE("90 degree rotation about z flips the sign only") {
  const auto id = chi2_tensor(100.0);
  const auto rot = chi2_tensor(100.0, rotation_z(90.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(rot(i, j, k) == doctest::Approx(-id(i, j, k)).epsilon(1e-12));
  const CVec3 a(1.0, 0.3, 0.2), b(0.1, 1.0, -0.4);
  CHECK(rot.contract(a, b).squaredNorm() == doctest::Approx(id.contract(a, b).squaredNorm()));
}

TEST_CASE("index permutation symmetry survives arbitrary rotations") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
    const auto chi = chi2_tensor(100.0, q.normalized().toRotationMatrix());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const double v = chi(i, j, k);
          const double tol = 1e-12 * 200.0;
          CHECK(std::abs(chi(j, i, k) - v) <= tol);
          CHECK(std::abs(chi(k, j, i) - v) <= tol);
          CHECK(std::abs(chi(i, k, j) - v) <= tol);
        }
  }
}

TEST_CASE("non-orthonormal rotation is rejected") {
  Mat3 r = Mat3::Identity();
  r(0, 0) = 1.01;
  CHECK_THROWS_AS(chi2_tensor(100.0, r), ValidationError);
}

TEST_CASE("contraction follows the tensor selection rule") {
  const auto chi = chi2_tensor(100.0);
  const CVec3 out = chi.contract(CVec3(1, 0, 0), CVec3(0, 1, 0));
  CHECK(std::abs(out.x()) == 0.0);
  CHECK(std::abs(out.y()) == 0.0);
  CHECK(out.z().real() == doctest::Approx(200.0));
}

TEST_CASE("bundled table covers the working bands") {
  const auto& t = algaas_x018();
  CHECK(t.min_wavelength_nm() <= 700.0);
  CHECK(t.max_wavelength_nm() >= 1700.0);
  for (double wl = 700.0; wl <= 1600.0; wl += 25.0) {
    const auto n = t.index_at(wl);
    CHECK(n.real() > 3.1);
    CHECK(n.real() < 3.9);
    CHECK(n.imag() >= 0.0);
  }
  // Transparent above the absorption edge.
  CHECK(t.index_at(1550.0).imag() == 0.0);
  CHECK(t.index_at(785.0).imag() == 0.0);
}

TEST_CASE("interpolation reproduces samples and stays monotone") {
  const auto& t = algaas_x018();
  for (const auto& s : t.samples()) CHECK(t.index_at(s.wavelength_nm).real() == doctest::Approx(s.index.real()));
  double prev = t.index_at(740.0).real();
  for (double wl = 741.0; wl <= 1700.0; wl += 1.0) {
    const double n = t.index_at(wl).real();
    CHECK(n <= prev + 1e-12);
    prev = n;
  }
  CHECK_THROWS_AS(t.index_at(t.max_wavelength_nm() + 1.0), RangeError);
  CHECK_THROWS_AS(t.index_at(t.min_wavelength_nm() - 1.0), RangeError);
}

TEST_CASE("dispersion table parser") {
  std::istringstream good("# comment\n500 2.0 0.1\n600 2.5 0.0 # trailing comment\n\n700 3.0 0\n");
  const auto m = parse_dispersion_table(good, "test");
  CHECK(m.samples().size() == 3);
  CHECK(refractive_index(m, 600.0).real() == doctest::Approx(2.5));

  std::istringstream bad("500 2.0 0.1\n600 abc 0.0\n");
  try {
    parse_dispersion_table(bad, "bad");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  std::istringstream unsorted("600 2.0 0\n500 2.0 0\n");
  CHECK_THROWS_AS(parse_dispersion_table(unsorted, "u"), ValidationError);
  std::istringstream gain("500 2.0 -0.1\n600 2.0 0\n");
  CHECK_THROWS_AS(parse_dispersion_table(gain, "g"), ValidationError);
}

TEST_CASE("constant index model") {
  const auto m = constant_index("c", {3.5, 0.01});
  CHECK(std::abs(m.index_at(400.0) - cplx(3.5, 0.01)) < 1e-12);
  CHECK(std::abs(m.index_at(4000.0) - cplx(3.5, 0.01)) < 1e-12);
}
