#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "nanopair/error.hpp"
#include "nanopair/spdc.hpp"

using namespace nanopair;

namespace {

constexpr double kXi = 1.777e-28;
constexpr double kBandwidth = 150.0;
const double kPhi = 2e-3 / (kPi * 1e-12);

}  // namespace

TEST_CASE("degenerate pair rate matches a closed form") {
  // λs = λi = 2λp collapses the wavelength factors to c Δλ / (256 λp⁴).
  const double lp = 785e-9;
  const double oracle = kPhi * 2.0 * kPi * kXi * si::kSpeedOfLight * kBandwidth * 1e-9 /
                        (256.0 * std::pow(lp, 4));
  const double rate = spdc::pair_rate(kXi, 785.0, 1570.0, 1570.0, kBandwidth, kPhi);
  CHECK(rate == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(rate == doctest::Approx(3.2856e5).epsilon(1e-3));
}

TEST_CASE("non-degenerate pair rate") {
  // Idler chosen so that energy is conserved with λp = 785, λs = 1520.
  const double ls = 1520.0;
  const double li = 1.0 / (1.0 / 785.0 - 1.0 / ls);
  const double rate = spdc::pair_rate(kXi, 785.0, ls, li, kBandwidth, kPhi);
  const double m = 1e-9;
  const double oracle = kPhi * 2.0 * kPi * kXi *
                        std::pow(785.0 * m, 4) / (std::pow(ls * m, 3) * std::pow(li * m, 3)) *
                        si::kSpeedOfLight * kBandwidth * m / std::pow(ls * m, 2);
  CHECK(rate == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(spdc::pair_rate(0.0, 785.0, 1570.0, 1570.0, kBandwidth, kPhi) == 0.0);
}

TEST_CASE("pair rate is linear in flux and efficiency") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  const double ls = 1500.0, li = 1.0 / (1.0 / 785.0 - 1.0 / ls);
  const double base = spdc::pair_rate(kXi, 785.0, ls, li, kBandwidth, kPhi);
  for (int n = 0; n < 20; ++n) {
    const double a = u(rng), b = u(rng);
    CHECK(spdc::pair_rate(a * kXi, 785.0, ls, li, kBandwidth, b * kPhi) ==
          doctest::Approx(a * b * base).epsilon(1e-12));
  }
}

TEST_CASE("swapping signal and idler changes the rate by (λs/λi)²") {
  const double ls = 1500.0, li = 1.0 / (1.0 / 785.0 - 1.0 / ls);
  const double forward = spdc::pair_rate(kXi, 785.0, ls, li, kBandwidth, kPhi);
  const double swapped = spdc::pair_rate(kXi, 785.0, li, ls, kBandwidth, kPhi);
  CHECK(swapped / forward == doctest::Approx((ls / li) * (ls / li)).epsilon(1e-12));
}

TEST_CASE("pair rate input checks") {
  CHECK_THROWS_AS(spdc::pair_rate(kXi, 785.0, 1520.0, 1560.0, kBandwidth, kPhi), ValidationError);
  CHECK_THROWS_AS(spdc::pair_rate(kXi, 785.0, 1570.0, 1570.0, 0.0, kPhi), ValidationError);
  CHECK_THROWS_AS(spdc::pair_rate(-kXi, 785.0, 1570.0, 1570.0, kBandwidth, kPhi), ValidationError);
  CHECK_NOTHROW(spdc::check_energy_conservation(785.0, 1570.0 * (1 + 1e-8), 1570.0));
  try {
    spdc::check_energy_conservation(785.0, 1520.0, 1560.0);
    FAIL("expected an energy conservation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("energy conservation") != std::string::npos);
  }
}

TEST_CASE("emission map normalization") {
  sfg::FarFieldMap far;
  far.grid = sfg::pupil_grid(0.7, 31);
  far.values.assign(far.grid.size(), CVec3(1.0, 0.0, 0.0));
  const auto map = spdc::emission_map(far);
  CHECK(map.units == "relative");
  CHECK(std::accumulate(map.values.begin(), map.values.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
  for (double v : map.values) CHECK(v == doctest::Approx(1.0 / map.values.size()));

  // z-dipole pattern keeps its null at the centre.
  for (std::size_t g = 0; g < far.values.size(); ++g) {
    const Vec3& u = far.grid.directions[g];
    far.values[g] = CVec3(-u.z() * u.x(), -u.z() * u.y(), 1.0 - u.z() * u.z());
  }
  const auto dip = spdc::emission_map(far);
  const int centre = 15 * 31 + 15;
  for (std::size_t g = 0; g < dip.values.size(); ++g) {
    if (dip.grid.pixel[g] == centre) CHECK(dip.values[g] == 0.0);
  }
  CHECK(std::accumulate(dip.values.begin(), dip.values.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));

  far.values.assign(far.grid.size(), CVec3::Zero());
  const auto empty = spdc::emission_map(far);
  for (double v : empty.values) CHECK(v == 0.0);
}

TEST_CASE("normalized rate") {
  CHECK(spdc::normalized_rate(35.0, 2e-3, 400e-9) == doctest::Approx(4.375e10).epsilon(1e-12));
  CHECK(spdc::normalized_rate(0.0, 2e-3, 400e-9) == 0.0);
  const double length = 250e-9;
  CHECK(spdc::normalized_rate(1.4e9 * 2e-3 * length, 2e-3, length) == doctest::Approx(1.4e9).epsilon(1e-12));
  CHECK(spdc::normalized_rate(35.0, 2e-3, 0.0, spdc::Normalization::Power) == doctest::Approx(17500.0));
  CHECK_THROWS_AS(spdc::normalized_rate(35.0, 0.0, 400e-9), ValidationError);
  CHECK_THROWS_AS(spdc::normalized_rate(35.0, 2e-3, 0.0), ValidationError);
  CHECK_THROWS_AS(spdc::normalized_rate(-1.0, 2e-3, 400e-9), ValidationError);
  CHECK(spdc::normalization_from_string("power") == spdc::Normalization::Power);
  CHECK_THROWS_AS(spdc::normalization_from_string("energy"), ValidationError);
  CHECK(spdc::describe(spdc::Normalization::PowerLength).find("length") != std::string::npos);
}

TEST_CASE("prediction ties the pieces together") {
  spdc::SpdcInputs in;
  in.xi_m4_per_w = kXi;
  const auto p = spdc::predict(in);
  CHECK(p.pump_area_m2 == doctest::Approx(kPi * 1e-12));
  CHECK(p.pump_intensity_w_per_m2 == doctest::Approx(kPhi));
  CHECK(p.pair_rate_hz == doctest::Approx(spdc::pair_rate(kXi, 785.0, 1570.0, 1570.0, 150.0, kPhi)));
  CHECK(p.normalized_rate == doctest::Approx(p.pair_rate_hz / (2e-3 * 400e-9)));
  CHECK(p.normalization_rule == spdc::describe(spdc::Normalization::PowerLength));
  CHECK_FALSE(p.normalized_units.empty());
}
