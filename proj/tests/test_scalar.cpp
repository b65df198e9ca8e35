#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "scrunch/scalar.hpp"

using namespace scrunch;

namespace {

PulledSpace equator_pull() {
  const ModelSpace s = ModelSpace::sphere3(1.0);
  return PulledSpace(s, CompactSetSpec::equatorial_sphere(s, {0, 0, 0, 1}));
}

}  // namespace

TEST_CASE("flat space has vanishing volume-deficit quotient") {
  WScalOptions opt;
  opt.M = 300000;
  opt.seed = 4;
  const auto prof = wscal_estimate(WScalSpace(ModelSpace::euclid3()),
                                   PulledPoint::at({0, 0, 0, 0}),
                                   {2.0, 1.75, 1.5, 1.25, 1.0}, opt);
  CHECK(!prof.fit.divergent);
  CHECK(std::abs(prof.fit.limit) < 0.15);
  CHECK(prof.fit.limit_sigma > 0);
}

TEST_CASE("round spheres recover 6K") {
  WScalOptions opt;
  opt.M = 400000;
  opt.seed = 4;
  SUBCASE("K = 1") {
    const auto prof = wscal_estimate(
        WScalSpace(ModelSpace::sphere3(1.0)), PulledPoint::at({1, 0, 0, 0}),
        {1.2, 1.05, 0.9, 0.75, 0.6}, opt);
    CHECK(!prof.fit.divergent);
    CHECK(prof.fit.limit == doctest::Approx(6.0).epsilon(0.04));
  }
  SUBCASE("K = 0.25") {
    const auto prof = wscal_estimate(
        WScalSpace(ModelSpace::sphere3(0.25)), PulledPoint::at({2, 0, 0, 0}),
        {2.4, 2.1, 1.8, 1.5, 1.2}, opt);
    CHECK(!prof.fit.divergent);
    CHECK(prof.fit.limit == doctest::Approx(1.5).epsilon(0.05));
  }
}

TEST_CASE("quotients match closed-form volumes within 3 sigma") {
  WScalOptions opt;
  opt.M = 300000;
  opt.seed = 9;
  const ModelSpace s = ModelSpace::sphere3(1.0);
  const auto prof = wscal_estimate(WScalSpace(s), PulledPoint::at({1, 0, 0, 0}),
                                   {1.2, 0.9, 0.6}, opt);
  for (const auto& pt : prof.points) {
    const double vol_e = 4.0 / 3.0 * M_PI * pt.r * pt.r * pt.r;
    const double q_exact = 30.0 * (vol_e - s.ball_volume(pt.r)) / (pt.r * pt.r * vol_e);
    CHECK(std::abs(pt.Q - q_exact) <= 3 * pt.sigma + 1e-12);
  }
}

TEST_CASE("pulled basepoints diverge with the dimension-coded exponent") {
  WScalOptions opt;
  opt.M = 250000;
  opt.seed = 12;
  const std::vector<double> radii{0.2, 0.15, 0.1, 0.05};
  SUBCASE("pulled equatorial sphere: exponent near -4") {
    const auto prof = wscal_estimate(WScalSpace(equator_pull()),
                                     PulledPoint::p0(), radii, opt);
    REQUIRE(prof.fit.divergent);
    CHECK(prof.fit.exponent > -4.2);
    CHECK(prof.fit.exponent < -3.8);
    for (const auto& pt : prof.points) {
      const double qr4 = pt.Q * std::pow(pt.r, 4);
      CHECK(qr4 > -198.0);
      CHECK(qr4 < -162.0);
    }
  }
  SUBCASE("pulled great circle: exponent near -3") {
    const ModelSpace s = ModelSpace::sphere3(1.0);
    const PulledSpace y(
        s, CompactSetSpec::geodesic_circle(s, {1, 0, 0, 0}, {0, 1, 0, 0}));
    const auto prof =
        wscal_estimate(WScalSpace(y), PulledPoint::p0(), radii, opt);
    REQUIRE(prof.fit.divergent);
    CHECK(prof.fit.exponent > -3.2);
    CHECK(prof.fit.exponent < -2.8);
  }
}

TEST_CASE("unattainable error budget raises with a required sample count") {
  WScalOptions opt;
  opt.M = 1000;
  opt.stratified = false;  // plain MC cannot resolve the deficit at M=1000
  bool thrown = false;
  try {
    wscal_estimate(WScalSpace(ModelSpace::sphere3(1.0)),
                   PulledPoint::at({1, 0, 0, 0}), {1.2, 1.05, 0.9}, opt);
  } catch (const McBudgetError& e) {
    thrown = true;
    CHECK(e.required_M > 1000);
    CHECK(!e.what.empty());
  }
  CHECK(thrown);
}

TEST_CASE("preconditions on the radius list") {
  WScalOptions opt;
  opt.M = 10000;
  CHECK_THROWS(wscal_estimate(WScalSpace(ModelSpace::sphere3(1.0)),
                              PulledPoint::at({1, 0, 0, 0}), {0.5, 0.6}, opt));
  CHECK_THROWS(wscal_estimate(WScalSpace(ModelSpace::sphere3(1.0)),
                              PulledPoint::at({1, 0, 0, 0}), {0.5}, opt));
}

TEST_CASE("density profile: flat is one, round is below one") {
  WScalOptions opt;
  opt.M = 300000;
  opt.seed = 21;
  const auto flat = bishop_gromov_density(WScalSpace(ModelSpace::euclid3()),
                                          PulledPoint::at({0, 0, 0, 0}),
                                          {1.0, 0.5}, opt);
  CHECK(!flat.flag_raised);
  for (const auto& pt : flat.points)
    CHECK(pt.theta == doctest::Approx(1.0).epsilon(0.02));

  const auto round = bishop_gromov_density(
      WScalSpace(ModelSpace::sphere3(1.0)), PulledPoint::at({1, 0, 0, 0}),
      {1.5, 1.0, 0.5}, opt);
  CHECK(!round.flag_raised);
  for (const auto& pt : round.points) CHECK(pt.theta < 1.0);
}

TEST_CASE("density flag fires at a pulled basepoint") {
  WScalOptions opt;
  opt.M = 200000;
  opt.seed = 22;
  const auto prof = bishop_gromov_density(WScalSpace(equator_pull()),
                                          PulledPoint::p0(), {0.5}, opt);
  REQUIRE(prof.points.size() == 1);
  CHECK(prof.flag_raised);
  CHECK(prof.points[0].exceeds_one);
  // Vol(B(p0, r)) ~ 8 pi r gives theta ~ 6 / r^2 = 24 at r = 1/2
  CHECK(prof.points[0].theta == doctest::Approx(24.0).epsilon(0.1));
}

TEST_CASE("profile csv carries the fit summary") {
  WScalOptions opt;
  opt.M = 100000;
  opt.seed = 2;
  const auto prof = wscal_estimate(WScalSpace(ModelSpace::sphere3(1.0)),
                                   PulledPoint::at({1, 0, 0, 0}),
                                   {1.2, 0.9, 0.6}, opt);
  const std::string path = "test_wscal.csv";
  prof.save_csv(path);
  std::ifstream in(path);
  std::string line, all;
  bool header = false;
  while (std::getline(in, line)) {
    if (line == "r,Q,sigma") header = true;
    all += line + "\n";
  }
  CHECK(header);
  CHECK(all.find("#limit") != std::string::npos);
  std::remove(path.c_str());
}
