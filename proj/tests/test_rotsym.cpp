#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <stdexcept>

#include "scrunch/rng.hpp"
#include "scrunch/rotsym.hpp"

using namespace scrunch;
using namespace scrunch::rotsym;

namespace {

double sup_roundtrip_error(const HawkingProfile& p) {
  const auto g = embed(p, 0.0);
  const auto back = hawking_from_graph(g);
  double sup = 0;
  for (std::size_t i = 0; i < back.r.size(); ++i)
    sup = std::max(sup, std::abs(back.m[i] - p.eval(back.r[i])));
  return sup;
}

}  // namespace

TEST_CASE("constant-mass profile embeds to the known parabola") {
  const auto pair = schwarzschild(1.0, 6.0);
  // z(r) = sqrt(8 m0 (r - 2 m0)); at r = 4, z = 4
  double z4 = 0;
  const auto& gr = pair.graph.r;
  for (std::size_t i = 0; i + 1 < gr.size(); ++i)
    if (gr[i] <= 4.0 && 4.0 <= gr[i + 1]) {
      const double t = (4.0 - gr[i]) / (gr[i + 1] - gr[i]);
      z4 = pair.graph.z[i] + t * (pair.graph.z[i + 1] - pair.graph.z[i]);
      break;
    }
  CHECK(z4 == doctest::Approx(4.0).epsilon(1e-6));
  for (std::size_t i = 0; i < pair.graph.r.size(); i += 500) {
    const double r = pair.graph.r[i];
    CHECK(pair.graph.z[i] ==
          doctest::Approx(std::sqrt(8.0 * (r - 2.0))).epsilon(1e-6));
  }
}

TEST_CASE("embed / hawking_from_graph round trip on constant mass") {
  for (double m0 : {0.5, 1.0, 2.0}) {
    const auto pair = schwarzschild(m0, 8.0 * m0);
    CHECK(sup_roundtrip_error(pair.hawking) < 1e-6);
  }
}

TEST_CASE("round trip on random admissible stripe profiles") {
  auto rng = make_stream(31, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const double K = 0.05 + 0.5 * u(rng);
    const double a = 0.2 + 0.3 * u(rng);
    const double b = a + 0.2 + 0.3 * u(rng);
    const double r_max = b + 0.5 + u(rng);
    const double alpha = 0.5 * b * b * b * K + 0.2 + u(rng);
    CAPTURE(K);
    CAPTURE(a);
    CAPTURE(b);
    if (b * b * K >= 0.95) continue;  // keep clear of the embedding blowup
    const auto p = stripe_profile(K, a, b, 0.0, r_max, alpha, 10000);
    REQUIRE(check_admissible(p).ok());
    CHECK(sup_roundtrip_error(p) < 1e-6);
  }
}

TEST_CASE("scalar curvature: zero on constant mass, 6K inside stripes") {
  const auto pair = schwarzschild(1.0, 6.0);
  for (const auto& s : scalar_curvature(pair.hawking))
    if (!s.axis_limit) CHECK(std::abs(s.R) < 1e-6);

  for (double K : {0.25, 1.0}) {
    const double a = 0.3, b = K == 1.0 ? 0.8 : 1.0;
    const auto p = stripe_profile(K, a, b, 0.0, b + 1.0, 2.0, 10000);
    int checked = 0;
    for (const auto& s : scalar_curvature(p))
      if (s.r > a + 0.05 && s.r < b - 0.05) {
        CHECK(s.R == doctest::Approx(6.0 * K).epsilon(1e-4));
        ++checked;
      }
    CHECK(checked > 100);
  }
}

TEST_CASE("graph-side curvature cross-check inside a stripe") {
  const double K = 0.5;
  const auto p = stripe_profile(K, 0.3, 0.9, 0.0, 1.8, 2.0, 10000);
  const auto g = embed(p, 0.0);
  int checked = 0;
  for (const auto& s : scalar_curvature_graph(g))
    if (s.r > 0.4 && s.r < 0.8) {
      CHECK(s.R == doctest::Approx(6.0 * K).epsilon(5e-3));
      ++checked;
    }
  CHECK(checked > 100);
}

TEST_CASE("admissibility checks flag bad profiles") {
  HawkingProfile p;
  p.r_min = 0;
  for (int i = 0; i <= 100; ++i) {
    p.r.push_back(i / 50.0);
    p.m.push_back(0.1 * i / 50.0);
  }
  p.m[0] = 0;  // m(r_min) = r_min/2 = 0: fine
  CHECK(check_admissible(p).ok());

  SUBCASE("mass above r/2") {
    p.m[60] = p.r[60];  // m > r/2
    CHECK(!check_admissible(p).ok());
    CHECK_THROWS_AS(embed(p, 0.0), std::domain_error);
  }
  SUBCASE("decreasing mass") {
    p.m[60] = p.m[59] - 0.05;
    CHECK(!check_admissible(p).ok());
  }
}

TEST_CASE("stripe profile rejects impossible parameters") {
  // b^2 K >= 1 makes m = r^3 K / 2 cross r/2 inside the stripe
  CHECK_THROWS_AS(stripe_profile(1.0, 0.5, 1.2, 0.0, 2.0, 2.0, 2000),
                  std::domain_error);
  // cap below the stripe's own mass
  CHECK_THROWS_AS(stripe_profile(0.5, 0.3, 1.0, 0.0, 2.0, 0.01, 2000),
                  std::domain_error);
}

TEST_CASE("ADM mass stays under the cap and is monotone for stripes") {
  const double alpha = 0.7;
  const auto p = stripe_profile(0.3, 0.2, 0.8, 0.0, 2.0, alpha, 10000);
  const auto adm = adm_mass(p);
  CHECK(adm.monotone_tail);
  CHECK(adm.mass <= alpha + 1e-12);
  CHECK(adm.mass > 0);
}

TEST_CASE("profile csv round trips keep stripes and samples") {
  const auto p = stripe_profile(0.4, 0.3, 0.7, 0.0, 1.5, 1.0, 2000);
  const std::string path = "test_hawking_roundtrip.csv";
  p.save_csv(path);
  const auto back = HawkingProfile::load_csv(path);
  REQUIRE(back.r.size() == p.r.size());
  REQUIRE(back.stripes.size() == p.stripes.size());
  CHECK(back.stripes[0].a == doctest::Approx(0.3));
  CHECK(back.stripes[0].K == doctest::Approx(0.4));
  for (std::size_t i = 0; i < p.r.size(); i += 97)
    CHECK(back.m[i] == doctest::Approx(p.m[i]).epsilon(1e-14));
  std::remove(path.c_str());

  const auto g = embed(p, 0.0);
  const std::string gpath = "test_graph_roundtrip.csv";
  g.save_csv(gpath);
  const auto gback = GraphProfile::load_csv(gpath);
  REQUIRE(gback.r.size() == g.r.size());
  for (std::size_t i = 0; i < g.r.size(); i += 97) {
    CHECK(gback.z[i] == doctest::Approx(g.z[i]).epsilon(1e-14));
    if (std::isfinite(g.zp[i]))
      CHECK(gback.zp[i] == doctest::Approx(g.zp[i]).epsilon(1e-14));
    else
      CHECK(std::isinf(gback.zp[i]));
  }
  std::remove(gpath.c_str());
}

TEST_CASE("flat graph geometry reproduces Euclidean distances") {
  GraphProfile flat;
  for (int i = 0; i <= 400; ++i) {
    flat.r.push_back(2.0 * i / 400.0);
    flat.z.push_back(0.0);
    flat.zp.push_back(0.0);
  }
  const auto geom = std::make_shared<RotSymGeometry>(flat, 160, 256);
  // radial distances are exact
  CHECK(geom->distance(0.3, 0.0, 1.7) == doctest::Approx(1.4).epsilon(0.01));
  // planar law d = sqrt(r1^2 + r2^2 - 2 r1 r2 cos phi)
  for (double phi : {0.5, 1.2, 2.4, M_PI}) {
    const double r1 = 1.2, r2 = 0.8;
    const double want = std::sqrt(r1 * r1 + r2 * r2 - 2 * r1 * r2 * std::cos(phi));
    CHECK(geom->distance(r1, phi, r2) == doctest::Approx(want).epsilon(0.012));
  }
  // 3-d reduction through the section
  const Vec4 p{1.0, 0.3, -0.2, 0}, q{-0.4, 0.8, 0.5, 0};
  const double chord = (p - q).xyz().norm();
  CHECK(geom->distance3(p, q) == doctest::Approx(chord).epsilon(0.012));
}

TEST_CASE("arc length, inverse arc and slab volume on a flat graph") {
  GraphProfile flat;
  for (int i = 0; i <= 200; ++i) {
    flat.r.push_back(2.0 * i / 200.0);
    flat.z.push_back(0.0);
    flat.zp.push_back(0.0);
  }
  const RotSymGeometry geom(flat, 200, 64);
  CHECK(geom.radial_arc(0.25, 1.75) == doctest::Approx(1.5).epsilon(1e-9));
  // additivity
  CHECK(geom.radial_arc(0.2, 1.8) ==
        doctest::Approx(geom.radial_arc(0.2, 1.0) + geom.radial_arc(1.0, 1.8))
            .epsilon(1e-12));
  CHECK(geom.r_at_arc(0.5, 0.75) == doctest::Approx(1.25).epsilon(1e-6));
  CHECK(geom.r_at_arc(1.5, -0.5) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(geom.slab_volume(0.5, 1.5) ==
        doctest::Approx(4.0 / 3.0 * M_PI * (1.5 * 1.5 * 1.5 - 0.125))
            .epsilon(1e-6));
}

TEST_CASE("curved graph arc length against the closed form") {
  // z' = sqrt(2 m0 / (r - 2 m0)) gives arc = int sqrt(r/(r-2m0)) dr
  const auto pair = schwarzschild(0.25, 4.0);
  const RotSymGeometry geom(pair.graph, 400, 64);
  auto arc_exact = [&](double a, double b) {
    // antiderivative of sqrt(r/(r-0.5))
    auto F = [](double r) {
      const double m2 = 0.5;
      return std::sqrt(r * (r - m2)) +
             m2 * std::log(std::sqrt(r) + std::sqrt(r - m2));
    };
    return F(b) - F(a);
  };
  CHECK(geom.radial_arc(1.0, 3.5) ==
        doctest::Approx(arc_exact(1.0, 3.5)).epsilon(1e-4));
}

TEST_CASE("distance field symmetry of the section metric") {
  const auto pair = schwarzschild(0.5, 4.0);
  const auto geom = std::make_shared<RotSymGeometry>(pair.graph, 120, 128);
  const Vec4 p{2.0, 0.5, 0.3, 0}, q{1.2, -1.4, 2.3, 0};
  CHECK(geom->distance3(p, q) == doctest::Approx(geom->distance3(q, p)).epsilon(0.01));
  CHECK(rotsym_distance(*geom, 2.0, 1.0, 3.0) ==
        doctest::Approx(geom->distance(3.0, 1.0, 2.0)).epsilon(1e-12));
}
