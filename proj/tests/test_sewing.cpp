#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <stdexcept>
#include <vector>

#include "scrunch/rng.hpp"
#include "scrunch/sewing.hpp"

using namespace scrunch;

namespace {

ModelSpace unit_sphere() { return ModelSpace::sphere3(1.0); }

CompactSetSpec equator(const ModelSpace& s) {
  return CompactSetSpec::equatorial_sphere(s, {0, 0, 0, 1});
}

// Dijkstra over the explicit routing graph: two query points plus every
// mouth, base-metric edges everywhere, length-h edges across each tunnel.
double graph_oracle(const SewnSpace& N, const Vec4& x, const Vec4& y) {
  const auto& plan = N.plan();
  const auto& base = N.base();
  const std::size_t nb = plan.nbar();
  std::vector<Vec4> nodes{x, y};
  std::vector<std::pair<std::size_t, std::size_t>> who;  // (k, j) per mouth
  for (std::size_t k = 0; k < nb; ++k)
    for (std::size_t j = 0; j < nb; ++j) {
      if (j == k) continue;
      nodes.push_back(plan.mouth(base, k, j));
      who.emplace_back(k, j);
    }
  const std::size_t n = nodes.size();
  std::vector<double> dist(n, 1e300);
  dist[0] = 0;
  using QE = std::pair<double, std::size_t>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
  pq.push({0, 0});
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u] + 1e-15) continue;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == u) continue;
      double w = base.distance(nodes[u], nodes[v]);
      if (u >= 2 && v >= 2) {
        const auto [ku, ju] = who[u - 2];
        const auto [kv, jv] = who[v - 2];
        if (ku == jv && ju == kv) w = std::min(w, N.tunnel().h);
      }
      if (dist[u] + w < dist[v] - 1e-15) {
        dist[v] = dist[u] + w;
        pq.push({dist[v], v});
      }
    }
  }
  return dist[1];
}

}  // namespace

TEST_CASE("packing plan invariants on the equatorial sphere") {
  const ModelSpace s = unit_sphere();
  const auto A0 = equator(s);
  const auto plan = plan_sewing(s, A0, 0.3, 0.03);
  REQUIRE(plan.nbar() >= 2);
  CHECK(plan.n() == plan.nbar() * (plan.nbar() - 1));
  CHECK(plan.r == doctest::Approx(0.3));
  CHECK(plan.delta <= 0.03 + 1e-15);
  CHECK(plan.h == doctest::Approx(3.0 * plan.delta));
  for (std::size_t i = 0; i < plan.nbar(); ++i)
    for (std::size_t j = i + 1; j < plan.nbar(); ++j)
      CHECK(s.distance(plan.centers[i], plan.centers[j]) >= 2 * 0.3 - 1e-9);
  // mouths sit on the boundary sphere of the shrunken ball
  for (std::size_t j = 1; j < std::min<std::size_t>(plan.nbar(), 6); ++j)
    CHECK(s.distance(plan.centers[0], plan.mouth(s, 0, j)) ==
          doctest::Approx(plan.r - plan.delta).epsilon(1e-9));
}

TEST_CASE("plan preconditions") {
  const ModelSpace s = unit_sphere();
  const auto A0 = equator(s);
  CHECK_THROWS_AS(plan_sewing(s, A0, 0.1, 0.1), std::domain_error);
  CHECK_THROWS_AS(plan_sewing(s, A0, 0.1, -0.01), std::domain_error);
  const auto tiny = CompactSetSpec::round_ball(s, {1, 0, 0, 0}, 0.05);
  CHECK_THROWS_AS(plan_sewing(s, tiny, 0.4, 0.04), std::runtime_error);
}

TEST_CASE("requested delta shrinks until mouth balls are disjoint") {
  const ModelSpace s = unit_sphere();
  const auto A0 = equator(s);
  const auto plan = plan_sewing(s, A0, 0.3, 0.2);
  CHECK(plan.delta_requested == doctest::Approx(0.2));
  CHECK(plan.delta < 0.2);
  const double sep = plan.mouth_separation(s);
  CHECK(sep >= plan.delta - 1e-12);  // disjoint delta/2-balls
}

TEST_CASE("tunnel bookkeeping cancels exactly") {
  const ModelSpace s = unit_sphere();
  const auto A0 = equator(s);
  const auto plan = plan_sewing(s, A0, 0.3, 0.03);
  const auto tunnel = TunnelModel::standard(s, plan.delta);
  CHECK(tunnel.h == doctest::Approx(3 * plan.delta));
  CHECK(tunnel.vol == doctest::Approx(2 * s.ball_volume(plan.delta / 2)).epsilon(1e-15));
  const SewnSpace N(s, A0, plan, tunnel);
  CHECK(N.volume() == s.total_volume());  // bit-equal
  CHECK(sewn_volume(N) == s.total_volume());
}

TEST_CASE("sewn distance equals the mouth-graph shortest path") {
  const ModelSpace s = unit_sphere();
  const auto A0 = equator(s);
  const auto plan = plan_sewing(s, A0, 0.45, 0.045);
  const SewnSpace N(s, A0, plan, TunnelModel::standard(s, plan.delta));
  REQUIRE(N.has_hub_matrix());
  auto rng = make_stream(5, 0);
  std::normal_distribution<double> g(0.0, 1.0);
  int done = 0;
  while (done < 8) {
    Vec4 x{g(rng), g(rng), g(rng), g(rng)}, y{g(rng), g(rng), g(rng), g(rng)};
    x = x.normalized();
    y = y.normalized();
    if (N.in_removed_ball(x) || N.in_removed_ball(y)) continue;
    const double want = graph_oracle(N, x, y);
    CHECK(N.distance(x, y) == doctest::Approx(want).epsilon(1e-9));
    ++done;
  }
}

TEST_CASE("sewn distance: shortcut, symmetry, triangle") {
  const ModelSpace s = unit_sphere();
  const auto A0 = equator(s);
  const auto plan = plan_sewing(s, A0, 0.3, 0.03);
  const SewnSpace N(s, A0, plan, TunnelModel::standard(s, plan.delta));
  auto rng = make_stream(6, 0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec4> pts;
  while (pts.size() < 9) {
    Vec4 x{g(rng), g(rng), g(rng), g(rng)};
    x = x.normalized();
    if (!N.in_removed_ball(x)) pts.push_back(x);
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = N.distance(pts[i], pts[j]);
      CHECK(d <= s.distance(pts[i], pts[j]) + 1e-12);
      CHECK(d == doctest::Approx(N.distance(pts[j], pts[i])).epsilon(1e-12));
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k == i || k == j) continue;
        CHECK(d <= N.distance(pts[i], pts[k]) + N.distance(pts[k], pts[j]) + 1e-9);
      }
    }
}

TEST_CASE("removed-ball points are rejected and detectable") {
  const ModelSpace s = unit_sphere();
  const auto A0 = equator(s);
  const auto plan = plan_sewing(s, A0, 0.3, 0.03);
  const SewnSpace N(s, A0, plan, TunnelModel::standard(s, plan.delta));
  const Vec4 inside = plan.mouth(s, 0, 1);  // center of a removed ball
  CHECK(N.in_removed_ball(inside));
  CHECK_THROWS_AS(N.distance(inside, {0, 0, 0, 1}), std::domain_error);
  CHECK(!N.in_removed_ball({0, 0, 0, 1}));
}

TEST_CASE("edited region diameter certificate") {
  const ModelSpace s = unit_sphere();
  const auto A0 = equator(s);
  const auto plan = plan_sewing(s, A0, 0.3, 0.03);
  const SewnSpace N(s, A0, plan, TunnelModel::standard(s, plan.delta));
  const auto sample = A0.sample_set(0.15);
  PointCloud sub;
  for (std::size_t i = 0; i < sample.size(); i += 7)
    sub.points.push_back(sample.points[i]);
  const auto cert = edited_region_diameter(N, sub);
  CHECK(cert.ok());
  CHECK(cert.bound == doctest::Approx(16 * plan.r + 3 * plan.h));
  CHECK(cert.slack == doctest::Approx(cert.bound - cert.measured));
  const auto cert2 = edited_region_diameter_serial(N, sub);
  CHECK(cert.measured == cert2.measured);  // parallel == serial bitwise
  CHECK_THROWS_AS(edited_region_diameter(N, PointCloud{}), std::invalid_argument);
}

TEST_CASE("scrunching map defect") {
  const ModelSpace s = unit_sphere();
  const auto A0 = equator(s);
  const auto plan = plan_sewing(s, A0, 0.3, 0.03);
  const SewnSpace N(s, A0, plan, TunnelModel::standard(s, plan.delta));
  const PulledSpace Y(s, A0);
  DefectOptions opt;
  opt.pair_points = 160;
  opt.seed = 77;
  const auto d = scrunch_map_defect(N, Y, opt);
  CHECK(d.eps_cov == doctest::Approx(plan.r / 2).epsilon(1e-15));
  CHECK(d.gh_bound == doctest::Approx(2 * std::max(d.eps_dis, d.eps_cov)).epsilon(1e-15));
  CHECK(d.eps_dis > 0);
  CHECK(d.eps_dis < 10 * plan.r);  // distortion is at tunnel scale
  CHECK(d.lip_empirical > 0.0);
  CHECK(std::isfinite(d.lip_empirical));

  const PulledSpace Ywrong(
      s, CompactSetSpec::geodesic_circle(s, {1, 0, 0, 0}, {0, 1, 0, 0}));
  CHECK_THROWS_AS(scrunch_map_defect(N, Ywrong, opt), std::invalid_argument);
}

TEST_CASE("defect runs are deterministic in the seed") {
  const ModelSpace s = unit_sphere();
  const auto A0 = equator(s);
  const auto plan = plan_sewing(s, A0, 0.35, 0.035);
  const SewnSpace N(s, A0, plan, TunnelModel::standard(s, plan.delta));
  const PulledSpace Y(s, A0);
  DefectOptions opt;
  opt.pair_points = 120;
  opt.seed = 123;
  const auto a = scrunch_map_defect(N, Y, opt);
  const auto b = scrunch_map_defect(N, Y, opt);
  CHECK(a.eps_dis == b.eps_dis);
  CHECK(a.gh_bound == b.gh_bound);
}

TEST_CASE("plan csv records the construction scales") {
  const ModelSpace s = unit_sphere();
  const auto A0 = equator(s);
  const auto plan = plan_sewing(s, A0, 0.4, 0.04);
  const std::string path = "test_plan.csv";
  plan.save_csv(path, s);
  std::ifstream in(path);
  std::string line;
  bool saw_r = false, saw_center = false, saw_mouth = false;
  while (std::getline(in, line)) {
    if (line.rfind("#r", 0) == 0) saw_r = true;
    if (line.rfind("C,", 0) == 0) saw_center = true;
    if (line.rfind("M,", 0) == 0) saw_mouth = true;
  }
  CHECK(saw_r);
  CHECK(saw_center);
  CHECK(saw_mouth);
  std::remove(path.c_str());
}
