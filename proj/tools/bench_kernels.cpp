#include <chrono>
#include <cstdio>

#include "scrunch/mc.hpp"
#include "scrunch/model_space.hpp"
#include "scrunch/pulled.hpp"
#include "scrunch/sewing.hpp"

using namespace scrunch;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

template <class Fn>
double timed(Fn&& fn) {
  const double t0 = now_ms();
  fn();
  return now_ms() - t0;
}

}  // namespace

int main() {
  const ModelSpace sphere = ModelSpace::sphere3(1.0);
  const Vec4 p{1, 0, 0, 0};

  std::printf("kernel,serial_ms,parallel_ms,match\n");

  {
    McEstimate a, b;
    const double ts =
        timed([&] { a = ball_volume_mc_serial(sphere, p, 0.7, 4'000'000, 9); });
    const double tp =
        timed([&] { b = ball_volume_mc(sphere, p, 0.7, 4'000'000, 9); });
    std::printf("ball_volume_mc,%.1f,%.1f,%d\n", ts, tp,
                a.hits == b.hits && a.volume == b.volume ? 1 : 0);
  }

  {
    const auto A0 = CompactSetSpec::equatorial_sphere(sphere, {0, 0, 0, 1});
    const double r = 0.3;
    SewingPlan plan = plan_sewing(sphere, A0, r, r / 10.0);
    const TunnelModel tunnel = TunnelModel::standard(sphere, plan.delta);
    const SewnSpace N(sphere, A0, plan, tunnel);
    PointCloud cloud = A0.sample_set(0.5 * r);
    PointCloud sub;
    const std::size_t stride = cloud.size() / 60 + 1;
    for (std::size_t i = 0; i < cloud.size(); i += stride)
      sub.points.push_back(cloud.points[i]);
    DiameterCertificate cs, cp;
    const double ts = timed([&] { cs = edited_region_diameter_serial(N, sub); });
    const double tp = timed([&] { cp = edited_region_diameter(N, sub); });
    std::printf("edited_region_diameter,%.1f,%.1f,%d\n", ts, tp,
                cs.measured == cp.measured ? 1 : 0);
  }
  return 0;
}
