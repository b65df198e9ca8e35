#include "scrunch/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace scrunch::harness {

namespace {

PointCloud subsample(const PointCloud& in, std::size_t cap) {
  if (in.size() <= cap) return in;
  PointCloud out;
  const std::size_t stride = (in.size() + cap - 1) / cap;
  for (std::size_t i = 0; i < in.size(); i += stride)
    out.points.push_back(in.points[i]);
  return out;
}

double interp_zp(const rotsym::GraphProfile& g, double r) {
  const auto& xs = g.r;
  if (r <= xs.front()) return g.zp.front();
  if (r >= xs.back()) return g.zp.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double t = (r - xs[i]) / (xs[i + 1] - xs[i]);
  const double a = g.zp[i], b = g.zp[i + 1];
  if (std::isinf(a) || std::isinf(b)) return t < 0.5 ? a : b;
  return a + t * (b - a);
}

DefectOptions defect_options(const Config& cfg, const std::string& section,
                             std::uint64_t seed, int j) {
  DefectOptions d;
  d.pair_points = static_cast<std::size_t>(
      cfg.integer(section + ".pair_points", static_cast<std::int64_t>(d.pair_points)));
  d.seed = seed + 7919ULL * static_cast<std::uint64_t>(j + 1);
  return d;
}

}  // namespace

void ConvergenceReport::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "j,r,delta,h,eps_dis,eps_cov,gh_bound,vol_Nj,vol_limit,L,"
         "diam_measured,diam_bound\n";
  for (const auto& r : rows)
    out << r.j << ',' << r.r << ',' << r.delta << ',' << r.h << ','
        << r.eps_dis << ',' << r.eps_cov << ',' << r.gh_bound << ','
        << r.vol_Nj << ',' << r.vol_limit << ',' << r.L << ','
        << r.diam_measured << ',' << r.diam_bound << '\n';
  out << "#mass_residual " << mass_residual << '\n';
  if (limit_wscal) {
    out << "#wscal_divergent " << (limit_wscal->divergent ? 1 : 0) << '\n';
    if (limit_wscal->divergent)
      out << "#wscal_exponent " << limit_wscal->exponent << "\n#wscal_coeff "
          << limit_wscal->coeff << '\n';
    else
      out << "#wscal_limit " << limit_wscal->limit << '\n';
  }
  if (limit_density)
    out << "#density_flag " << (limit_density->flag_raised ? 1 : 0) << '\n';
}

ConvergenceReport run_method1(const Config& cfg, std::uint64_t seed) {
  const double K = cfg.num("method1.K", 1.0);
  const ModelSpace base = ModelSpace::sphere3(K);
  const double rho = base.radius();
  const std::string region = cfg.str("method1.region", "equator");

  CompactSetSpec A0 = [&] {
    if (region == "circle")
      return CompactSetSpec::geodesic_circle(base, {1, 0, 0, 0}, {0, 1, 0, 0});
    if (region == "equator")
      return CompactSetSpec::equatorial_sphere(base, {0, 0, 0, 1});
    if (region == "ball")
      return CompactSetSpec::round_ball(base, {rho, 0, 0, 0},
                                        cfg.num("method1.ball_radius", 0.5));
    throw std::runtime_error("method1: unknown region " + region);
  }();
  const PulledSpace Y(base, A0);

  const double r0 = cfg.num("method1.r0", 0.4);
  const int J = static_cast<int>(cfg.integer("method1.J", 4));
  const double ratio = cfg.num("method1.delta_ratio", 10.0);
  const std::size_t hub_limit =
      static_cast<std::size_t>(cfg.integer("sew.hub_limit", 1200));

  ConvergenceReport report;
  for (int j = 0; j <= J; ++j) {
    const double r = r0 * std::pow(2.0, -j);
    SewingPlan plan = plan_sewing(base, A0, r, r / ratio);
    const TunnelModel tunnel = TunnelModel::standard(base, plan.delta);
    const SewnSpace N(base, A0, plan, tunnel, hub_limit);
    const auto defect =
        scrunch_map_defect(N, Y, defect_options(cfg, "defect", seed, j));
    const auto diam_cloud = subsample(A0.sample_set(0.5 * r), 80);
    const auto cert = edited_region_diameter(N, diam_cloud);

    ReportRow row;
    row.j = j;
    row.r = r;
    row.delta = plan.delta;
    row.h = plan.h;
    row.eps_dis = defect.eps_dis;
    row.eps_cov = defect.eps_cov;
    row.gh_bound = defect.gh_bound;
    row.vol_Nj = N.volume();
    row.vol_limit = Y.total_volume();
    row.diam_measured = cert.measured;
    row.diam_bound = cert.bound;
    report.rows.push_back(row);
  }

  {
    WScalOptions wopt;
    wopt.M = static_cast<std::uint64_t>(cfg.integer("wscal.M", 200000));
    wopt.seed = seed + 0xA11CEULL;
    auto radii = cfg.num_list("wscal.radii");
    if (radii.empty()) radii = {0.2, 0.15, 0.1, 0.05};
    report.limit_wscal =
        wscal_estimate(WScalSpace(Y), PulledPoint::p0(), radii, wopt).fit;
  }
  const auto& last = report.rows.back();
  report.mass_residual =
      std::abs(last.vol_Nj - last.vol_limit - A0.hausdorff3());
  return report;
}

BilipResult bilip_distortion(const rotsym::GraphProfile& gj,
                             const rotsym::GraphProfile& ginf, double r_lo,
                             double r_hi) {
  if (r_lo >= r_hi || r_lo < gj.r.front() - 1e-9 ||
      r_hi > gj.r.back() + 1e-9 || r_lo < ginf.r.front() - 1e-9 ||
      r_hi > ginf.r.back() + 1e-9)
    throw std::invalid_argument("bilip_distortion: window mismatch");
  BilipResult out;
  double max_ratio = 1.0, min_ratio = 1.0;
  const int n = 2000;
  for (int i = 0; i <= n; ++i) {
    const double r = r_lo + (r_hi - r_lo) * i / n;
    const double za = interp_zp(gj, r), zb = interp_zp(ginf, r);
    if (std::isinf(za) || std::isinf(zb)) continue;
    const double ratio =
        std::sqrt((1.0 + za * za) / (1.0 + zb * zb));
    max_ratio = std::max(max_ratio, ratio);
    min_ratio = std::min(min_ratio, ratio);
  }
  out.lip = max_ratio;
  out.lip_inv = 1.0 / min_ratio;
  out.L = std::log(out.lip) + std::log(out.lip_inv);
  out.distortion = std::max(std::log(out.lip), std::log(out.lip_inv));
  return out;
}

ConvergenceReport run_method2(const Config& cfg, std::uint64_t seed) {
  const double alpha0 = cfg.num("method2.alpha0", 4.0 * M_PI);
  const double D = cfg.num("method2.D", 1.0);
  const int J = static_cast<int>(cfg.integer("method2.J", 5));
  const std::string region = cfg.str("method2.region", "ring");
  if (alpha0 <= 0 || D <= 0)
    throw std::domain_error("method2: alpha0 and D must be positive");

  const double r0 = std::sqrt(alpha0 / (4.0 * M_PI));
  const double r1 = (r0 - D >= 0) ? r0 - 0.5 * D : 0.5 * r0;
  const bool ball = region == "ball";
  if (!ball && region != "ring")
    throw std::runtime_error("method2: unknown region " + region);
  const double anchor = ball ? 0.5 * r0 : r1;
  const double r_max = anchor + D;
  if (anchor <= 0) throw std::domain_error("method2: degenerate anchor radius");

  const std::size_t nr =
      static_cast<std::size_t>(cfg.integer("method2.nr", 160));
  const std::size_t nphi =
      static_cast<std::size_t>(cfg.integer("method2.nphi", 192));
  const std::size_t grid =
      static_cast<std::size_t>(cfg.integer("method2.grid", 4000));

  // flat comparison profile (the pointed limit is Euclidean)
  rotsym::GraphProfile ginf;
  for (int i = 0; i <= 200; ++i) {
    ginf.r.push_back(r_max * i / 200.0);
    ginf.z.push_back(0.0);
    ginf.zp.push_back(0.0);
  }

  ConvergenceReport report;
  double prev_inner = std::numeric_limits<double>::infinity();
  const double diam_ref = M_PI * r_max;

  for (int j = 1; j <= J; ++j) {
    const double a = ball ? 0.0 : std::max(0.0, r1 - 1.0 / (2.0 * j));
    const double b =
        ball ? anchor : std::min(r_max - 0.05 * D, r1 + 1.0 / (2.0 * j));
    const double b1 = ball ? anchor : std::min(r_max - 0.05 * D, r1 + 0.5);
    const double Kbase = cfg.num("method2.K1", 0.5 / (b1 * b1));
    const double Kj = Kbase / static_cast<double>(j * j);

    const auto profile =
        rotsym::stripe_profile(Kj, a, b, 0.0, r_max, 1.0 / j, grid);
    const auto graph = rotsym::embed(profile, 0.0);
    const auto geom =
        std::make_shared<rotsym::RotSymGeometry>(graph, nr, nphi);
    const ModelSpace space_j = ModelSpace::rotsym(geom);

    CompactSetSpec Aj0 =
        ball ? CompactSetSpec::round_ball(space_j, {0, 0, 0, 0},
                                          geom->radial_arc(0.0, anchor))
             : CompactSetSpec::radial_ring(space_j, r1);
    const PulledSpace Yj(space_j, Aj0);

    const auto bl = bilip_distortion(graph, ginf, std::max(a, 0.02), b);

    // diagonal choice: halve the sewing scale until the measured bound to
    // the pulled M_j clears both 1/j and a fixed fraction of the previous
    // row (the latter keeps the sequence strictly decreasing)
    const double threshold = std::min(1.0 / j, prev_inner * 0.95);
    double r_sew = cfg.num("method2.r_init", 0.4 * std::min(anchor, D));
    ScrunchDefect defect;
    SewingPlan plan;
    TunnelModel tunnel;
    bool solved = false;
    for (int attempt = 0; attempt < 20; ++attempt) {
      plan = plan_sewing(space_j, Aj0, r_sew, r_sew / 10.0);
      tunnel = TunnelModel::standard(space_j, plan.delta);
      const SewnSpace N(space_j, Aj0, plan, tunnel,
                        static_cast<std::size_t>(cfg.integer("sew.hub_limit", 1200)));
      DefectOptions dopt =
          defect_options(cfg, "method2", seed, 100 * j + attempt);
      if (!cfg.has("method2.pair_points")) dopt.pair_points = 240;
      defect = scrunch_map_defect(N, Yj, dopt);
      if (defect.gh_bound < threshold) {
        solved = true;
        const auto diam_cloud = subsample(Aj0.sample_set(0.5 * r_sew), 50);
        const auto cert = edited_region_diameter(N, diam_cloud);
        ReportRow row;
        row.j = j;
        row.r = r_sew;
        row.delta = plan.delta;
        row.h = plan.h;
        row.eps_dis = defect.eps_dis;
        row.eps_cov = defect.eps_cov;
        row.gh_bound =
            defect.gh_bound + (std::exp(bl.distortion) - 1.0) * diam_ref;
        row.vol_Nj = N.volume();
        row.vol_limit = 4.0 / 3.0 * M_PI * r_max * r_max * r_max -
                        (ball ? 4.0 / 3.0 * M_PI * anchor * anchor * anchor
                              : 0.0);
        row.L = bl.distortion;
        row.diam_measured = cert.measured;
        row.diam_bound = cert.bound;
        report.rows.push_back(row);
        prev_inner = defect.gh_bound;
        break;
      }
      r_sew *= 0.5;
    }
    if (!solved)
      throw std::runtime_error(
          "method2: diagonal bound not attained within 20 halvings at j=" +
          std::to_string(j));
  }

  // Bishop-Gromov flag at the basepoint of the flat pulled limit
  {
    const auto geom_inf =
        std::make_shared<rotsym::RotSymGeometry>(ginf, nr, nphi);
    const ModelSpace space_inf = ModelSpace::rotsym(geom_inf);
    CompactSetSpec Ainf =
        ball ? CompactSetSpec::round_ball(space_inf, {0, 0, 0, 0}, anchor)
             : CompactSetSpec::radial_ring(space_inf, r1);
    const PulledSpace Yinf(space_inf, Ainf);
    WScalOptions wopt;
    wopt.seed = seed + 0xBE11ULL;
    auto radii = cfg.num_list("method2.density_radii");
    if (radii.empty()) radii = {0.5};
    report.limit_density =
        bishop_gromov_density(WScalSpace(Yinf), PulledPoint::p0(), radii, wopt);
  }
  return report;
}

}  // namespace scrunch::harness
