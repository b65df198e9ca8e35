#include "scrunch/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "scrunch/rng.hpp"
#include "scrunch/rotsym.hpp"

namespace scrunch {

namespace {

struct VolEstimate {
  double volume = 0;
  double sigma = 0;
};

// Pulled-space ball volume around an arbitrary point: uniform base sampling
// with the quotient distance indicator.
VolEstimate pulled_point_ball(const PulledSpace& Y, const Vec4& p, double r,
                              const WScalOptions& opt, std::uint64_t seed) {
  const ModelSpace& base = Y.base();
  const CompactSetSpec& K = Y.set();
  const double dp = K.dist_to_set(p);
  auto inside = [&](const Vec4& x) {
    if (K.member(x, 0.0)) return false;
    const double dx = K.dist_to_set(x);
    return std::min(base.distance(p, x), dp + dx) < r;
  };
  McEstimate e;
  switch (base.kind()) {
    case SpaceKind::Sphere3: {
      const double rho = base.radius();
      e = mc_indicator_volume(
          base.total_volume(), opt.M, seed,
          [rho](std::mt19937_64& rng) { return sample_sphere3_point(rng, rho); },
          inside);
      break;
    }
    case SpaceKind::Euclid3: {
      const Box3 box =
          opt.euclid_box ? *opt.euclid_box : Box3::cube(p.xyz(), r);
      e = mc_indicator_volume(
          box.volume(), opt.M, seed,
          [&](std::mt19937_64& rng) { return sample_box(rng, box); }, inside);
      break;
    }
    case SpaceKind::RotSym: {
      // weighted radial sampling of the graph manifold
      const auto& geom = base.rotsym_geometry();
      const double r_lo = geom.r_lo(), r_hi = geom.r_hi();
      const double span = r_hi - r_lo;
      const std::uint64_t M = opt.M;
      const std::uint64_t chunks = (M + kMcChunk - 1) / kMcChunk;
      std::vector<double> sw(chunks, 0.0), sw2(chunks, 0.0);
#pragma omp parallel for schedule(static)
      for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
        auto rng = make_stream(seed, static_cast<std::uint64_t>(c));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const std::uint64_t lo = static_cast<std::uint64_t>(c) * kMcChunk;
        const std::uint64_t hi = lo + kMcChunk < M ? lo + kMcChunk : M;
        double s1 = 0, s2 = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
          const double rr = r_lo + span * u(rng);
          Vec3 dir{gauss(rng), gauss(rng), gauss(rng)};
          dir = dir.normalized();
          const Vec4 x(dir * rr);
          const double zp = geom.zp_at(rr);
          const double zz = std::isinf(zp) ? 0.0 : zp * zp;
          const double w = span * 4.0 * M_PI * rr * rr * std::sqrt(1.0 + zz);
          if (inside(x)) {
            s1 += w;
            s2 += w * w;
          }
        }
        sw[static_cast<std::size_t>(c)] = s1;
        sw2[static_cast<std::size_t>(c)] = s2;
      }
      double s1 = 0, s2 = 0;
      for (std::size_t c = 0; c < chunks; ++c) {
        s1 += sw[c];
        s2 += sw2[c];
      }
      const double mean = s1 / static_cast<double>(M);
      const double var = s2 / static_cast<double>(M) - mean * mean;
      return {mean, std::sqrt(std::max(0.0, var) / static_cast<double>(M))};
    }
  }
  return {e.volume, e.std_error};
}

VolEstimate estimate_volume(const WScalSpace& space, const PulledPoint& p,
                            double r, const WScalOptions& opt,
                            std::uint64_t seed) {
  if (const auto* ms = std::get_if<ModelSpace>(&space)) {
    if (p.is_p0)
      throw std::domain_error("wscal: p0 token without a pulled space");
    McEstimate e;
    if (ms->kind() == SpaceKind::Sphere3 && opt.stratified)
      e = ball_volume_mc_stratified(*ms, p.x, r, opt.M, seed);
    else {
      const Box3 box = opt.euclid_box ? *opt.euclid_box : Box3::cube(p.x.xyz(), r);
      e = ball_volume_mc(*ms, p.x, r, opt.M, seed,
                         ms->kind() == SpaceKind::Euclid3 ? &box : nullptr);
    }
    return {e.volume, e.std_error};
  }
  const auto& Y = std::get<PulledSpace>(space);
  if (p.is_p0) {
    if (const auto v = Y.set().tube_volume(r)) return {*v, 0.0};
    const Box3 box = opt.euclid_box
                         ? *opt.euclid_box
                         : Box3::cube(Y.set().basepoint().xyz(), 4 * r);
    const auto e = Y.ball_volume_p0_mc(r, opt.M, seed,
                                       Y.base().kind() == SpaceKind::Euclid3
                                           ? &box
                                           : nullptr);
    return {e.volume, e.std_error};
  }
  return pulled_point_ball(Y, p.x, r, opt, seed);
}

struct Wls {
  double a = 0, b = 0, var_a = 0;
};

// Weighted least squares for y = a + b x.
Wls wls_fit(const std::vector<double>& x, const std::vector<double>& y,
            const std::vector<double>& sigma) {
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = std::max(sigma[i], 1e-12);
    const double w = 1.0 / (s * s);
    sw += w;
    swx += w * x[i];
    swy += w * y[i];
    swxx += w * x[i] * x[i];
    swxy += w * x[i] * y[i];
  }
  const double det = sw * swxx - swx * swx;
  if (std::abs(det) < 1e-300) throw std::invalid_argument("wls: degenerate");
  Wls f;
  f.b = (sw * swxy - swx * swy) / det;
  f.a = (swy * swxx - swx * swxy) / det;
  f.var_a = swxx / det;
  return f;
}

}  // namespace

void WScalProfile::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "r,Q,sigma\n";
  for (const auto& p : points)
    out << p.r << ',' << p.Q << ',' << p.sigma << '\n';
  out << "#divergent " << (fit.divergent ? 1 : 0) << '\n';
  if (fit.divergent)
    out << "#exponent " << fit.exponent << "\n#coeff " << fit.coeff << '\n';
  else
    out << "#limit " << fit.limit << "\n#limit_sigma " << fit.limit_sigma
        << '\n';
  out << "#max_residual " << fit.max_residual << '\n';
}

WScalProfile wscal_estimate(const WScalSpace& space, const PulledPoint& p,
                            const std::vector<double>& r_list,
                            const WScalOptions& opt) {
  if (r_list.size() < 3)
    throw std::invalid_argument("wscal: need at least 3 radii");
  WScalProfile prof;
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    const double r = r_list[i];
    const auto ve =
        estimate_volume(space, p, r, opt, opt.seed + 1000003ULL * i);
    const double vol_e = 4.0 / 3.0 * M_PI * r * r * r;
    WScalPoint pt;
    pt.r = r;
    pt.volume = ve.volume;
    pt.vol_sigma = ve.sigma;
    pt.Q = 30.0 * (vol_e - ve.volume) / (r * r * vol_e);
    pt.sigma = 30.0 * ve.sigma / (r * r * vol_e);
    prof.points.push_back(pt);
  }

  // error budget: when a deficit is statistically significant, its relative
  // Monte Carlo error must be below 10%
  for (const auto& pt : prof.points) {
    const double vol_e = 4.0 / 3.0 * M_PI * pt.r * pt.r * pt.r;
    const double deficit = std::abs(vol_e - pt.volume);
    if (pt.vol_sigma > 0 && deficit > 3.0 * pt.vol_sigma &&
        pt.vol_sigma > 0.1 * deficit) {
      const double ratio = pt.vol_sigma / (0.1 * deficit);
      throw McBudgetError{
          static_cast<std::uint64_t>(static_cast<double>(opt.M) * ratio *
                                     ratio),
          "volume deficit significant but above the 10% error budget"};
    }
  }

  // divergence classification: same-sign Q with log-log slope below the
  // threshold means Q(r) blows up as r -> 0
  bool same_sign = true;
  for (const auto& pt : prof.points)
    if (pt.Q * prof.points.front().Q <= 0) same_sign = false;
  double slope = 0;
  if (same_sign) {
    std::vector<double> lx, ly, ls;
    for (const auto& pt : prof.points) {
      if (std::abs(pt.Q) < 1e-12) {
        same_sign = false;
        break;
      }
      lx.push_back(std::log(pt.r));
      ly.push_back(std::log(std::abs(pt.Q)));
      ls.push_back(1.0);
    }
    if (same_sign) slope = wls_fit(lx, ly, ls).b;
  }

  if (same_sign && slope < opt.divergence_threshold) {
    prof.fit.divergent = true;
    std::vector<double> lx, ly, ls;
    for (const auto& pt : prof.points) {
      lx.push_back(std::log(pt.r));
      ly.push_back(std::log(std::abs(pt.Q)));
      ls.push_back(1.0);
    }
    const auto f = wls_fit(lx, ly, ls);
    prof.fit.exponent = f.b;
    prof.fit.coeff = (prof.points.front().Q < 0 ? -1.0 : 1.0) * std::exp(f.a);
    for (const auto& pt : prof.points)
      prof.fit.max_residual = std::max(
          prof.fit.max_residual,
          std::abs(std::log(std::abs(pt.Q)) -
                   (f.a + f.b * std::log(pt.r))));
  } else {
    std::vector<double> x, y, s;
    for (const auto& pt : prof.points) {
      x.push_back(pt.r * pt.r);
      y.push_back(pt.Q);
      s.push_back(pt.sigma);
    }
    const auto f = wls_fit(x, y, s);
    prof.fit.limit = f.a;
    prof.fit.limit_sigma = std::sqrt(f.var_a);
    for (std::size_t i = 0; i < x.size(); ++i)
      prof.fit.max_residual = std::max(prof.fit.max_residual,
                                       std::abs(y[i] - (f.a + f.b * x[i])));
  }
  return prof;
}

void DensityProfile::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "r,theta,sigma,exceeds_one\n";
  for (const auto& p : points)
    out << p.r << ',' << p.theta << ',' << p.sigma << ','
        << (p.exceeds_one ? 1 : 0) << '\n';
  out << "#flag_raised " << (flag_raised ? 1 : 0) << '\n';
}

DensityProfile bishop_gromov_density(const WScalSpace& space,
                                     const PulledPoint& p,
                                     const std::vector<double>& r_list,
                                     const WScalOptions& opt) {
  DensityProfile prof;
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    const double r = r_list[i];
    const auto ve =
        estimate_volume(space, p, r, opt, opt.seed + 2000003ULL * i);
    const double vol_e = 4.0 / 3.0 * M_PI * r * r * r;
    DensityPoint pt;
    pt.r = r;
    pt.theta = ve.volume / vol_e;
    pt.sigma = ve.sigma / vol_e;
    pt.exceeds_one = pt.theta > 1.0 + 3.0 * pt.sigma;
    if (pt.exceeds_one) prof.flag_raised = true;
    prof.points.push_back(pt);
  }
  return prof;
}

}  // namespace scrunch
