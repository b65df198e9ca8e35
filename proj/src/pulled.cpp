#include "scrunch/pulled.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "scrunch/rng.hpp"
#include "scrunch/rotsym.hpp"

namespace scrunch {

namespace {

// Orthonormal completion: unit vectors spanning the complement of the given
// (already orthonormal) seed vectors in R^4.
std::vector<Vec4> complement_basis(const std::vector<Vec4>& seed) {
  std::vector<Vec4> out;
  for (std::size_t axis = 0; axis < 4; ++axis) {
    Vec4 e;
    e[axis] = 1.0;
    Vec4 v = e;
    for (const auto& s : seed) v = v - s * v.dot(s);
    for (const auto& s : out) v = v - s * v.dot(s);
    const double n = v.norm();
    if (n > 1e-6) out.push_back(v * (1.0 / n));
  }
  return out;
}

// Spherical Fibonacci directions on S^2, deterministic in index order.
Vec3 fibonacci_dir(std::size_t k, std::size_t n) {
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) /
                             static_cast<double>(n);
  const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = 2.0 * M_PI * static_cast<double>(k) / golden;
  return {rxy * std::cos(phi), rxy * std::sin(phi), z};
}

Vec4 orthonormalize_pair(Vec4& e1, Vec4& e2) {
  e1 = e1.normalized();
  e2 = e2 - e1 * e2.dot(e1);
  const double n = e2.norm();
  if (n < 1e-9) throw std::invalid_argument("degenerate circle plane");
  e2 = e2 * (1.0 / n);
  return e2;
}

}  // namespace

CompactSetSpec CompactSetSpec::geodesic_circle(const ModelSpace& s,
                                               const Vec4& e1,
                                               const Vec4& e2) {
  if (s.kind() != SpaceKind::Sphere3)
    throw std::domain_error("geodesic_circle: Sphere3 only");
  CompactSetSpec c;
  c.kind_ = SetKind::GeodesicCircle;
  c.base_ = s;
  c.e1_ = e1;
  c.e2_ = e2;
  orthonormalize_pair(c.e1_, c.e2_);
  const auto rest = complement_basis({c.e1_, c.e2_});
  c.axis_ = rest.front();
  c.sigma0_ = 0.5 * M_PI;
  return c;
}

CompactSetSpec CompactSetSpec::latitude_circle(const ModelSpace& s,
                                               const Vec4& e1, const Vec4& e2,
                                               const Vec4& axis,
                                               double sigma0) {
  if (s.kind() != SpaceKind::Sphere3)
    throw std::domain_error("latitude_circle: Sphere3 only");
  if (sigma0 <= 0 || sigma0 >= M_PI)
    throw std::domain_error("latitude_circle: sigma0 in (0, pi)");
  CompactSetSpec c;
  c.kind_ = SetKind::GeodesicCircle;
  c.base_ = s;
  c.e1_ = e1;
  c.e2_ = e2;
  orthonormalize_pair(c.e1_, c.e2_);
  c.axis_ = axis - c.e1_ * axis.dot(c.e1_) - c.e2_ * axis.dot(c.e2_);
  if (c.axis_.norm() < 1e-9)
    throw std::invalid_argument("latitude_circle: axis in the circle plane");
  c.axis_ = c.axis_.normalized();
  c.sigma0_ = sigma0;
  return c;
}

CompactSetSpec CompactSetSpec::equatorial_sphere(const ModelSpace& s,
                                                 const Vec4& normal,
                                                 double sigma0) {
  if (s.kind() != SpaceKind::Sphere3)
    throw std::domain_error("equatorial_sphere: Sphere3 only");
  CompactSetSpec c;
  c.kind_ = SetKind::EquatorialSphere;
  c.base_ = s;
  c.axis_ = normal.normalized();
  c.sigma0_ = sigma0 < 0 ? 0.5 * M_PI : sigma0;
  if (c.sigma0_ <= 0 || c.sigma0_ >= M_PI)
    throw std::domain_error("equatorial_sphere: sigma0 in (0, pi)");
  return c;
}

CompactSetSpec CompactSetSpec::round_ball(const ModelSpace& s,
                                          const Vec4& center, double radius) {
  if (radius <= 0) throw std::domain_error("round_ball: radius must be positive");
  if (!s.contains(center)) throw std::domain_error("round_ball: center off the space");
  CompactSetSpec c;
  c.kind_ = SetKind::RoundBall;
  c.base_ = s;
  c.center_ = center;
  c.radius_ = radius;
  return c;
}

CompactSetSpec CompactSetSpec::planar_circle(double radius) {
  if (radius <= 0) throw std::domain_error("planar_circle: radius must be positive");
  CompactSetSpec c;
  c.kind_ = SetKind::PlanarCircle;
  c.base_ = ModelSpace::euclid3();
  c.radius_ = radius;
  return c;
}

CompactSetSpec CompactSetSpec::radial_ring(const ModelSpace& s, double c0) {
  if (s.kind() != SpaceKind::RotSym)
    throw std::domain_error("radial_ring: RotSym only");
  const auto& g = s.rotsym_geometry();
  if (c0 < g.r_lo() || c0 > g.r_hi())
    throw std::domain_error("radial_ring: c outside the radial window");
  CompactSetSpec c;
  c.kind_ = SetKind::RadialRing;
  c.base_ = s;
  c.radius_ = c0;
  return c;
}

CompactSetSpec CompactSetSpec::point_list(const ModelSpace& s,
                                          std::vector<Vec4> pts) {
  if (pts.empty()) throw std::domain_error("point_list: empty");
  CompactSetSpec c;
  c.kind_ = SetKind::PointList;
  c.base_ = s;
  c.pts_ = std::move(pts);
  return c;
}

double CompactSetSpec::dist_to_set(const Vec4& x) const {
  switch (kind_) {
    case SetKind::GeodesicCircle: {
      const double rho = base_.radius();
      const Vec4 u = x * (1.0 / rho);
      const double a = u.dot(e1_), b = u.dot(e2_), c = u.dot(axis_);
      const double best = std::sin(sigma0_) * std::sqrt(a * a + b * b) +
                          std::cos(sigma0_) * c;
      return rho * std::acos(clamp(best, -1.0, 1.0));
    }
    case SetKind::EquatorialSphere: {
      const double rho = base_.radius();
      const double theta =
          std::acos(clamp(x.dot(axis_) / rho, -1.0, 1.0));
      return rho * std::abs(theta - sigma0_);
    }
    case SetKind::RoundBall: {
      if (base_.kind() == SpaceKind::RotSym) {
        // axis-centered ball: the minimizing path to the level sphere is
        // radial
        const auto& g = base_.rotsym_geometry();
        return std::max(0.0, g.radial_arc(g.r_lo(), x.xyz().norm()) - radius_);
      }
      return std::max(0.0, base_.distance(center_, x) - radius_);
    }
    case SetKind::PlanarCircle: {
      const double rxy = std::hypot(x.x, x.y);
      return std::hypot(rxy - radius_, x.z);
    }
    case SetKind::RadialRing: {
      const auto& g = base_.rotsym_geometry();
      const double rx = x.xyz().norm();
      return rx >= radius_ ? g.radial_arc(radius_, rx)
                           : g.radial_arc(rx, radius_);
    }
    case SetKind::PointList: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : pts_) best = std::min(best, base_.distance(p, x));
      return best;
    }
  }
  return 0;
}

bool CompactSetSpec::member(const Vec4& x, double tol) const {
  return dist_to_set(x) <= tol;
}

Vec4 CompactSetSpec::basepoint() const {
  switch (kind_) {
    case SetKind::GeodesicCircle:
      return (e1_ * std::sin(sigma0_) + axis_ * std::cos(sigma0_)) *
             base_.radius();
    case SetKind::EquatorialSphere: {
      const auto rest = complement_basis({axis_});
      return (rest.front() * std::sin(sigma0_) + axis_ * std::cos(sigma0_)) *
             base_.radius();
    }
    case SetKind::RoundBall:
      return center_;
    case SetKind::PlanarCircle:
      return {radius_, 0, 0, 0};
    case SetKind::RadialRing:
      return {radius_, 0, 0, 0};
    case SetKind::PointList:
      return pts_.front();
  }
  return {};
}

int CompactSetSpec::dim() const {
  switch (kind_) {
    case SetKind::GeodesicCircle:
    case SetKind::PlanarCircle:
      return 1;
    case SetKind::EquatorialSphere:
    case SetKind::RadialRing:
      return 2;
    case SetKind::RoundBall:
      return 3;
    case SetKind::PointList:
      return 0;
  }
  return 0;
}

double CompactSetSpec::hausdorff3() const {
  if (kind_ != SetKind::RoundBall) return 0;
  if (base_.kind() == SpaceKind::RotSym) {
    const auto& g = base_.rotsym_geometry();
    return g.slab_volume(g.r_lo(), g.r_at_arc(g.r_lo(), radius_));
  }
  return base_.ball_volume(radius_);
}

std::optional<double> CompactSetSpec::tube_volume(double t) const {
  if (t <= 0) return 0.0;
  switch (kind_) {
    case SetKind::GeodesicCircle: {
      if (std::abs(sigma0_ - 0.5 * M_PI) > 1e-12) return std::nullopt;
      const double rho = base_.radius();
      const double s = std::min(t / rho, 0.5 * M_PI);
      return 2.0 * M_PI * M_PI * rho * rho * rho * std::sin(s) * std::sin(s);
    }
    case SetKind::EquatorialSphere: {
      const double rho = base_.radius();
      const double s1 = std::min(t / rho, sigma0_);
      const double s2 = std::min(t / rho, M_PI - sigma0_);
      auto F = [](double th) { return 0.5 * th - 0.25 * std::sin(2 * th); };
      return 4.0 * M_PI * rho * rho * rho *
             (F(sigma0_ + s2) - F(sigma0_ - s1));
    }
    case SetKind::RoundBall: {
      if (base_.kind() == SpaceKind::RotSym) {
        const auto& g = base_.rotsym_geometry();
        return g.slab_volume(g.r_at_arc(g.r_lo(), radius_),
                             g.r_at_arc(g.r_lo(), radius_ + t));
      }
      const double rho = base_.kind() == SpaceKind::Sphere3
                             ? base_.radius()
                             : std::numeric_limits<double>::infinity();
      const double outer = base_.kind() == SpaceKind::Sphere3
                               ? std::min(radius_ + t, M_PI * rho)
                               : radius_ + t;
      return base_.ball_volume(outer) - base_.ball_volume(radius_);
    }
    case SetKind::PlanarCircle: {
      if (t > radius_) return std::nullopt;  // torus self-intersects
      return 2.0 * M_PI * M_PI * radius_ * t * t;
    }
    case SetKind::RadialRing: {
      const auto& g = base_.rotsym_geometry();
      const double lo = g.r_at_arc(radius_, -t);
      const double hi = g.r_at_arc(radius_, t);
      return g.slab_volume(lo, hi);
    }
    case SetKind::PointList:
      return std::nullopt;
  }
  return std::nullopt;
}

PointCloud CompactSetSpec::sample_set(double mesh) const {
  if (mesh <= 0) throw std::domain_error("sample_set: mesh must be positive");
  PointCloud out;
  std::int64_t id = 0;
  auto push = [&](const Vec4& v) { out.points.push_back({id++, v, {}}); };
  switch (kind_) {
    case SetKind::GeodesicCircle: {
      const double rho = base_.radius();
      const double len = 2.0 * M_PI * rho * std::sin(sigma0_);
      const std::size_t n =
          std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(len / mesh)));
      for (std::size_t k = 0; k < n; ++k) {
        const double tt = 2.0 * M_PI * static_cast<double>(k) / n;
        push((e1_ * std::cos(tt) + e2_ * std::sin(tt)) *
                 (rho * std::sin(sigma0_)) +
             axis_ * (rho * std::cos(sigma0_)));
      }
      break;
    }
    case SetKind::EquatorialSphere: {
      const double rho = base_.radius();
      const double rs = rho * std::sin(sigma0_);
      const double area = 4.0 * M_PI * rs * rs;
      const std::size_t n = std::max<std::size_t>(
          32, static_cast<std::size_t>(std::ceil(2.0 * area / (mesh * mesh))));
      const auto basis = complement_basis({axis_});
      for (std::size_t k = 0; k < n; ++k) {
        const Vec3 w = fibonacci_dir(k, n);
        const Vec4 dir = basis[0] * w.x + basis[1] * w.y + basis[2] * w.z;
        push((dir * std::sin(sigma0_) + axis_ * std::cos(sigma0_)) * rho);
      }
      break;
    }
    case SetKind::RoundBall: {
      const std::size_t shells = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(radius_ / mesh)));
      push(center_);
      for (std::size_t si = 1; si <= shells; ++si) {
        const double s = radius_ * static_cast<double>(si) / shells;
        if (base_.kind() == SpaceKind::RotSym) {
          const auto& g = base_.rotsym_geometry();
          const double rs = g.r_at_arc(g.r_lo(), s);
          const double area = 4.0 * M_PI * rs * rs;
          const std::size_t n = std::max<std::size_t>(
              16,
              static_cast<std::size_t>(std::ceil(2.0 * area / (mesh * mesh))));
          for (std::size_t k = 0; k < n; ++k)
            push(Vec4(fibonacci_dir(k, n) * rs));
          continue;
        }
        double area;
        if (base_.kind() == SpaceKind::Sphere3) {
          const double rho = base_.radius();
          const double sr = rho * std::sin(s / rho);
          area = 4.0 * M_PI * sr * sr;
        } else {
          area = 4.0 * M_PI * s * s;
        }
        const std::size_t n = std::max<std::size_t>(
            16, static_cast<std::size_t>(std::ceil(2.0 * area / (mesh * mesh))));
        if (base_.kind() == SpaceKind::Sphere3) {
          const double rho = base_.radius();
          const Vec4 c = center_ * (1.0 / rho);
          const auto basis = complement_basis({c});
          for (std::size_t k = 0; k < n; ++k) {
            const Vec3 w = fibonacci_dir(k, n);
            const Vec4 dir = basis[0] * w.x + basis[1] * w.y + basis[2] * w.z;
            push((c * std::cos(s / rho) + dir * std::sin(s / rho)) * rho);
          }
        } else {
          for (std::size_t k = 0; k < n; ++k) {
            const Vec3 w = fibonacci_dir(k, n);
            push(center_ + Vec4(w) * s);
          }
        }
      }
      break;
    }
    case SetKind::PlanarCircle: {
      const double len = 2.0 * M_PI * radius_;
      const std::size_t n =
          std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(len / mesh)));
      for (std::size_t k = 0; k < n; ++k) {
        const double tt = 2.0 * M_PI * static_cast<double>(k) / n;
        push({radius_ * std::cos(tt), radius_ * std::sin(tt), 0, 0});
      }
      break;
    }
    case SetKind::RadialRing: {
      const double area = 4.0 * M_PI * radius_ * radius_;
      const std::size_t n = std::max<std::size_t>(
          32, static_cast<std::size_t>(std::ceil(2.0 * area / (mesh * mesh))));
      for (std::size_t k = 0; k < n; ++k) {
        const Vec3 w = fibonacci_dir(k, n);
        push(Vec4(w) * radius_);
      }
      break;
    }
    case SetKind::PointList:
      for (const auto& p : pts_) push(p);
      break;
  }
  const_cast<CompactSetSpec*>(this)->sample_mesh_ = mesh;
  return out;
}

std::string CompactSetSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SetKind::GeodesicCircle:
      os << (std::abs(sigma0_ - 0.5 * M_PI) < 1e-12 ? "great circle"
                                                    : "latitude circle")
         << " sigma0=" << sigma0_;
      break;
    case SetKind::EquatorialSphere:
      os << "latitude 2-sphere sigma0=" << sigma0_;
      break;
    case SetKind::RoundBall:
      os << "round ball radius=" << radius_;
      break;
    case SetKind::PlanarCircle:
      os << "planar circle radius=" << radius_;
      break;
    case SetKind::RadialRing:
      os << "radial level sphere r=" << radius_;
      break;
    case SetKind::PointList:
      os << "point list n=" << pts_.size();
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

PulledSpace::PulledSpace(ModelSpace base, CompactSetSpec set)
    : base_(std::move(base)), set_(std::move(set)) {}

double PulledSpace::distance(const PulledPoint& a, const PulledPoint& b) const {
  const double tol = 1e-9;
  if (a.is_p0 && b.is_p0) return 0;
  if (a.is_p0 || b.is_p0) {
    const Vec4& x = a.is_p0 ? b.x : a.x;
    const double d = set_.dist_to_set(x);
    if (d <= tol && set_.member(x, tol))
      throw std::domain_error("pulled distance: point inside the collapsed set");
    return d;
  }
  const double da = set_.dist_to_set(a.x);
  const double db = set_.dist_to_set(b.x);
  if (da <= tol || db <= tol)
    throw std::domain_error("pulled distance: point inside the collapsed set");
  return std::min(base_.distance(a.x, b.x), da + db);
}

double PulledSpace::total_volume() const {
  return base_.total_volume() - set_.hausdorff3();
}

double PulledSpace::ball_volume_p0(double r, std::uint64_t mc_samples,
                                   std::uint64_t seed,
                                   const Box3* euclid_box) const {
  if (const auto v = set_.tube_volume(r)) return *v;
  return ball_volume_p0_mc(r, mc_samples, seed, euclid_box).volume;
}

McEstimate PulledSpace::ball_volume_p0_mc(double r, std::uint64_t M,
                                          std::uint64_t seed,
                                          const Box3* euclid_box) const {
  if (r <= 0) throw std::domain_error("ball_volume_p0_mc: r must be positive");
  auto inside = [&](const Vec4& x) {
    return !set_.member(x, 0.0) && set_.dist_to_set(x) < r;
  };
  switch (base_.kind()) {
    case SpaceKind::Sphere3: {
      const double rho = base_.radius();
      return mc_indicator_volume(
          base_.total_volume(), M, seed,
          [rho](std::mt19937_64& rng) { return sample_sphere3_point(rng, rho); },
          inside);
    }
    case SpaceKind::Euclid3: {
      if (!euclid_box)
        throw std::domain_error("ball_volume_p0_mc: Euclid3 needs a box");
      return mc_indicator_volume(
          euclid_box->volume(), M, seed,
          [&](std::mt19937_64& rng) { return sample_box(rng, *euclid_box); },
          inside);
    }
    case SpaceKind::RotSym: {
      // weighted radial sampling as in ball_volume_mc
      const auto& geom = base_.rotsym_geometry();
      const double r_lo = geom.r_lo(), r_hi = geom.r_hi();
      const double span = r_hi - r_lo;
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
          const Vec4 x{rr * dir.x, rr * dir.y, rr * dir.z, 0};
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
      McEstimate e;
      e.volume = mean;
      e.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(M));
      e.samples = M;
      return e;
    }
  }
  throw std::logic_error("ball_volume_p0_mc: unknown space kind");
}

std::string PulledSpace::describe() const {
  std::ostringstream os;
  os << "pulled space over ";
  switch (base_.kind()) {
    case SpaceKind::Sphere3:
      os << "round 3-sphere K=" << base_.curvature();
      break;
    case SpaceKind::Euclid3:
      os << "flat E^3";
      break;
    case SpaceKind::RotSym:
      os << "rotationally symmetric graph manifold";
      break;
  }
  os << ", collapsing " << set_.describe();
  const Vec4 p = set_.basepoint();
  os << ", basepoint (" << p.x << ", " << p.y << ", " << p.z << ", " << p.w
     << ")";
  return os.str();
}

ScalingFit tubular_scaling_exponent(const ModelSpace& base,
                                    const CompactSetSpec& set,
                                    const std::vector<double>& r_list) {
  if (r_list.size() < 4)
    throw std::invalid_argument("tubular_scaling_exponent: need >= 4 radii");
  ScalingFit fit;
  PulledSpace pulled(base, set);
  for (double r : r_list) {
    const double v = pulled.ball_volume_p0(r);
    if (!(v > 0))
      throw std::invalid_argument("tubular_scaling_exponent: nonpositive volume");
    fit.radii.push_back(r);
    fit.volumes.push_back(v);
  }
  const std::size_t n = r_list.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(fit.radii[i]);
    const double ly = std::log(fit.volumes[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (std::abs(denom) < 1e-12)
    throw std::invalid_argument("tubular_scaling_exponent: degenerate radii");
  fit.exponent = (static_cast<double>(n) * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.exponent * sx) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = fit.intercept + fit.exponent * std::log(fit.radii[i]);
    fit.max_residual =
        std::max(fit.max_residual, std::abs(pred - std::log(fit.volumes[i])));
  }
  return fit;
}

}  // namespace scrunch
