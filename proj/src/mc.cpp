#include "scrunch/mc.hpp"

#include <stdexcept>

#include "scrunch/rotsym.hpp"

namespace scrunch {

namespace {

// Orthonormal basis of the orthogonal complement of unit u in R^4.
std::array<Vec4, 3> perp_basis(const Vec4& u) {
  std::array<Vec4, 3> basis;
  std::size_t count = 0;
  for (std::size_t axis = 0; axis < 4 && count < 3; ++axis) {
    Vec4 e;
    e[axis] = 1.0;
    Vec4 v = e - u * e.dot(u);
    for (std::size_t k = 0; k < count; ++k)
      v = v - basis[k] * v.dot(basis[k]);
    const double n = v.norm();
    if (n > 1e-6) basis[count++] = v * (1.0 / n);
  }
  if (count != 3) throw std::logic_error("perp_basis: degenerate input");
  return basis;
}

// CDF of the colatitude law on the round 3-sphere: F(t) = (t - sin t cos t)/pi.
double colat_cdf(double t) { return (t - std::sin(t) * std::cos(t)) / M_PI; }

double colat_quantile(double v) {
  double lo = 0, hi = M_PI;
  double t = M_PI * v;
  for (int it = 0; it < 60; ++it) {
    const double f = colat_cdf(t) - v;
    if (f > 0)
      hi = t;
    else
      lo = t;
    const double dens = 2.0 * std::sin(t) * std::sin(t) / M_PI;
    double step = dens > 1e-14 ? t - f / dens : 0.5 * (lo + hi);
    if (step <= lo || step >= hi) step = 0.5 * (lo + hi);
    if (std::abs(step - t) < 1e-14) return step;
    t = step;
  }
  return t;
}

}  // namespace

McEstimate ball_volume_mc(const ModelSpace& space, const Vec4& center, double r,
                          std::uint64_t M, std::uint64_t seed,
                          const Box3* euclid_box) {
  if (r <= 0) throw std::domain_error("ball_volume_mc: r must be positive");
  if (M < 1) throw std::domain_error("ball_volume_mc: M must be >= 1");
  switch (space.kind()) {
    case SpaceKind::Sphere3: {
      const double rho = space.radius();
      return mc_indicator_volume(
          space.total_volume(), M, seed,
          [rho](std::mt19937_64& rng) { return sample_sphere3_point(rng, rho); },
          [&](const Vec4& x) { return sphere_distance(rho, center, x) < r; });
    }
    case SpaceKind::Euclid3: {
      const Box3 box = euclid_box ? *euclid_box : Box3::cube(center.xyz(), r);
      return mc_indicator_volume(
          box.volume(), M, seed,
          [&box](std::mt19937_64& rng) { return sample_box(rng, box); },
          [&](const Vec4& x) { return (x - center).norm() < r; });
    }
    case SpaceKind::RotSym: {
      // The graph manifold has measure zero in its ambient space, so the
      // estimator samples (radius, direction) with the radial density
      // folded into an importance weight.
      const auto& geom = space.rotsym_geometry();
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
          const double w =
              span * 4.0 * M_PI * rr * rr * std::sqrt(1.0 + zp * zp);
          if (geom.distance3(center, x) < r) {
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
      const double var =
          s2 / static_cast<double>(M) - mean * mean;
      McEstimate e;
      e.volume = mean;
      e.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(M));
      e.samples = M;
      return e;
    }
  }
  throw std::logic_error("ball_volume_mc: unknown space kind");
}

McEstimate ball_volume_mc_serial(const ModelSpace& space, const Vec4& center,
                                 double r, std::uint64_t M, std::uint64_t seed,
                                 const Box3* euclid_box) {
  if (r <= 0) throw std::domain_error("ball_volume_mc: r must be positive");
  switch (space.kind()) {
    case SpaceKind::Sphere3: {
      const double rho = space.radius();
      return mc_indicator_volume_serial(
          space.total_volume(), M, seed,
          [rho](std::mt19937_64& rng) { return sample_sphere3_point(rng, rho); },
          [&](const Vec4& x) { return sphere_distance(rho, center, x) < r; });
    }
    case SpaceKind::Euclid3: {
      const Box3 box = euclid_box ? *euclid_box : Box3::cube(center.xyz(), r);
      return mc_indicator_volume_serial(
          box.volume(), M, seed,
          [&box](std::mt19937_64& rng) { return sample_box(rng, box); },
          [&](const Vec4& x) { return (x - center).norm() < r; });
    }
    default:
      return ball_volume_mc(space, center, r, M, seed, euclid_box);
  }
}

McEstimate ball_volume_mc_stratified(const ModelSpace& space,
                                     const Vec4& center, double r,
                                     std::uint64_t M, std::uint64_t seed,
                                     std::size_t strata) {
  if (space.kind() != SpaceKind::Sphere3)
    throw std::domain_error("stratified sampler: Sphere3 only");
  if (r <= 0 || M < strata)
    throw std::domain_error("stratified sampler: bad r or M");
  const double rho = space.radius();
  const double total = space.total_volume();
  const Vec4 u = center * (1.0 / center.norm());
  const auto basis = perp_basis(u);

  std::vector<std::uint64_t> hits(strata, 0), counts(strata, 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(strata); ++s) {
    const std::size_t si = static_cast<std::size_t>(s);
    std::uint64_t m = M / strata + (si < M % strata ? 1 : 0);
    counts[si] = m;
    auto rng = make_stream(seed, 0x5734A100000000ULL + si);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double lo = static_cast<double>(si) / static_cast<double>(strata);
    const double wid = 1.0 / static_cast<double>(strata);
    std::uint64_t h = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
      const double theta = colat_quantile(lo + wid * uni(rng));
      Vec3 d{gauss(rng), gauss(rng), gauss(rng)};
      d = d.normalized();
      const Vec4 w = basis[0] * d.x + basis[1] * d.y + basis[2] * d.z;
      const Vec4 x = (u * std::cos(theta) + w * std::sin(theta)) * rho;
      if (sphere_distance(rho, center, x) < r) ++h;
    }
    hits[si] = h;
  }
  double vol = 0, var = 0;
  std::uint64_t tot_hits = 0, tot_samples = 0;
  const double w_s = total / static_cast<double>(strata);
  for (std::size_t s = 0; s < strata; ++s) {
    const double p = static_cast<double>(hits[s]) / static_cast<double>(counts[s]);
    vol += w_s * p;
    var += w_s * w_s * p * (1.0 - p) / static_cast<double>(counts[s]);
    tot_hits += hits[s];
    tot_samples += counts[s];
  }
  McEstimate e;
  e.volume = vol;
  e.std_error = std::sqrt(var);
  e.hits = tot_hits;
  e.samples = tot_samples;
  return e;
}

}  // namespace scrunch
