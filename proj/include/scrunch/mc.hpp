#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "scrunch/model_space.hpp"
#include "scrunch/rng.hpp"
#include "scrunch/vec.hpp"

namespace scrunch {

struct McEstimate {
  double volume = 0;
  double std_error = 0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
};

// Samples are drawn in fixed-size chunks, one RNG stream per chunk, and the
// integer hit counts are summed in chunk order, so the OpenMP kernel and the
// serial reference are bit-identical.
inline constexpr std::uint64_t kMcChunk = 1 << 16;

// Sampler: (std::mt19937_64&) -> Vec4 uniform on a region of total measure
// `measure`. Pred: (const Vec4&) -> bool.
template <class Sampler, class Pred>
McEstimate mc_indicator_volume_serial(double measure, std::uint64_t M,
                                      std::uint64_t seed, Sampler&& sample,
                                      Pred&& inside) {
  const std::uint64_t chunks = (M + kMcChunk - 1) / kMcChunk;
  std::uint64_t hits = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    auto rng = make_stream(seed, c);
    const std::uint64_t lo = c * kMcChunk;
    const std::uint64_t hi = lo + kMcChunk < M ? lo + kMcChunk : M;
    std::uint64_t h = 0;
    for (std::uint64_t i = lo; i < hi; ++i)
      if (inside(sample(rng))) ++h;
    hits += h;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(M);
  McEstimate e;
  e.volume = measure * p;
  e.std_error = measure * std::sqrt(p * (1.0 - p) / static_cast<double>(M));
  e.hits = hits;
  e.samples = M;
  return e;
}

template <class Sampler, class Pred>
McEstimate mc_indicator_volume(double measure, std::uint64_t M,
                               std::uint64_t seed, Sampler&& sample,
                               Pred&& inside) {
  const std::uint64_t chunks = (M + kMcChunk - 1) / kMcChunk;
  std::vector<std::uint64_t> chunk_hits(chunks, 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(c));
    const std::uint64_t lo = static_cast<std::uint64_t>(c) * kMcChunk;
    const std::uint64_t hi = lo + kMcChunk < M ? lo + kMcChunk : M;
    std::uint64_t h = 0;
    for (std::uint64_t i = lo; i < hi; ++i)
      if (inside(sample(rng))) ++h;
    chunk_hits[static_cast<std::size_t>(c)] = h;
  }
  std::uint64_t hits = 0;
  for (std::uint64_t h : chunk_hits) hits += h;
  const double p = static_cast<double>(hits) / static_cast<double>(M);
  McEstimate e;
  e.volume = measure * p;
  e.std_error = measure * std::sqrt(p * (1.0 - p) / static_cast<double>(M));
  e.hits = hits;
  e.samples = M;
  return e;
}

// Axis-aligned sampling box for Euclid3 / embedded carriers.
struct Box3 {
  Vec3 lo, hi;
  double volume() const {
    return (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z);
  }
  static Box3 cube(const Vec3& center, double half) {
    return {center - Vec3{half, half, half}, center + Vec3{half, half, half}};
  }
};

inline Vec4 sample_box(std::mt19937_64& rng, const Box3& b) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = b.lo.x + (b.hi.x - b.lo.x) * u(rng);
  const double y = b.lo.y + (b.hi.y - b.lo.y) * u(rng);
  const double z = b.lo.z + (b.hi.z - b.lo.z) * u(rng);
  return {x, y, z, 0};
}

inline Vec4 sample_sphere3_point(std::mt19937_64& rng, double rho) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec4 v{n(rng), n(rng), n(rng), n(rng)};
  const double nn = v.norm();
  return v * (rho / nn);
}

// ball_volume_mc on a model space: uniform ambient sampling with the
// indicator d(center, x) < r. Sphere3 samples the whole round sphere;
// Euclid3 samples the caller-supplied bounding box.
McEstimate ball_volume_mc(const ModelSpace& space, const Vec4& center, double r,
                          std::uint64_t M, std::uint64_t seed,
                          const Box3* euclid_box = nullptr);
McEstimate ball_volume_mc_serial(const ModelSpace& space, const Vec4& center,
                                 double r, std::uint64_t M, std::uint64_t seed,
                                 const Box3* euclid_box = nullptr);

// Radially stratified variant for Sphere3: the colatitude from `center` is
// drawn stratum-by-stratum from its exact law (density ~ sin^2), the
// direction uniformly on the orthogonal 2-sphere. Still the uniform law on
// the sphere; only the stratum containing the ball boundary contributes
// variance.
McEstimate ball_volume_mc_stratified(const ModelSpace& space,
                                     const Vec4& center, double r,
                                     std::uint64_t M, std::uint64_t seed,
                                     std::size_t strata = 128);

}  // namespace scrunch
