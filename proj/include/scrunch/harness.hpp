#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scrunch/config.hpp"
#include "scrunch/pulled.hpp"
#include "scrunch/rotsym.hpp"
#include "scrunch/scalar.hpp"
#include "scrunch/sewing.hpp"

namespace scrunch::harness {

struct ReportRow {
  int j = 0;
  double r = 0;
  double delta = 0;
  double h = 0;
  double eps_dis = 0;
  double eps_cov = 0;
  double gh_bound = 0;  // always 2 max(eps_dis, eps_cov)
  double vol_Nj = 0;
  double vol_limit = 0;
  double L = 0;  // biLipschitz distortion where applicable
  double diam_measured = 0;
  double diam_bound = 0;
};

struct ConvergenceReport {
  std::vector<ReportRow> rows;
  std::optional<WScalFit> limit_wscal;
  std::optional<DensityProfile> limit_density;
  double mass_residual = 0;  // |vol_Nj - vol_limit - H^3(A0) [dim 3]|

  void save_csv(const std::string& path) const;
};

// Method I: sew a region of a fixed sphere increasingly tightly
// (r_j = r0 2^-j, delta_j = r_j/ratio) and certify the GH trend toward the
// pulled space. config keys: [method1] region = circle|equator|ball,
// r0, J, delta_ratio, K, ball_radius; [defect] pair_points.
ConvergenceReport run_method1(const Config& cfg, std::uint64_t seed);

struct BilipResult {
  double lip = 1;
  double lip_inv = 1;
  double L = 0;          // log lip + log lip_inv
  double distortion = 0; // max(log lip, log lip_inv)
};

// Radial-matching map between two graph profiles on a common r window:
// the angular factors agree, so the Lipschitz constants are the extremal
// ratios sqrt((1+z_a'^2)/(1+z_b'^2)). Throws std::invalid_argument when the
// windows do not overlap.
BilipResult bilip_distortion(const rotsym::GraphProfile& gj,
                             const rotsym::GraphProfile& ginf, double r_lo,
                             double r_hi);

// Method II: diagonal sequence over rotationally symmetric manifolds with
// constant-curvature stripes, ADM mass caps 1/j, regions sewn until the
// per-j bound clears 1/j, reported against the pulled Euclidean limit.
// config keys: [method2] region = ring|sphere2|ball, alpha0, D, J.
ConvergenceReport run_method2(const Config& cfg, std::uint64_t seed);

}  // namespace scrunch::harness
