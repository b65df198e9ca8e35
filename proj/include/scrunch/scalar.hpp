#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scrunch/mc.hpp"
#include "scrunch/pulled.hpp"

namespace scrunch {

// Volume-deficit quotient Q(r) = 30 (Vol_E(B(0,r)) - H^3(B(p,r)))
//                                / (r^2 Vol_E(B(0,r))).
struct WScalPoint {
  double r = 0;
  double Q = 0;
  double sigma = 0;
  double volume = 0;
  double vol_sigma = 0;
};

struct WScalFit {
  bool divergent = false;
  // finite branch: Q(r) ~ limit + c r^2
  double limit = 0;
  double limit_sigma = 0;
  // divergent branch: Q(r) ~ coeff * r^exponent, exponent < 0
  double exponent = 0;
  double coeff = 0;
  double max_residual = 0;
};

struct WScalProfile {
  std::vector<WScalPoint> points;  // radii decreasing
  WScalFit fit;

  // CSV r,Q,sigma with the fit summary as trailing comment lines.
  void save_csv(const std::string& path) const;
};

struct WScalOptions {
  std::uint64_t M = 1'000'000;
  std::uint64_t seed = 7;
  bool stratified = true;           // Sphere3 only
  std::optional<Box3> euclid_box;   // per-radius boxes default to B(p,r)
  double divergence_threshold = -0.5;
};

// Thrown when the Monte Carlo error budget (sigma < 10% of the smallest
// significant deficit) cannot be met at the configured M.
struct McBudgetError {
  std::uint64_t required_M = 0;
  std::string what;
};

using WScalSpace = std::variant<ModelSpace, PulledSpace>;

WScalProfile wscal_estimate(const WScalSpace& space, const PulledPoint& p,
                            const std::vector<double>& r_list,
                            const WScalOptions& opt = {});

struct DensityPoint {
  double r = 0;
  double theta = 0;  // Vol(B(p,r)) / ((4/3) pi r^3)
  double sigma = 0;
  bool exceeds_one = false;  // theta > 1 + 3 sigma
};

struct DensityProfile {
  std::vector<DensityPoint> points;
  bool flag_raised = false;

  void save_csv(const std::string& path) const;
};

// Bishop-Gromov density profile; flags radii where the Euclidean density is
// exceeded beyond 3 sigma (impossible at a noncollapsed Ricci-limit point).
DensityProfile bishop_gromov_density(const WScalSpace& space,
                                     const PulledPoint& p,
                                     const std::vector<double>& r_list,
                                     const WScalOptions& opt = {});

}  // namespace scrunch
