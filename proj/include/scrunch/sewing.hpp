#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scrunch/model_space.hpp"
#include "scrunch/pulled.hpp"
#include "scrunch/vec.hpp"

namespace scrunch {

// Metric model of a tunnel: diameter h(delta) and volume 2 Vol(B(delta/2)),
// the epsilon = 0 bookkeeping choice. Default h(delta) = 3 delta.
struct TunnelModel {
  double delta = 0;
  double h = 0;
  double vol = 0;

  static TunnelModel standard(const ModelSpace& space, double delta,
                              double h_factor = 3.0);
};

// Packing centers v_k on A0 (pairwise >= 2r apart, maximal over the set
// sample) and n = nbar(nbar-1) tunnel mouths v_{kj} on the spheres
// d(., v_k) = r - delta, at deterministic spiral directions. Mouth
// coordinates are generated on demand from (k, j); tunnel U_{kj} pairs
// v_{kj} with v_{jk}.
class SewingPlan {
 public:
  double r = 0;
  double delta = 0;            // possibly reduced from the requested delta
  double delta_requested = 0;  // see plan_sewing
  double h = 0;
  std::vector<Vec4> centers;

  std::size_t nbar() const { return centers.size(); }
  std::size_t n() const { return nbar() * (nbar() - 1); }

  // Mouth v_{kj}, k != j, on the boundary sphere of B(v_k, r - delta).
  Vec4 mouth(const ModelSpace& space, std::size_t k, std::size_t j) const;

  // Minimum pairwise separation of the mouth directions within one ball.
  double mouth_separation(const ModelSpace& space) const;

  // CSV: header comments with r, delta, h; rows C,k,coords and M,k,j,coords.
  // Mouth rows are emitted only up to `mouth_limit` tunnels.
  void save_csv(const std::string& path, const ModelSpace& space,
                std::size_t mouth_limit = 20000) const;

 private:
  mutable std::vector<Vec3> tangent_cache_;
};

// Greedy maximal packing over a dense sample of A0 in id order, mouths at
// maximally separated spiral directions. The requested delta is reduced if
// the n-1 mouth balls cannot be pairwise disjoint at that scale (the
// construction chooses delta = delta(nbar, K, r)).
// Throws: delta >= r -> std::domain_error; fewer than two centers ->
// std::runtime_error("region too small to sew at this r").
SewingPlan plan_sewing(const ModelSpace& space, const CompactSetSpec& A0,
                       double r, double delta);

// The sewn space: base metric plus tunnel shortcuts. Small plans carry the
// exact all-pairs hub matrix over the mouths (Floyd-Warshall over tunnel
// edges of length h and base legs); large plans answer queries by routing
// through a direct tunnel between near-entry balls.
class SewnSpace {
 public:
  SewnSpace(ModelSpace base, CompactSetSpec region, SewingPlan plan,
            TunnelModel tunnel, std::size_t hub_limit = 1200);

  const ModelSpace& base() const { return base_; }
  const CompactSetSpec& region() const { return region_; }
  const SewingPlan& plan() const { return plan_; }
  const TunnelModel& tunnel() const { return tunnel_; }
  bool has_hub_matrix() const { return !hub_.empty(); }

  // min(d_M(x,y), entry leg + hub route + exit leg). Throws
  // std::domain_error when x or y lies inside a removed ball B(v_kj, delta/2).
  double distance(const Vec4& x, const Vec4& y) const;

  // True when x lies inside a removed ball (such points are not in N).
  bool in_removed_ball(const Vec4& x) const;

  // Distance restricted to direct-tunnel routing between the `cand` nearest
  // centers of each endpoint (the large-plan path; also used by kernels).
  double distance_routed(const Vec4& x, const Vec4& y,
                         std::size_t cand = 6) const;

  // distance() without the removed-ball check, for callers that already
  // filtered their samples.
  double distance_unchecked(const Vec4& x, const Vec4& y) const;

  // Vol(M) - n Vol(B(delta/2)) + (n/2) vol(tunnel); exactly Vol(M) under
  // the standard tunnel model.
  double volume() const;

  // Hub matrix CSV (exact mode only).
  void save_hub_csv(const std::string& path) const;

  std::vector<std::size_t> nearest_centers(const Vec4& x, std::size_t c) const;

 private:
  void build_hub();
  double hub_route(const Vec4& x, const Vec4& y) const;
  void check_not_removed(const Vec4& x) const;

  ModelSpace base_;
  CompactSetSpec region_;
  SewingPlan plan_;
  TunnelModel tunnel_;
  std::size_t hub_limit_;
  std::vector<double> hub_;      // n x n shortest mouth-to-mouth distances
  std::vector<Vec4> mouths_;     // materialized when hub matrix is exact
};

struct DiameterCertificate {
  double measured = 0;
  double bound = 0;       // 16 r + 3 h(delta)
  double slack = 0;       // bound - measured
  std::size_t pairs = 0;
  bool ok() const { return measured <= bound; }
};

// Max of sewn distance over sampled pairs of the edited region A_r', checked
// against 16 r + 3 h(delta). Throws std::invalid_argument on empty samples.
DiameterCertificate edited_region_diameter(const SewnSpace& N,
                                           const PointCloud& sample);
DiameterCertificate edited_region_diameter_serial(const SewnSpace& N,
                                                  const PointCloud& sample);

struct ScrunchDefect {
  double eps_dis = 0;
  double eps_cov = 0;
  double gh_bound = 0;      // 2 max(eps_dis, eps_cov)
  double lip_empirical = 0; // observed Lipschitz constant of F
  double pair_mesh = 0;
  std::size_t pair_points = 0;
};

struct DefectOptions {
  std::size_t pair_points = 1800;
  std::uint64_t seed = 12345;
};

// Defect of the scrunching map F: N -> Y collapsing the edited region to p0:
// eps_dis = max |d_Y(F x, F y) - d_N(x, y)| over sampled pairs,
// eps_cov = covering radius of the image of F in Y (exactly r/2: the image
//           is p0 plus the complement of the tube of radius r around A0),
// gh_bound = 2 max(eps_dis, eps_cov).
// Throws std::invalid_argument when N and Y disagree on base or region.
ScrunchDefect scrunch_map_defect(const SewnSpace& N, const PulledSpace& Y,
                                 const DefectOptions& opt = {});

double sewn_volume(const SewnSpace& N);

}  // namespace scrunch
