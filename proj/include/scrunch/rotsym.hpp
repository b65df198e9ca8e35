#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scrunch/vec.hpp"

namespace scrunch::rotsym {

struct Stripe {
  double a = 0, b = 0, K = 0;  // m(r) = r^3 K / 2 on (a, b)
};

// Hawking-mass profile on an increasing radial grid. Admissible profiles
// satisfy m(r_min) = r_min/2, m(r) < r/2 beyond, and m nondecreasing.
struct HawkingProfile {
  double r_min = 0;
  std::vector<double> r;
  std::vector<double> m;
  std::vector<Stripe> stripes;

  double r_max() const { return r.back(); }
  // Monotone cubic (Fritsch-Carlson) evaluation of m at radius x.
  double eval(double x) const;

  void save_csv(const std::string& path) const;
  static HawkingProfile load_csv(const std::string& path);
};

// Graphical embedding z(r) of a rotationally symmetric manifold,
// g = (1 + z'(r)^2) dr^2 + r^2 g_0.
struct GraphProfile {
  std::vector<double> r;
  std::vector<double> z;
  std::vector<double> zp;

  void save_csv(const std::string& path) const;
  static GraphProfile load_csv(const std::string& path);
};

struct AdmissibilityIssue {
  std::string what;
  std::size_t index = 0;
  double value = 0;
};

struct AdmissibilityReport {
  std::vector<AdmissibilityIssue> issues;
  bool ok() const { return issues.empty(); }
};

AdmissibilityReport check_admissible(const HawkingProfile& p);

// Quadrature of z(r) = int sqrt(2m/(r - 2m)) dr from r_min. The endpoint
// singularity ~ (r - r_min)^{-1/2} when m(r_min) = r_min/2 > 0 is removed by
// the substitution u = sqrt(r - r_min); z' is stored from the closed-form
// integrand. Throws std::domain_error on inadmissible profiles.
GraphProfile embed(const HawkingProfile& p, double z_min);

// m_H(r) = (r/2) z'^2 / (1 + z'^2), pointwise.
HawkingProfile hawking_from_graph(const GraphProfile& g);

struct ScalarSample {
  double r = 0;
  double R = 0;
  bool axis_limit = false;  // one-sided value at r = 0
};

// R(r) = 4 m'(r) / r^2 with centered differences (one-sided at the ends).
std::vector<ScalarSample> scalar_curvature(const HawkingProfile& p);

// Graph-side scalar curvature from z', z'' for cross-checking.
std::vector<ScalarSample> scalar_curvature_graph(const GraphProfile& g);

struct SchwarzschildPair {
  HawkingProfile hawking;
  GraphProfile graph;
};

// Closed-form constant-mass profiles on [2 m0, r_max]:
// z(r) = sqrt(8 m0 (r - 2 m0)).
SchwarzschildPair schwarzschild(double m0, double r_max,
                                std::size_t grid = 10000);

// Admissible profile with m = r^3 K / 2 on [a, b], a monotone C^1 head from
// m(r_min) = r_min/2, and an exponential taper to a cap below alpha so the
// outer limit (ADM) stays under the mass cap.
HawkingProfile stripe_profile(double K, double a, double b, double r_min,
                              double r_max, double alpha,
                              std::size_t grid = 10000);

struct AdmMass {
  double mass = 0;
  bool monotone_tail = false;  // nondecreasing profile: value is a lower bound
};

AdmMass adm_mass(const HawkingProfile& p);

// Discretized intrinsic geometry of the surface ds^2 = (1+z'^2) dr^2
// + r^2 dphi^2 (the totally geodesic 2-plane section of the 3-manifold).
// Distances come from Dijkstra on an (r, phi) grid with an extended
// 8-neighbor stencil (offsets up to radius `stencil`), refined enough for a
// ~1% relative error target.
class RotSymGeometry {
 public:
  RotSymGeometry(GraphProfile g, std::size_t nr = 600, std::size_t nphi = 768,
                 int stencil = 3);

  const GraphProfile& graph() const { return graph_; }
  double r_lo() const { return r_grid_.front(); }
  double r_hi() const { return r_grid_.back(); }

  // Intrinsic distance between (r1, phi) and (r2, 0), phi in [0, pi].
  double distance(double r1, double phi, double r2) const;

  // Points are E^3 coordinates (r u) for u on S^2; the section through both
  // directions is totally geodesic, so the 2-d grid distance applies.
  double distance3(const Vec4& p, const Vec4& q) const;

  // Full single-source field d((r_src, 0), (r_i, phi_j)), bilinear lookup.
  // The reference stays valid for the lifetime of the thread-local cache.
  const std::vector<double>& field_from(double r_src) const;

  // H^3 of the slab r in [ra, rb]: int 4 pi r^2 sqrt(1+z'^2) dr.
  double slab_volume(double ra, double rb) const;
  // Radial arc length int_ra^rb sqrt(1+z'^2) dr.
  double radial_arc(double ra, double rb) const;
  // Inverse of radial arc from r0 (signed; clamped to the grid range).
  double r_at_arc(double r0, double s) const;

  double zp_at(double r) const;
  bool coarse_warning() const { return coarse_warning_; }

 private:
  struct Edge {
    int di, dj;
    double base_len;  // placeholder, lengths are metric-dependent
  };
  std::size_t idx(std::size_t i, std::size_t j) const { return i * nphi_ + j; }
  void dijkstra(std::size_t src_i, std::vector<double>& dist) const;
  // cumulative radial arc length from r_grid_[0] to r, trapezoid tail
  // within the cell
  double arc_to(double r) const;

  GraphProfile graph_;
  std::vector<double> r_grid_;
  std::vector<double> zp_grid_;
  std::size_t nr_, nphi_;
  int stencil_;
  bool pole_ = false;  // grid reaches r = 0 (axis point)
  bool coarse_warning_ = false;
  std::vector<std::pair<int, int>> offsets_;
  // edge lengths are phi-translation invariant: one entry per (row, offset)
  std::vector<double> edge_len_;
  std::vector<double> arc_;   // cumulative radial arc at the grid rows
  std::uint64_t cache_id_ = 0;  // process-unique id for the field cache
};

// rotsym_distance of the module contract: shortest path in the (r, phi)
// metric between (r1, phi) and (r2, 0).
double rotsym_distance(const RotSymGeometry& geom, double r1, double phi,
                       double r2);

}  // namespace scrunch::rotsym
