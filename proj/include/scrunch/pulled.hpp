#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scrunch/mc.hpp"
#include "scrunch/model_space.hpp"
#include "scrunch/vec.hpp"

namespace scrunch {

enum class SetKind {
  GeodesicCircle,     // circle in a Sphere3 (great or latitude circle)
  EquatorialSphere,   // latitude 2-sphere in a Sphere3
  RoundBall,          // metric ball (Sphere3 or Euclid3)
  PlanarCircle,       // circle of radius R in the z=0 plane of Euclid3
  RadialRing,         // r = c circle in a RotSym space
  PointList,
};

// A compact set with member/dist_to_set and enough closed forms for the
// measure bookkeeping. Sets without a closed-form distance fall back to a
// min over a dense sample (mesh recorded).
class CompactSetSpec {
 public:
  static CompactSetSpec geodesic_circle(const ModelSpace& s, const Vec4& e1,
                                        const Vec4& e2);
  // Latitude circle: extrinsic radius r_e = rho sin(sigma0) about pole axis.
  static CompactSetSpec latitude_circle(const ModelSpace& s, const Vec4& e1,
                                        const Vec4& e2, const Vec4& axis,
                                        double sigma0);
  static CompactSetSpec equatorial_sphere(const ModelSpace& s, const Vec4& normal,
                                          double sigma0 = -1);
  static CompactSetSpec round_ball(const ModelSpace& s, const Vec4& center,
                                   double radius);
  static CompactSetSpec planar_circle(double radius);
  static CompactSetSpec radial_ring(const ModelSpace& s, double c);
  static CompactSetSpec point_list(const ModelSpace& s, std::vector<Vec4> pts);

  SetKind kind() const { return kind_; }
  const ModelSpace& base() const { return base_; }

  double dist_to_set(const Vec4& x) const;
  bool member(const Vec4& x, double tol = 1e-8) const;

  // A designated member serving as the basepoint p0.
  Vec4 basepoint() const;

  // Intrinsic dimension of the set (0 for point lists, else 1, 2 or 3).
  int dim() const;

  // H^3 of the set (0 for dim <= 2, closed form for balls).
  double hausdorff3() const;

  // H^3(T_t(set) \ set) in the base space; closed form where available.
  std::optional<double> tube_volume(double t) const;

  // Dense sample of the set in deterministic id order, mesh <= `mesh`.
  PointCloud sample_set(double mesh) const;

  double sample_mesh() const { return sample_mesh_; }

  std::string describe() const;

  double param_radius() const { return radius_; }
  double param_sigma0() const { return sigma0_; }
  const Vec4& param_axis() const { return axis_; }

 private:
  SetKind kind_ = SetKind::PointList;
  ModelSpace base_;
  Vec4 e1_, e2_, axis_;
  double sigma0_ = 0;   // colatitude parameter (circles/spheres on Sphere3)
  double radius_ = 0;   // ball / planar circle radius, or ring coordinate c
  Vec4 center_;
  std::vector<Vec4> pts_;
  double sample_mesh_ = 0;
};

// Basepoint-or-point of the pulled space Y = (X \ K) u {p0}.
struct PulledPoint {
  bool is_p0 = false;
  Vec4 x;

  static PulledPoint p0() { return {true, {}}; }
  static PulledPoint at(const Vec4& v) { return {false, v}; }
};

// The quotient space collapsing `set` to its basepoint, with
// d(x, p0) = dist(x, K) and d(x1, x2) = min(d_X, dist(x1,K) + dist(x2,K)).
class PulledSpace {
 public:
  PulledSpace(ModelSpace base, CompactSetSpec set);

  const ModelSpace& base() const { return base_; }
  const CompactSetSpec& set() const { return set_; }

  // Throws std::domain_error when an argument lies inside K but is not the
  // basepoint token (such points do not exist in Y).
  double distance(const PulledPoint& a, const PulledPoint& b) const;

  // H^3(Y) = H^3(X) - H^3(K).
  double total_volume() const;

  // Vol_Y(B(p0, r)) = H^3(T_r(K) \ K); closed form when the set has one,
  // otherwise Monte Carlo with the pulled distance.
  double ball_volume_p0(double r, std::uint64_t mc_samples = 2'000'000,
                        std::uint64_t seed = 1,
                        const Box3* euclid_box = nullptr) const;

  McEstimate ball_volume_p0_mc(double r, std::uint64_t M, std::uint64_t seed,
                               const Box3* euclid_box = nullptr) const;

  // Plain-text description (base kind/params, set kind/params, basepoint).
  std::string describe() const;

 private:
  ModelSpace base_;
  CompactSetSpec set_;
};

struct ScalingFit {
  double exponent = 0;
  double intercept = 0;
  double max_residual = 0;
  std::vector<double> radii;
  std::vector<double> volumes;
};

// Least-squares slope of log Vol(T_r(A0) \ A0) against log r.
// Throws std::invalid_argument for fewer than 4 radii or a degenerate
// regression.
ScalingFit tubular_scaling_exponent(const ModelSpace& base,
                                    const CompactSetSpec& set,
                                    const std::vector<double>& r_list);

}  // namespace scrunch
