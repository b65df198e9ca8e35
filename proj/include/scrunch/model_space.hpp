#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "scrunch/vec.hpp"

namespace scrunch::rotsym {
class RotSymGeometry;
}

namespace scrunch {

enum class SpaceKind { Sphere3, Euclid3, RotSym };

// A model space with exact distance evaluation: the round 3-sphere of
// sectional curvature K (radius K^{-1/2}, embedded in E^4), flat E^3, or a
// rotationally symmetric graph manifold backed by the rotsym module.
class ModelSpace {
 public:
  static ModelSpace sphere3(double K);
  static ModelSpace euclid3();
  static ModelSpace rotsym(std::shared_ptr<const scrunch::rotsym::RotSymGeometry> geom);

  SpaceKind kind() const { return kind_; }
  double curvature() const { return K_; }
  double radius() const { return rho_; }  // Sphere3 only

  // Intrinsic distance. Throws std::domain_error for off-manifold input
  // (membership tolerance 1e-8).
  double distance(const Vec4& p, const Vec4& q) const;

  bool contains(const Vec4& p, double tol = 1e-8) const;

  // Total H^3 measure. Sphere3: 2 pi^2 rho^3. Unbounded kinds throw.
  double total_volume() const;

  // Volume of a geodesic ball of radius r (Sphere3 and Euclid3 closed forms).
  double ball_volume(double r) const;

  const scrunch::rotsym::RotSymGeometry& rotsym_geometry() const;

 private:
  SpaceKind kind_ = SpaceKind::Euclid3;
  double K_ = 0;
  double rho_ = 0;
  std::shared_ptr<const scrunch::rotsym::RotSymGeometry> geom_;
};

struct CloudPoint {
  std::int64_t id = 0;
  Vec4 coords;
  std::vector<std::string> labels;
};

struct PointCloud {
  std::vector<CloudPoint> points;

  std::size_t size() const { return points.size(); }
  // CSV with header id,x0,x1,x2,x3,labels (x3 empty for 3d points, labels
  // a |-separated flag list).
  void save_csv(const std::string& path, bool four_d = true) const;
  static PointCloud load_csv(const std::string& path);
};

// N points uniform w.r.t. the round measure on the 3-sphere of curvature K:
// four independent standard normals, normalized, scaled by K^{-1/2}.
// Deterministic given (K, N, seed). Throws std::domain_error for K <= 0.
PointCloud sample_sphere(double K, std::size_t N, std::uint64_t seed);

double sphere_distance(double rho, const Vec4& p, const Vec4& q);

}  // namespace scrunch
