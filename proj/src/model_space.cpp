#include "scrunch/model_space.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "scrunch/rng.hpp"
#include "scrunch/rotsym.hpp"

namespace scrunch {

ModelSpace ModelSpace::sphere3(double K) {
  if (K <= 0) throw std::domain_error("sphere3: curvature must be positive");
  ModelSpace s;
  s.kind_ = SpaceKind::Sphere3;
  s.K_ = K;
  s.rho_ = 1.0 / std::sqrt(K);
  return s;
}

ModelSpace ModelSpace::euclid3() {
  ModelSpace s;
  s.kind_ = SpaceKind::Euclid3;
  return s;
}

ModelSpace ModelSpace::rotsym(
    std::shared_ptr<const scrunch::rotsym::RotSymGeometry> geom) {
  if (!geom) throw std::invalid_argument("rotsym: null geometry");
  ModelSpace s;
  s.kind_ = SpaceKind::RotSym;
  s.geom_ = std::move(geom);
  return s;
}

double sphere_distance(double rho, const Vec4& p, const Vec4& q) {
  const double c = clamp(p.dot(q) / (rho * rho), -1.0, 1.0);
  return rho * std::acos(c);
}

bool ModelSpace::contains(const Vec4& p, double tol) const {
  switch (kind_) {
    case SpaceKind::Sphere3:
      return std::abs(p.norm() - rho_) <= tol * std::max(1.0, rho_);
    case SpaceKind::Euclid3:
      return p.w == 0;
    case SpaceKind::RotSym: {
      const double r = p.xyz().norm();
      return r >= geom_->r_lo() - tol && r <= geom_->r_hi() + tol;
    }
  }
  return false;
}

double ModelSpace::distance(const Vec4& p, const Vec4& q) const {
  if (!contains(p) || !contains(q))
    throw std::domain_error("geodesic_distance: point off the manifold");
  switch (kind_) {
    case SpaceKind::Sphere3:
      return sphere_distance(rho_, p, q);
    case SpaceKind::Euclid3:
      return (p - q).norm();
    case SpaceKind::RotSym:
      return geom_->distance3(p, q);
  }
  return 0;
}

double ModelSpace::total_volume() const {
  switch (kind_) {
    case SpaceKind::Sphere3:
      return 2.0 * M_PI * M_PI * rho_ * rho_ * rho_;
    case SpaceKind::Euclid3:
      throw std::domain_error("total_volume: Euclid3 is unbounded");
    case SpaceKind::RotSym:
      return geom_->slab_volume(geom_->r_lo(), geom_->r_hi());
  }
  return 0;
}

double ModelSpace::ball_volume(double r) const {
  switch (kind_) {
    case SpaceKind::Sphere3: {
      const double u = std::min(r / rho_, M_PI);
      return M_PI * rho_ * rho_ * rho_ * (2.0 * u - std::sin(2.0 * u));
    }
    case SpaceKind::Euclid3:
      return 4.0 / 3.0 * M_PI * r * r * r;
    case SpaceKind::RotSym:
      throw std::domain_error("ball_volume: no closed form for RotSym");
  }
  return 0;
}

const scrunch::rotsym::RotSymGeometry& ModelSpace::rotsym_geometry() const {
  if (kind_ != SpaceKind::RotSym)
    throw std::logic_error("rotsym_geometry: not a RotSym space");
  return *geom_;
}

PointCloud sample_sphere(double K, std::size_t N, std::uint64_t seed) {
  if (K <= 0) throw std::domain_error("sample_sphere: K must be positive");
  const double rho = 1.0 / std::sqrt(K);
  PointCloud cloud;
  cloud.points.reserve(N);
  auto rng = make_stream(seed, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < N; ++i) {
    Vec4 v{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    const double n = v.norm();
    cloud.points.push_back({static_cast<std::int64_t>(i), v * (rho / n), {}});
  }
  return cloud;
}

void PointCloud::save_csv(const std::string& path, bool four_d) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "id,x0,x1,x2,x3,labels\n";
  out.precision(17);
  for (const auto& p : points) {
    out << p.id << ',' << p.coords.x << ',' << p.coords.y << ',' << p.coords.z
        << ',';
    if (four_d) out << p.coords.w;
    out << ',';
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
      if (i) out << '|';
      out << p.labels[i];
    }
    out << '\n';
  }
}

PointCloud PointCloud::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  PointCloud cloud;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    CloudPoint p;
    std::getline(ss, field, ',');
    p.id = std::stoll(field);
    for (int i = 0; i < 4; ++i) {
      std::getline(ss, field, ',');
      p.coords[static_cast<std::size_t>(i)] = field.empty() ? 0 : std::stod(field);
    }
    if (std::getline(ss, field, ',') && !field.empty()) {
      std::stringstream ls(field);
      std::string lab;
      while (std::getline(ls, lab, '|')) p.labels.push_back(lab);
    }
    cloud.points.push_back(std::move(p));
  }
  return cloud;
}

}  // namespace scrunch
