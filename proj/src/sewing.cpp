#include "scrunch/sewing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "scrunch/rng.hpp"
#include "scrunch/rotsym.hpp"

namespace scrunch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec3 fibonacci_dir(std::size_t k, std::size_t n) {
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) /
                             static_cast<double>(n);
  const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = 2.0 * M_PI * static_cast<double>(k) / golden;
  return {rxy * std::cos(phi), rxy * std::sin(phi), z};
}

// Minimum pairwise angle among the first n spiral directions.
double fibonacci_min_angle(std::size_t n) {
  if (n < 2) return M_PI;
  double best = M_PI;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 a = fibonacci_dir(i, n);
    for (std::size_t j = i + 1; j < n; ++j)
      best = std::min(best, unit_angle(a, fibonacci_dir(j, n)));
  }
  return best;
}

std::array<Vec4, 3> tangent_basis(const Vec4& unit) {
  std::array<Vec4, 3> basis;
  std::size_t count = 0;
  for (std::size_t axis = 0; axis < 4 && count < 3; ++axis) {
    Vec4 e;
    e[axis] = 1.0;
    Vec4 v = e - unit * e.dot(unit);
    for (std::size_t k = 0; k < count; ++k)
      v = v - basis[k] * v.dot(basis[k]);
    const double nn = v.norm();
    if (nn > 1e-6) basis[count++] = v * (1.0 / nn);
  }
  if (count != 3) throw std::logic_error("tangent_basis: degenerate input");
  return basis;
}

// Geodesic step of length s from p in spiral direction `dir` (S^2 index
// coordinates mapped into the tangent space).
Vec4 exp_step(const ModelSpace& space, const Vec4& p, const Vec3& dir,
              double s) {
  switch (space.kind()) {
    case SpaceKind::Sphere3: {
      const double rho = space.radius();
      const Vec4 u = p * (1.0 / rho);
      const auto basis = tangent_basis(u);
      const Vec4 w = basis[0] * dir.x + basis[1] * dir.y + basis[2] * dir.z;
      return (u * std::cos(s / rho) + w * std::sin(s / rho)) * rho;
    }
    case SpaceKind::Euclid3:
      return p + Vec4(dir) * s;
    case SpaceKind::RotSym: {
      // chart-linear step, radial coordinate clamped to the window; the
      // defect pipeline measures distances rather than assuming this step
      // is exactly geodesic
      const auto& g = space.rotsym_geometry();
      Vec4 q = p + Vec4(dir) * s;
      const double rq = q.xyz().norm();
      const double rc = clamp(rq, g.r_lo() + 1e-9, g.r_hi() - 1e-9);
      if (rq > 1e-12 && rc != rq) q = Vec4(q.xyz() * (rc / rq));
      return q;
    }
  }
  return p;
}

// Chordal cells: the chart chord minorizes the intrinsic distance for all
// three base kinds, so a cell grid prunes intrinsic neighbor queries.
struct GridHash {
  double cell = 1;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> cells;

  static std::int64_t key(int a, int b, int c, int d) {
    auto fold = [](int v) { return static_cast<std::int64_t>(v) & 0x1FFFFF; };
    return (fold(a) << 42) ^ (fold(b) << 21) ^ fold(c) ^
           (static_cast<std::int64_t>(d) << 63);
  }
  std::array<int, 4> coords(const Vec4& p) const {
    return {static_cast<int>(std::floor(p.x / cell)),
            static_cast<int>(std::floor(p.y / cell)),
            static_cast<int>(std::floor(p.z / cell)),
            static_cast<int>(std::floor(p.w / cell))};
  }
  void insert(const Vec4& p, std::size_t id) {
    const auto c = coords(p);
    cells[key(c[0], c[1], c[2], c[3])].push_back(id);
  }
  template <class Fn>
  void for_neighbors(const Vec4& p, int ring, Fn&& fn) const {
    const auto c = coords(p);
    for (int a = -ring; a <= ring; ++a)
      for (int b = -ring; b <= ring; ++b)
        for (int cc = -ring; cc <= ring; ++cc)
          for (int d = -ring; d <= ring; ++d) {
            const auto it =
                cells.find(key(c[0] + a, c[1] + b, c[2] + cc, c[3] + d));
            if (it == cells.end()) continue;
            for (std::size_t id : it->second) fn(id);
          }
  }
};

}  // namespace

TunnelModel TunnelModel::standard(const ModelSpace& space, double delta,
                                  double h_factor) {
  if (delta <= 0) throw std::domain_error("tunnel: delta must be positive");
  TunnelModel t;
  t.delta = delta;
  t.h = h_factor * delta;
  double vb;
  switch (space.kind()) {
    case SpaceKind::Sphere3:
    case SpaceKind::Euclid3:
      vb = space.ball_volume(0.5 * delta);
      break;
    case SpaceKind::RotSym:
      // locally flat at tunnel scale
      vb = 4.0 / 3.0 * M_PI * std::pow(0.5 * delta, 3);
      break;
    default:
      vb = 0;
  }
  t.vol = 2.0 * vb;
  return t;
}

SewingPlan plan_sewing(const ModelSpace& space, const CompactSetSpec& A0,
                       double r, double delta) {
  if (delta >= r) throw std::domain_error("plan_sewing: delta must be < r");
  if (r <= 0 || delta <= 0)
    throw std::domain_error("plan_sewing: r and delta must be positive");

  SewingPlan plan;
  plan.r = r;
  plan.delta_requested = delta;

  // greedy maximal 2r-packing over a dense deterministic sample, pruned by
  // the chordal grid (chord <= intrinsic distance)
  const PointCloud sample = A0.sample_set(0.5 * r);
  GridHash grid;
  grid.cell = 2.0 * r;
  for (const auto& cp : sample.points) {
    bool ok = true;
    grid.for_neighbors(cp.coords, 1, [&](std::size_t id) {
      if (ok && space.distance(plan.centers[id], cp.coords) < 2.0 * r)
        ok = false;
    });
    if (ok) {
      grid.insert(cp.coords, plan.centers.size());
      plan.centers.push_back(cp.coords);
    }
  }
  if (plan.centers.size() < 2)
    throw std::runtime_error("region too small to sew at this r");

  // shrink delta until the mouth balls B(v_kj, delta/2) sit pairwise
  // disjoint on the boundary sphere; the spiral directions are the same set
  // in every ball, so one min-angle computation suffices
  const std::size_t per_ball = plan.centers.size() - 1;
  plan.delta = delta;
  if (per_ball >= 2) {
    const double theta_min = fibonacci_min_angle(per_ball);
    for (int pass = 0; pass < 3; ++pass) {
      const double reach = r - plan.delta;
      double sep;
      if (space.kind() == SpaceKind::Sphere3) {
        const double rho = space.radius();
        sep = rho * std::sin(reach / rho) * theta_min;
      } else {
        sep = reach * theta_min;
      }
      plan.delta = std::min(plan.delta, 0.45 * sep);
      if (plan.delta <= 0)
        throw std::runtime_error("region too small to sew at this r");
    }
  }
  plan.h = 3.0 * plan.delta;
  return plan;
}

Vec4 SewingPlan::mouth(const ModelSpace& space, std::size_t k,
                       std::size_t j) const {
  if (k == j || k >= centers.size() || j >= centers.size())
    throw std::invalid_argument("mouth: bad tunnel index");
  const std::size_t per_ball = centers.size() - 1;
  const std::size_t slot = j < k ? j : j - 1;
  return exp_step(space, centers[k], fibonacci_dir(slot, per_ball), r - delta);
}

double SewingPlan::mouth_separation(const ModelSpace& space) const {
  const std::size_t nb = centers.size();
  if (nb < 3) return kInf;
  double best = kInf;
  for (std::size_t k = 0; k < nb; ++k)
    for (std::size_t a = 0; a < nb; ++a) {
      if (a == k) continue;
      const Vec4 ma = mouth(space, k, a);
      for (std::size_t b = a + 1; b < nb; ++b) {
        if (b == k) continue;
        best = std::min(best, space.distance(ma, mouth(space, k, b)));
      }
    }
  return best;
}

void SewingPlan::save_csv(const std::string& path, const ModelSpace& space,
                          std::size_t mouth_limit) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "#r " << r << "\n#delta " << delta << "\n#h " << h << '\n';
  out << "row,k,j,x0,x1,x2,x3\n";
  for (std::size_t k = 0; k < centers.size(); ++k)
    out << "C," << k << ",," << centers[k].x << ',' << centers[k].y << ','
        << centers[k].z << ',' << centers[k].w << '\n';
  std::size_t emitted = 0;
  for (std::size_t k = 0; k < centers.size() && emitted < mouth_limit; ++k)
    for (std::size_t j = 0; j < centers.size() && emitted < mouth_limit; ++j) {
      if (j == k) continue;
      const Vec4 m = mouth(space, k, j);
      out << "M," << k << ',' << j << ',' << m.x << ',' << m.y << ',' << m.z
          << ',' << m.w << '\n';
      ++emitted;
    }
}

// ---------------------------------------------------------------------------

SewnSpace::SewnSpace(ModelSpace base, CompactSetSpec region, SewingPlan plan,
                     TunnelModel tunnel, std::size_t hub_limit)
    : base_(std::move(base)),
      region_(std::move(region)),
      plan_(std::move(plan)),
      tunnel_(tunnel),
      hub_limit_(hub_limit) {
  if (plan_.n() <= hub_limit_) build_hub();
}

void SewnSpace::build_hub() {
  const std::size_t nb = plan_.nbar();
  const std::size_t n = plan_.n();
  mouths_.resize(n);
  auto tid = [nb](std::size_t k, std::size_t j) {
    return k * (nb - 1) + (j < k ? j : j - 1);
  };
  for (std::size_t k = 0; k < nb; ++k)
    for (std::size_t j = 0; j < nb; ++j)
      if (j != k) mouths_[tid(k, j)] = plan_.mouth(base_, k, j);

  hub_.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d = base_.distance(mouths_[a], mouths_[b]);
      hub_[a * n + b] = d;
      hub_[b * n + a] = d;
    }
  for (std::size_t k = 0; k < nb; ++k)
    for (std::size_t j = 0; j < nb; ++j) {
      if (j == k) continue;
      const std::size_t a = tid(k, j), b = tid(j, k);
      if (tunnel_.h < hub_[a * n + b]) {
        hub_[a * n + b] = tunnel_.h;
        hub_[b * n + a] = tunnel_.h;
      }
    }
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t a = 0; a < n; ++a) {
      const double dam = hub_[a * n + m];
      for (std::size_t b = 0; b < n; ++b) {
        const double cand = dam + hub_[m * n + b];
        if (cand < hub_[a * n + b]) hub_[a * n + b] = cand;
      }
    }
}

std::vector<std::size_t> SewnSpace::nearest_centers(const Vec4& x,
                                                    std::size_t c) const {
  const std::size_t nb = plan_.nbar();
  std::vector<std::pair<double, std::size_t>> ds(nb);
  for (std::size_t k = 0; k < nb; ++k)
    ds[k] = {base_.distance(plan_.centers[k], x), k};
  const std::size_t keep = std::min(c, nb);
  std::partial_sort(ds.begin(), ds.begin() + static_cast<std::ptrdiff_t>(keep),
                    ds.end());
  std::vector<std::size_t> out(keep);
  for (std::size_t i = 0; i < keep; ++i) out[i] = ds[i].second;
  return out;
}

bool SewnSpace::in_removed_ball(const Vec4& x) const {
  const std::size_t nb = plan_.nbar();
  for (std::size_t k = 0; k < nb; ++k) {
    // every mouth of ball k sits at distance r - delta from its center, so
    // only points in a thin shell can be inside a removed ball
    const double dk = base_.distance(plan_.centers[k], x);
    if (std::abs(dk - (plan_.r - plan_.delta)) > 0.5 * tunnel_.delta) continue;
    for (std::size_t j = 0; j < nb; ++j) {
      if (j == k) continue;
      if (base_.distance(plan_.mouth(base_, k, j), x) < 0.5 * tunnel_.delta)
        return true;
    }
  }
  return false;
}

void SewnSpace::check_not_removed(const Vec4& x) const {
  if (in_removed_ball(x))
    throw std::domain_error("sewn distance: point inside a removed ball");
}

double SewnSpace::hub_route(const Vec4& x, const Vec4& y) const {
  const std::size_t n = plan_.n();
  const std::size_t nb = plan_.nbar();
  auto tid = [nb](std::size_t k, std::size_t j) {
    return k * (nb - 1) + (j < k ? j : j - 1);
  };
  double best = kInf;
  if (n <= 256) {
    std::vector<double> dx(n), dy(n);
    for (std::size_t a = 0; a < n; ++a) {
      dx[a] = base_.distance(x, mouths_[a]);
      dy[a] = base_.distance(y, mouths_[a]);
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        best = std::min(best, dx[a] + hub_[a * n + b] + dy[b]);
    return best;
  }
  const auto cx = nearest_centers(x, 6);
  const auto cy = nearest_centers(y, 6);
  for (std::size_t k : cx)
    for (std::size_t l : cy) {
      if (k == l) continue;
      const std::size_t a = tid(k, l), b = tid(l, k);
      best = std::min(best, base_.distance(x, mouths_[a]) + hub_[a * n + b] +
                                base_.distance(mouths_[b], y));
    }
  return best;
}

double SewnSpace::distance(const Vec4& x, const Vec4& y) const {
  check_not_removed(x);
  check_not_removed(y);
  return distance_unchecked(x, y);
}

double SewnSpace::distance_unchecked(const Vec4& x, const Vec4& y) const {
  const double direct = base_.distance(x, y);
  if (has_hub_matrix()) return std::min(direct, hub_route(x, y));
  return std::min(direct, distance_routed(x, y));
}

double SewnSpace::distance_routed(const Vec4& x, const Vec4& y,
                                  std::size_t cand) const {
  const double direct = base_.distance(x, y);
  const auto cx = nearest_centers(x, cand);
  const auto cy = nearest_centers(y, cand);
  double best = direct;
  for (std::size_t k : cx)
    for (std::size_t l : cy) {
      if (k == l) continue;
      const double leg = base_.distance(x, plan_.mouth(base_, k, l)) +
                         tunnel_.h +
                         base_.distance(plan_.mouth(base_, l, k), y);
      best = std::min(best, leg);
    }
  return best;
}

double SewnSpace::volume() const {
  const double n = static_cast<double>(plan_.n());
  const double vb = 0.5 * tunnel_.vol;
  return base_.total_volume() - n * vb + 0.5 * n * tunnel_.vol;
}

void SewnSpace::save_hub_csv(const std::string& path) const {
  if (!has_hub_matrix())
    throw std::runtime_error("save_hub_csv: hub matrix not materialized");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::size_t n = plan_.n();
  out << n << '\n';
  out.precision(17);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (b) out << ',';
      out << hub_[a * n + b];
    }
    out << '\n';
  }
}

double sewn_volume(const SewnSpace& N) { return N.volume(); }

// ---------------------------------------------------------------------------

namespace {

double diameter_over_pairs(const SewnSpace& N, const PointCloud& sample,
                           bool parallel) {
  const std::size_t n = sample.size();
  std::vector<double> row_max(n, 0.0);
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      double m = 0;
      for (std::size_t j = static_cast<std::size_t>(i) + 1; j < n; ++j)
        m = std::max(m, N.distance(sample.points[static_cast<std::size_t>(i)].coords,
                                   sample.points[j].coords));
      row_max[static_cast<std::size_t>(i)] = m;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double m = 0;
      for (std::size_t j = i + 1; j < n; ++j)
        m = std::max(m, N.distance(sample.points[i].coords,
                                   sample.points[j].coords));
      row_max[i] = m;
    }
  }
  double best = 0;
  for (double v : row_max) best = std::max(best, v);
  return best;
}

DiameterCertificate make_diameter_cert(const SewnSpace& N,
                                       const PointCloud& sample,
                                       bool parallel) {
  PointCloud kept;
  for (const auto& p : sample.points)
    if (!N.in_removed_ball(p.coords)) kept.points.push_back(p);
  if (kept.size() < 2)
    throw std::invalid_argument("edited_region_diameter: empty sample");
  DiameterCertificate cert;
  cert.measured = diameter_over_pairs(N, kept, parallel);
  cert.bound = 16.0 * N.plan().r + 3.0 * N.tunnel().h;
  cert.slack = cert.bound - cert.measured;
  cert.pairs = kept.size() * (kept.size() - 1) / 2;
  return cert;
}

}  // namespace

DiameterCertificate edited_region_diameter(const SewnSpace& N,
                                           const PointCloud& sample) {
  return make_diameter_cert(N, sample, true);
}

DiameterCertificate edited_region_diameter_serial(const SewnSpace& N,
                                                  const PointCloud& sample) {
  return make_diameter_cert(N, sample, false);
}

// ---------------------------------------------------------------------------

namespace {

Vec4 sample_base_point(const ModelSpace& base, std::mt19937_64& rng) {
  switch (base.kind()) {
    case SpaceKind::Sphere3:
      return sample_sphere3_point(rng, base.radius());
    case SpaceKind::RotSym: {
      const auto& g = base.rotsym_geometry();
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double rr = g.r_lo() + (g.r_hi() - g.r_lo()) * u(rng);
      Vec3 d{gauss(rng), gauss(rng), gauss(rng)};
      d = d.normalized();
      return Vec4(d * rr);
    }
    case SpaceKind::Euclid3:
      throw std::domain_error("scrunch defect: unbounded base");
  }
  throw std::logic_error("sample_base_point: unknown kind");
}

}  // namespace

ScrunchDefect scrunch_map_defect(const SewnSpace& N, const PulledSpace& Y,
                                 const DefectOptions& opt) {
  if (N.base().kind() != Y.base().kind() ||
      N.region().describe() != Y.set().describe())
    throw std::invalid_argument("scrunch defect: mismatched base or region");
  const ModelSpace& base = N.base();
  const CompactSetSpec& A0 = N.region();
  const double r = N.plan().r;

  ScrunchDefect out;
  out.pair_points = opt.pair_points;

  // --- distortion over sampled pairs -------------------------------------
  struct PairPoint {
    Vec4 x;
    double dK = 0;       // dist to A0
    bool collapsed = false;
  };
  std::vector<PairPoint> pts;
  pts.reserve(opt.pair_points);
  {
    auto rng = make_stream(opt.seed, 0xD15ULL);
    while (pts.size() < opt.pair_points) {
      const Vec4 x = sample_base_point(base, rng);
      PairPoint p;
      p.x = x;
      p.dK = A0.dist_to_set(x);
      if (p.dK <= 1e-9) continue;  // measure-zero guard for solid regions
      if (N.in_removed_ball(x)) continue;
      p.collapsed = p.dK <= r;
      pts.push_back(p);
    }
  }
  const std::size_t np = pts.size();
  // nearest sewing centers per point, computed once (the routed metric would
  // otherwise rescan all centers for every pair)
  const std::size_t cand = std::min<std::size_t>(4, N.plan().nbar());
  std::vector<std::vector<std::size_t>> cands(np);
  const bool use_hub = N.has_hub_matrix();
  if (!use_hub) {
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(np); ++ii)
      cands[static_cast<std::size_t>(ii)] =
          N.nearest_centers(pts[static_cast<std::size_t>(ii)].x, cand);
  }
  const double tunnel_h = N.tunnel().h;
  std::vector<double> dis_max(np, 0.0), lip_max(np, 0.0);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(np); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    double dm = 0, lm = 0;
    for (std::size_t j = i + 1; j < np; ++j) {
      double dn;
      if (use_hub) {
        dn = N.distance_unchecked(pts[i].x, pts[j].x);
      } else {
        dn = base.distance(pts[i].x, pts[j].x);
        for (std::size_t k : cands[i])
          for (std::size_t l : cands[j]) {
            if (k == l) continue;
            dn = std::min(
                dn, base.distance(pts[i].x, N.plan().mouth(base, k, l)) +
                        tunnel_h +
                        base.distance(N.plan().mouth(base, l, k), pts[j].x));
          }
      }
      double dy;
      if (pts[i].collapsed && pts[j].collapsed)
        dy = 0;
      else if (pts[i].collapsed)
        dy = pts[j].dK;
      else if (pts[j].collapsed)
        dy = pts[i].dK;
      else
        dy = std::min(base.distance(pts[i].x, pts[j].x),
                      pts[i].dK + pts[j].dK);
      dm = std::max(dm, std::abs(dy - dn));
      if (dn > 1e-12) lm = std::max(lm, dy / dn);
    }
    dis_max[i] = dm;
    lip_max[i] = lm;
  }
  for (std::size_t i = 0; i < np; ++i) {
    out.eps_dis = std::max(out.eps_dis, dis_max[i]);
    out.lip_empirical = std::max(out.lip_empirical, lip_max[i]);
  }

  // --- covering radius of the image --------------------------------------
  // F fixes every point with d(., A0) > r and sends the rest to p0, so the
  // image is {p0} plus the complement of the tube. A point at distance
  // t in (0, r] from A0 sits within min(t, r - t) of the image (p0 at t,
  // the tube boundary at r - t), giving covering radius r / 2 exactly.
  out.eps_cov = 0.5 * r;

  out.gh_bound = 2.0 * std::max(out.eps_dis, out.eps_cov);
  out.pair_mesh =
      std::cbrt(base.total_volume() / std::max<std::size_t>(np, 1));
  return out;
}

}  // namespace scrunch
