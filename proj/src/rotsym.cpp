#include "scrunch/rotsym.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <fstream>
#include <memory>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace scrunch::rotsym {

namespace {

// Local PCHIP (Fritsch-Carlson) slope at index i from adjacent secants.
double pchip_slope(const std::vector<double>& x, const std::vector<double>& y,
                   std::size_t i) {
  const std::size_t n = x.size();
  auto secant = [&](std::size_t k) {
    return (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
  };
  if (n < 2) return 0;
  if (i == 0) {
    // one-sided, clipped to preserve monotonicity
    const double s0 = secant(0);
    if (n == 2) return s0;
    const double h0 = x[1] - x[0], h1 = x[2] - x[1];
    double d = ((2 * h0 + h1) * s0 - h0 * secant(1)) / (h0 + h1);
    if (d * s0 <= 0) d = 0;
    else if (std::abs(d) > 3 * std::abs(s0)) d = 3 * s0;
    return d;
  }
  if (i == n - 1) {
    const double sl = secant(n - 2);
    if (n == 2) return sl;
    const double h0 = x[n - 2] - x[n - 3], h1 = x[n - 1] - x[n - 2];
    double d = ((2 * h1 + h0) * sl - h1 * secant(n - 3)) / (h0 + h1);
    if (d * sl <= 0) d = 0;
    else if (std::abs(d) > 3 * std::abs(sl)) d = 3 * sl;
    return d;
  }
  const double s0 = secant(i - 1), s1 = secant(i);
  if (s0 * s1 <= 0) return 0;
  const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
  const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
  return (w1 + w2) / (w1 / s0 + w2 / s1);
}

double hermite(double x0, double x1, double y0, double y1, double d0,
               double d1, double x) {
  const double h = x1 - x0, t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return y0 * (2 * t3 - 3 * t2 + 1) + h * d0 * (t3 - 2 * t2 + t) +
         y1 * (-2 * t3 + 3 * t2) + h * d1 * (t3 - t2);
}

double integrand_q(double r, double m) {
  const double denom = r - 2 * m;
  if (denom <= 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(2 * m / denom);
}

// 5-point Gauss-Legendre on [a, b]; open rule, never touches endpoints.
template <class F>
double gauss5(F&& f, double a, double b) {
  static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double ws[5] = {0.2369268850561891, 0.4786286704993665,
                               0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < 5; ++i) s += ws[i] * f(c + h * xs[i]);
  return s * h;
}

}  // namespace

double HawkingProfile::eval(double x) const {
  const auto& xs = r;
  if (x <= xs.front()) return m.front();
  if (x >= xs.back()) return m.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double d0 = pchip_slope(xs, m, i);
  const double d1 = pchip_slope(xs, m, i + 1);
  return hermite(xs[i], xs[i + 1], m[i], m[i + 1], d0, d1, x);
}

void HawkingProfile::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  for (const auto& s : stripes)
    out << "#stripe " << s.a << ' ' << s.b << ' ' << s.K << '\n';
  out << "r,m\n";
  for (std::size_t i = 0; i < r.size(); ++i) out << r[i] << ',' << m[i] << '\n';
}

HawkingProfile HawkingProfile::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  HawkingProfile p;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#stripe", 0) == 0) {
      Stripe s;
      std::stringstream ss(line.substr(7));
      ss >> s.a >> s.b >> s.K;
      p.stripes.push_back(s);
      continue;
    }
    if (line.empty() || line[0] == 'r' || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string f;
    std::getline(ss, f, ',');
    p.r.push_back(std::stod(f));
    std::getline(ss, f, ',');
    p.m.push_back(std::stod(f));
  }
  p.r_min = p.r.empty() ? 0 : p.r.front();
  return p;
}

void GraphProfile::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "r,z,zp\n";
  for (std::size_t i = 0; i < r.size(); ++i)
    out << r[i] << ',' << z[i] << ',' << zp[i] << '\n';
}

GraphProfile GraphProfile::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  GraphProfile g;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'r' || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string f;
    std::getline(ss, f, ',');
    g.r.push_back(std::stod(f));
    std::getline(ss, f, ',');
    g.z.push_back(std::stod(f));
    std::getline(ss, f, ',');
    g.zp.push_back(std::stod(f));
  }
  return g;
}

AdmissibilityReport check_admissible(const HawkingProfile& p) {
  AdmissibilityReport rep;
  if (p.r.empty() || p.r.size() != p.m.size()) {
    rep.issues.push_back({"empty or mismatched grid", 0, 0});
    return rep;
  }
  for (std::size_t i = 1; i < p.r.size(); ++i)
    if (p.r[i] <= p.r[i - 1]) {
      rep.issues.push_back({"grid not increasing", i, p.r[i]});
      return rep;
    }
  if (std::abs(p.r.front() - p.r_min) > 1e-12)
    rep.issues.push_back({"grid does not start at r_min", 0, p.r.front()});
  if (std::abs(p.m.front() - 0.5 * p.r_min) > 1e-10)
    rep.issues.push_back({"m(r_min) != r_min/2", 0, p.m.front()});
  for (std::size_t i = 0; i < p.r.size(); ++i) {
    if (p.r[i] > p.r_min + 1e-12 && p.m[i] >= 0.5 * p.r[i] - 1e-12)
      rep.issues.push_back({"m(r) < r/2 violated", i, p.m[i]});
    if (i > 0 && p.m[i] < p.m[i - 1] - 1e-12)
      rep.issues.push_back({"m not nondecreasing", i, p.m[i]});
  }
  for (const auto& s : p.stripes)
    for (std::size_t i = 0; i < p.r.size(); ++i)
      if (p.r[i] > s.a && p.r[i] < s.b) {
        const double want = 0.5 * p.r[i] * p.r[i] * p.r[i] * s.K;
        if (std::abs(p.m[i] - want) > 1e-10 * std::max(1.0, want))
          rep.issues.push_back({"stripe m != r^3 K/2", i, p.m[i]});
      }
  return rep;
}

GraphProfile embed(const HawkingProfile& p, double z_min) {
  const auto rep = check_admissible(p);
  if (!rep.ok())
    throw std::domain_error("embed: profile not admissible: " +
                            rep.issues.front().what);
  GraphProfile g;
  g.r = p.r;
  g.z.resize(p.r.size());
  g.zp.resize(p.r.size());
  for (std::size_t i = 0; i < p.r.size(); ++i)
    g.zp[i] = integrand_q(p.r[i], p.m[i]);

  // z by quadrature in u = sqrt(r - r_min); the integrand 2u q(r_min + u^2)
  // is bounded at u = 0 even when m(r_min) = r_min/2 > 0.
  const double rm = p.r_min;
  auto f = [&](double u) {
    const double r = rm + u * u;
    return 2.0 * u * integrand_q(r, p.eval(r));
  };
  g.z[0] = z_min;
  for (std::size_t i = 1; i < p.r.size(); ++i) {
    const double ua = std::sqrt(p.r[i - 1] - rm);
    const double ub = std::sqrt(p.r[i] - rm);
    double seg = 0;
    const int sub = 4;
    for (int s = 0; s < sub; ++s)
      seg += gauss5(f, ua + (ub - ua) * s / sub, ua + (ub - ua) * (s + 1) / sub);
    g.z[i] = g.z[i - 1] + seg;
  }
  return g;
}

HawkingProfile hawking_from_graph(const GraphProfile& g) {
  HawkingProfile p;
  p.r = g.r;
  p.r_min = g.r.front();
  p.m.resize(g.r.size());
  for (std::size_t i = 0; i < g.r.size(); ++i) {
    const double zp = g.zp[i];
    if (std::isinf(zp))
      p.m[i] = 0.5 * g.r[i];
    else
      p.m[i] = 0.5 * g.r[i] * zp * zp / (1.0 + zp * zp);
  }
  return p;
}

std::vector<ScalarSample> scalar_curvature(const HawkingProfile& p) {
  std::vector<ScalarSample> out;
  const std::size_t n = p.r.size();
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mp;
    if (i == 0)
      mp = (p.m[1] - p.m[0]) / (p.r[1] - p.r[0]);
    else if (i == n - 1)
      mp = (p.m[n - 1] - p.m[n - 2]) / (p.r[n - 1] - p.r[n - 2]);
    else
      mp = (p.m[i + 1] - p.m[i - 1]) / (p.r[i + 1] - p.r[i - 1]);
    ScalarSample s;
    s.r = p.r[i];
    if (p.r[i] < 1e-12) {
      // quotient formula singular on the axis; report the one-sided limit
      const std::size_t k = std::min<std::size_t>(i + 1, n - 1);
      const double rk = p.r[k];
      const double mpk = (p.m[std::min(k + 1, n - 1)] - p.m[k - 1]) /
                         (p.r[std::min(k + 1, n - 1)] - p.r[k - 1]);
      s.R = 4.0 * mpk / (rk * rk);
      s.axis_limit = true;
    } else {
      s.R = 4.0 * mp / (p.r[i] * p.r[i]);
    }
    out.push_back(s);
  }
  return out;
}

std::vector<ScalarSample> scalar_curvature_graph(const GraphProfile& g) {
  std::vector<ScalarSample> out;
  const std::size_t n = g.r.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double zp = g.zp[i];
    if (std::isinf(zp) || g.r[i] < 1e-12) continue;
    const double zpp = (g.zp[i + 1] - g.zp[i - 1]) / (g.r[i + 1] - g.r[i - 1]);
    const double a = 1.0 + zp * zp;
    ScalarSample s;
    s.r = g.r[i];
    s.R = 2.0 / a * (zp / g.r[i]) * (zp / g.r[i] + 2.0 * zpp / a);
    out.push_back(s);
  }
  return out;
}

SchwarzschildPair schwarzschild(double m0, double r_max, std::size_t grid) {
  if (m0 <= 0) throw std::domain_error("schwarzschild: m0 must be positive");
  if (r_max <= 2 * m0)
    throw std::domain_error("schwarzschild: r_max must exceed 2 m0");
  SchwarzschildPair out;
  auto& p = out.hawking;
  auto& g = out.graph;
  p.r_min = 2 * m0;
  p.r.resize(grid);
  p.m.assign(grid, m0);
  g.r.resize(grid);
  g.z.resize(grid);
  g.zp.resize(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double r =
        2 * m0 + (r_max - 2 * m0) * static_cast<double>(i) / (grid - 1);
    p.r[i] = r;
    g.r[i] = r;
    g.z[i] = std::sqrt(8 * m0 * (r - 2 * m0));
    g.zp[i] = i == 0 ? std::numeric_limits<double>::infinity()
                     : std::sqrt(2 * m0 / (r - 2 * m0));
  }
  return out;
}

HawkingProfile stripe_profile(double K, double a, double b, double r_min,
                              double r_max, double alpha, std::size_t grid) {
  if (!(r_min <= a && a < b && b <= r_max))
    throw std::domain_error("stripe_profile: need r_min <= a < b <= r_max");
  if (K <= 0) throw std::domain_error("stripe_profile: K must be positive");
  if (b * b * K >= 1.0)
    throw std::domain_error("stripe violates admissibility");
  const double m_b = 0.5 * b * b * b * K;
  if (m_b >= alpha) throw std::domain_error("mass cap too small");

  HawkingProfile p;
  p.r_min = r_min;
  p.stripes.push_back({a, b, K});
  p.r.resize(grid);
  p.m.resize(grid);

  const double m_a = 0.5 * a * a * a * K;
  const double m0 = 0.5 * r_min;
  const double cap = m_b + 0.5 * (std::min(alpha, 0.5 * b) - m_b);
  const double lam = 4.0 / std::max(r_max - b, 1e-9);
  // head slopes: 0 at r_min, the stripe slope at a
  const double d1 = 1.5 * a * a * K;

  for (std::size_t i = 0; i < grid; ++i) {
    const double r =
        r_min + (r_max - r_min) * static_cast<double>(i) / (grid - 1);
    p.r[i] = r;
    if (r <= a) {
      p.m[i] = a > r_min ? hermite(r_min, a, m0, m_a, 0.0, d1, r) : m_a;
    } else if (r <= b) {
      p.m[i] = 0.5 * r * r * r * K;
    } else {
      p.m[i] = cap - (cap - m_b) * std::exp(-lam * (r - b));
    }
  }
  const auto rep = check_admissible(p);
  if (!rep.ok())
    throw std::domain_error("stripe_profile: interpolant inadmissible: " +
                            rep.issues.front().what);
  return p;
}

AdmMass adm_mass(const HawkingProfile& p) {
  AdmMass out;
  out.mass = p.m.back();
  out.monotone_tail = std::is_sorted(p.m.begin(), p.m.end());
  return out;
}

// ---------------------------------------------------------------------------
// RotSymGeometry

RotSymGeometry::RotSymGeometry(GraphProfile g, std::size_t nr, std::size_t nphi,
                               int stencil)
    : graph_(std::move(g)), nr_(nr), nphi_(nphi), stencil_(stencil) {
  static std::atomic<std::uint64_t> next_id{1};
  cache_id_ = next_id.fetch_add(1);
  if (graph_.r.size() < 2) throw std::invalid_argument("RotSymGeometry: tiny grid");
  if (nr_ < 16 || nphi_ < 64) coarse_warning_ = true;
  const double r0 = graph_.r.front(), r1 = graph_.r.back();
  r_grid_.resize(nr_);
  zp_grid_.resize(nr_);
  for (std::size_t i = 0; i < nr_; ++i) {
    r_grid_[i] = r0 + (r1 - r0) * static_cast<double>(i) / (nr_ - 1);
    zp_grid_[i] = zp_at(r_grid_[i]);
  }
  pole_ = r0 < 1e-12;
  arc_.assign(nr_, 0.0);
  {
    auto f = [&](double x) {
      const double zp = zp_at(x);
      const double zz = std::isinf(zp) ? 0.0 : zp * zp;
      return std::sqrt(1.0 + zz);
    };
    for (std::size_t i = 1; i < nr_; ++i) {
      const double a = r_grid_[i - 1], b = r_grid_[i], m = 0.5 * (a + b);
      arc_[i] = arc_[i - 1] + gauss5(f, a, m) + gauss5(f, m, b);
    }
  }
  for (int di = -stencil_; di <= stencil_; ++di)
    for (int dj = -stencil_; dj <= stencil_; ++dj) {
      if (di == 0 && dj == 0) continue;
      if (std::gcd(std::abs(di), std::abs(dj)) != 1) continue;
      offsets_.emplace_back(di, dj);
    }

  // precompute edge lengths: phi-translation invariance makes them a
  // function of the source row and the offset only
  const double dphi = 2.0 * M_PI / static_cast<double>(nphi_);
  edge_len_.assign(nr_ * offsets_.size(),
                   std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < nr_; ++i)
    for (std::size_t o = 0; o < offsets_.size(); ++o) {
      const auto [di, dj] = offsets_[o];
      const int vi = static_cast<int>(i) + di;
      if (vi < 0 || vi >= static_cast<int>(nr_)) continue;
      const double ra = r_grid_[i];
      const double rb = r_grid_[static_cast<std::size_t>(vi)];
      const double dr = rb - ra;
      const double dp = dj * dphi;
      double len = 0;
      for (int s = 0; s < 4; ++s) {
        const double t = (s + 0.5) / 4.0;
        const double rm = ra + t * dr;
        double zp = zp_at(rm);
        double zz = std::isinf(zp) ? 0.0 : zp * zp;
        double rad2 = (1.0 + zz) * dr * dr;
        if (std::isinf(zp)) {
          const double zp2 = zp_at(rm + 0.25 * std::abs(dr) + 1e-12);
          const double z2 = std::isinf(zp2) ? 0.0 : zp2 * zp2;
          rad2 = (1.0 + z2) * dr * dr;
        }
        len += 0.25 * std::sqrt(rad2 + rm * rm * dp * dp);
      }
      edge_len_[i * offsets_.size() + o] = len;
    }
}

double RotSymGeometry::zp_at(double r) const {
  const auto& xs = graph_.r;
  if (r <= xs.front()) return graph_.zp.front();
  if (r >= xs.back()) return graph_.zp.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double t = (r - xs[i]) / (xs[i + 1] - xs[i]);
  const double za = graph_.zp[i], zb = graph_.zp[i + 1];
  if (std::isinf(za)) return t < 1e-12 ? za : zb;  // boundary horizon row
  return za + t * (zb - za);
}

void RotSymGeometry::dijkstra(std::size_t src_i, std::vector<double>& dist) const {
  const std::size_t nn = nr_ * nphi_;
  const std::size_t no = offsets_.size();
  dist.assign(nn, std::numeric_limits<double>::infinity());
  using QE = std::pair<double, std::size_t>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> heap;

  const std::size_t src = idx(src_i, 0);
  dist[src] = 0;
  heap.emplace(0.0, src);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    const std::size_t ui = u / nphi_;
    const std::size_t uj = u % nphi_;
    const double* row = edge_len_.data() + ui * no;
    for (std::size_t o = 0; o < no; ++o) {
      const double len = row[o];
      if (std::isinf(len)) continue;
      const auto [di, dj] = offsets_[o];
      const std::size_t vi = static_cast<std::size_t>(static_cast<int>(ui) + di);
      const std::size_t vj =
          static_cast<std::size_t>((static_cast<int>(uj) + dj + static_cast<int>(nphi_)) %
                                   static_cast<int>(nphi_));
      const std::size_t v = idx(vi, vj);
      const double nd = d + len;
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
}

const std::vector<double>& RotSymGeometry::field_from(double r_src) const {
  // fields are cached per (geometry instance, snapped source row). The key
  // is a process-unique id, not `this`: a new geometry can reuse a freed
  // address and must never see the old fields. The cache is FIFO-bounded;
  // callers must not hold the reference across later field_from calls.
  static thread_local std::unordered_map<std::uint64_t,
                                         std::unique_ptr<std::vector<double>>>
      cache;
  static thread_local std::deque<std::uint64_t> order;
  constexpr std::size_t kMaxFields = 256;
  const double r0 = r_grid_.front(), r1 = r_grid_.back();
  const double t = clamp((r_src - r0) / (r1 - r0), 0.0, 1.0);
  const std::size_t src_i =
      static_cast<std::size_t>(std::lround(t * (nr_ - 1)));
  const std::uint64_t key = (cache_id_ << 20) | static_cast<std::uint64_t>(src_i);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  auto field = std::make_unique<std::vector<double>>();
  dijkstra(src_i, *field);
  if (order.size() >= kMaxFields) {
    cache.erase(order.front());
    order.pop_front();
  }
  order.push_back(key);
  return *cache.emplace(key, std::move(field)).first->second;
}

double RotSymGeometry::distance(double r1, double phi, double r2) const {
  const auto& field = field_from(r1);
  const double rlo = r_grid_.front(), rhi = r_grid_.back();
  const double tr = clamp((r2 - rlo) / (rhi - rlo), 0.0, 1.0) * (nr_ - 1);
  double ph = std::abs(phi);
  ph = std::fmod(ph, 2.0 * M_PI);
  const double tp = ph / (2.0 * M_PI) * static_cast<double>(nphi_);
  const std::size_t i0 = std::min(static_cast<std::size_t>(tr), nr_ - 2);
  const std::size_t j0 = static_cast<std::size_t>(tp) % nphi_;
  const std::size_t j1 = (j0 + 1) % nphi_;
  const double fi = tr - static_cast<double>(i0);
  const double fj = tp - std::floor(tp);
  const double v00 = field[idx(i0, j0)], v01 = field[idx(i0, j1)];
  const double v10 = field[idx(i0 + 1, j0)], v11 = field[idx(i0 + 1, j1)];
  return (1 - fi) * ((1 - fj) * v00 + fj * v01) +
         fi * ((1 - fj) * v10 + fj * v11);
}

double RotSymGeometry::distance3(const Vec4& p, const Vec4& q) const {
  const Vec3 a = p.xyz(), b = q.xyz();
  const double ra = a.norm(), rb = b.norm();
  double phi = 0;
  if (ra > 1e-12 && rb > 1e-12) phi = unit_angle(a.normalized(), b.normalized());
  return distance(ra, phi, rb);
}

double RotSymGeometry::slab_volume(double ra, double rb) const {
  auto f = [&](double r) {
    const double zp = zp_at(r);
    const double zz = std::isinf(zp) ? 0.0 : zp * zp;
    return 4.0 * M_PI * r * r * std::sqrt(1.0 + zz);
  };
  const int n = 4000;
  double s = 0;
  for (int i = 0; i < n; ++i)
    s += gauss5(f, ra + (rb - ra) * i / n, ra + (rb - ra) * (i + 1) / n);
  return s;
}

double RotSymGeometry::arc_to(double r) const {
  auto f = [&](double x) {
    const double zp = zp_at(x);
    const double zz = std::isinf(zp) ? 0.0 : zp * zp;
    return std::sqrt(1.0 + zz);
  };
  r = clamp(r, r_grid_.front(), r_grid_.back());
  const double step = (r_grid_.back() - r_grid_.front()) / (nr_ - 1);
  const std::size_t i = std::min(
      nr_ - 2, static_cast<std::size_t>(
                   std::max(0.0, (r - r_grid_.front()) / step)));
  const double t = r - r_grid_[i];
  return arc_[i] + 0.5 * t * (f(r_grid_[i]) + f(r));
}

double RotSymGeometry::radial_arc(double ra, double rb) const {
  return arc_to(rb) - arc_to(ra);
}

double RotSymGeometry::r_at_arc(double r0, double s) const {
  const double lo = r_grid_.front(), hi = r_grid_.back();
  if (s == 0) return clamp(r0, lo, hi);
  double a = lo, b = hi;
  // monotone in the endpoint: bisection on signed arc
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (a + b);
    const double arc = mid >= r0 ? radial_arc(r0, mid) : -radial_arc(mid, r0);
    if (arc < s)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

double rotsym_distance(const RotSymGeometry& geom, double r1, double phi,
                       double r2) {
  return geom.distance(r2, phi, r1);
}

}  // namespace scrunch::rotsym
