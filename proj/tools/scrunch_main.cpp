#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "scrunch/config.hpp"
#include "scrunch/harness.hpp"
#include "scrunch/mc.hpp"
#include "scrunch/pulled.hpp"
#include "scrunch/rotsym.hpp"
#include "scrunch/scalar.hpp"
#include "scrunch/sewing.hpp"

namespace fs = std::filesystem;
using namespace scrunch;

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "key = value config file");
  cmd->add_option("--seed", args.seed, "RNG seed");
  cmd->add_option("--out", args.out_dir, "output directory");
}

Config load_config(const CommonArgs& args) {
  if (args.config_path.empty()) return Config::parse("");
  return Config::load(args.config_path);
}

void write_manifest(const CommonArgs& args, const std::string& subcommand,
                    const Config& cfg) {
  std::ofstream out(fs::path(args.out_dir) / "manifest.txt");
  out << "subcommand = " << subcommand << '\n';
  out << "seed = " << args.seed << '\n';
  out << cfg.dump();
}

void write_report(const CommonArgs& args,
                  const std::vector<std::pair<std::string, std::string>>& rows) {
  std::ofstream out(fs::path(args.out_dir) / "report.csv");
  out << "key,value\n";
  for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Base space + collapsed set from the [pull] section.
PulledSpace make_pulled(const Config& cfg) {
  const std::string set = cfg.str("pull.set", "equator");
  const double K = cfg.num("pull.K", 1.0);
  if (set == "planar_circle") {
    const auto spec =
        CompactSetSpec::planar_circle(cfg.num("pull.radius", 1.0));
    return PulledSpace(ModelSpace::euclid3(), spec);
  }
  const ModelSpace base = ModelSpace::sphere3(K);
  if (set == "circle")
    return PulledSpace(base, CompactSetSpec::geodesic_circle(
                                 base, {1, 0, 0, 0}, {0, 1, 0, 0}));
  if (set == "equator")
    return PulledSpace(base,
                       CompactSetSpec::equatorial_sphere(base, {0, 0, 0, 1}));
  if (set == "ball")
    return PulledSpace(base, CompactSetSpec::round_ball(
                                 base, {base.radius(), 0, 0, 0},
                                 cfg.num("pull.ball_radius", 0.5)));
  throw std::domain_error("pull: unknown set " + set);
}

int run_pull(const CommonArgs& args) {
  const Config cfg = load_config(args);
  const PulledSpace Y = make_pulled(cfg);
  auto radii = cfg.num_list("pull.radii");
  if (radii.empty()) radii = {0.05, 0.1, 0.2, 0.4};

  std::vector<std::pair<std::string, std::string>> report;
  report.emplace_back("space", Y.describe());
  report.emplace_back("total_volume", fmt(Y.total_volume()));
  for (double r : radii)
    report.emplace_back("ball_volume_p0_r=" + fmt(r),
                        fmt(Y.ball_volume_p0(r, 2'000'000, args.seed)));
  const auto fit = tubular_scaling_exponent(
      Y.base(), Y.set(), radii.size() >= 4 ? radii
                                           : std::vector<double>{0.05, 0.1, 0.15, 0.2});
  report.emplace_back("scaling_exponent", fmt(fit.exponent));
  write_report(args, report);
  Y.set()
      .sample_set(cfg.num("pull.sample_mesh", 0.05))
      .save_csv((fs::path(args.out_dir) / "set_sample.csv").string());
  write_manifest(args, "pull", cfg);
  return 0;
}

int run_sew(const CommonArgs& args) {
  const Config cfg = load_config(args);
  const double K = cfg.num("sew.K", 1.0);
  const ModelSpace base = ModelSpace::sphere3(K);
  const std::string region = cfg.str("sew.region", "equator");
  CompactSetSpec A0 = [&] {
    if (region == "circle")
      return CompactSetSpec::geodesic_circle(base, {1, 0, 0, 0}, {0, 1, 0, 0});
    if (region == "equator")
      return CompactSetSpec::equatorial_sphere(base, {0, 0, 0, 1});
    if (region == "ball")
      return CompactSetSpec::round_ball(base, {base.radius(), 0, 0, 0},
                                        cfg.num("sew.ball_radius", 0.5));
    throw std::domain_error("sew: unknown region " + region);
  }();
  const double r = cfg.num("sew.r", 0.2);
  const double delta = cfg.num("sew.delta", r / 10.0);

  SewingPlan plan = plan_sewing(base, A0, r, delta);
  const TunnelModel tunnel = TunnelModel::standard(base, plan.delta);
  const SewnSpace N(base, A0, plan, tunnel,
                    static_cast<std::size_t>(cfg.integer("sew.hub_limit", 1200)));
  plan.save_csv((fs::path(args.out_dir) / "plan.csv").string(), base);
  if (N.has_hub_matrix())
    N.save_hub_csv((fs::path(args.out_dir) / "hub.csv").string());

  PointCloud diam_cloud = A0.sample_set(0.5 * r);
  if (diam_cloud.size() > 80) {
    PointCloud sub;
    const std::size_t stride = (diam_cloud.size() + 79) / 80;
    for (std::size_t i = 0; i < diam_cloud.size(); i += stride)
      sub.points.push_back(diam_cloud.points[i]);
    diam_cloud = sub;
  }
  const auto cert = edited_region_diameter(N, diam_cloud);

  std::vector<std::pair<std::string, std::string>> report;
  report.emplace_back("r", fmt(plan.r));
  report.emplace_back("delta", fmt(plan.delta));
  report.emplace_back("delta_requested", fmt(plan.delta_requested));
  report.emplace_back("h", fmt(plan.h));
  report.emplace_back("nbar", std::to_string(plan.nbar()));
  report.emplace_back("n", std::to_string(plan.n()));
  report.emplace_back("sewn_volume", fmt(sewn_volume(N)));
  report.emplace_back("base_volume", fmt(base.total_volume()));
  report.emplace_back("diam_measured", fmt(cert.measured));
  report.emplace_back("diam_bound", fmt(cert.bound));
  report.emplace_back("diam_slack", fmt(cert.slack));
  write_report(args, report);
  write_manifest(args, "sew", cfg);
  return 0;
}

int run_rotsym(const CommonArgs& args) {
  const Config cfg = load_config(args);
  const std::string mode = cfg.str("rotsym.mode", "schwarzschild");
  rotsym::HawkingProfile profile;
  if (mode == "schwarzschild") {
    const auto pair =
        rotsym::schwarzschild(cfg.num("rotsym.m0", 1.0),
                              cfg.num("rotsym.r_max", 8.0),
                              static_cast<std::size_t>(cfg.integer("rotsym.grid", 10000)));
    profile = pair.hawking;
  } else if (mode == "stripe") {
    profile = rotsym::stripe_profile(
        cfg.num("rotsym.K", 0.25), cfg.num("rotsym.a", 0.5),
        cfg.num("rotsym.b", 1.0), cfg.num("rotsym.r_min", 0.0),
        cfg.num("rotsym.r_max", 3.0), cfg.num("rotsym.alpha", 1.0),
        static_cast<std::size_t>(cfg.integer("rotsym.grid", 10000)));
  } else {
    throw std::domain_error("rotsym: unknown mode " + mode);
  }
  const auto rep = rotsym::check_admissible(profile);
  if (!rep.ok())
    throw std::domain_error("rotsym: profile inadmissible: " +
                            rep.issues.front().what);
  const auto graph = rotsym::embed(profile, cfg.num("rotsym.z_min", 0.0));
  const auto back = rotsym::hawking_from_graph(graph);
  double round_trip = 0;
  for (std::size_t i = 0; i < profile.m.size(); ++i)
    round_trip = std::max(round_trip, std::abs(profile.m[i] - back.m[i]));
  const auto mass = rotsym::adm_mass(profile);
  const auto scal = rotsym::scalar_curvature(profile);

  profile.save_csv((fs::path(args.out_dir) / "profile.csv").string());
  graph.save_csv((fs::path(args.out_dir) / "graph.csv").string());
  {
    std::ofstream out(fs::path(args.out_dir) / "scalar.csv");
    out.precision(17);
    out << "r,R,axis_limit\n";
    for (const auto& s : scal)
      out << s.r << ',' << s.R << ',' << (s.axis_limit ? 1 : 0) << '\n';
  }
  std::vector<std::pair<std::string, std::string>> report;
  report.emplace_back("mode", mode);
  report.emplace_back("adm_mass", fmt(mass.mass));
  report.emplace_back("adm_monotone", mass.monotone_tail ? "1" : "0");
  report.emplace_back("round_trip_sup", fmt(round_trip));
  report.emplace_back("z_back", fmt(graph.z.back()));
  write_report(args, report);
  write_manifest(args, "rotsym", cfg);
  return 0;
}

int run_wscal(const CommonArgs& args) {
  const Config cfg = load_config(args);
  const std::string space_kind = cfg.str("wscal.space", "sphere3");
  WScalOptions opt;
  opt.M = static_cast<std::uint64_t>(cfg.integer("wscal.M", 1'000'000));
  opt.seed = args.seed;
  opt.stratified = cfg.integer("wscal.stratified", 1) != 0;

  WScalProfile prof;
  if (space_kind == "sphere3") {
    const double K = cfg.num("wscal.K", 1.0);
    const ModelSpace s = ModelSpace::sphere3(K);
    auto radii = cfg.num_list("wscal.radii");
    if (radii.empty()) {
      radii = {1.2, 1.05, 0.9, 0.75, 0.6};
      for (double& r : radii) r /= std::sqrt(K);
    }
    prof = wscal_estimate(WScalSpace(s), PulledPoint::at({s.radius(), 0, 0, 0}),
                          radii, opt);
  } else if (space_kind == "euclid3") {
    const ModelSpace s = ModelSpace::euclid3();
    auto radii = cfg.num_list("wscal.radii");
    if (radii.empty()) radii = {2.0, 1.75, 1.5, 1.25, 1.0};
    prof = wscal_estimate(WScalSpace(s), PulledPoint::at({0, 0, 0, 0}), radii,
                          opt);
  } else if (space_kind == "pulled") {
    Config pull_cfg = cfg;
    if (cfg.has("wscal.set")) pull_cfg.set("pull.set", cfg.str("wscal.set"));
    const PulledSpace Y = make_pulled(pull_cfg);
    auto radii = cfg.num_list("wscal.radii");
    if (radii.empty()) radii = {0.2, 0.15, 0.1, 0.05};
    prof = wscal_estimate(WScalSpace(Y), PulledPoint::p0(), radii, opt);
  } else {
    throw std::domain_error("wscal: unknown space " + space_kind);
  }

  prof.save_csv((fs::path(args.out_dir) / "wscal.csv").string());
  std::vector<std::pair<std::string, std::string>> report;
  report.emplace_back("divergent", prof.fit.divergent ? "1" : "0");
  if (prof.fit.divergent) {
    report.emplace_back("exponent", fmt(prof.fit.exponent));
    report.emplace_back("coeff", fmt(prof.fit.coeff));
  } else {
    report.emplace_back("limit", fmt(prof.fit.limit));
    report.emplace_back("limit_sigma", fmt(prof.fit.limit_sigma));
  }
  write_report(args, report);
  write_manifest(args, "wscal", cfg);
  return 0;
}

int run_method(const CommonArgs& args, bool second) {
  const Config cfg = load_config(args);
  const auto report = second ? harness::run_method2(cfg, args.seed)
                             : harness::run_method1(cfg, args.seed);
  report.save_csv((fs::path(args.out_dir) / "report.csv").string());
  write_manifest(args, second ? "method2" : "method1", cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scrunching and sewing experiment driver"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string chosen;
  for (const char* name :
       {"pull", "sew", "rotsym", "wscal", "method1", "method2"}) {
    auto* cmd = app.add_subcommand(name);
    add_common(cmd, args);
    cmd->callback([&chosen, name] { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(args.out_dir);
    if (chosen == "pull") return run_pull(args);
    if (chosen == "sew") return run_sew(args);
    if (chosen == "rotsym") return run_rotsym(args);
    if (chosen == "wscal") return run_wscal(args);
    if (chosen == "method1") return run_method(args, false);
    if (chosen == "method2") return run_method(args, true);
  } catch (const McBudgetError& e) {
    std::cerr << "error: " << e.what << " (required samples: " << e.required_M
              << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
