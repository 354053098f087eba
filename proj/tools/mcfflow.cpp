// mcfflow: command-line front end. Exit codes: 0 success, 2 validation error,
// 3 numerical abort.
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mcfflow/ancient_analysis.hpp"
#include "mcfflow/convex_geometry.hpp"
#include "mcfflow/diagnostics.hpp"
#include "mcfflow/exact_solutions.hpp"
#include "mcfflow/flow_engine.hpp"
#include "mcfflow/io.hpp"

using namespace mcfflow;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_numerical = 3;

struct ExactArgs {
  std::string family;
  int n = 1;
  int k = 1;
  double R = 1.0;
  double t = -1.0;
  std::optional<double> t_last; // with count: log-spaced trajectory from t to t_last
  std::size_t count = 1;
  std::size_t resolution = 256;
  std::string out;
};

void cmd_exact(const ExactArgs& a, std::uint64_t seed) {
  const FamilyKind kind = family_from_string(a.family);
  ExactFamily fam{kind, a.n, kind == FamilyKind::Cylinder ? a.k : 0, a.R, 0.0};
  fam.validate();
  require(a.resolution >= 16, "resolution must be >= 16");
  io::json params = {{"family", a.family}, {"n", a.n}, {"k", fam.k}, {"R", a.R}, {"t", a.t}, {"resolution", a.resolution}};
  if (a.t_last) params["t_last"] = *a.t_last, params["count"] = a.count;
  const Provenance prov{"exact:" + to_string(kind), seed, io::sha256_hex(params.dump())};

  if (kind == FamilyKind::GrimReaper || kind == FamilyKind::Cylinder) {
    std::string rec;
    if (kind == FamilyKind::GrimReaper) {
      // open grid on (-pi/2, pi/2)
      std::vector<double> x(a.resolution), y(a.resolution), k(a.resolution);
      for (std::size_t j = 0; j < a.resolution; ++j) {
        x[j] = -0.5 * pi + pi * (static_cast<double>(j) + 0.5) / static_cast<double>(a.resolution);
        const auto g = grim_reaper_profile(x[j], a.t);
        y[j] = g.height;
        k[j] = g.curvature;
      }
      rec = "{\"t\":" + io::number(a.t) + ",\"repr\":\"graph\",\"n\":1,\"N\":" + std::to_string(a.resolution) +
            ",\"x\":" + io::number_array(x) + ",\"y\":" + io::number_array(y) + ",\"kappa\":" + io::number_array(k);
    } else {
      require(a.t < 0.0, "cylinder needs t < 0");
      rec = "{\"t\":" + io::number(a.t) + ",\"repr\":\"cylinder\",\"n\":" + std::to_string(a.n) +
            ",\"k\":" + std::to_string(a.k) + ",\"radius\":" + io::number(cylinder_radius(a.n, a.k, a.t)) +
            ",\"curvatures\":" + io::number_array(cylinder_curvatures(a.n, a.k, a.t));
    }
    rec += ",\"provenance\":" + provenance_json(prov) + "}";
    const std::string head = "{\"schema\":" + io::quoted(schema_version) + ",\"engine\":\"exact\",\"n\":" +
                             std::to_string(a.n) + ",\"N\":" + std::to_string(kind == FamilyKind::Cylinder ? 0 : a.resolution) +
                             ",\"provenance\":" + provenance_json(prov) + "}";
    io::write_file(a.out, head + "\n" + rec + "\n");
    return;
  }
  std::vector<double> times{a.t};
  if (a.t_last) {
    require(a.count >= 2, "--count must be >= 2 with --t-last");
    times = log_spaced_times(a.t, *a.t_last, a.count);
  }
  Trajectory traj = exact_trajectory(fam, times, a.resolution);
  traj.provenance = prov;
  write_trajectory(traj, a.out);
}

void cmd_run(const std::string& config, const std::string& out, std::uint64_t seed) {
  const RunConfig c = read_run_config(config);
  const Trajectory traj = run_flow(c, seed);
  write_trajectory(traj, out);
  io::ordered_json s;
  s["slices"] = traj.size();
  s["t_first"] = traj.t_front();
  s["t_last"] = traj.t_back();
  s["t_ext_estimate"] = traj.t_ext_estimate ? io::ordered_json(*traj.t_ext_estimate) : io::ordered_json(nullptr);
  s["config_hash"] = c.hash;
  std::cout << s.dump() << "\n";
}

void cmd_geom(const std::string& body, std::size_t directions, std::optional<std::size_t> index) {
  const Trajectory traj = read_trajectory(body);
  require(traj.size() >= 1, "snapshot file holds no slice");
  const std::size_t i = index.value_or(traj.size() - 1);
  require(i < traj.size(), "slice index out of range");
  const auto& s = traj.slices[i];
  require(!s.is_cap(), "geom needs a Euclidean snapshot");
  io::ordered_json j;
  j["t"] = s.t;
  j["n"] = traj.n;
  j["N"] = s.profile().grid_size();
  j["measurements"] = measurements_json(measure(s.profile(), {}, directions));
  j["provenance"] = provenance_object(traj.provenance);
  std::cout << j.dump(2) << "\n";
}

void cmd_diagnose(const std::string& path, const DiagnoseParams& prm, const std::string& out) {
  const Trajectory traj = read_trajectory(path);
  const auto rows = diagnose_slices(traj, prm);
  const auto summary = summarize(traj, rows, prm);
  const auto fmt = format_for_path(out);
  emit_report(rows, summary, prm, out, fmt, traj.provenance);
  // CSV carries the table only; the summary record goes to stdout
  if (fmt == ReportFormat::Csv) std::cout << summary_json(summary, prm, traj.provenance).dump(2) << "\n";
}

void cmd_classify(const std::string& path, const std::string& out, const VerdictRule& rule) {
  const Trajectory traj = read_trajectory(path);
  const auto rep = check_conditions(traj, rule);
  emit_report(rep, out, format_for_path(out), traj.provenance);
}

void cmd_rescale(const std::string& path, double k, const std::string& out, const std::string& report) {
  const Trajectory traj = read_trajectory(path);
  const auto r = type2_rescale(traj, k);
  write_trajectory(r.flow, out, "tau");
  io::ordered_json j;
  j["window"] = io::ordered_json::array({-k, -1.0});
  std::optional<double> residual;
  if (!r.flow.slices.front().is_cap() && r.flow.slices.front().profile().is_curve() && r.flow.size() >= 3)
    residual = soliton_proximity(r).residual;
  j["rescale"] = rescale_json({r.L_k, r.t_k, residual.value_or(NAN)});
  j["rescale"]["p_k"] = r.p_k;
  j["provenance"] = provenance_object(traj.provenance);
  io::write_file(report, dump(j));
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"mcfflow: ancient convex mean curvature flow toolkit"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "seed for random initial data")->capture_default_str();

  ExactArgs ex;
  auto* exact = app.add_subcommand("exact", "write a slice of an exact solution");
  exact->add_option("--family", ex.family, "sphere|cylinder|grim-reaper|oval|cap|equator")->required();
  exact->add_option("--n", ex.n, "dimension")->capture_default_str();
  exact->add_option("--k", ex.k, "flat factors of a cylinder")->capture_default_str();
  exact->add_option("--R", ex.R, "ambient sphere radius (cap, equator)")->capture_default_str();
  exact->add_option("--t", ex.t, "time")->required();
  exact->add_option("--resolution", ex.resolution, "grid size N")->capture_default_str();
  exact->add_option("--t-last", ex.t_last, "last time of a log-spaced trajectory (sphere, oval, cap)");
  exact->add_option("--count", ex.count, "number of slices with --t-last")->capture_default_str();
  exact->add_option("--out", ex.out, "snapshot file")->required();

  std::string config, run_out;
  auto* run = app.add_subcommand("run", "evolve a configured initial body");
  run->add_option("--config", config, "run configuration (JSON)")->required();
  run->add_option("--out", run_out, "trajectory file")->required();

  std::string body;
  std::size_t directions = 0;
  std::optional<std::size_t> index;
  auto* geom = app.add_subcommand("geom", "measure a snapshot");
  geom->add_option("--body", body, "snapshot or trajectory file")->required();
  geom->add_option("--directions", directions, "width directions scanned per half turn (0: one per node)");
  geom->add_option("--index", index, "slice index (default: last)");

  std::string traj_in, diag_out;
  DiagnoseParams prm;
  std::optional<int> dk;
  auto* diag = app.add_subcommand("diagnose", "per-slice curvature diagnostics");
  diag->add_option("--traj", traj_in, "trajectory file")->required();
  diag->add_option("--sigma", prm.sigma, "f_sigma exponent")->capture_default_str();
  diag->add_option("--p", prm.p, "L^p exponent")->capture_default_str();
  diag->add_option("--k", dk, "k-convexity index");
  diag->add_option("--eta", prm.eta, "eta offset")->capture_default_str();
  diag->add_option("--out", diag_out, "report (.csv table, otherwise JSON)")->required();

  std::string cls_in, cls_out;
  VerdictRule rule;
  auto* cls = app.add_subcommand("classify", "condition checker over a trajectory window");
  cls->add_option("--traj", cls_in, "trajectory file")->required();
  cls->add_option("--out", cls_out, "report (.csv, otherwise JSON)")->required();
  cls->add_option("--bounded-tolerance", rule.bounded_tolerance)->capture_default_str();
  cls->add_option("--growth-slope", rule.growth_slope)->capture_default_str();
  cls->add_option("--hard-cap", rule.hard_cap)->capture_default_str();
  cls->add_option("--min-decades", rule.min_decades)->capture_default_str();

  std::string rs_in, rs_out, rs_report;
  double window = 0.0;
  auto* rs = app.add_subcommand("rescale", "type II rescaling over [-k, -1]");
  rs->add_option("--traj", rs_in, "trajectory file")->required();
  rs->add_option("--window", window, "k of the window [-k, -1]")->required();
  rs->add_option("--out", rs_out, "rescaled trajectory file")->required();
  rs->add_option("--report", rs_report, "JSON report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_validation;
  }

  try {
    if (*exact) cmd_exact(ex, seed);
    else if (*run) cmd_run(config, run_out, seed);
    else if (*geom) cmd_geom(body, directions, index);
    else if (*diag) {
      prm.k = dk;
      cmd_diagnose(traj_in, prm, diag_out);
    } else if (*cls) cmd_classify(cls_in, cls_out, rule);
    else if (*rs) cmd_rescale(rs_in, window, rs_out, rs_report);
  } catch (const ValidationError& e) {
    std::cerr << "mcfflow: validation error: " << e.what() << "\n";
    return exit_validation;
  } catch (const NumericalError& e) {
    std::cerr << "mcfflow: numerical error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "mcfflow: error: " << e.what() << "\n";
    return exit_numerical;
  }
  return exit_ok;
}
