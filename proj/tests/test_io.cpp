#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "mcfflow/io.hpp"

using namespace mcfflow;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mcfflow_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void expect_bitwise_equal(const Trajectory& a, const Trajectory& b) {
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.engine, b.engine);
  EXPECT_EQ(a.n, b.n);
  EXPECT_EQ(a.t_ext_estimate.has_value(), b.t_ext_estimate.has_value());
  if (a.t_ext_estimate) {
    EXPECT_TRUE(same_bits(*a.t_ext_estimate, *b.t_ext_estimate));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.slices[i];
    const auto& y = b.slices[i];
    EXPECT_TRUE(same_bits(x.t, y.t));
    ASSERT_EQ(x.is_cap(), y.is_cap());
    if (x.is_cap()) {
      EXPECT_TRUE(same_bits(x.cap().equator_gap, y.cap().equator_gap));
      EXPECT_TRUE(same_bits(x.cap().ambient_radius, y.cap().ambient_radius));
      continue;
    }
    const auto hx = x.profile().values(), hy = y.profile().values();
    ASSERT_EQ(hx.size(), hy.size());
    for (std::size_t j = 0; j < hx.size(); ++j) EXPECT_TRUE(same_bits(hx[j], hy[j])) << i << "," << j;
    EXPECT_EQ(x.profile().exact().has_value(), y.profile().exact().has_value());
    EXPECT_EQ(x.profile().recentered(), y.profile().recentered());
  }
}

const char* sphere_config = R"({"engine":"curve","n":1,"N":64,"t0":-1.0,
  "controls":{"cfl":0.4,"max_dt":0.01,"stop_rho_plus":0.1,"snapshot_stride":10},
  "initial":{"family":{"kind":"sphere"}}})";

} // namespace

TEST(Serialization, NumberFormat) {
  EXPECT_EQ(io::number(2.0), "2.0");
  EXPECT_EQ(io::number(-0.0), "-0.0");
  EXPECT_EQ(io::number(0.1), "0.10000000000000001");
  EXPECT_THROW(io::number(NAN), ValidationError);
  EXPECT_THROW(io::number(INFINITY), ValidationError);
}

TEST(Serialization, SphereRoundtripIsBitwise) {
  auto traj = exact_trajectory({FamilyKind::Sphere, 2}, {-3.0, -2.0, -1.0 / 3.0}, 32);
  traj.provenance = {"exact:sphere", 42, "abc"};
  const auto path = scratch("sphere.jsonl").string();
  write_trajectory(traj, path);
  const auto back = read_trajectory(path);
  expect_bitwise_equal(traj, back);
  EXPECT_EQ(back.provenance.seed, 42u);
  EXPECT_EQ(back.provenance.config_hash, "abc");
  // the text itself is reproduced
  EXPECT_EQ(trajectory_text(back), trajectory_text(traj));
}

TEST(Serialization, NumericalRunAndCapRoundtrip) {
  FlowControls c;
  c.stop_rho_plus = 0.3;
  c.snapshot_stride = 20;
  std::vector<double> h(64);
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = 1.0 + 0.05 * std::cos(2.0 * pi * 2 * j / 64.0) + 0.3 * std::cos(2.0 * pi * j / 64.0);
  const auto run = evolve(SupportProfile::plane_curve(h), -1.0, c);
  ASSERT_TRUE(run.t_ext_estimate);
  expect_bitwise_equal(run, parse_trajectory(trajectory_text(run)));

  FlowControls cc;
  cc.t_end = -0.5;
  cc.max_dt = 0.1;
  cc.snapshot_stride = 5;
  const auto cap = evolve_cap(CapState::from_gap(2, 1.0, cap_equator_gap(1.0, 2, -30.0)), -30.0, cc);
  expect_bitwise_equal(cap, parse_trajectory(trajectory_text(cap)));

  const auto oval = exact_trajectory({FamilyKind::AngenentOval, 1}, {-40.0, -1.0}, 64);
  const auto back = parse_trajectory(trajectory_text(oval));
  expect_bitwise_equal(oval, back);
  const auto& e1 = oval.slices[0].profile().exact();
  const auto& e2 = back.slices[0].profile().exact();
  for (std::size_t j = 0; j < e1->kappa.size(); ++j) EXPECT_TRUE(same_bits(e1->kappa[j], e2->kappa[j]));
}

TEST(Serialization, HeaderSchema) {
  const std::string rec =
      R"({"t":-1.0,"repr":"support_curve","n":1,"N":8,"data":[1.0,1.0,1.0,1.0,1.0,1.0,1.0,1.0]})";
  const auto ok = parse_trajectory(std::string(R"({"schema":"mcfflow/1","engine":"curve","n":1,"N":256})") + "\n" + rec + "\n");
  EXPECT_EQ(ok.engine, "curve");
  EXPECT_EQ(ok.size(), 1u);
  EXPECT_THROW(parse_trajectory(std::string(R"({"schema":"mcfflow/2","engine":"curve","n":1,"N":256})") + "\n"),
               SchemaMismatch);
  EXPECT_THROW(parse_trajectory(R"({"engine":"curve","n":1,"N":256})"), SchemaMismatch);
  EXPECT_THROW(parse_trajectory(""), SchemaMismatch);
}

TEST(Serialization, TruncatedLineNamesLine) {
  auto traj = exact_trajectory({FamilyKind::Sphere, 1}, {-3.0, -2.0, -1.0}, 16);
  std::string text = trajectory_text(traj);
  text.resize(text.size() - 20); // cut into the last record
  try {
    parse_trajectory(text);
    FAIL() << "expected CorruptRecord";
  } catch (const CorruptRecord& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
}

TEST(Serialization, RejectsNonFiniteAndBadShapes) {
  const std::string head = R"({"schema":"mcfflow/1","engine":"curve","n":1,"N":8})";
  auto bad = [&](const std::string& rec) { return head + "\n" + rec + "\n"; };
  EXPECT_THROW(parse_trajectory(bad(R"({"t":-1.0,"repr":"support_curve","n":1,"N":8,"data":[1,1,1,1,1,1,1,NaN]})")),
               CorruptRecord);
  EXPECT_THROW(parse_trajectory(bad(R"({"t":-1.0,"repr":"support_curve","n":1,"N":8,"data":[1,1,1,1,1,1,1,null]})")),
               CorruptRecord);
  EXPECT_THROW(parse_trajectory(bad(R"({"t":-1.0,"repr":"support_curve","n":1,"N":8,"data":[1,1,1,1,1,1,1,1e999]})")),
               CorruptRecord);
  EXPECT_THROW(parse_trajectory(bad(R"({"t":-1.0,"repr":"support_curve","n":1,"N":9,"data":[1,1,1,1,1,1,1,1]})")),
               CorruptRecord);
  EXPECT_THROW(parse_trajectory(bad(R"({"t":1.0,"repr":"support_curve","n":1,"N":8,"data":[1,1,1,1,1,1,1,1]})")),
               CorruptRecord);
  EXPECT_THROW(parse_trajectory(bad(R"({"t":-1.0,"repr":"graph","n":1,"N":8,"data":[1,1,1,1,1,1,1,1]})")),
               CorruptRecord);
  // non-convex samples
  EXPECT_THROW(parse_trajectory(bad(R"({"t":-1.0,"repr":"support_curve","n":1,"N":8,"data":[1,3,1,3,1,3,1,3]})")),
               CorruptRecord);
}

TEST(Serialization, MissingFileIsValidationError) {
  EXPECT_THROW(read_trajectory("/nonexistent/dir/x.jsonl"), ValidationError);
  auto traj = exact_trajectory({FamilyKind::Sphere, 1}, {-1.0}, 16);
  EXPECT_THROW(write_trajectory(traj, "/nonexistent/dir/x.jsonl"), IoError);
}

TEST(RunConfig, ParsesAndHashes) {
  const auto c = parse_run_config(sphere_config);
  EXPECT_EQ(c.engine, "curve");
  EXPECT_EQ(c.N, 64u);
  EXPECT_EQ(c.controls.snapshot_stride, 10u);
  EXPECT_EQ(c.hash.size(), 64u);
  // canonical: whitespace and key order do not change the hash
  const auto d = parse_run_config(R"({"t0":-1.0,"n":1,"engine":"curve","N":64,
    "initial":{"family":{"kind":"sphere"}},
    "controls":{"snapshot_stride":10,"stop_rho_plus":0.1,"max_dt":0.01,"cfl":0.4}})");
  EXPECT_EQ(c.hash, d.hash);
  EXPECT_NE(c.hash, parse_run_config(R"({"engine":"curve","n":1,"N":128,"t0":-1.0,"initial":{"family":{"kind":"sphere"}}})").hash);
  // known digest of the empty string
  EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(RunConfig, RejectsUnknownAndInvalid) {
  EXPECT_THROW(parse_run_config(R"({"engine":"curve","n":1,"N":64,"t0":-1,"initial":{"family":{"kind":"sphere"}},"extra":1})"),
               ValidationError);
  EXPECT_THROW(parse_run_config(R"({"engine":"curve","n":1,"N":64,"t0":-1,"initial":{"family":{"kind":"sphere","colour":1}}})"),
               ValidationError);
  EXPECT_THROW(parse_run_config(R"({"engine":"curve","n":1,"N":64,"t0":-1,"controls":{"cfl":0.9},"initial":{"family":{"kind":"sphere"}}})"),
               ValidationError);
  EXPECT_THROW(parse_run_config(R"({"engine":"curve","n":2,"N":64,"t0":-1,"initial":{"family":{"kind":"sphere"}}})"),
               ValidationError);
  EXPECT_THROW(parse_run_config(R"({"engine":"axisym","n":2,"N":64,"t0":1,"initial":{"family":{"kind":"sphere"}}})"),
               ValidationError);
  EXPECT_THROW(parse_run_config(R"({"engine":"curve","n":1,"N":64,"t0":-1,"initial":{}})"), ValidationError);
  EXPECT_THROW(parse_run_config(R"({"engine":"curve","n":1,"N":64,"t0":-1,"initial":{"random":{"amplitude":0.5}}})"),
               ValidationError);
  EXPECT_THROW(parse_run_config("{not json"), ValidationError);
  EXPECT_THROW(parse_run_config(R"({"engine":"curve","n":"one","N":64,"t0":-1,"initial":{"family":{"kind":"sphere"}}})"),
               ValidationError);
}

TEST(RunConfig, RunIsReproducible) {
  const auto c = parse_run_config(R"({"engine":"axisym","n":2,"N":32,"t0":-1.0,
    "controls":{"stop_rho_plus":0.5,"snapshot_stride":20},"initial":{"random":{"modes":3,"amplitude":0.05}}})");
  const auto a = run_flow(c, 11), b = run_flow(c, 11), other = run_flow(c, 12);
  EXPECT_EQ(trajectory_text(a), trajectory_text(b));
  EXPECT_NE(trajectory_text(a), trajectory_text(other));
  EXPECT_EQ(a.provenance.config_hash, c.hash);
  EXPECT_EQ(a.provenance.seed, 11u);
}

TEST(Reports, SphereConditionReport) {
  const auto traj = exact_trajectory({FamilyKind::Sphere, 2}, log_spaced_times(-100.0, -1.0, 21), 32);
  const auto rep = check_conditions(traj);
  const auto j = condition_report_json(rep, {"exact:sphere", 0, "h"});
  for (const auto& id : condition_ids()) EXPECT_EQ(j["conditions"][id]["verdict"], "BoundedInWindow");
  // stable field order
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"window", "conditions", "sphericity", "diam_affine_sup", "provenance"}));
  const auto path = scratch("report.json").string();
  emit_report(rep, path, ReportFormat::Json, {"exact:sphere", 0, "h"});
  const auto first = io::read_file(path);
  emit_report(rep, path, ReportFormat::Json, {"exact:sphere", 0, "h"});
  EXPECT_EQ(io::read_file(path), first);
  const auto csv = condition_report_csv(rep);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Reports, DiagnosticsCsvRowCount) {
  const auto traj = exact_trajectory({FamilyKind::Sphere, 2}, {-4.0, -3.0, -2.0, -1.0, -0.5}, 32);
  const DiagnoseParams prm{0.0, 2.0, 1, 0.0};
  const auto rows = diagnose_slices(traj, prm);
  ASSERT_EQ(rows.size(), traj.size());
  const auto csv = diagnostics_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(traj.size() + 1));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,eps_min,f0_max,fsigma_Lp,harnack_min,typeI,diam,rho_minus,rho_plus,iso_ratio,grad_ratio");
  EXPECT_NEAR(rows[2].eps_min, 0.5, 1e-12);
  EXPECT_EQ(rows[2].f0_max, 0.0);
  EXPECT_TRUE(std::isnan(rows[0].harnack_min));
  EXPECT_NEAR(rows[2].typeI, 1.0, 1e-12);
  const auto s = summarize(traj, rows, prm);
  EXPECT_GE(s.harnack_min, -1e-9);
  ASSERT_TRUE(s.kconvexity_margin);
  EXPECT_NEAR(*s.kconvexity_margin, 0.5, 1e-12);
  const auto j = diagnostics_json(rows, s, prm, {});
  EXPECT_TRUE(j["rows"][0]["harnack_min"].is_null());
}
