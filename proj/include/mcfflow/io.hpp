#ifndef MCFFLOW_IO_HPP
#define MCFFLOW_IO_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "mcfflow/ancient_analysis.hpp"
#include "mcfflow/diagnostics.hpp"
#include "mcfflow/errors.hpp"
#include "mcfflow/exact_solutions.hpp"
#include "mcfflow/flow_engine.hpp"
#include "mcfflow/trajectory.hpp"

namespace mcfflow {

inline constexpr const char* schema_version = "mcfflow/1";

class IoError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

namespace io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// %.17g, always with a fraction or exponent so that -0.0 and integral
/// values come back as doubles.
inline std::string number(double v) {
  if (!std::isfinite(v)) throw ValidationError("refusing to serialize NaN/Inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

inline std::string number_array(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += number(v[i]);
  }
  return s + "]";
}

inline std::string quoted(const std::string& s) { return json(s).dump(); }

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw NumericalError("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << data;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

/// Numbers that are JSON null (NaN on output) read back as NaN.
inline double number_or_nan(const json& j) { return j.is_null() ? NAN : j.get<double>(); }

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace io

// --- snapshot files -------------------------------------------------------------
//
// Line 1 is a header {"schema":"mcfflow/1","engine":..,"n":..,"N":..} with
// optional "t_ext_estimate", "time_variable" ("t" or "tau") and "provenance".
// Every further line is one snapshot:
//   {"t":..,"repr":"support_curve"|"axisym_profile"|"cap","n":..,"N":..,
//    "data":[..],"gauge":{"t_ext_estimate":..|null,"recentered":..},
//    "provenance":{"engine":..,"seed":..,"config_hash":..}}
// Caps store data = [rho] plus "R" and "equator_gap" (the exact state).
// Exact curves may add "dh" and "kappa" side data. The `exact` command also
// writes "graph" (grim reaper: x, y, kappa) and "cylinder" records, which
// are not trajectory slices.

inline std::string snapshot_repr(const TimeSlice& s) {
  if (s.is_cap()) return "cap";
  return s.profile().is_curve() ? "support_curve" : "axisym_profile";
}

inline std::string provenance_json(const Provenance& p) {
  return "{\"engine\":" + io::quoted(p.engine) + ",\"seed\":" + std::to_string(p.seed) +
         ",\"config_hash\":" + io::quoted(p.config_hash) + "}";
}

inline std::size_t header_grid(const Trajectory& traj) {
  for (const auto& s : traj.slices)
    if (!s.is_cap()) return s.profile().grid_size();
  return 0;
}

inline std::string header_line(const Trajectory& traj, const std::string& time_variable = "t") {
  std::string h = "{\"schema\":" + io::quoted(schema_version) + ",\"engine\":" + io::quoted(traj.engine) +
                  ",\"n\":" + std::to_string(traj.n) + ",\"N\":" + std::to_string(header_grid(traj));
  if (traj.t_ext_estimate) h += ",\"t_ext_estimate\":" + io::number(*traj.t_ext_estimate);
  h += ",\"time_variable\":" + io::quoted(time_variable);
  h += ",\"provenance\":" + provenance_json(traj.provenance) + "}";
  return h;
}

inline std::string snapshot_line(const TimeSlice& s, const Trajectory& traj) {
  std::string r = "{\"t\":" + io::number(s.t) + ",\"repr\":" + io::quoted(snapshot_repr(s)) +
                  ",\"n\":" + std::to_string(traj.n);
  bool recentered = false;
  if (s.is_cap()) {
    const auto& c = s.cap();
    const double rho = c.geodesic_radius();
    r += ",\"N\":1,\"data\":[" + io::number(rho) + "],\"R\":" + io::number(c.ambient_radius) +
         ",\"equator_gap\":" + io::number(c.equator_gap);
  } else {
    const auto& b = s.profile();
    recentered = b.recentered();
    r += ",\"N\":" + std::to_string(b.grid_size()) + ",\"data\":" + io::number_array(b.values());
    if (b.exact()) r += ",\"dh\":" + io::number_array(b.exact()->dh) + ",\"kappa\":" + io::number_array(b.exact()->kappa);
  }
  r += ",\"gauge\":{\"t_ext_estimate\":" + (traj.t_ext_estimate ? io::number(*traj.t_ext_estimate) : std::string("null")) +
       ",\"recentered\":" + (recentered ? "true" : "false") + "}";
  r += ",\"provenance\":" + provenance_json(traj.provenance) + "}";
  return r;
}

inline std::string trajectory_text(const Trajectory& traj, const std::string& time_variable = "t") {
  require(time_variable == "t" || time_variable == "tau", "time variable must be t or tau");
  std::string out = header_line(traj, time_variable) + "\n";
  for (const auto& s : traj.slices) {
    if (time_variable == "t" && !s.is_cap() && !(s.t < 0.0))
      throw ValidationError("Euclidean snapshots need t < 0 (time " + io::number(s.t) + ")");
    out += snapshot_line(s, traj) + "\n";
  }
  return out;
}

inline void write_trajectory(const Trajectory& traj, const std::string& path, const std::string& time_variable = "t") {
  io::write_file(path, trajectory_text(traj, time_variable));
}

namespace detail {

inline std::vector<double> finite_array(const io::json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || !j.at(key).is_array()) throw CorruptRecord(line, std::string("missing array '") + key + "'");
  std::vector<double> v;
  v.reserve(j.at(key).size());
  for (const auto& x : j.at(key)) {
    if (!x.is_number()) throw CorruptRecord(line, std::string("non-numeric entry in '") + key + "' (NaN/Inf are rejected)");
    const double d = x.get<double>();
    if (!std::isfinite(d)) throw CorruptRecord(line, std::string("non-finite entry in '") + key + "'");
    v.push_back(d);
  }
  return v;
}

template <class T>
T field(const io::json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) throw CorruptRecord(line, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const io::json::exception&) {
    throw CorruptRecord(line, std::string("field '") + key + "' has the wrong type");
  }
}

inline Provenance read_provenance(const io::json& j, std::size_t line) {
  Provenance p;
  if (!j.contains("provenance")) return p;
  const auto& q = j.at("provenance");
  if (!q.is_object()) throw CorruptRecord(line, "provenance must be an object");
  if (q.contains("engine")) p.engine = field<std::string>(q, "engine", line);
  if (q.contains("seed")) p.seed = field<std::uint64_t>(q, "seed", line);
  if (q.contains("config_hash")) p.config_hash = field<std::string>(q, "config_hash", line);
  return p;
}

} // namespace detail

struct SnapshotFile {
  io::json header;
  std::vector<io::json> records;
};

/// Parses a snapshot file into raw records, checking the header schema and the
/// well-formedness of every line.
inline SnapshotFile read_snapshot_file(const std::string& text) {
  SnapshotFile f;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool any = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    const bool terminated = end != std::string::npos;
    if (!terminated) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty() && terminated) continue;
    io::json j;
    try {
      j = io::json::parse(line);
    } catch (const io::json::exception&) {
      throw CorruptRecord(line_no, std::string("malformed record") + (terminated ? "" : " (truncated final line)"));
    }
    if (!j.is_object()) throw CorruptRecord(line_no, "record must be an object");
    if (!any) {
      if (!j.contains("schema")) throw SchemaMismatch("missing schema field in header");
      if (!j.at("schema").is_string() || j.at("schema").get<std::string>() != schema_version)
        throw SchemaMismatch("unsupported schema " + j.at("schema").dump() + " (expected \"" + schema_version + "\")");
      detail::field<std::string>(j, "engine", line_no);
      detail::field<int>(j, "n", line_no);
      detail::field<std::size_t>(j, "N", line_no);
      f.header = std::move(j);
      any = true;
      continue;
    }
    f.records.push_back(std::move(j));
  }
  if (!any) throw SchemaMismatch("empty snapshot file");
  return f;
}

inline TimeSlice slice_from_record(const io::json& j, int n, std::size_t line) {
  const auto repr = detail::field<std::string>(j, "repr", line);
  const double t = detail::field<double>(j, "t", line);
  if (!std::isfinite(t)) throw CorruptRecord(line, "non-finite time");
  if (detail::field<int>(j, "n", line) != n) throw CorruptRecord(line, "dimension differs from the header");
  const auto N = detail::field<std::size_t>(j, "N", line);
  auto data = detail::finite_array(j, "data", line);
  try {
    if (repr == "cap") {
      if (data.size() != 1 || N != 1) throw CorruptRecord(line, "cap data must be a single radius");
      const double R = detail::field<double>(j, "R", line);
      if (j.contains("equator_gap")) return {t, CapState::from_gap(n, R, detail::field<double>(j, "equator_gap", line))};
      return {t, CapState::from_radius(n, R, data[0])};
    }
    const bool curve = repr == "support_curve";
    if (!curve && repr != "axisym_profile")
      throw CorruptRecord(line, "repr '" + repr + "' is not a trajectory slice");
    if (data.size() != (curve ? N : N + 1)) throw CorruptRecord(line, "data length does not match N and repr");
    std::optional<ExactSideData> ex;
    if (j.contains("dh") || j.contains("kappa"))
      ex = ExactSideData{detail::finite_array(j, "dh", line), detail::finite_array(j, "kappa", line)};
    auto b = curve ? SupportProfile::plane_curve(std::move(data), std::move(ex))
                   : SupportProfile::axisymmetric(n, std::move(data), std::move(ex));
    if (j.contains("gauge") && j.at("gauge").is_object() && j.at("gauge").value("recentered", false)) b.mark_recentered();
    return {t, std::move(b)};
  } catch (const CorruptRecord&) {
    throw;
  } catch (const ValidationError& e) {
    throw CorruptRecord(line, e.what());
  }
}

inline Trajectory parse_trajectory(const std::string& text) {
  const auto f = read_snapshot_file(text);
  Trajectory traj;
  traj.engine = f.header.at("engine").get<std::string>();
  traj.n = f.header.at("n").get<int>();
  if (f.header.contains("t_ext_estimate")) traj.t_ext_estimate = detail::field<double>(f.header, "t_ext_estimate", 1);
  traj.provenance = detail::read_provenance(f.header, 1);
  const std::string tv = f.header.value("time_variable", std::string("t"));
  for (std::size_t i = 0; i < f.records.size(); ++i) {
    auto s = slice_from_record(f.records[i], traj.n, i + 2);
    if (tv == "t" && !s.is_cap() && !(s.t < 0.0)) throw CorruptRecord(i + 2, "Euclidean snapshot with t >= 0");
    traj.slices.push_back(std::move(s));
  }
  traj.validate();
  return traj;
}

inline Trajectory read_trajectory(const std::string& path) {
  const std::string text = io::read_file(path);
  try {
    return parse_trajectory(text);
  } catch (const CorruptRecord& e) {
    throw CorruptRecord(e.line(), std::string(e.what()).substr(std::string(e.what()).find(": ") + 2) + " in '" + path + "'");
  }
}

// --- run configuration ------------------------------------------------------------

struct InitialFamily {
  FamilyKind kind = FamilyKind::Sphere;
  double R = 1.0;          // ambient radius (caps)
  std::optional<double> t; // slice time; defaults to t0
};

struct InitialFile {
  std::string path;
};

struct InitialRandom {
  std::optional<std::uint64_t> seed; // falls back to the global --seed
  int modes = 4;                      // highest perturbation mode
  double amplitude = 0.05;
};

struct InitialSpec {
  std::variant<InitialFamily, InitialFile, InitialRandom> source;
};

struct DiagnosticsSpec {
  std::vector<double> sigma{0.0};
  std::vector<double> p{2.0};
  std::vector<int> k;
  std::vector<double> eta{0.0};
};

struct RunConfig {
  std::string engine = "curve";
  int n = 1;
  std::size_t N = 256;
  double t0 = -1.0;
  FlowControls controls;
  InitialSpec initial;
  DiagnosticsSpec diagnostics;
  VerdictRule verdict;
  std::string canonical; // canonical JSON of the document as given
  std::string hash;      // SHA-256 of `canonical`
};

namespace detail {

inline void only_keys(const io::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const io::json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const io::json::exception&) {
    throw ValidationError(where + "." + key + " is missing or has the wrong type");
  }
}

template <class T>
void get_if(const io::json& j, const char* key, const std::string& where, T& out) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

inline double finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw ValidationError(what + " must be finite");
  return v;
}

} // namespace detail

inline RunConfig parse_run_config(const std::string& text) {
  io::json doc;
  try {
    doc = io::json::parse(text);
  } catch (const io::json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  using detail::get;
  using detail::get_if;
  detail::only_keys(doc, {"engine", "n", "N", "t0", "controls", "initial", "diagnostics", "verdict"}, "config");
  RunConfig c;
  c.engine = get<std::string>(doc, "engine", "config");
  require(c.engine == "curve" || c.engine == "axisym" || c.engine == "cap", "engine must be curve, axisym or cap");
  c.n = get<int>(doc, "n", "config");
  if (c.engine == "curve") require(c.n == 1, "curve engine needs n = 1");
  if (c.engine == "axisym") require(c.n >= 2, "axisym engine needs n >= 2");
  if (c.engine == "cap") require(c.n >= 1, "cap engine needs n >= 1");
  if (c.engine != "cap") {
    c.N = get<std::size_t>(doc, "N", "config");
    require(c.N >= 16 && c.N <= 65536, "N must lie in [16, 65536]");
  } else {
    get_if(doc, "N", "config", c.N);
  }
  c.t0 = detail::finite(get<double>(doc, "t0", "config"), "t0");
  require(c.t0 < 0.0, "t0 must be negative");

  if (doc.contains("controls")) {
    const auto& j = doc.at("controls");
    detail::only_keys(j, {"cfl", "max_dt", "stop_rho_plus", "snapshot_stride", "t_end"}, "controls");
    get_if(j, "cfl", "controls", c.controls.cfl);
    get_if(j, "max_dt", "controls", c.controls.max_dt);
    get_if(j, "stop_rho_plus", "controls", c.controls.stop_rho_plus);
    get_if(j, "snapshot_stride", "controls", c.controls.snapshot_stride);
    if (j.contains("t_end")) {
      c.controls.t_end = detail::finite(get<double>(j, "t_end", "controls"), "t_end");
      require(*c.controls.t_end > c.t0 && *c.controls.t_end < 0.0, "t_end must lie in (t0, 0)");
    }
    c.controls.validate();
  }

  const auto& ini = doc.contains("initial") ? doc.at("initial") : throw ValidationError("config.initial is missing");
  detail::only_keys(ini, {"family", "file", "random"}, "initial");
  require(ini.size() == 1, "initial must hold exactly one of family, file, random");
  if (ini.contains("family")) {
    const auto& j = ini.at("family");
    detail::only_keys(j, {"kind", "R", "t"}, "initial.family");
    InitialFamily f;
    f.kind = family_from_string(get<std::string>(j, "kind", "initial.family"));
    get_if(j, "R", "initial.family", f.R);
    if (j.contains("t")) f.t = detail::finite(get<double>(j, "t", "initial.family"), "initial.family.t");
    const bool cap_kind = f.kind == FamilyKind::SphericalCap || f.kind == FamilyKind::Equator;
    require(cap_kind == (c.engine == "cap"), "cap families go with the cap engine and only there");
    require(f.kind != FamilyKind::Cylinder && f.kind != FamilyKind::GrimReaper,
            "cylinder and grim reaper are not compact initial data");
    if (f.kind == FamilyKind::AngenentOval) require(c.engine == "curve", "the oval needs the curve engine");
    require(f.R > 0.0, "initial.family.R must be positive");
    c.initial.source = f;
  } else if (ini.contains("file")) {
    c.initial.source = InitialFile{get<std::string>(ini, "file", "initial")};
  } else {
    const auto& j = ini.at("random");
    detail::only_keys(j, {"seed", "modes", "amplitude"}, "initial.random");
    InitialRandom r;
    if (j.contains("seed")) r.seed = get<std::uint64_t>(j, "seed", "initial.random");
    get_if(j, "modes", "initial.random", r.modes);
    get_if(j, "amplitude", "initial.random", r.amplitude);
    require(c.engine != "cap", "random initial data needs a Euclidean engine");
    require(r.modes >= 2, "initial.random.modes must be >= 2");
    require(r.amplitude >= 0.0 && r.amplitude * (r.modes * r.modes - 1.0) < 1.0,
            "initial.random.amplitude too large for convexity");
    c.initial.source = r;
  }

  if (doc.contains("diagnostics")) {
    const auto& j = doc.at("diagnostics");
    detail::only_keys(j, {"sigma", "p", "k", "eta"}, "diagnostics");
    get_if(j, "sigma", "diagnostics", c.diagnostics.sigma);
    get_if(j, "p", "diagnostics", c.diagnostics.p);
    get_if(j, "k", "diagnostics", c.diagnostics.k);
    get_if(j, "eta", "diagnostics", c.diagnostics.eta);
    for (double s : c.diagnostics.sigma) require(s >= 0.0 && s <= 2.0, "diagnostics.sigma entries must lie in [0, 2]");
    for (double p : c.diagnostics.p) require(p >= 1.0, "diagnostics.p entries must be >= 1");
    for (int k : c.diagnostics.k) require(k >= 1 && k <= std::max(1, c.n - 1), "diagnostics.k entries must lie in [1, n-1]");
    for (double e : c.diagnostics.eta) require(e >= 0.0, "diagnostics.eta entries must be >= 0");
  }
  if (doc.contains("verdict")) {
    const auto& j = doc.at("verdict");
    detail::only_keys(j, {"bounded_tolerance", "growth_slope", "hard_cap", "min_decades"}, "verdict");
    get_if(j, "bounded_tolerance", "verdict", c.verdict.bounded_tolerance);
    get_if(j, "growth_slope", "verdict", c.verdict.growth_slope);
    get_if(j, "hard_cap", "verdict", c.verdict.hard_cap);
    get_if(j, "min_decades", "verdict", c.verdict.min_decades);
    require(c.verdict.bounded_tolerance > 0.0 && c.verdict.growth_slope > 0.0 && c.verdict.hard_cap > 0.0 &&
                c.verdict.min_decades > 0.0,
            "verdict thresholds must be positive");
  }
  // nlohmann::json keeps keys sorted, so dump() is canonical
  c.canonical = doc.dump();
  c.hash = io::sha256_hex(c.canonical);
  return c;
}

inline RunConfig read_run_config(const std::string& path) { return parse_run_config(io::read_file(path)); }

/// Builds the initial slice described by the config.
inline TimeSlice initial_slice(const RunConfig& c, std::uint64_t global_seed) {
  if (const auto* f = std::get_if<InitialFamily>(&c.initial.source)) {
    ExactFamily fam{f->kind, c.n, 0, f->R, 0.0};
    auto s = exact_slice(fam, f->t.value_or(c.t0), c.N);
    s.t = c.t0;
    return s;
  }
  if (const auto* f = std::get_if<InitialFile>(&c.initial.source)) {
    const auto traj = read_trajectory(f->path);
    require(traj.size() >= 1, "initial file holds no snapshot");
    require(traj.n == c.n, "initial file dimension differs from the config");
    auto s = traj.slices.back();
    if (s.is_cap() != (c.engine == "cap")) throw ValidationError("initial snapshot does not match the engine");
    s.t = c.t0;
    return s;
  }
  const auto& r = std::get<InitialRandom>(c.initial.source);
  return {c.t0, perturbed_sphere(c.n, sphere_radius(c.n, c.t0), r.amplitude, r.seed.value_or(global_seed), c.N, r.modes)};
}

inline Trajectory run_flow(const RunConfig& c, std::uint64_t global_seed) {
  const TimeSlice s = initial_slice(c, global_seed);
  Trajectory traj = s.is_cap() ? evolve_cap(s.cap(), c.t0, c.controls) : evolve(s.profile(), c.t0, c.controls);
  traj.provenance = {traj.engine, global_seed, c.hash};
  if (const auto* r = std::get_if<InitialRandom>(&c.initial.source); r && r->seed) traj.provenance.seed = *r->seed;
  return traj;
}

// --- reports ---------------------------------------------------------------------

enum class ReportFormat { Json, Csv };

inline ReportFormat format_from_string(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  throw ValidationError("report format must be json or csv");
}

/// Guesses the format from the file extension (.csv, otherwise json).
inline ReportFormat format_for_path(const std::string& path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? ReportFormat::Csv : ReportFormat::Json;
}

inline std::string csv_number(double v) { return std::isfinite(v) ? io::number(v) : std::string(); }

inline io::ordered_json provenance_object(const Provenance& p) {
  io::ordered_json j;
  j["engine"] = p.engine;
  j["seed"] = p.seed;
  j["config_hash"] = p.config_hash;
  return j;
}

inline io::ordered_json measurements_json(const BodyMeasurements& m) {
  io::ordered_json j;
  j["w_minus"] = m.w_minus;
  j["w_plus"] = m.w_plus;
  j["diam"] = m.diam;
  j["diam_I"] = m.diam_I;
  j["rho_minus"] = m.rho_minus;
  j["rho_plus"] = m.rho_plus;
  j["area"] = m.area;
  j["volume"] = m.volume;
  j["iso_ratio"] = m.iso_ratio;
  return j;
}

struct RescaleSummary {
  double L_k = 0.0;
  double t_k = 0.0;
  double soliton_residual = 0.0;
};

inline io::ordered_json rescale_json(const RescaleSummary& r) {
  io::ordered_json j;
  j["L_k"] = io::finite_or_null(r.L_k);
  j["t_k"] = io::finite_or_null(r.t_k);
  j["soliton_residual"] = io::finite_or_null(r.soliton_residual);
  return j;
}

inline io::ordered_json condition_report_json(const ConditionReport& rep, const Provenance& prov,
                                              const std::optional<RescaleSummary>& rescale = std::nullopt) {
  io::ordered_json j;
  j["window"] = io::ordered_json::array({rep.window_start, rep.window_end});
  io::ordered_json conds = io::ordered_json::object();
  for (const auto& id : condition_ids()) {
    const auto& c = rep.conditions.at(id);
    io::ordered_json e;
    e["sup"] = io::finite_or_null(c.sup);
    e["slope"] = io::finite_or_null(c.slope);
    e["verdict"] = to_string(c.verdict);
    conds[id] = e;
  }
  j["conditions"] = conds;
  io::ordered_json series = io::ordered_json::array();
  for (const auto& [t, v] : rep.f0_max) series.push_back({t, io::finite_or_null(v)});
  j["sphericity"] = {{"f0_max_series", series}};
  j["diam_affine_sup"] = io::finite_or_null(rep.diam_affine_sup);
  if (rescale) j["rescale"] = rescale_json(*rescale);
  j["provenance"] = provenance_object(prov);
  return j;
}

/// CSV form: one row per condition, columns id,sup,slope,verdict.
inline std::string condition_report_csv(const ConditionReport& rep) {
  std::string out = "id,sup,slope,verdict\n";
  for (const auto& id : condition_ids()) {
    const auto& c = rep.conditions.at(id);
    out += id + "," + csv_number(c.sup) + "," + csv_number(c.slope) + "," + to_string(c.verdict) + "\n";
  }
  return out;
}

inline const std::vector<std::string>& diagnostic_columns() {
  static const std::vector<std::string> cols{"t",    "eps_min",   "f0_max",   "fsigma_Lp", "harnack_min", "typeI",
                                             "diam", "rho_minus", "rho_plus", "iso_ratio", "grad_ratio"};
  return cols;
}

inline std::vector<double> diagnostic_values(const DiagnosticRow& r) {
  return {r.t, r.eps_min, r.f0_max, r.fsigma_lp, r.harnack_min, r.typeI, r.diam, r.rho_minus, r.rho_plus, r.iso_ratio,
          r.grad_ratio};
}

/// Per-slice CSV, one row per slice; undefined entries are empty.
inline std::string diagnostics_csv(const std::vector<DiagnosticRow>& rows) {
  std::string out;
  const auto& cols = diagnostic_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const auto& r : rows) {
    const auto v = diagnostic_values(r);
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + csv_number(v[i]);
    out += "\n";
  }
  return out;
}

inline io::ordered_json summary_json(const DiagnosticSummary& s, const DiagnoseParams& prm, const Provenance& prov) {
  io::ordered_json j;
  j["slices"] = s.slices;
  j["params"] = {{"sigma", prm.sigma}, {"p", prm.p}, {"k", prm.k ? io::ordered_json(*prm.k) : io::ordered_json(nullptr)},
                 {"eta", prm.eta}};
  j["harnack_min"] = io::finite_or_null(s.harnack_min);
  j["harnack_tolerance"] = io::finite_or_null(s.harnack_tolerance);
  j["eps_min"] = io::finite_or_null(s.eps_min);
  j["typeI_sup"] = io::finite_or_null(s.typeI_sup);
  j["kconvexity_margin"] = s.kconvexity_margin ? io::finite_or_null(*s.kconvexity_margin) : io::json(nullptr);
  if (s.identities) {
    const auto& d = *s.identities;
    j["flow_identities"] = {{"area_rel", io::finite_or_null(d.area_rel)},
                            {"volume_rel", io::finite_or_null(d.volume_rel)},
                            {"curvature_bound_rel", io::finite_or_null(d.curvature_bound_rel)},
                            {"radius_bound_rel", io::finite_or_null(d.radius_bound_rel)}};
  } else {
    j["flow_identities"] = nullptr;
  }
  j["provenance"] = provenance_object(prov);
  return j;
}

inline io::ordered_json diagnostics_json(const std::vector<DiagnosticRow>& rows, const DiagnosticSummary& s,
                                         const DiagnoseParams& prm, const Provenance& prov) {
  io::ordered_json j;
  io::ordered_json arr = io::ordered_json::array();
  const auto& cols = diagnostic_columns();
  for (const auto& r : rows) {
    io::ordered_json o;
    const auto v = diagnostic_values(r);
    for (std::size_t i = 0; i < v.size(); ++i) o[cols[i]] = io::finite_or_null(v[i]);
    arr.push_back(o);
  }
  j["rows"] = arr;
  j["summary"] = summary_json(s, prm, prov);
  return j;
}

inline std::string dump(const io::ordered_json& j) { return j.dump(2) + "\n"; }

inline void emit_report(const ConditionReport& rep, const std::string& path, ReportFormat fmt, const Provenance& prov = {},
                        const std::optional<RescaleSummary>& rescale = std::nullopt) {
  io::write_file(path, fmt == ReportFormat::Json ? dump(condition_report_json(rep, prov, rescale)) : condition_report_csv(rep));
}

/// CSV writes the per-slice table only; JSON carries rows and the summary.
inline void emit_report(const std::vector<DiagnosticRow>& rows, const DiagnosticSummary& s, const DiagnoseParams& prm,
                        const std::string& path, ReportFormat fmt, const Provenance& prov = {}) {
  io::write_file(path, fmt == ReportFormat::Json ? dump(diagnostics_json(rows, s, prm, prov)) : diagnostics_csv(rows));
}

} // namespace mcfflow

#endif
