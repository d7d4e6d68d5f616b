#ifndef VACUUMSQ_CONFIG_HPP
#define VACUUMSQ_CONFIG_HPP

// Run configuration: a JSON document with a schema_version field. All
// frequencies are entered in Hz (the "/2pi" values) and times in seconds.
//
//   {
//     "schema_version": 1,
//     "system": {"n_atoms": 10000, "kappa_hz": 1e5, "gamma_hz": 7e-3,
//                "delta_hz": 11.2e6, "eta": 10},
//     "model": {"scheme": "oat", "tier": "analytic"},
//     "noise": {"free_space": true, "cavity_leak": true, "detector_efficiency": 0},
//     "time_grid": {"start": 1e-3, "stop": 10, "points": 400, "spacing": "log"}
//   }
//
// Either "eta" or "g_hz" may be given; giving both requires them to agree to
// 1e-6 relative. See README.md for the optional sections.

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "vacuumsq/analytic.hpp"
#include "vacuumsq/core.hpp"
#include "vacuumsq/optimize.hpp"

namespace vacuumsq {

using json = nlohmann::json;

inline constexpr int config_schema_version = 1;

enum class Command { evolve, optimize, scaling, oracle, feasibility };

inline const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::evolve: return "evolve";
    case Command::optimize: return "optimize";
    case Command::scaling: return "scaling";
    case Command::oracle: return "oracle";
    case Command::feasibility: return "feasibility";
  }
  return "?";
}

inline Command parse_command(const std::string& s) {
  if (s == "evolve") return Command::evolve;
  if (s == "optimize") return Command::optimize;
  if (s == "scaling") return Command::scaling;
  if (s == "oracle") return Command::oracle;
  if (s == "feasibility") return Command::feasibility;
  fail(ErrorKind::config, "unknown command '" + s + "'");
}

struct SystemSection {
  int n_atoms = 0;
  double kappa_hz = 0.0;
  double gamma_hz = 0.0;
  double delta_hz = 0.0;
  std::optional<double> g_hz;
  std::optional<double> eta;
  std::optional<double> omega0_hz;
};

struct TimeGridSection {
  double start = 1e-3;
  double stop = 10.0;
  int points = 400;
  bool log_spaced = true;
};

struct OptimizeSection {
  std::optional<double> t_min;
  std::optional<double> t_max;
  bool scan_delta = false;
  std::optional<double> delta_min_hz;
  std::optional<double> delta_max_hz;
  int grid_points = 200;
};

struct OracleSection {
  int n_atoms = 4;
  double coupling_hz = 1.0;
  double detuning_factor = 200.0;  // Delta = factor * g sqrt(N)
  int photon_cutoff = 2;
  double omega_t_max = 0.2;
  int points = 21;
};

struct FeasibilitySection {
  double fsr_hz = 5e9;
  double fsr_jitter_hz = 1e6;
  double noise_bandwidth_hz = 1e4;
  double squeeze_time_s = 0.073;
};

struct OutputSection {
  std::optional<std::string> dir;
  std::string csv = "trace.csv";
  std::string summary = "summary.json";
};

struct RunConfig {
  int schema_version = config_schema_version;
  std::optional<Command> command;
  SystemSection system;
  ModelSpec model;
  NoiseModel noise = NoiseModel::both();
  TimeGridSection time_grid;
  OptimizeSection optimize;
  std::vector<ScalingPoint> scaling_points;
  OracleSection oracle;
  FeasibilitySection feasibility;
  OutputSection output;
};

namespace detail {

class Reader {
 public:
  Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) fail(ErrorKind::config, where_ + " must be an object");
  }

  template <class T>
  std::optional<T> optional(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key) || obj_.at(key).is_null()) return std::nullopt;
    try {
      return obj_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(ErrorKind::config, where_ + "." + key + " has the wrong type");
    }
  }

  template <class T>
  T required(const std::string& key) {
    auto v = optional<T>(key);
    if (!v) fail(ErrorKind::config, where_ + "." + key + " is required");
    return *v;
  }

  template <class T>
  T value(const std::string& key, T fallback) {
    return optional<T>(key).value_or(fallback);
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key) || obj_.at(key).is_null()) return nullptr;
    return &obj_.at(key);
  }

  void reject_unknown() const {
    for (const auto& [k, _] : obj_.items())
      if (!seen_.count(k)) fail(ErrorKind::config, "unknown key " + where_ + "." + k);
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

inline void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) fail(ErrorKind::config, what + " must be finite");
}

}  // namespace detail

/// Parses and structurally validates a configuration document. Physical
/// validity (e.g. Delta != 0) is checked by resolve_system().
inline RunConfig parse_config(const json& doc) {
  RunConfig c;
  detail::Reader top(doc, "config");
  c.schema_version = top.required<int>("schema_version");
  if (c.schema_version != config_schema_version)
    fail(ErrorKind::config, "unsupported schema_version " + std::to_string(c.schema_version));
  if (auto cmd = top.optional<std::string>("command")) c.command = parse_command(*cmd);

  if (const json* s = top.child("system")) {
    detail::Reader r(*s, "system");
    c.system.n_atoms = r.required<int>("n_atoms");
    c.system.kappa_hz = r.required<double>("kappa_hz");
    c.system.gamma_hz = r.required<double>("gamma_hz");
    c.system.delta_hz = r.required<double>("delta_hz");
    c.system.g_hz = r.optional<double>("g_hz");
    c.system.eta = r.optional<double>("eta");
    c.system.omega0_hz = r.optional<double>("omega0_hz");
    r.reject_unknown();
  }
  if (const json* m = top.child("model")) {
    detail::Reader r(*m, "model");
    const auto scheme = r.value<std::string>("scheme", "oat");
    const auto tier = r.value<std::string>("tier", "analytic");
    if (scheme != "oat" && scheme != "tat") fail(ErrorKind::config, "model.scheme must be oat or tat");
    if (tier != "analytic" && tier != "dicke")
      fail(ErrorKind::config, "model.tier must be analytic or dicke");
    c.model = {scheme == "oat" ? Scheme::oat : Scheme::tat,
               tier == "analytic" ? Tier::analytic : Tier::dicke};
    r.reject_unknown();
  }
  if (const json* n = top.child("noise")) {
    detail::Reader r(*n, "noise");
    c.noise.include_free_space = r.value<bool>("free_space", true);
    c.noise.include_cavity_leak = r.value<bool>("cavity_leak", true);
    c.noise.detector_efficiency_q = r.value<double>("detector_efficiency", 0.0);
    r.reject_unknown();
    if (!(c.noise.detector_efficiency_q >= 0.0 && c.noise.detector_efficiency_q <= 1.0))
      fail(ErrorKind::config, "noise.detector_efficiency must lie in [0, 1]");
  }
  if (const json* g = top.child("time_grid")) {
    detail::Reader r(*g, "time_grid");
    c.time_grid.start = r.value<double>("start", c.time_grid.start);
    c.time_grid.stop = r.value<double>("stop", c.time_grid.stop);
    c.time_grid.points = r.value<int>("points", c.time_grid.points);
    const auto spacing = r.value<std::string>("spacing", "log");
    if (spacing != "log" && spacing != "linear")
      fail(ErrorKind::config, "time_grid.spacing must be log or linear");
    c.time_grid.log_spaced = spacing == "log";
    r.reject_unknown();
  }
  if (c.time_grid.points < 2 || !(c.time_grid.stop > c.time_grid.start) ||
      !(c.time_grid.start >= 0.0) || (c.time_grid.log_spaced && !(c.time_grid.start > 0.0)))
    fail(ErrorKind::config, "time_grid needs points >= 2, stop > start >= 0 (start > 0 for log)");
  if (const json* o = top.child("optimize")) {
    detail::Reader r(*o, "optimize");
    c.optimize.t_min = r.optional<double>("t_min");
    c.optimize.t_max = r.optional<double>("t_max");
    c.optimize.scan_delta = r.value<bool>("scan_delta", false);
    c.optimize.delta_min_hz = r.optional<double>("delta_min_hz");
    c.optimize.delta_max_hz = r.optional<double>("delta_max_hz");
    c.optimize.grid_points = r.value<int>("grid_points", c.optimize.grid_points);
    r.reject_unknown();
    if (c.optimize.grid_points < 3) fail(ErrorKind::config, "optimize.grid_points must be >= 3");
  }
  if (const json* s = top.child("scaling")) {
    detail::Reader r(*s, "scaling");
    const auto pts = r.required<std::vector<std::vector<double>>>("points");
    for (const auto& pt : pts) {
      if (pt.size() != 2) fail(ErrorKind::config, "scaling.points entries must be [N, eta]");
      c.scaling_points.push_back({static_cast<int>(pt[0]), pt[1]});
    }
    r.reject_unknown();
  }
  if (const json* o = top.child("oracle")) {
    detail::Reader r(*o, "oracle");
    auto& s = c.oracle;
    s.n_atoms = r.value<int>("n_atoms", s.n_atoms);
    s.coupling_hz = r.value<double>("coupling_hz", s.coupling_hz);
    s.detuning_factor = r.value<double>("detuning_factor", s.detuning_factor);
    s.photon_cutoff = r.value<int>("photon_cutoff", s.photon_cutoff);
    s.omega_t_max = r.value<double>("omega_t_max", s.omega_t_max);
    s.points = r.value<int>("points", s.points);
    r.reject_unknown();
    if (s.points < 2) fail(ErrorKind::config, "oracle.points must be >= 2");
  }
  if (const json* f = top.child("feasibility")) {
    detail::Reader r(*f, "feasibility");
    auto& s = c.feasibility;
    s.fsr_hz = r.value<double>("fsr_hz", s.fsr_hz);
    s.fsr_jitter_hz = r.value<double>("fsr_jitter_hz", s.fsr_jitter_hz);
    s.noise_bandwidth_hz = r.value<double>("noise_bandwidth_hz", s.noise_bandwidth_hz);
    s.squeeze_time_s = r.value<double>("squeeze_time_s", s.squeeze_time_s);
    r.reject_unknown();
  }
  if (const json* o = top.child("output")) {
    detail::Reader r(*o, "output");
    c.output.dir = r.optional<std::string>("dir");
    c.output.csv = r.value<std::string>("csv", c.output.csv);
    c.output.summary = r.value<std::string>("summary", c.output.summary);
    r.reject_unknown();
  }
  top.reject_unknown();
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

/// Boundary units (Hz) to internal SystemParams, deriving g from eta when
/// needed.
inline SystemParams resolve_system(const SystemSection& s) {
  if (s.n_atoms == 0) fail(ErrorKind::config, "system section is required");
  for (double v : {s.kappa_hz, s.gamma_hz, s.delta_hz}) detail::require_finite(v, "system rates");
  SystemParams p;
  p.n_atoms = s.n_atoms;
  p.kappa = hz_to_angular(s.kappa_hz);
  p.gamma = hz_to_angular(s.gamma_hz);
  p.delta = hz_to_angular(s.delta_hz);
  if (s.omega0_hz) p.omega0 = hz_to_angular(*s.omega0_hz);
  if (!s.g_hz && !s.eta) fail(ErrorKind::config, "system needs either g_hz or eta");
  if (s.g_hz) {
    p.coupling_g = hz_to_angular(*s.g_hz);
  } else {
    p.coupling_g = coupling_from_cooperativity(*s.eta, p.gamma, p.kappa);
  }
  p.validate();
  if (s.g_hz && s.eta) {
    const double eta = derive_params(p).eta;
    if (std::abs(eta - *s.eta) > 1e-6 * std::abs(*s.eta))
      fail(ErrorKind::config, "g_hz and eta are inconsistent: g implies eta = " +
                                  format_double(eta));
  }
  return p;
}

inline FeasibilityParams resolve_feasibility(const FeasibilitySection& s) {
  FeasibilityParams f;
  f.fsr = hz_to_angular(s.fsr_hz);
  f.fsr_jitter = hz_to_angular(s.fsr_jitter_hz);
  f.noise_bandwidth = s.noise_bandwidth_hz;
  f.squeeze_time = s.squeeze_time_s;
  f.validate();
  return f;
}

/// Fully resolved configuration; parse_config() accepts it back unchanged.
inline json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  if (c.command) j["command"] = to_string(*c.command);
  if (c.system.n_atoms != 0) {
    json s;
    s["n_atoms"] = c.system.n_atoms;
    s["kappa_hz"] = c.system.kappa_hz;
    s["gamma_hz"] = c.system.gamma_hz;
    s["delta_hz"] = c.system.delta_hz;
    const auto p = resolve_system(c.system);
    s["g_hz"] = angular_to_hz(p.coupling_g);
    if (c.system.eta) s["eta"] = *c.system.eta;
    if (c.system.omega0_hz) s["omega0_hz"] = *c.system.omega0_hz;
    j["system"] = s;
  }
  j["model"] = {{"scheme", to_string(c.model.scheme)}, {"tier", to_string(c.model.tier)}};
  j["noise"] = {{"free_space", c.noise.include_free_space},
                {"cavity_leak", c.noise.include_cavity_leak},
                {"detector_efficiency", c.noise.detector_efficiency_q}};
  j["time_grid"] = {{"start", c.time_grid.start},
                    {"stop", c.time_grid.stop},
                    {"points", c.time_grid.points},
                    {"spacing", c.time_grid.log_spaced ? "log" : "linear"}};
  json o;
  if (c.optimize.t_min) o["t_min"] = *c.optimize.t_min;
  if (c.optimize.t_max) o["t_max"] = *c.optimize.t_max;
  o["scan_delta"] = c.optimize.scan_delta;
  if (c.optimize.delta_min_hz) o["delta_min_hz"] = *c.optimize.delta_min_hz;
  if (c.optimize.delta_max_hz) o["delta_max_hz"] = *c.optimize.delta_max_hz;
  o["grid_points"] = c.optimize.grid_points;
  j["optimize"] = o;
  if (!c.scaling_points.empty()) {
    json pts = json::array();
    for (const auto& pt : c.scaling_points) pts.push_back({pt.n_atoms, pt.eta});
    j["scaling"] = {{"points", pts}};
  }
  j["oracle"] = {{"n_atoms", c.oracle.n_atoms},
                 {"coupling_hz", c.oracle.coupling_hz},
                 {"detuning_factor", c.oracle.detuning_factor},
                 {"photon_cutoff", c.oracle.photon_cutoff},
                 {"omega_t_max", c.oracle.omega_t_max},
                 {"points", c.oracle.points}};
  j["feasibility"] = {{"fsr_hz", c.feasibility.fsr_hz},
                      {"fsr_jitter_hz", c.feasibility.fsr_jitter_hz},
                      {"noise_bandwidth_hz", c.feasibility.noise_bandwidth_hz},
                      {"squeeze_time_s", c.feasibility.squeeze_time_s}};
  json out = {{"csv", c.output.csv}, {"summary", c.output.summary}};
  if (c.output.dir) out["dir"] = *c.output.dir;
  j["output"] = out;
  return j;
}

}  // namespace vacuumsq

#endif  // VACUUMSQ_CONFIG_HPP
