#ifndef VACUUMSQ_PIPELINE_HPP
#define VACUUMSQ_PIPELINE_HPP

// Command implementations behind the vacuumsq CLI. Each command returns the
// artifacts it produces as (file name, contents) pairs; writing them is the
// caller's job.

#include <cmath>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vacuumsq/config.hpp"
#include "vacuumsq/io.hpp"
#include "vacuumsq/optimize.hpp"
#include "vacuumsq/oracle.hpp"

namespace vacuumsq {

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
  json summary;
};

inline constexpr const char* angle_convention =
    "angle_rad: squeezed quadrature measured in the plane transverse to the mean spin, "
    "from the projection of +z towards (that direction) x (mean spin); for a mean spin "
    "along +x this runs from +z towards +y";

inline std::string noise_treatment(const ModelSpec& m) {
  if (m.scheme == Scheme::oat)
    return "additive S_z variances (free-space binomial, cavity-leak shot noise) added "
           "isotropically to the transverse variance at the final time";
  if (m.tier == Tier::analytic)
    return "linearized two-axis twisting; noise injected continuously and contracted by "
           "the subsequent squeezing";
  return "exact Dicke-ladder two-axis twisting; additive variances applied at the final "
         "time with the same formulas as one-axis twisting";
}

inline json derived_json(const SystemParams& p) {
  const auto d = derive_params(p);
  json j = {{"spin_S", d.spin_S},
            {"eta", std::isfinite(d.eta) ? json(d.eta) : json("inf")},
            {"omega_twist_rad_s", d.omega_twist},
            {"omega_twist_hz", angular_to_hz(d.omega_twist)},
            {"g_hz", angular_to_hz(p.coupling_g)},
            {"g_sqrt_n_hz", angular_to_hz(p.coupling_g * std::sqrt(p.n_atoms))},
            {"regime_ok", p.regime_ok()}};
  return j;
}

inline json optimum_json(const OptimizationResult& r) {
  json j = {{"t_opt_s", r.t_opt},
            {"xi_min", r.xi_min},
            {"xi_min_db", r.xi_min_db},
            {"model_tier", r.model.label()},
            {"t_bracket_s", {r.t_lo, r.t_hi}},
            {"rel_tolerance", r.rel_tolerance},
            {"at_boundary", r.at_boundary},
            {"evaluations", r.evaluations}};
  if (r.delta_opt) {
    j["delta_opt_hz"] = angular_to_hz(*r.delta_opt);
    j["delta_bracket_hz"] = {angular_to_hz(r.delta_lo), angular_to_hz(r.delta_hi)};
    j["delta_at_boundary"] = r.delta_at_boundary;
  }
  return j;
}

inline json bound_json(const SystemParams& p, const NoiseModel& noise) {
  const auto d = derive_params(p);
  if (!std::isfinite(d.eta)) return nullptr;
  const double b = xi_bound(p.n_atoms, d.eta, noise.include_cavity_leak ? noise.detector_efficiency_q : 0.0);
  return {{"xi", b}, {"db", to_db(b)}};
}

inline std::string trace_csv(const SqueezingTrace& trace) {
  std::string out = "t_seconds,xi_unitary,xi_total,xi_db,xi_db_3dp,mean_x,var_min,angle_rad,model_tier\n";
  const std::string tier = trace.model.label();
  for (const auto& s : trace.samples) {
    const double db = to_db(s.xi_total);
    out += format_double(s.t) + ',' + format_double(s.xi_unitary) + ',' +
           format_double(s.xi_total) + ',' + format_double(db) + ',' + format_fixed(db, 3) +
           ',' + format_double(s.mean_x) + ',' + format_double(s.var_min) + ',' +
           format_double(s.angle) + ',' + tier + '\n';
  }
  return out;
}

inline TimeSearchOptions time_options(const RunConfig& c) {
  TimeSearchOptions o;
  o.t_min = c.optimize.t_min;
  o.t_max = c.optimize.t_max;
  o.grid_points = c.optimize.grid_points;
  return o;
}

inline Artifacts run_evolve(const RunConfig& c) {
  const auto p = resolve_system(c.system);
  const auto times = make_time_grid(c.time_grid.start, c.time_grid.stop, c.time_grid.points,
                                    c.time_grid.log_spaced);
  const auto trace = squeezing_trace(p, c.noise, c.model, times);
  Artifacts a;
  a.files.emplace_back(c.output.csv, trace_csv(trace));

  const auto best = std::min_element(
      trace.samples.begin(), trace.samples.end(),
      [](const auto& x, const auto& y) { return x.xi_total < y.xi_total; });
  TimeSearchOptions topt = time_options(c);
  topt.t_min = topt.t_min.value_or(times.front() > 0.0 ? times.front() : times[1]);
  topt.t_max = topt.t_max.value_or(times.back());
  const auto opt = optimal_time(p, c.noise, c.model, topt);

  a.summary = {{"command", "evolve"},
               {"config", to_json(c)},
               {"derived", derived_json(p)},
               {"model", {{"tier", c.model.label()}, {"noise_treatment", noise_treatment(c.model)}}},
               {"grid_minimum",
                {{"t_s", best->t}, {"xi", best->xi_total}, {"xi_db", to_db(best->xi_total)}}},
               {"optimum", optimum_json(opt)},
               {"bound", bound_json(p, c.noise)},
               {"angle_convention", angle_convention}};
  if (c.model.tier == Tier::dicke || c.model.scheme == Scheme::oat) {
    // Wineland parameter at the optimum, auxiliary to the Kitagawa-Ueda xi.
    SpinMoments m;
    const auto d = derive_params(p);
    if (c.model.scheme == Scheme::oat) {
      m = apply_noise(oat_moments(d, opt.t_opt), p, opt.t_opt, c.noise);
    } else {
      const auto s = evolve_tat(css(p.n_atoms), d.omega_twist, opt.t_opt);
      m = apply_noise(moments(s), p, opt.t_opt, c.noise);
    }
    a.summary["optimum"]["wineland_xi"] = wineland_parameter(m);
  }
  a.files.emplace_back(c.output.summary, a.summary.dump(2) + "\n");
  return a;
}

inline Artifacts run_optimize(const RunConfig& c) {
  const auto p = resolve_system(c.system);
  OptimizationResult r;
  if (c.optimize.scan_delta) {
    DetuningSearchOptions o;
    o.time = time_options(c);
    if (c.optimize.delta_min_hz) o.delta_min = hz_to_angular(*c.optimize.delta_min_hz);
    if (c.optimize.delta_max_hz) o.delta_max = hz_to_angular(*c.optimize.delta_max_hz);
    r = optimal_detuning(p, c.noise, c.model, o);
  } else {
    r = optimal_time(p, c.noise, c.model, time_options(c));
  }
  Artifacts a;
  a.summary = {{"command", "optimize"},
               {"config", to_json(c)},
               {"derived", derived_json(p)},
               {"model", {{"tier", c.model.label()}, {"noise_treatment", noise_treatment(c.model)}}},
               {"optimum", optimum_json(r)},
               {"bound", bound_json(p, c.noise)}};
  a.files.emplace_back(c.output.summary, a.summary.dump(2) + "\n");
  return a;
}

inline Artifacts run_scaling(const RunConfig& c, unsigned threads = 1) {
  if (c.scaling_points.empty()) fail(ErrorKind::config, "scaling.points is required");
  if (c.system.n_atoms == 0) fail(ErrorKind::config, "system section is required (kappa_hz, gamma_hz)");
  const double kappa = hz_to_angular(c.system.kappa_hz);
  const double gamma = hz_to_angular(c.system.gamma_hz);
  DetuningSearchOptions o;
  o.time = time_options(c);
  if (c.optimize.delta_min_hz) o.delta_min = hz_to_angular(*c.optimize.delta_min_hz);
  if (c.optimize.delta_max_hz) o.delta_max = hz_to_angular(*c.optimize.delta_max_hz);
  for (const auto& pt : c.scaling_points)
    if (pt.n_atoms < 1 || !(pt.eta > 0.0))
      fail(ErrorKind::physics, "scaling points need N >= 1 and eta > 0");
  const auto table = scaling_scan(c.scaling_points, kappa, gamma, c.noise, c.model, o, threads);

  std::string csv = "n_atoms,eta,n_eta,g_hz,delta_opt_hz,t_opt_s,xi_min,xi_min_db,bound,bound_db,model_tier\n";
  json rows = json::array();
  for (const auto& r : table.rows) {
    csv += std::to_string(r.n_atoms) + ',' + format_double(r.eta) + ',' +
           format_double(r.n_atoms * r.eta) + ',' + format_double(angular_to_hz(r.coupling_g)) +
           ',' + format_double(angular_to_hz(*r.optimum.delta_opt)) + ',' +
           format_double(r.optimum.t_opt) + ',' + format_double(r.optimum.xi_min) + ',' +
           format_double(r.optimum.xi_min_db) + ',' + format_double(r.bound) + ',' +
           format_double(to_db(r.bound)) + ',' + table.model.label() + '\n';
    rows.push_back({{"n_atoms", r.n_atoms}, {"eta", r.eta}, {"optimum", optimum_json(r.optimum)},
                    {"bound", r.bound}});
  }
  Artifacts a;
  a.files.emplace_back("scaling.csv", csv);
  a.summary = {{"command", "scaling"},
               {"config", to_json(c)},
               {"model", {{"tier", c.model.label()}, {"noise_treatment", noise_treatment(c.model)}}},
               {"rows", rows},
               {"fitted_slope", table.slope},
               {"fitted_intercept", table.intercept}};
  a.files.emplace_back(c.output.summary, a.summary.dump(2) + "\n");
  return a;
}

struct OracleRun {
  TCConfig config;
  std::vector<LightShift> shifts;
  FullEvolution full;
  std::vector<double> xi_full;
  std::vector<double> xi_effective;
  std::vector<double> xi_closed_form;
};

inline OracleRun oracle_run(const OracleSection& s) {
  TCConfig cfg;
  cfg.photon_cutoff = s.photon_cutoff;
  cfg.params.n_atoms = s.n_atoms;
  cfg.params.coupling_g = hz_to_angular(s.coupling_hz);
  cfg.params.delta = s.detuning_factor * cfg.params.coupling_g * std::sqrt(s.n_atoms);
  cfg.validate();
  OracleRun r{cfg, light_shift_table(cfg), {}, {}, {}, {}};
  const auto d = derive_params(cfg.params);
  const auto times =
      make_time_grid(0.0, s.omega_t_max / std::abs(d.omega_twist), s.points, false);
  r.full = evolve_full(cfg, times);
  for (const auto& pt : r.full.points) {
    r.xi_full.push_back(pt.moments.min_transverse_var / (0.5 * d.spin_S));
    r.xi_effective.push_back(squeezing_parameter(effective_moments(cfg.params, pt.t)));
    r.xi_closed_form.push_back(xi_unitary(d, pt.t).xi);
  }
  return r;
}

inline Artifacts run_oracle(const RunConfig& c) {
  const auto r = oracle_run(c.oracle);
  const auto& p = r.config.params;
  const auto d = derive_params(p);
  std::string shifts = "m,exact_rad_s,perturbative_rad_s,relative_error,overlap\n";
  json table = json::array();
  double worst = 0.0;
  for (const auto& s : r.shifts) {
    shifts += format_double(s.m) + ',' + format_double(s.exact) + ',' +
              format_double(s.perturbative) + ',' + format_double(s.relative_error) + ',' +
              format_double(s.overlap) + '\n';
    table.push_back({{"m", s.m}, {"exact_rad_s", s.exact}, {"perturbative_rad_s", s.perturbative},
                     {"relative_error", s.relative_error}, {"overlap", s.overlap}});
    worst = std::max(worst, std::abs(s.relative_error));
  }
  std::string dyn = "t_seconds,omega_t,xi_full,xi_effective,xi_closed_form,rel_discrepancy,photon_number\n";
  json curve = json::array();
  double worst_dyn = 0.0;
  for (std::size_t i = 0; i < r.full.points.size(); ++i) {
    const auto& pt = r.full.points[i];
    const double disc = std::abs(r.xi_full[i] - r.xi_closed_form[i]) / r.xi_closed_form[i];
    worst_dyn = std::max(worst_dyn, disc);
    dyn += format_double(pt.t) + ',' + format_double(d.omega_twist * pt.t) + ',' +
           format_double(r.xi_full[i]) + ',' + format_double(r.xi_effective[i]) + ',' +
           format_double(r.xi_closed_form[i]) + ',' + format_double(disc) + ',' +
           format_double(pt.photon_number) + '\n';
    curve.push_back({{"t_s", pt.t}, {"xi_full", r.xi_full[i]}, {"xi_closed_form", r.xi_closed_form[i]},
                     {"rel_discrepancy", disc}, {"photon_number", pt.photon_number}});
  }
  const double small = std::pow(p.coupling_g * std::sqrt(p.n_atoms) / p.delta, 2);
  Artifacts a;
  a.summary = {{"command", "oracle"},
               {"config", to_json(c)},
               {"n_atoms", p.n_atoms},
               {"g_rad_s", p.coupling_g},
               {"delta_rad_s", p.delta},
               {"omega_twist_rad_s", d.omega_twist},
               {"expansion_parameter", small},
               {"photon_cutoff_used", r.full.photon_cutoff},
               {"max_shift_relative_error", worst},
               {"max_dynamics_discrepancy", worst_dyn},
               {"shifts", table},
               {"dynamics", curve}};
  a.files.emplace_back("oracle_shifts.csv", shifts);
  a.files.emplace_back("oracle_dynamics.csv", dyn);
  a.files.emplace_back("oracle.json", a.summary.dump(2) + "\n");
  return a;
}

inline Artifacts run_feasibility(const RunConfig& c) {
  const auto p = resolve_system(c.system);
  const auto f = resolve_feasibility(c.feasibility);
  const auto r = feasibility_report(p, f);
  Artifacts a;
  a.summary = {{"command", "feasibility"},
               {"config", to_json(c)},
               {"omega_twist_hz", r.omega_twist_hz},
               {"squeeze_phase_rel_error", r.squeeze_phase_rel_error},
               {"suppression_factor", r.suppression_factor},
               {"clock_shift_during_squeeze_rad_s", r.clock_shift_during_squeeze},
               {"clock_shift_during_squeeze_hz", angular_to_hz(r.clock_shift_during_squeeze)},
               {"clock_shift_detuned_by_half_fsr_hz",
                r.suppression_factor * angular_to_hz(r.clock_shift_during_squeeze)}};
  if (r.fractional_accuracy) a.summary["fractional_accuracy"] = *r.fractional_accuracy;
  a.files.emplace_back("feasibility.json", a.summary.dump(2) + "\n");
  return a;
}

inline Artifacts run_command(Command cmd, const RunConfig& c, unsigned threads = 1) {
  switch (cmd) {
    case Command::evolve: return run_evolve(c);
    case Command::optimize: return run_optimize(c);
    case Command::scaling: return run_scaling(c, threads);
    case Command::oracle: return run_oracle(c);
    case Command::feasibility: return run_feasibility(c);
  }
  fail(ErrorKind::config, "unknown command");
}

/// Validation without execution: derived parameters and regime flags.
inline json validate_config(const RunConfig& c) {
  json j = {{"valid", true}, {"config", to_json(c)}};
  if (c.system.n_atoms != 0) {
    const auto p = resolve_system(c.system);
    j["derived"] = derived_json(p);
    j["bound"] = bound_json(p, c.noise);
  }
  if (c.command == Command::feasibility) resolve_feasibility(c.feasibility);
  if (c.command == Command::oracle) {
    TCConfig cfg;
    cfg.photon_cutoff = c.oracle.photon_cutoff;
    cfg.params.n_atoms = c.oracle.n_atoms;
    cfg.params.coupling_g = hz_to_angular(c.oracle.coupling_hz);
    cfg.params.delta = c.oracle.detuning_factor * cfg.params.coupling_g * std::sqrt(c.oracle.n_atoms);
    cfg.validate();
  }
  return j;
}

inline void write_artifacts(const Artifacts& a, const std::filesystem::path& dir) {
  for (const auto& [name, contents] : a.files) write_file_atomic(dir / name, contents);
}

}  // namespace vacuumsq

#endif  // VACUUMSQ_PIPELINE_HPP
