#ifndef VACUUMSQ_OPTIMIZE_HPP
#define VACUUMSQ_OPTIMIZE_HPP

// Squeezing-time and detuning optimization, the cooperativity scaling scan,
// and the cavity-robustness arithmetic.

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "vacuumsq/analytic.hpp"
#include "vacuumsq/core.hpp"
#include "vacuumsq/dicke.hpp"

namespace vacuumsq {

enum class Scheme { oat, tat };
enum class Tier { analytic, dicke };

inline const char* to_string(Scheme s) noexcept { return s == Scheme::oat ? "oat" : "tat"; }
inline const char* to_string(Tier t) noexcept {
  return t == Tier::analytic ? "analytic" : "dicke";
}

struct ModelSpec {
  Scheme scheme = Scheme::oat;
  Tier tier = Tier::analytic;

  /// e.g. "oat/analytic"
  std::string label() const { return std::string(to_string(scheme)) + "/" + to_string(tier); }
};

struct SqueezingSample {
  double t = 0.0;
  double xi_unitary = 1.0;
  double xi_total = 1.0;
  double mean_x = 0.0;
  double var_min = 0.0;  // noise included
  double angle = 0.0;
};

struct SqueezingTrace {
  ModelSpec model;
  std::vector<SqueezingSample> samples;
};

namespace detail {

inline SqueezingSample sample_from_moments(double t, const SpinMoments& unitary,
                                           const SystemParams& p, const NoiseModel& noise) {
  const auto noisy = apply_noise(unitary, p, t, noise);
  const double half_s = 0.5 * unitary.spin_S;
  return {t, unitary.min_transverse_var / half_s, noisy.min_transverse_var / half_s,
          unitary.mean_x, noisy.min_transverse_var, noisy.optimal_angle};
}

inline SqueezingSample analytic_sample(const SystemParams& p, const NoiseModel& noise,
                                       Scheme scheme, double t) {
  const auto d = derive_params(p);
  const double half_s = 0.5 * d.spin_S;
  if (scheme == Scheme::oat) {
    const auto xu = xi_unitary(d, t);
    const double xt = xi_total(p, t, noise);
    return {t, xu.xi, xt, d.spin_S * cos_power(d.omega_twist * t, detail::twice_spin(d.spin_S) - 1),
            half_s * xt, xu.angle};
  }
  // Linearized two-axis twisting: no depletion, squeezed along (z - y)/sqrt(2).
  const double xu = tat_variance_bosonic(d, t) / half_s;
  const double xt = xi_tat_bosonic_total(p, t, noise);
  return {t, xu, xt, d.spin_S, half_s * xt, -0.25 * std::numbers::pi};
}

}  // namespace detail

/// Squeezing time series on a nondecreasing grid of times.
inline SqueezingTrace squeezing_trace(const SystemParams& p, const NoiseModel& noise,
                                      const ModelSpec& model, std::span<const double> times) {
  noise.validate();
  const auto d = derive_params(p);
  SqueezingTrace trace{model, {}};
  trace.samples.reserve(times.size());
  if (model.tier == Tier::analytic) {
    for (double t : times) trace.samples.push_back(detail::analytic_sample(p, noise, model.scheme, t));
    return trace;
  }
  const auto init = css(p.n_atoms);
  if (model.scheme == Scheme::oat) {
    for (double t : times)
      trace.samples.push_back(
          detail::sample_from_moments(t, moments(evolve_oat(init, d.omega_twist, t)), p, noise));
    return trace;
  }
  const TatPropagator prop(p.n_atoms, d.omega_twist);
  for_each_tat_time(prop, init, times, [&](std::size_t k, const DickeState& s) {
    trace.samples.push_back(detail::sample_from_moments(times[k], moments(s), p, noise));
  });
  return trace;
}

/// Grid of `points` times, linear or logarithmic.
inline std::vector<double> make_time_grid(double start, double stop, int points, bool log_spaced) {
  if (points < 2 || !(stop > start) || !(start >= 0.0))
    fail(ErrorKind::config, "time grid needs points >= 2 and stop > start >= 0");
  if (log_spaced && !(start > 0.0))
    fail(ErrorKind::config, "log-spaced time grid needs start > 0");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    g[static_cast<std::size_t>(i)] =
        log_spaced ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start)))
                   : start + f * (stop - start);
  }
  g.back() = stop;
  return g;
}

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of f on [a, b] to absolute x-tolerance.
inline GoldenResult golden_section_minimize(const std::function<double(double)>& f, double a,
                                            double b, double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  if (b < a) std::swap(a, b);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int evals = 2;
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc < fd ? GoldenResult{c, fc, evals} : GoldenResult{d, fd, evals};
}

struct OptimizationResult {
  double t_opt = 0.0;
  std::optional<double> delta_opt;  // rad/s, only when Delta was scanned
  double xi_min = 1.0;
  double xi_min_db = 0.0;
  ModelSpec model;
  double t_lo = 0.0, t_hi = 0.0;           // search bracket, s
  double delta_lo = 0.0, delta_hi = 0.0;   // rad/s, when scanned
  double rel_tolerance = 1e-3;
  bool at_boundary = false;        // minimum sits on the time-bracket edge
  bool delta_at_boundary = false;  // minimum sits on the detuning-bracket edge
  int evaluations = 0;
};

struct TimeSearchOptions {
  std::optional<double> t_min;
  std::optional<double> t_max;
  int grid_points = 200;
  double rel_tolerance = 1e-3;
};

/// Time beyond which an enabled noise variance starts to fall again
/// (half the atoms decayed, or the leak argument past atanh(1/2)). The
/// additive-variance model is not meaningful past it.
inline double noise_validity_horizon(const SystemParams& p, const NoiseModel& noise) {
  double h = std::numeric_limits<double>::infinity();
  if (noise.include_free_space && p.gamma > 0.0) h = std::min(h, std::log(2.0) / p.gamma);
  if (noise.include_cavity_leak) {
    const double r = cavity_leak_argument(p, 1.0, noise.detector_efficiency_q);
    if (r > 0.0) h = std::min(h, std::atanh(0.5) / r);
  }
  return h;
}

/// Default upper end of the time bracket.
inline double default_t_max(const SystemParams& p, const NoiseModel& noise, Scheme scheme) {
  const auto d = derive_params(p);
  double t = p.gamma > 0.0 ? 10.0 / p.gamma : std::numeric_limits<double>::infinity();
  if (noise.any()) t = std::min(t, noise_validity_horizon(p, noise));
  const double w = std::abs(d.omega_twist);
  t = std::min(t, scheme == Scheme::oat ? 1.0 / w : 20.0 / (d.spin_S * w));
  return t;
}

/// Minimizes xi_total over t: coarse log grid, then golden section on log t.
inline OptimizationResult optimal_time(const SystemParams& p, const NoiseModel& noise,
                                       const ModelSpec& model,
                                       const TimeSearchOptions& opts = {}) {
  noise.validate();
  const auto d = derive_params(p);
  const double t_hi = opts.t_max.value_or(default_t_max(p, noise, model.scheme));
  const double t_lo = opts.t_min.value_or(t_hi * 1e-7);
  if (!(t_hi > t_lo) || !(t_lo > 0.0)) fail(ErrorKind::config, "invalid time bracket");
  const auto grid = make_time_grid(t_lo, t_hi, opts.grid_points, true);

  std::function<double(double)> objective;
  std::vector<DickeState> saved;  // TAT states on the grid, for restarts
  std::optional<TatPropagator> prop;
  int evals = 0;
  std::vector<double> values(grid.size());

  if (model.tier == Tier::analytic) {
    objective = [&](double t) {
      ++evals;
      return model.scheme == Scheme::oat ? xi_total(p, t, noise)
                                         : xi_tat_bosonic_total(p, t, noise);
    };
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = objective(grid[i]);
  } else if (model.scheme == Scheme::oat) {
    const auto init = css(p.n_atoms);
    objective = [&, init](double t) {
      ++evals;
      const auto m = moments(evolve_oat(init, d.omega_twist, t));
      return squeezing_parameter(apply_noise(m, p, t, noise));
    };
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = objective(grid[i]);
  } else {
    prop.emplace(p.n_atoms, d.omega_twist);
    const auto init = css(p.n_atoms);
    for_each_tat_time(*prop, init, grid, [&](std::size_t k, const DickeState& s) {
      saved.push_back(s);
      values[k] = squeezing_parameter(apply_noise(moments(s), p, grid[k], noise));
      ++evals;
    });
    objective = [&](double t) {
      ++evals;
      const auto it = std::upper_bound(grid.begin(), grid.end(), t);
      const std::size_t k = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
      const DickeState s = t >= grid[k] ? prop->apply(saved[k], t - grid[k])
                                        : prop->apply(css(p.n_atoms), t);
      return squeezing_parameter(apply_noise(moments(s), p, t, noise));
    };
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  OptimizationResult r;
  r.model = model;
  r.t_lo = t_lo;
  r.t_hi = t_hi;
  r.rel_tolerance = opts.rel_tolerance;
  if (best == 0 || best + 1 == grid.size()) {
    r.at_boundary = true;
    r.t_opt = grid[best];
    r.xi_min = values[best];
  } else {
    const auto g = golden_section_minimize(
        [&](double lt) { return objective(std::exp(lt)); }, std::log(grid[best - 1]),
        std::log(grid[best + 1]), opts.rel_tolerance);
    r.t_opt = std::exp(g.x);
    r.xi_min = g.fx;
    if (values[best] < r.xi_min) {
      r.t_opt = grid[best];
      r.xi_min = values[best];
    }
  }
  r.xi_min_db = to_db(r.xi_min);
  r.evaluations = evals;
  return r;
}

struct DetuningSearchOptions {
  std::optional<double> delta_min;  // rad/s, default kappa
  std::optional<double> delta_max;  // rad/s, default 1e4 kappa
  int grid_points = 60;
  double rel_tolerance = 1e-4;
  TimeSearchOptions time;
};

/// Nested minimization over (Delta, t) at fixed g, kappa, Gamma, N.
inline OptimizationResult optimal_detuning(const SystemParams& base, const NoiseModel& noise,
                                           const ModelSpec& model,
                                           const DetuningSearchOptions& opts = {}) {
  const double lo = opts.delta_min.value_or(base.kappa);
  const double hi = opts.delta_max.value_or(1e4 * base.kappa);
  if (!(lo > 0.0) || !(hi > lo))
    fail(ErrorKind::config, "detuning bracket needs 0 < delta_min < delta_max");
  int evals = 0;
  const auto inner = [&](double delta) {
    SystemParams p = base;
    p.delta = delta;
    auto r = optimal_time(p, noise, model, opts.time);
    evals += r.evaluations;
    return r;
  };
  const auto grid = make_time_grid(lo, hi, opts.grid_points, true);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = inner(grid[i]).xi_min;
  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());

  double delta_best = grid[best];
  bool edge = best == 0 || best + 1 == grid.size();
  if (!edge) {
    const auto g = golden_section_minimize(
        [&](double ld) { return inner(std::exp(ld)).xi_min; }, std::log(grid[best - 1]),
        std::log(grid[best + 1]), opts.rel_tolerance);
    if (g.fx < values[best]) delta_best = std::exp(g.x);
  }
  OptimizationResult r = inner(delta_best);
  r.delta_opt = delta_best;
  r.delta_lo = lo;
  r.delta_hi = hi;
  r.delta_at_boundary = edge;
  r.evaluations = evals;
  return r;
}

struct ScalingPoint {
  int n_atoms = 1;
  double eta = 1.0;
};

struct ScalingRow {
  int n_atoms = 1;
  double eta = 1.0;
  double coupling_g = 0.0;  // rad/s
  OptimizationResult optimum;
  double bound = 0.0;  // 6 [N eta / (1 - q)]^(-1/3)
};

struct ScalingTable {
  ModelSpec model;
  double q = 0.0;
  std::vector<ScalingRow> rows;
  double slope = 0.0;  // d ln(xi_min) / d ln(N eta)
  double intercept = 0.0;
};

/// Least-squares slope and intercept of y against x.
inline std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += threads) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Optimum squeezing across (N, eta) points at fixed kappa and Gamma, with
/// the detuning optimized per point.
inline ScalingTable scaling_scan(std::span<const ScalingPoint> points, double kappa, double gamma,
                                 const NoiseModel& noise, const ModelSpec& model,
                                 const DetuningSearchOptions& opts = {}, unsigned threads = 1) {
  if (points.size() < 3) fail(ErrorKind::config, "scaling scan needs at least 3 points");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& pt : points) {
    lo = std::min(lo, pt.n_atoms * pt.eta);
    hi = std::max(hi, pt.n_atoms * pt.eta);
  }
  if (!(hi >= 100.0 * lo * (1.0 - 1e-12)))
    fail(ErrorKind::config, "scaling scan must span at least two decades of N*eta");

  ScalingTable table;
  table.model = model;
  table.q = noise.detector_efficiency_q;
  table.rows.resize(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const auto& pt = points[i];
    SystemParams p;
    p.n_atoms = pt.n_atoms;
    p.kappa = kappa;
    p.gamma = gamma;
    p.coupling_g = coupling_from_cooperativity(pt.eta, gamma, kappa);
    p.delta = kappa;  // replaced by the detuning scan
    ScalingRow row;
    row.n_atoms = pt.n_atoms;
    row.eta = pt.eta;
    row.coupling_g = p.coupling_g;
    row.optimum = optimal_detuning(p, noise, model, opts);
    row.bound = xi_bound(pt.n_atoms, pt.eta, noise.detector_efficiency_q);
    table.rows[i] = row;
  });
  std::vector<double> x, y;
  for (const auto& r : table.rows) {
    x.push_back(std::log(r.n_atoms * r.eta));
    y.push_back(std::log(r.optimum.xi_min));
  }
  std::tie(table.slope, table.intercept) = fit_line(x, y);
  return table;
}

struct FeasibilityReport {
  double omega_twist_hz = 0.0;           // Omega / 2pi
  double squeeze_phase_rel_error = 0.0;  // dnu / (Delta sqrt(f t_s))
  double suppression_factor = 0.0;       // (Delta / (nu/2)) (dnu / (nu/2))
  double clock_shift_during_squeeze = 0.0;  // |Omega|, rad/s
  std::optional<double> fractional_accuracy;  // |Omega| / omega0
};

inline FeasibilityReport feasibility_report(const SystemParams& p, const FeasibilityParams& f) {
  f.validate();
  const auto d = derive_params(p);
  const double delta = std::abs(p.delta);
  const double half_fsr = 0.5 * f.fsr;
  FeasibilityReport r;
  r.omega_twist_hz = angular_to_hz(std::abs(d.omega_twist));
  r.squeeze_phase_rel_error =
      f.fsr_jitter / (delta * std::sqrt(f.noise_bandwidth * f.squeeze_time));
  r.suppression_factor = (delta / half_fsr) * (f.fsr_jitter / half_fsr);
  r.clock_shift_during_squeeze = std::abs(d.omega_twist);
  if (p.omega0) r.fractional_accuracy = std::abs(d.omega_twist) / *p.omega0;
  return r;
}

}  // namespace vacuumsq

#endif  // VACUUMSQ_OPTIMIZE_HPP
