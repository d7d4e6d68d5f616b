// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Each check runs the library directly with the reference
// parameter sets and reports the measured values next to the targets.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "vacuumsq/vacuumsq.hpp"

using namespace vacuumsq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;  // runtime limit, 0 when none
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SystemParams yb_cavity(double eta = 10.0, double delta_hz = 11.2e6, int n = 10000) {
  SystemParams p;
  p.n_atoms = n;
  p.kappa = hz_to_angular(1e5);
  p.gamma = hz_to_angular(7e-3);
  p.coupling_g = coupling_from_cooperativity(eta, p.gamma, p.kappa);
  p.delta = hz_to_angular(delta_hz);
  return p;
}

double round_sig(double v, int digits) {
  if (v == 0.0) return 0.0;
  const double scale = std::pow(10.0, digits - 1 - std::floor(std::log10(std::abs(v))));
  return std::round(v * scale) / scale;
}

Outcome one_axis_reference() {
  TimeSearchOptions o;
  o.t_min = 1e-3;
  o.t_max = 10.0;
  const auto r = optimal_time(yb_cavity(), NoiseModel::both(), {Scheme::oat, Tier::analytic}, o);
  const bool db_ok = std::abs(r.xi_min_db - (-9.0)) <= 0.4;
  const bool t_ok = std::abs(r.t_opt / 0.46 - 1.0) <= 0.15;
  return {db_ok && t_ok, "xi_min = " + fmt("%.3f dB", r.xi_min_db) + " (target -9.0 +/- 0.4) at t = " +
                             fmt("%.4f s", r.t_opt) + " (target 0.46 s +/- 15%)"};
}

Outcome two_axis_reference() {
  // Exact Dicke evolution under Omega S Sx + Omega Sz^2 with the additive
  // noise variances, propagated once along a grid ending at t = 1 s.
  const auto p = yb_cavity();
  const auto d = derive_params(p);
  const TatPropagator prop(p.n_atoms, d.omega_twist);
  const auto times = make_time_grid(0.0, 1.0, 21, false);
  double xi_end = 0.0, xi_best = 1e300, t_best = 0.0;
  for_each_tat_time(prop, css(p.n_atoms), times, [&](std::size_t k, const DickeState& s) {
    if (times[k] == 0.0) return;
    const double xi = squeezing_parameter(apply_noise(moments(s), p, times[k], NoiseModel::both()));
    if (xi < xi_best) xi_best = xi, t_best = times[k];
    if (k + 1 == times.size()) xi_end = xi;
  });
  const double db = to_db(xi_end);
  const double linear = to_db(xi_tat_bosonic_total(p, 1.0, NoiseModel::both()));
  return {std::abs(db - (-17.4)) <= 1.0,
          "dicke tier xi(1 s) = " + fmt("%.2f dB", db) + " (target -17.4 +/- 1); grid best " +
              fmt("%.2f dB", to_db(xi_best)) + fmt(" at %.2f s", t_best) +
              "; linearized model with continuously injected noise gives " + fmt("%.2f dB", linear)};
}

Outcome scaling_law() {
  const std::vector<ScalingPoint> pts{{10000, 0.1}, {10000, 1.0}, {10000, 10.0}};
  DetuningSearchOptions o;
  o.delta_min = hz_to_angular(1e4);
  o.delta_max = hz_to_angular(1e10);
  const auto t = scaling_scan(pts, hz_to_angular(1e5), hz_to_angular(7e-3), NoiseModel::both(),
                              {Scheme::oat, Tier::analytic}, o);
  bool bounds_exact = true;
  double ratio_lo = 1e300, ratio_hi = 0.0;
  for (const auto& r : t.rows) {
    const double ne = r.n_atoms * r.eta;
    bounds_exact = bounds_exact && r.bound == 6.0 * std::cbrt(1.0 / ne) &&
                   r.bound == xi_bound(r.n_atoms, r.eta);
    ratio_lo = std::min(ratio_lo, r.optimum.xi_min / r.bound);
    ratio_hi = std::max(ratio_hi, r.optimum.xi_min / r.bound);
  }
  const bool slope_ok = std::abs(t.slope - (-1.0 / 3.0)) <= 0.05;
  return {slope_ok && bounds_exact,
          "slope = " + fmt("%.4f", t.slope) + " (target -0.333 +/- 0.05); bounds exact: " +
              (bounds_exact ? "yes" : "no") + "; xi_min/bound in [" + fmt("%.3f", ratio_lo) + ", " +
              fmt("%.3f]", ratio_hi)};
}

Outcome detector_gain() {
  DetuningSearchOptions o;
  o.delta_min = hz_to_angular(1e5);
  o.delta_max = hz_to_angular(1e9);
  const ModelSpec m{Scheme::oat, Tier::analytic};
  const auto base = optimal_detuning(yb_cavity(), NoiseModel::both(0.0), m, o);
  const auto eff = optimal_detuning(yb_cavity(), NoiseModel::both(0.9), m, o);
  const double gain = base.xi_min_db - eff.xi_min_db;
  const auto fixed = optimal_time(yb_cavity(), NoiseModel::both(0.9), m);
  const auto fixed0 = optimal_time(yb_cavity(), NoiseModel::both(0.0), m);
  return {std::abs(gain - 3.0) <= 0.5,
          "gain = " + fmt("%.3f dB", gain) + " (target 3.0 +/- 0.5) with detuning re-optimized: " +
              fmt("%.3f", angular_to_hz(*base.delta_opt) / 1e6) + " -> " +
              fmt("%.3f MHz", angular_to_hz(*eff.delta_opt) / 1e6) + "; at fixed 11.2 MHz the gain is " +
              fmt("%.3f dB", fixed0.xi_min_db - fixed.xi_min_db)};
}

Outcome analytic_vs_numeric() {
  double worst_small = 0.0;
  for (int n : {2, 3, 5, 10, 50, 200}) {
    DerivedParams d;
    d.spin_S = 0.5 * n;
    d.omega_twist = 1.0;
    for (double wt : make_time_grid(0.0, 0.5, 101, false)) {
      const double ana = xi_unitary(d, wt).xi;
      const double num = xi_numeric(evolve_oat(css(n), 1.0, wt));
      worst_small = std::max(worst_small, std::abs(ana - num) / std::max(1.0, ana));
    }
  }
  double worst_big = 0.0;
  DerivedParams d;
  d.spin_S = 5000.0;
  d.omega_twist = 1.0;
  auto grid = make_time_grid(1e-6, 0.5, 60, true);
  for (double wt : make_time_grid(0.0, 0.5, 11, false)) grid.push_back(wt);
  const auto init = css(10000);
  for (double wt : grid) {
    const double ana = xi_unitary(d, wt).xi;
    const double num = xi_numeric(evolve_oat(init, 1.0, wt));
    worst_big = std::max(worst_big, std::abs(ana - num) / ana);
  }
  return {worst_small <= 1e-10 && worst_big <= 1e-6,
          "max |dxi|/max(1,xi) over N<=200 = " + fmt("%.2e", worst_small) +
              " (limit 1e-10); N=10^4 max relative = " + fmt("%.2e", worst_big) + " (limit 1e-6)"};
}

Outcome oracle_shift() {
  bool pass = true;
  std::string detail;
  for (int n : {2, 4, 8}) {
    auto make = [n](double factor) {
      TCConfig c;
      c.params.n_atoms = n;
      c.params.coupling_g = hz_to_angular(1.0);
      c.params.delta = factor * c.params.coupling_g * std::sqrt(static_cast<double>(n));
      return c;
    };
    const auto a = light_shift_table(make(200.0));
    const auto b = light_shift_table(make(400.0));
    double worst_a = 0.0, worst_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      worst_a = std::max(worst_a, std::abs(a[i].relative_error));
      worst_b = std::max(worst_b, std::abs(b[i].relative_error));
    }
    const double ratio = worst_a / worst_b;
    const bool edge = a.front().exact == 0.0 && b.front().exact == 0.0;
    pass = pass && worst_a <= 1e-3 && std::abs(ratio / 4.0 - 1.0) <= 0.2 && edge;
    detail += "N=" + std::to_string(n) + ": max rel err " + fmt("%.2e", worst_a) + ", doubling ratio " +
              fmt("%.3f", ratio) + ", edge shift " + (edge ? "0" : "nonzero") + "; ";
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

Outcome bosonic_limit() {
  // Linearized variance (S/2) exp(-2 S Omega t); compared over the collective
  // twisting angle S Omega t <= 0.3.
  const int n = 1000;
  DerivedParams d;
  d.spin_S = 500.0;
  d.omega_twist = 1.0;
  const TatPropagator prop(n, d.omega_twist);
  double worst = 0.0;
  const auto grid = make_time_grid(0.0, 0.3 / d.spin_S, 31, false);
  for_each_tat_time(prop, css(n), grid, [&](std::size_t k, const DickeState& s) {
    const double v = moments(s).min_transverse_var;
    worst = std::max(worst, std::abs(v / tat_variance_bosonic(d, grid[k]) - 1.0));
  });
  const double literal = std::exp(-2.0 * 0.3);
  const double at_literal = moments(prop.apply(css(n), 0.3)).min_transverse_var / (0.5 * d.spin_S);
  return {worst <= 0.10, "max relative deviation = " + fmt("%.4f", worst) +
                             " (limit 0.10) for S Omega t <= 0.3; read as Omega t = 0.3 the state gives xi = " +
                             fmt("%.3g", at_literal) + " vs exp(-0.6) = " + fmt("%.3f", literal)};
}

Outcome feasibility() {
  auto p = yb_cavity(10.0, 11e6);
  p.omega0 = hz_to_angular(518e12);
  FeasibilityParams f;
  f.fsr = hz_to_angular(5e9);
  f.fsr_jitter = hz_to_angular(1e6);
  f.noise_bandwidth = 1e4;
  f.squeeze_time = 0.073;
  const auto r = feasibility_report(p, f);
  const double a = round_sig(r.squeeze_phase_rel_error, 2);
  const double b = round_sig(r.suppression_factor, 2);
  const double c = round_sig(r.omega_twist_hz * 1e3, 2);
  const bool ok_a = std::abs(a - 0.0040) < 1e-12;
  const bool ok_b = std::abs(b - 2.0e-6) < 1e-18;
  const bool ok_c = std::abs(c - 0.16) < 1e-12;
  return {ok_a && ok_b && ok_c,
          "phase error " + fmt("%.5f", r.squeeze_phase_rel_error) + " -> " + fmt("%.2g", a) +
              (ok_a ? " ok" : " != 0.0040") + "; suppression " + fmt("%.4g", r.suppression_factor) + " -> " +
              fmt("%.2g", b) + (ok_b ? " ok" : " != 2.0e-06") + "; Omega/2pi " +
              fmt("%.4f mHz", r.omega_twist_hz * 1e3) + " -> " + fmt("%.2g", c) + (ok_c ? " ok" : " != 0.16")};
}

Outcome conservation() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> n_dist(2, 2000);
  std::uniform_real_distribution<double> w_dist(0.1, 3.0), a_dist(0.0, 2.0), sign(-1.0, 1.0);
  double worst_norm = 0.0, worst_spin = 0.0, worst_varz = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = n_dist(rng);
    const double S = 0.5 * n;
    const double w = (sign(rng) < 0 ? -1.0 : 1.0) * w_dist(rng);
    const double t = a_dist(rng) / (S * std::abs(w));
    for (const auto& s : {evolve_oat(css(n), w, t), evolve_tat(css(n), w, t)}) {
      const auto m = moments(s);
      worst_norm = std::max(worst_norm, std::abs(std::sqrt(s.norm_squared()) - 1.0));
      worst_spin = std::max(worst_spin, std::abs(m.total_spin_squared() / (S * (S + 1.0)) - 1.0));
    }
    const auto oat = moments(evolve_oat(css(n), w, t));
    worst_varz = std::max(worst_varz, std::abs(oat.var_z / (0.5 * S) - 1.0));
  }
  return {worst_norm <= 1e-12 && worst_spin <= 1e-9 && worst_varz <= 1e-9,
          "100 draws: norm drift " + fmt("%.1e", worst_norm) + " (limit 1e-12), S(S+1) relative " +
              fmt("%.1e", worst_spin) + " (limit 1e-9), OAT var_z relative " + fmt("%.1e", worst_varz) +
              " (limit 1e-9)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "one-axis twisting optimum, eta = 10", 1.0, one_axis_reference},
      {2, "two-axis twisting at t = 1 s, Dicke tier", 600.0, two_axis_reference},
      {3, "cooperativity scaling law", 0.0, scaling_law},
      {4, "detector efficiency q = 0.9 gain", 0.0, detector_gain},
      {5, "closed form vs Dicke evolution", 30.0, analytic_vs_numeric},
      {6, "vacuum light shift vs cavity model", 5.0, oracle_shift},
      {7, "linearized two-axis variance, N = 1000", 0.0, bosonic_limit},
      {8, "robustness arithmetic to 2 significant figures", 0.0, feasibility},
      {9, "conservation laws, randomized", 0.0, conservation},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = o.pass;
    std::string timing = fmt("%.3f s", secs);
    if (c.budget_s > 0.0) {
      timing += fmt(" (budget %.0f s)", c.budget_s);
      if (secs > c.budget_s) pass = false, timing += " over budget";
    }
    std::printf("[%s] criterion %d: %s: %s; %s\n", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
