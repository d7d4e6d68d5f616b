#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "vacuumsq/optimize.hpp"

using namespace vacuumsq;

namespace {

SystemParams yb_cavity(double eta = 10.0, double delta_hz = 11.2e6) {
  SystemParams p;
  p.n_atoms = 10000;
  p.kappa = hz_to_angular(1e5);
  p.gamma = hz_to_angular(7e-3);
  p.coupling_g = coupling_from_cooperativity(eta, p.gamma, p.kappa);
  p.delta = hz_to_angular(delta_hz);
  return p;
}

}  // namespace

TEST(Optimize, GoldenSectionParabola) {
  const auto r = golden_section_minimize([](double x) { return (x - 1.3) * (x - 1.3) + 2.0; },
                                         -5.0, 5.0, 1e-10);
  EXPECT_NEAR(r.x, 1.3, 1e-7);  // sqrt(eps) floor near a flat minimum
  EXPECT_NEAR(r.fx, 2.0, 1e-14);
}

TEST(Optimize, TimeGrid) {
  const auto lin = make_time_grid(0.0, 1.0, 5, false);
  EXPECT_EQ(lin, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  const auto lg = make_time_grid(1e-3, 10.0, 5, true);
  EXPECT_DOUBLE_EQ(lg.front(), 1e-3);
  EXPECT_DOUBLE_EQ(lg.back(), 10.0);
  EXPECT_NEAR(lg[2], 0.1, 1e-15);
  EXPECT_THROW(make_time_grid(0.0, 1.0, 5, true), Error);
  EXPECT_THROW(make_time_grid(1.0, 1.0, 5, false), Error);
}

TEST(Optimize, YbCavityOptimalTime) {
  // scipy bounded search reference
  TimeSearchOptions o;
  o.t_min = 1e-3;
  o.t_max = 10.0;
  const auto r = optimal_time(yb_cavity(), NoiseModel::both(), {Scheme::oat, Tier::analytic}, o);
  EXPECT_NEAR(r.t_opt, 0.4713976275965351, 1e-3 * 0.47);
  // t is located to 1e-3 relative, so xi_min is good to ~1e-8
  EXPECT_NEAR(r.xi_min, 0.12344456538662479, 1e-7);
  EXPECT_FALSE(r.at_boundary);
  EXPECT_EQ(r.model.label(), "oat/analytic");
}

TEST(Optimize, YbCavityEtaOne) {
  const auto r = optimal_time(yb_cavity(1.0, 3.5e6), NoiseModel::both(), {Scheme::oat, Tier::analytic});
  EXPECT_NEAR(r.t_opt, 0.9560955726029674, 1e-3);
  EXPECT_NEAR(r.xi_min, 0.25255127488490888, 1e-7);
}

TEST(Optimize, DetuningWithDetectorEfficiency) {
  // Nelder-Mead joint optimum, unsaturated branch
  DetuningSearchOptions o;
  o.delta_min = hz_to_angular(1e5);
  o.delta_max = hz_to_angular(1e9);
  const auto r0 = optimal_detuning(yb_cavity(), NoiseModel::both(0.0), {Scheme::oat, Tier::analytic}, o);
  EXPECT_NEAR(angular_to_hz(*r0.delta_opt) / 11298096.066035097, 1.0, 2e-3);
  EXPECT_NEAR(r0.xi_min, 0.12344173930470945, 1e-7);
  const auto r9 = optimal_detuning(yb_cavity(), NoiseModel::both(0.9), {Scheme::oat, Tier::analytic}, o);
  EXPECT_NEAR(angular_to_hz(*r9.delta_opt) / 3553011.2460566973, 1.0, 2e-3);
  EXPECT_NEAR(r9.xi_min, 0.0587270175082955, 1e-7);
  EXPECT_FALSE(r9.delta_at_boundary);
}

TEST(Optimize, DickeTierAgreesWithAnalyticForOneAxis) {
  auto p = yb_cavity();
  p.n_atoms = 200;
  const NoiseModel noise = NoiseModel::both();
  const auto a = optimal_time(p, noise, {Scheme::oat, Tier::analytic});
  const auto d = optimal_time(p, noise, {Scheme::oat, Tier::dicke});
  EXPECT_NEAR(d.xi_min, a.xi_min, 1e-8);
  EXPECT_NEAR(d.t_opt / a.t_opt, 1.0, 2e-3);
}

TEST(Optimize, TraceIsDeterministic) {
  const auto times = make_time_grid(1e-3, 10.0, 50, true);
  const auto a = squeezing_trace(yb_cavity(), NoiseModel::both(), {Scheme::oat, Tier::analytic}, times);
  const auto b = squeezing_trace(yb_cavity(), NoiseModel::both(), {Scheme::oat, Tier::analytic}, times);
  ASSERT_EQ(a.samples.size(), 50u);
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i].xi_total, b.samples[i].xi_total);
}

TEST(Optimize, LineFit) {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto [slope, icpt] = fit_line(x, y);
  EXPECT_DOUBLE_EQ(slope, 2.0);
  EXPECT_DOUBLE_EQ(icpt, 1.0);
}

TEST(Optimize, ScalingScanThreadsAgree) {
  const std::vector<ScalingPoint> pts{{1000, 1.0}, {1000, 10.0}, {10000, 10.0}};
  DetuningSearchOptions o;
  o.delta_min = hz_to_angular(1e4);
  o.delta_max = hz_to_angular(1e10);
  const double kappa = hz_to_angular(1e5), gamma = hz_to_angular(7e-3);
  const ModelSpec m{Scheme::oat, Tier::analytic};
  const auto one = scaling_scan(pts, kappa, gamma, NoiseModel::both(), m, o, 1);
  const auto three = scaling_scan(pts, kappa, gamma, NoiseModel::both(), m, o, 3);
  ASSERT_EQ(one.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(one.rows[i].optimum.xi_min, three.rows[i].optimum.xi_min);
  EXPECT_NEAR(one.slope, -1.0 / 3.0, 0.05);
  const std::vector<ScalingPoint> narrow{{1000, 1.0}, {1000, 2.0}, {1000, 3.0}};
  EXPECT_THROW(scaling_scan(narrow, kappa, gamma, NoiseModel::both(), m, o), Error);
}

TEST(Optimize, FeasibilityArithmetic) {
  FeasibilityParams f;
  f.fsr = hz_to_angular(5e9);
  f.fsr_jitter = hz_to_angular(1e6);
  f.noise_bandwidth = 1e4;
  f.squeeze_time = 0.073;
  const auto r = feasibility_report(yb_cavity(10.0, 11e6), f);
  EXPECT_NEAR(r.squeeze_phase_rel_error, 0.003364696409989115, 1e-15);
  EXPECT_NEAR(r.suppression_factor, 1.76e-6, 1e-18);
  EXPECT_NEAR(r.omega_twist_hz, 0.00015909090909090907, 1e-17);
  EXPECT_FALSE(r.fractional_accuracy.has_value());
}
