#ifndef VACUUMSQ_ANALYTIC_HPP
#define VACUUMSQ_ANALYTIC_HPP

// Closed-form one-axis-twisting dynamics, the additive decoherence model,
// its small-decoherence expansion and bound, and the linearized (bosonic)
// two-axis-twisting results.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "vacuumsq/core.hpp"
#include "vacuumsq/spin_moments.hpp"

namespace vacuumsq {

/// Which decoherence channels contribute, and the photon-detection efficiency
/// used to suppress the cavity-leak channel.
struct NoiseModel {
  bool include_free_space = true;
  bool include_cavity_leak = true;
  double detector_efficiency_q = 0.0;

  static NoiseModel none() { return {false, false, 0.0}; }
  static NoiseModel both(double q = 0.0) { return {true, true, q}; }

  bool any() const noexcept { return include_free_space || include_cavity_leak; }

  void validate() const {
    if (!(detector_efficiency_q >= 0.0 && detector_efficiency_q <= 1.0))
      fail(ErrorKind::physics, "detector efficiency q must lie in [0, 1]");
  }
};

namespace detail {

inline std::int64_t twice_spin(double spin_S) {
  return static_cast<std::int64_t>(std::llround(2.0 * spin_S));
}

inline void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    fail(ErrorKind::physics, "time must be finite and >= 0");
}

}  // namespace detail

/// cos(x)^n for integer n up to ~1e5 without over/underflow.
///
/// Evaluated as sign * exp(n log|cos x|); the sign survives only for odd n.
/// cos x == 0 maps to 0 for n > 0.
inline double cos_power(double x, std::int64_t n) {
  if (n == 0) return 1.0;
  const double c = std::cos(x);
  if (c == 0.0) return n > 0 ? 0.0 : std::numeric_limits<double>::infinity();
  // log|cos x| near x = 0 via log1p(-2 sin^2(x/2)) keeps full precision.
  const double s = std::sin(0.5 * x);
  const double log_abs =
      c > 0.5 ? std::log1p(-2.0 * s * s) : std::log(std::abs(c));
  const double mag = std::exp(static_cast<double>(n) * log_abs);
  return (c < 0.0 && (n % 2 != 0)) ? -mag : mag;
}

/// The A and B coefficients of the one-axis-twisting squeezing parameter.
struct TwistCoefficients {
  double a = 0.0;  // 1 - cos^(2S-2)(2 Omega t)
  double b = 0.0;  // 4 sin(Omega t) cos^(2S-2)(Omega t)
};

inline TwistCoefficients twist_coefficients(double spin_S, double omega_t) {
  const auto n = detail::twice_spin(spin_S) - 2;
  return {1.0 - cos_power(2.0 * omega_t, n),
          4.0 * std::sin(omega_t) * cos_power(omega_t, n)};
}

struct XiResult {
  double xi = 1.0;
  double angle = 0.0;  // squeezed-quadrature angle, from z towards y
};

/// Unitary one-axis-twisting squeezing parameter (Kitagawa-Ueda convention).
inline XiResult xi_unitary(const DerivedParams& d, double t) {
  detail::require_time(t);
  if (detail::twice_spin(d.spin_S) <= 1) return {1.0, 0.0};
  const auto [a, b] = twist_coefficients(d.spin_S, d.omega_twist * t);
  const double h = std::hypot(a, b);
  // sqrt(A^2 + B^2) - A without cancellation for A > 0.
  const double gap = a > 0.0 ? b * b / (h + a) : h - a;
  XiResult r;
  r.xi = 1.0 - 0.5 * (d.spin_S - 0.5) * gap;
  r.angle = (a == 0.0 && b == 0.0) ? 0.0 : 0.5 * std::atan2(-b, a);
  return r;
}

/// Closed-form one-axis-twisting moments for the x-polarized coherent state.
inline SpinMoments oat_moments(const DerivedParams& d, double t) {
  detail::require_time(t);
  const double S = d.spin_S;
  const double wt = d.omega_twist * t;
  const auto two_s = detail::twice_spin(S);
  SpinMoments m;
  m.spin_S = S;
  m.mean_x = S * cos_power(wt, two_s - 1);
  m.var_z = 0.5 * S;
  m.var_y = 0.5 * S;
  if (two_s > 1) {
    const auto [a, b] = twist_coefficients(S, wt);
    m.var_y += 0.5 * S * (S - 0.5) * a;
    m.cov_yz = 0.25 * S * (S - 0.5) * b;
  }
  m.var_x = S * (S + 1.0) - m.var_y - m.var_z - m.mean_x * m.mean_x;
  const auto xi = xi_unitary(d, t);
  m.min_transverse_var = 0.5 * S * xi.xi;
  m.optimal_angle = xi.angle;
  return m;
}

/// Binomial S_z variance from atoms that decayed into free space.
inline double noise_var_free_space(double spin_S, double gamma, double t) {
  detail::require_time(t);
  const double e = std::exp(-gamma * t);
  return spin_S * e * -std::expm1(-gamma * t);
}

/// Dimensionless cavity-leak argument S Omega kappa t / Delta (1 - q).
inline double cavity_leak_argument(const SystemParams& p, double t, double q = 0.0) {
  const double S = 0.5 * p.n_atoms;
  const double g2 = p.coupling_g * p.coupling_g;
  return S * g2 * p.kappa * t * (1.0 - q) / (p.delta * p.delta);
}

/// Shot-noise S_z variance from photons leaking out of the cavity.
///
/// A detector of efficiency q scales the argument by (1 - q), which reproduces
/// the (1 - q) factor of the expanded form.
inline double noise_var_cavity_leak(const SystemParams& p, double t, double q = 0.0) {
  detail::require_time(t);
  const double th = std::tanh(cavity_leak_argument(p, t, q));
  return 0.5 * p.n_atoms * th * (1.0 - th);
}

/// Total additive S_z variance of the enabled channels.
inline double noise_variance(const SystemParams& p, double t, const NoiseModel& noise) {
  double v = 0.0;
  if (noise.include_free_space) v += noise_var_free_space(0.5 * p.n_atoms, p.gamma, t);
  if (noise.include_cavity_leak)
    v += noise_var_cavity_leak(p, t, noise.detector_efficiency_q);
  return v;
}

/// Squeezing parameter including the additive decoherence variances.
inline double xi_total(const SystemParams& p, double t, const NoiseModel& noise) {
  noise.validate();
  const auto d = derive_params(p);
  return xi_unitary(d, t).xi + noise_variance(p, t, noise) / (0.5 * d.spin_S);
}

/// Small-decoherence expansion: unitary, cavity-leak and free-space terms.
inline double xi_approx(const SystemParams& p, double t,
                        const NoiseModel& noise = NoiseModel::both()) {
  detail::require_time(t);
  const double S = 0.5 * p.n_atoms;
  const double g2 = p.coupling_g * p.coupling_g;
  const double d2 = p.delta * p.delta;
  double xi = d2 / (4.0 * S * S * g2 * g2 * t * t);
  if (noise.include_cavity_leak)
    xi += 2.0 * (1.0 - noise.detector_efficiency_q) * g2 * S * p.kappa * t / d2;
  if (noise.include_free_space) xi += 2.0 * p.gamma * t;
  return xi;
}

/// Lower bound 6 [N eta / (1 - q)]^(-1/3) of the expansion.
inline double xi_bound(double n_atoms, double eta, double q = 0.0) {
  if (!(n_atoms > 0.0) || !(eta > 0.0) || !(q >= 0.0 && q <= 1.0))
    fail(ErrorKind::physics, "xi_bound needs N > 0, eta > 0, q in [0, 1]");
  return 6.0 * std::cbrt((1.0 - q) / (n_atoms * eta));
}

// --- Linearized two-axis twisting -------------------------------------------
//
// Around the x-polarized state, Omega S Sx + Omega Sz^2 linearizes to
// Omega S (P^2 - Q^2)/2, so the (z - y)/sqrt(2) quadrature contracts with
// amplitude rate S |Omega| and variance rate 2 S |Omega|.

inline double tat_squeezing_rate(const DerivedParams& d) {
  return 2.0 * d.spin_S * std::abs(d.omega_twist);
}

/// Linearized minimal variance (S/2) exp(-2 S |Omega| t).
inline double tat_variance_bosonic(const DerivedParams& d, double t) {
  detail::require_time(t);
  return 0.5 * d.spin_S * std::exp(-tat_squeezing_rate(d) * t);
}

/// Time derivative of the additive noise contribution to xi.
inline double noise_xi_rate(const SystemParams& p, double t, const NoiseModel& noise) {
  double rate = 0.0;
  if (noise.include_free_space) {
    const double e = std::exp(-p.gamma * t);
    rate += 2.0 * p.gamma * e * (2.0 * e - 1.0);
  }
  if (noise.include_cavity_leak) {
    const double r = cavity_leak_argument(p, 1.0, noise.detector_efficiency_q);
    const double th = std::tanh(r * t);
    rate += 2.0 * r * (1.0 - th * th) * (1.0 - 2.0 * th);
  }
  return rate;
}

/// Linearized two-axis twisting with noise injected continuously.
///
/// Transverse noise entering at time s is contracted by the subsequent
/// squeezing, so xi(t) = exp(-lambda t) + int_0^t n'(s) exp(-lambda (t - s)) ds
/// with lambda = 2 S |Omega| and n(s) the additive noise term of xi_total.
inline double xi_tat_bosonic_total(const SystemParams& p, double t,
                                   const NoiseModel& noise) {
  detail::require_time(t);
  noise.validate();
  const auto d = derive_params(p);
  const double lambda = tat_squeezing_rate(d);
  double xi = std::exp(-lambda * t);
  if (!noise.any() || t == 0.0) return xi;

  // 5-point Gauss-Legendre on panels resolving both the kernel and the noise.
  static constexpr std::array<double, 5> nodes{
      0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
      0.9061798459386640};
  static constexpr std::array<double, 5> weights{
      0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
      0.2369268850561891, 0.2369268850561891};
  const double lo = lambda > 0.0 ? std::max(0.0, t - 40.0 / lambda) : 0.0;
  const double r_leak = cavity_leak_argument(p, 1.0, noise.detector_efficiency_q);
  const double fastest = std::max({lambda, p.gamma, r_leak});
  const double span = t - lo;
  const auto panels = static_cast<long>(
      std::clamp(std::ceil(span * fastest / 0.25), 16.0, 1.0e6));
  const double h = span / static_cast<double>(panels);
  double integral = 0.0;
  for (long k = 0; k < panels; ++k) {
    const double mid = lo + (static_cast<double>(k) + 0.5) * h;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double s = mid + 0.5 * h * nodes[j];
      integral += 0.5 * h * weights[j] * noise_xi_rate(p, s, noise) *
                  std::exp(-lambda * (t - s));
    }
  }
  return xi + integral;
}

}  // namespace vacuumsq

#endif  // VACUUMSQ_ANALYTIC_HPP
