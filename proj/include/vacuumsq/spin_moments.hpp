#ifndef VACUUMSQ_SPIN_MOMENTS_HPP
#define VACUUMSQ_SPIN_MOMENTS_HPP

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "vacuumsq/core.hpp"

namespace vacuumsq {

/// First and second moments of the collective spin.
///
/// Covariances are symmetrized: cov_ab = <{S_a, S_b}>/2 - <S_a><S_b>.
/// min_transverse_var and optimal_angle are NaN until filled by
/// with_transverse_minimum().
struct SpinMoments {
  double spin_S = 0.5;
  double mean_x = 0.0, mean_y = 0.0, mean_z = 0.0;
  double var_x = 0.0, var_y = 0.0, var_z = 0.0;
  double cov_xy = 0.0, cov_yz = 0.0, cov_zx = 0.0;
  double min_transverse_var = std::numeric_limits<double>::quiet_NaN();
  double optimal_angle = std::numeric_limits<double>::quiet_NaN();

  /// <Sz Sy + Sy Sz> - 2 <Sz><Sy>
  double cross_zy() const noexcept { return 2.0 * cov_yz; }

  /// <S^2> = sum of the second raw moments.
  double total_spin_squared() const noexcept {
    return var_x + var_y + var_z + mean_x * mean_x + mean_y * mean_y +
           mean_z * mean_z;
  }

  double mean_length() const noexcept {
    return std::sqrt(mean_x * mean_x + mean_y * mean_y + mean_z * mean_z);
  }

  std::array<std::array<double, 3>, 3> covariance() const noexcept {
    return {{{var_x, cov_xy, cov_zx}, {cov_xy, var_y, cov_yz}, {cov_zx, cov_yz, var_z}}};
  }
};

struct TransverseMinimum {
  double variance = 0.0;
  double angle = 0.0;  // radians, see min_transverse_variance()
};

namespace detail {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline double quadratic_form(const std::array<std::array<double, 3>, 3>& c,
                             const Vec3& u, const Vec3& v) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += u[i] * c[i][j] * v[j];
  return s;
}

// Relative spread below which the transverse noise counts as isotropic.
inline constexpr double isotropy_tolerance = 1e-12;

}  // namespace detail

/// Orthonormal basis (e1, e2) of the plane orthogonal to the mean spin n.
///
/// e1 is the normalized projection of z onto the plane (x if n is along z),
/// e2 = e1 x n. For a mean spin along +x this is e1 = z, e2 = y.
///
/// Once twisting has wound the mean spin down to |<S>| <= 1e-9 S its direction
/// is roundoff, so n falls back to +x, the polarization of the initial
/// coherent state (and the symmetry axis of the twisted states).
inline detail::Vec3 mean_direction(const SpinMoments& m) {
  const double len = m.mean_length();
  if (!(len > 1e-9 * m.spin_S)) return {1.0, 0.0, 0.0};
  return {m.mean_x / len, m.mean_y / len, m.mean_z / len};
}

inline std::array<detail::Vec3, 2> transverse_basis(const SpinMoments& m) {
  if (!(m.spin_S > 0.0)) fail(ErrorKind::numerics, "spin length must be positive");
  const detail::Vec3 n = mean_direction(m);
  detail::Vec3 ref{0.0, 0.0, 1.0};
  if (std::abs(n[2]) > 1.0 - 1e-12) ref = {1.0, 0.0, 0.0};
  const double proj = detail::dot(ref, n);
  detail::Vec3 e1{ref[0] - proj * n[0], ref[1] - proj * n[1], ref[2] - proj * n[2]};
  const double l1 = std::sqrt(detail::dot(e1, e1));
  for (double& c : e1) c /= l1;
  return {e1, detail::cross(e1, n)};
}

/// Smallest variance over directions orthogonal to the mean spin.
///
/// The angle is measured from e1 towards e2 of transverse_basis() and lies in
/// (-pi/2, pi/2]; for a mean spin along +x it runs from z towards y. An
/// isotropic transverse distribution reports angle 0.
inline TransverseMinimum min_transverse_variance(const SpinMoments& m) {
  const auto [e1, e2] = transverse_basis(m);
  const auto c = m.covariance();
  const double a = detail::quadratic_form(c, e1, e1);
  const double b = detail::quadratic_form(c, e2, e2);
  const double off = detail::quadratic_form(c, e1, e2);
  const double radius = std::hypot(0.5 * (a - b), off);
  const double mean = 0.5 * (a + b);
  const double lmax = mean + radius;
  // ab - off^2 = lmin * lmax; avoids cancellation when lmin << lmax.
  const double lmin = lmax > 0.0 ? (a * b - off * off) / lmax : mean - radius;
  double angle = 0.0;
  if (radius > detail::isotropy_tolerance * std::abs(mean)) {
    angle = 0.5 * std::atan2(-2.0 * off, b - a);
    if (angle <= -0.5 * std::numbers::pi) angle += std::numbers::pi;
  }
  return {lmin, angle};
}

inline SpinMoments with_transverse_minimum(SpinMoments m) {
  const auto tm = min_transverse_variance(m);
  m.min_transverse_var = tm.variance;
  m.optimal_angle = tm.angle;
  return m;
}

/// Kitagawa-Ueda squeezing parameter: minimal transverse variance over S/2.
inline double squeezing_parameter(const SpinMoments& m) {
  return min_transverse_variance(m).variance / (0.5 * m.spin_S);
}

/// Wineland (metrological) parameter 2S * var_min / |<S>|^2.
inline double wineland_parameter(const SpinMoments& m) {
  const double len = m.mean_length();
  return 2.0 * m.spin_S * min_transverse_variance(m).variance / (len * len);
}

}  // namespace vacuumsq

#endif  // VACUUMSQ_SPIN_MOMENTS_HPP
