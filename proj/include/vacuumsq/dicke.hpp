#ifndef VACUUMSQ_DICKE_HPP
#define VACUUMSQ_DICKE_HPP

// Exact collective-spin evolution on the symmetric (Dicke) ladder
// m = -S..S, index i = m + S.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "vacuumsq/analytic.hpp"
#include "vacuumsq/core.hpp"
#include "vacuumsq/io.hpp"
#include "vacuumsq/spin_moments.hpp"

namespace vacuumsq {

using cplx = std::complex<double>;

struct DickeState {
  int n_atoms = 1;
  std::vector<cplx> amplitudes;  // c_m for m = -S..S

  double spin() const noexcept { return 0.5 * n_atoms; }
  std::size_t dimension() const noexcept { return amplitudes.size(); }
  double m_at(std::size_t i) const noexcept {
    return static_cast<double>(i) - spin();
  }

  double norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& c : amplitudes) s += std::norm(c);
    return s;
  }
};

namespace detail {

inline void require_atoms(int n_atoms) {
  if (n_atoms < 1) fail(ErrorKind::physics, "n_atoms must be >= 1");
}

/// <m+1| S+ |m> = sqrt((S - m)(S + m + 1)) at index i = m + S.
inline double raising_coefficient(double spin, std::size_t i) {
  const double m = static_cast<double>(i) - spin;
  return std::sqrt((spin - m) * (spin + m + 1.0));
}

// Tolerance on norm drift before renormalization is refused.
inline constexpr double norm_drift_gate = 1e-9;

inline void renormalize_checked(DickeState& s, const char* where) {
  const double n2 = s.norm_squared();
  if (!std::isfinite(n2))
    fail(ErrorKind::numerics, std::string(where) + ": non-finite amplitudes");
  if (std::abs(n2 - 1.0) > norm_drift_gate)
    fail(ErrorKind::numerics, std::string(where) + ": norm drift " +
                                  format_double(n2 - 1.0) + " exceeds gate");
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& c : s.amplitudes) c *= inv;
}

/// Unnormalized expectation sums of a collective-spin vector.
struct MomentSums {
  double weight = 0.0;
  std::array<double, 3> first{};                  // <S_a>
  std::array<std::array<double, 3>, 3> second{};  // <{S_a, S_b}>/2

  void add(std::span<const cplx> psi, double spin) {
    const std::size_t dim = psi.size();
    std::vector<cplx> sx(dim), sy(dim), sz(dim);
    const cplx half_i{0.0, 0.5};
    for (std::size_t i = 0; i < dim; ++i) {
      sz[i] = (static_cast<double>(i) - spin) * psi[i];
      cplx up = 0.0, down = 0.0;  // (S+ psi)_i, (S- psi)_i
      if (i > 0) up = raising_coefficient(spin, i - 1) * psi[i - 1];
      if (i + 1 < dim) down = raising_coefficient(spin, i) * psi[i + 1];
      sx[i] = 0.5 * (up + down);
      sy[i] = -half_i * (up - down);
    }
    const std::array<const std::vector<cplx>*, 3> v{&sx, &sy, &sz};
    for (std::size_t i = 0; i < dim; ++i) {
      weight += std::norm(psi[i]);
      for (int a = 0; a < 3; ++a) {
        first[a] += std::real(std::conj(psi[i]) * (*v[a])[i]);
        for (int b = a; b < 3; ++b)
          second[a][b] += std::real(std::conj((*v[a])[i]) * (*v[b])[i]);
      }
    }
  }

  SpinMoments finish(double spin) const {
    SpinMoments m;
    m.spin_S = spin;
    const double w = weight;
    const auto mean = [&](int a) { return first[a] / w; };
    const auto cov = [&](int a, int b) { return second[a][b] / w - mean(a) * mean(b); };
    m.mean_x = mean(0);
    m.mean_y = mean(1);
    m.mean_z = mean(2);
    m.var_x = cov(0, 0);
    m.var_y = cov(1, 1);
    m.var_z = cov(2, 2);
    m.cov_xy = cov(0, 1);
    m.cov_yz = cov(1, 2);
    m.cov_zx = cov(0, 2);
    return m;
  }
};

}  // namespace detail

/// Coherent spin state along +x: c_m = sqrt(C(2S, m+S) / 2^(2S)).
inline DickeState css(int n_atoms) {
  detail::require_atoms(n_atoms);
  DickeState s;
  s.n_atoms = n_atoms;
  s.amplitudes.resize(static_cast<std::size_t>(n_atoms) + 1);
  const double n = n_atoms;
  const double log_norm = std::lgamma(n + 1.0) - n * std::log(2.0);
  for (int k = 0; k <= n_atoms; ++k) {
    const double log_w = log_norm - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    s.amplitudes[static_cast<std::size_t>(k)] = std::exp(0.5 * log_w);
  }
  // lgamma rounding leaves a ~1e-15 norm offset at large N.
  const double inv = 1.0 / std::sqrt(s.norm_squared());
  for (auto& c : s.amplitudes) c *= inv;
  return s;
}

/// The single Dicke state |m>.
inline DickeState dicke_basis_state(int n_atoms, double m) {
  detail::require_atoms(n_atoms);
  const double idx = m + 0.5 * n_atoms;
  if (idx < 0.0 || idx > n_atoms || idx != std::floor(idx))
    fail(ErrorKind::physics, "m is not on the Dicke ladder");
  DickeState s;
  s.n_atoms = n_atoms;
  s.amplitudes.assign(static_cast<std::size_t>(n_atoms) + 1, 0.0);
  s.amplitudes[static_cast<std::size_t>(idx)] = 1.0;
  return s;
}

/// One-axis twisting under Omega Sz^2: c_m <- exp(-i Omega m^2 t) c_m.
inline DickeState evolve_oat(DickeState state, double omega_twist, double t) {
  detail::require_time(t);
  const double wt = omega_twist * t;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    const double m = state.m_at(i);
    state.amplitudes[i] *= std::polar(1.0, -wt * m * m);
  }
  return state;
}

/// Real symmetric tridiagonal matrix: diagonal and first off-diagonal.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i+1

  void apply(std::span<const cplx> in, std::span<cplx> out) const {
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) {
      cplx v = diag[i] * in[i];
      if (i > 0) v += off[i - 1] * in[i - 1];
      if (i + 1 < n) v += off[i] * in[i + 1];
      out[i] = v;
    }
  }

  /// Gershgorin enclosure of the spectrum.
  std::pair<double, double> spectral_bounds() const {
    const std::size_t n = diag.size();
    double lo = diag[0], hi = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      if (i > 0) r += std::abs(off[i - 1]);
      if (i + 1 < n) r += std::abs(off[i]);
      lo = std::min(lo, diag[i] - r);
      hi = std::max(hi, diag[i] + r);
    }
    return {lo, hi};
  }
};

/// Omega S Sx + Omega Sz^2 in the Dicke basis.
inline Tridiagonal tat_hamiltonian(int n_atoms, double omega_twist) {
  detail::require_atoms(n_atoms);
  const double spin = 0.5 * n_atoms;
  const std::size_t dim = static_cast<std::size_t>(n_atoms) + 1;
  Tridiagonal h;
  h.diag.resize(dim);
  h.off.resize(dim - 1);
  for (std::size_t i = 0; i < dim; ++i) {
    const double m = static_cast<double>(i) - spin;
    h.diag[i] = omega_twist * m * m;
    if (i + 1 < dim)
      h.off[i] = omega_twist * spin * 0.5 * detail::raising_coefficient(spin, i);
  }
  return h;
}

/// Propagator for the rotation-assisted (two-axis) twisting Hamiltonian.
///
/// Small ladders use one dense eigendecomposition reused for every time.
/// Large ladders use a Chebyshev expansion of exp(-iHt) in substeps, which
/// needs only tridiagonal products and O(2S+1) memory.
class TatPropagator {
 public:
  enum class Method { automatic, spectral, chebyshev };

  static constexpr std::size_t spectral_max_dimension = 1025;

  TatPropagator(int n_atoms, double omega_twist, Method method = Method::automatic)
      : n_atoms_(n_atoms), h_(tat_hamiltonian(n_atoms, omega_twist)) {
    const std::size_t dim = h_.diag.size();
    method_ = method;
    if (method_ == Method::automatic)
      method_ = dim <= spectral_max_dimension ? Method::spectral : Method::chebyshev;
    if (method_ == Method::spectral) {
      Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(h_.diag.data(), dim);
      Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(
          h_.off.data(), static_cast<Eigen::Index>(h_.off.size()));
      if (dim == 1) {
        energies_ = d;
        vectors_ = Eigen::MatrixXd::Identity(1, 1);
      } else {
        // computeFromTridiagonal does not rescale its input and can stall on
        // unscaled matrices; normalize to unit max entry first.
        const double scale = std::max(d.cwiseAbs().maxCoeff(), e.cwiseAbs().maxCoeff());
        if (scale > 0.0) {
          d /= scale;
          e /= scale;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
        if (es.info() != Eigen::Success)
          fail(ErrorKind::numerics, "tridiagonal eigensolver did not converge");
        energies_ = es.eigenvalues() * (scale > 0.0 ? scale : 1.0);
        vectors_ = es.eigenvectors();
      }
    } else {
      const auto [lo, hi] = h_.spectral_bounds();
      center_ = 0.5 * (hi + lo);
      half_width_ = std::max(0.5 * (hi - lo) * 1.001, 1e-300);
    }
  }

  Method method() const noexcept { return method_; }
  int n_atoms() const noexcept { return n_atoms_; }
  const Tridiagonal& hamiltonian() const noexcept { return h_; }

  /// exp(-i H t) |state>, norm-checked.
  DickeState apply(const DickeState& state, double t) const {
    detail::require_time(t);
    if (state.n_atoms != n_atoms_)
      fail(ErrorKind::physics, "state and propagator disagree on N");
    DickeState out = state;
    if (t == 0.0) return out;
    if (method_ == Method::spectral)
      apply_spectral(out, t);
    else
      apply_chebyshev(out, t);
    detail::renormalize_checked(out, "two-axis twisting");
    return out;
  }

 private:
  void apply_spectral(DickeState& s, double t) const {
    const auto dim = static_cast<Eigen::Index>(s.dimension());
    Eigen::Map<Eigen::VectorXcd> psi(s.amplitudes.data(), dim);
    Eigen::VectorXcd coeff = vectors_.transpose().cast<cplx>() * psi;
    for (Eigen::Index k = 0; k < dim; ++k) coeff[k] *= std::polar(1.0, -energies_[k] * t);
    psi = vectors_.cast<cplx>() * coeff;
  }

  // Chebyshev substep of size dt; x = half_width * dt stays <= max_phase.
  void apply_chebyshev(DickeState& s, double t) const {
    static constexpr double max_phase = 50.0;
    const auto steps =
        static_cast<long>(std::max(1.0, std::ceil(half_width_ * t / max_phase)));
    const double dt = t / static_cast<double>(steps);
    const double x = half_width_ * dt;
    const auto terms = static_cast<int>(std::ceil(x + 10.0 * std::cbrt(x) + 20.0));
    std::vector<cplx> coeff(static_cast<std::size_t>(terms));
    for (int k = 0; k < terms; ++k) {
      // (2 - delta_k0) (-i)^k J_k(x)
      static constexpr std::array<cplx, 4> minus_i_pow{
          cplx{1, 0}, cplx{0, -1}, cplx{-1, 0}, cplx{0, 1}};
      const double jk = std::cyl_bessel_j(static_cast<double>(k), x);
      coeff[static_cast<std::size_t>(k)] = (k == 0 ? 1.0 : 2.0) * minus_i_pow[k % 4] * jk;
    }
    const cplx global = std::polar(1.0, -center_ * dt);
    const std::size_t dim = s.dimension();
    std::vector<cplx> prev(dim), cur(dim), next(dim), acc(dim);
    for (long step = 0; step < steps; ++step) {
      prev = s.amplitudes;  // T_0 psi
      scaled_apply(prev, cur);  // T_1 psi
      for (std::size_t i = 0; i < dim; ++i) acc[i] = coeff[0] * prev[i] + coeff[1] * cur[i];
      for (int k = 2; k < terms; ++k) {
        scaled_apply(cur, next);
        const cplx ck = coeff[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < dim; ++i) {
          next[i] = 2.0 * next[i] - prev[i];
          acc[i] += ck * next[i];
        }
        std::swap(prev, cur);
        std::swap(cur, next);
      }
      for (std::size_t i = 0; i < dim; ++i) s.amplitudes[i] = global * acc[i];
    }
  }

  // (H - center) / half_width
  void scaled_apply(std::span<const cplx> in, std::span<cplx> out) const {
    h_.apply(in, out);
    const double inv = 1.0 / half_width_;
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = (out[i] - center_ * in[i]) * inv;
  }

  int n_atoms_;
  Tridiagonal h_;
  Method method_ = Method::automatic;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd vectors_;
  double center_ = 0.0;
  double half_width_ = 1.0;
};

/// Evolves under Omega S Sx + Omega Sz^2 for time t, in n_steps equal legs.
inline DickeState evolve_tat(const DickeState& state, double omega_twist, double t,
                             int n_steps = 1) {
  if (n_steps < 1) fail(ErrorKind::numerics, "n_steps must be >= 1");
  const TatPropagator prop(state.n_atoms, omega_twist);
  DickeState s = state;
  const double dt = t / n_steps;
  for (int k = 0; k < n_steps; ++k) s = prop.apply(s, dt);
  return s;
}

/// Calls visit(index, state) at each time of a nondecreasing grid, starting
/// from `initial` at t = 0.
inline void for_each_tat_time(const TatPropagator& prop, const DickeState& initial,
                              std::span<const double> times,
                              const std::function<void(std::size_t, const DickeState&)>& visit) {
  DickeState s = initial;
  double now = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < now) fail(ErrorKind::config, "time grid must be nondecreasing");
    if (prop.method() == TatPropagator::Method::spectral)
      s = prop.apply(initial, times[k]);
    else
      s = prop.apply(s, times[k] - now);
    now = times[k];
    visit(k, s);
  }
}

/// Moments of a normalized Dicke state, with the transverse minimum filled in
/// whenever the mean spin is nonzero.
inline SpinMoments moments(const DickeState& state) {
  detail::MomentSums sums;
  sums.add(state.amplitudes, state.spin());
  SpinMoments m = sums.finish(state.spin());
  return with_transverse_minimum(m);
}

inline double xi_numeric(const DickeState& state) {
  return squeezing_parameter(moments(state));
}

/// Adds the decoherence variances isotropically in the plane transverse to
/// the mean spin; cross terms are untouched in that plane.
inline SpinMoments apply_noise(SpinMoments m, const SystemParams& p, double t,
                               const NoiseModel& noise) {
  noise.validate();
  if (!noise.any()) return m;
  const double dv = noise_variance(p, t, noise);
  const auto n = mean_direction(m);
  // dv * (I - n n^T)
  m.var_x += dv * (1.0 - n[0] * n[0]);
  m.var_y += dv * (1.0 - n[1] * n[1]);
  m.var_z += dv * (1.0 - n[2] * n[2]);
  m.cov_xy -= dv * n[0] * n[1];
  m.cov_yz -= dv * n[1] * n[2];
  m.cov_zx -= dv * n[2] * n[0];
  return with_transverse_minimum(m);
}

/// Text dump, one "m re(c_m) im(c_m)" line per ladder site.
inline std::string format_state(const DickeState& s) {
  std::string out;
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    out += format_double(s.m_at(i));
    out += ' ';
    out += format_double(s.amplitudes[i].real());
    out += ' ';
    out += format_double(s.amplitudes[i].imag());
    out += '\n';
  }
  return out;
}

inline DickeState parse_state(const std::string& text) {
  std::istringstream in(text);
  std::vector<cplx> amps;
  std::vector<double> ms;
  std::string a, b, c;
  while (in >> a >> b >> c) {
    ms.push_back(parse_double(a));
    amps.emplace_back(parse_double(b), parse_double(c));
  }
  if (amps.size() < 2) fail(ErrorKind::config, "state dump needs at least two ladder sites");
  DickeState s;
  s.n_atoms = static_cast<int>(amps.size()) - 1;
  s.amplitudes = std::move(amps);
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (ms[i] != s.m_at(i)) fail(ErrorKind::config, "state dump m column out of order");
  return s;
}

}  // namespace vacuumsq

#endif  // VACUUMSQ_DICKE_HPP
