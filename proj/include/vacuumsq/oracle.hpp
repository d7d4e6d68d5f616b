#ifndef VACUUMSQ_ORACLE_HPP
#define VACUUMSQ_ORACLE_HPP

// Brute-force Tavis-Cummings model on the symmetric atomic subspace times a
// truncated photon Fock space. Used to check the effective twisting
// Hamiltonian obtained by eliminating the detuned cavity mode.
//
// Frame: rotating at omega0 for both atoms and cavity, so
//   H = Delta c^dag c + g (c^dag S- + c S+).
// Basis |m, n>, m = -S..S atomic, n = 0..n_max photons. The excitation
// number k = (m + S) + n is conserved and labels the blocks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "vacuumsq/analytic.hpp"
#include "vacuumsq/core.hpp"
#include "vacuumsq/dicke.hpp"
#include "vacuumsq/spin_moments.hpp"

namespace vacuumsq {

struct TCConfig {
  static constexpr int max_atoms = 12;
  static constexpr std::size_t max_dimension = 10000;

  int photon_cutoff = 2;
  SystemParams params;

  int n_atoms() const noexcept { return params.n_atoms; }
  std::size_t dimension() const noexcept {
    return static_cast<std::size_t>(params.n_atoms + 1) *
           static_cast<std::size_t>(photon_cutoff + 1);
  }

  void validate() const {
    params.validate();
    if (params.n_atoms > max_atoms)
      fail(ErrorKind::config, "oracle supports at most 12 atoms");
    if (photon_cutoff < 1) fail(ErrorKind::config, "photon cutoff must be >= 1");
    if (dimension() > max_dimension)
      fail(ErrorKind::config, "oracle Hilbert dimension exceeds 10^4");
  }
};

struct TcBasisState {
  double m = 0.0;
  int n = 0;
};

/// Fixed-excitation block; basis ordered by photon number.
struct TcBlock {
  int excitations = 0;
  std::vector<TcBasisState> basis;
  Eigen::MatrixXd h;
};

struct TcHamiltonian {
  int n_atoms = 0;
  int photon_cutoff = 0;
  std::vector<TcBlock> blocks;  // blocks[k].excitations == k

  std::size_t dimension() const noexcept {
    return static_cast<std::size_t>(n_atoms + 1) * static_cast<std::size_t>(photon_cutoff + 1);
  }

  /// Dense index of |m, n>.
  std::size_t index_of(double m, int n) const noexcept {
    const auto im = static_cast<std::size_t>(std::llround(m + 0.5 * n_atoms));
    return im * static_cast<std::size_t>(photon_cutoff + 1) + static_cast<std::size_t>(n);
  }

  /// Full matrix, assembled from the blocks.
  Eigen::MatrixXd dense() const {
    const auto dim = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& b : blocks)
      for (std::size_t i = 0; i < b.basis.size(); ++i)
        for (std::size_t j = 0; j < b.basis.size(); ++j)
          full(static_cast<Eigen::Index>(index_of(b.basis[i].m, b.basis[i].n)),
               static_cast<Eigen::Index>(index_of(b.basis[j].m, b.basis[j].n))) =
              b.h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return full;
  }
};

/// g sqrt((S+m)(S-m+1)) sqrt(n+1): <m-1, n+1| g c^dag S- |m, n>.
inline double tc_coupling(double g, double spin, double m, int n) {
  return g * std::sqrt((spin + m) * (spin - m + 1.0)) * std::sqrt(n + 1.0);
}

inline TcHamiltonian build_tc_hamiltonian(const TCConfig& cfg) {
  cfg.validate();
  const auto& p = cfg.params;
  const int n_atoms = p.n_atoms;
  const double spin = 0.5 * n_atoms;
  TcHamiltonian H;
  H.n_atoms = n_atoms;
  H.photon_cutoff = cfg.photon_cutoff;
  for (int k = 0; k <= n_atoms + cfg.photon_cutoff; ++k) {
    TcBlock b;
    b.excitations = k;
    for (int n = std::max(0, k - n_atoms); n <= std::min(cfg.photon_cutoff, k); ++n)
      b.basis.push_back({static_cast<double>(k - n) - spin, n});
    const auto dim = static_cast<Eigen::Index>(b.basis.size());
    b.h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto& s = b.basis[static_cast<std::size_t>(i)];
      b.h(i, i) = s.n * p.delta;
      if (i + 1 < dim) {
        const double c = tc_coupling(p.coupling_g, spin, s.m, s.n);
        b.h(i, i + 1) = c;
        b.h(i + 1, i) = c;
      }
    }
    H.blocks.push_back(std::move(b));
  }
  return H;
}

/// Second-order vacuum light shift -Omega (S+m)(S-m+1).
inline double perturbative_light_shift(const SystemParams& p, double m) {
  const double spin = 0.5 * p.n_atoms;
  return -(p.coupling_g * p.coupling_g / p.delta) * (spin + m) * (spin - m + 1.0);
}

struct LightShift {
  double m = 0.0;
  double exact = 0.0;         // rad/s
  double perturbative = 0.0;  // rad/s
  double relative_error = 0.0;  // 0 when the perturbative shift vanishes
  double overlap = 1.0;       // |<m,0|dressed>|^2
};

/// Exact shift of the dressed state adiabatically connected to |m, 0>.
inline LightShift vacuum_light_shift(const TCConfig& cfg, double m) {
  const double spin = 0.5 * cfg.n_atoms();
  const double idx = m + spin;
  if (idx < 0.0 || idx > cfg.n_atoms() || idx != std::floor(idx))
    fail(ErrorKind::physics, "m is not on the Dicke ladder");
  const auto H = build_tc_hamiltonian(cfg);
  const auto& block = H.blocks[static_cast<std::size_t>(idx)];
  LightShift r;
  r.m = m;
  r.perturbative = perturbative_light_shift(cfg.params, m);
  if (block.h.rows() == 1) {
    r.exact = block.h(0, 0);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block.h);
    Eigen::Index best = 0;
    const double ov = es.eigenvectors().row(0).cwiseAbs2().maxCoeff(&best);
    r.overlap = ov;
    if (ov < 0.9)
      fail(ErrorKind::physics,
           "adiabatic branch ambiguous (overlap " + format_double(ov) +
               "); detuning too small");
    r.exact = es.eigenvalues()[best];
  }
  if (r.perturbative != 0.0)
    r.relative_error = (r.exact - r.perturbative) / r.perturbative;
  return r;
}

inline std::vector<LightShift> light_shift_table(const TCConfig& cfg) {
  std::vector<LightShift> rows;
  const double spin = 0.5 * cfg.n_atoms();
  for (int i = 0; i <= cfg.n_atoms(); ++i) rows.push_back(vacuum_light_shift(cfg, i - spin));
  return rows;
}

struct FullEvolutionPoint {
  double t = 0.0;
  SpinMoments moments;
  double photon_number = 0.0;
  double top_fock_population = 0.0;
};

struct FullEvolution {
  int photon_cutoff = 0;  // after escalation
  std::vector<FullEvolutionPoint> points;
};

namespace detail {

inline FullEvolution evolve_full_fixed(const TCConfig& cfg, std::span<const double> times) {
  const auto H = build_tc_hamiltonian(cfg);
  const double spin = 0.5 * cfg.n_atoms();
  const auto init = css(cfg.n_atoms());
  const int nmax = cfg.photon_cutoff;

  struct Solved {
    const TcBlock* block;
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
    Eigen::VectorXd proj;  // eigenbasis coefficients of the initial block vector
  };
  std::vector<Solved> solved;
  // Only blocks containing an |m, 0> component are populated initially.
  for (int k = 0; k <= cfg.n_atoms(); ++k) {
    const auto& b = H.blocks[static_cast<std::size_t>(k)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.h);
    const double c0 = init.amplitudes[static_cast<std::size_t>(k)].real();
    solved.push_back({&b, es.eigenvalues(), es.eigenvectors(),
                      es.eigenvectors().row(0).transpose() * c0});
  }

  FullEvolution out;
  out.photon_cutoff = nmax;
  const std::size_t dim_atoms = static_cast<std::size_t>(cfg.n_atoms()) + 1;
  for (double t : times) {
    require_time(t);
    std::vector<std::vector<cplx>> by_photon(static_cast<std::size_t>(nmax) + 1,
                                             std::vector<cplx>(dim_atoms, 0.0));
    for (const auto& s : solved) {
      const auto dim = s.energies.size();
      Eigen::VectorXcd phased(dim);
      for (Eigen::Index j = 0; j < dim; ++j)
        phased[j] = s.proj[j] * std::polar(1.0, -s.energies[j] * t);
      const Eigen::VectorXcd amp = s.vectors.cast<cplx>() * phased;
      for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& st = s.block->basis[static_cast<std::size_t>(i)];
        const auto im = static_cast<std::size_t>(std::llround(st.m + spin));
        by_photon[static_cast<std::size_t>(st.n)][im] = amp[i];
      }
    }
    MomentSums sums;
    FullEvolutionPoint pt;
    pt.t = t;
    for (int n = 0; n <= nmax; ++n) {
      const auto& v = by_photon[static_cast<std::size_t>(n)];
      double pop = 0.0;
      for (const auto& c : v) pop += std::norm(c);
      pt.photon_number += n * pop;
      if (n == nmax) pt.top_fock_population = pop;
      sums.add(v, spin);
    }
    pt.moments = sums.finish(spin);
    pt.moments = with_transverse_minimum(pt.moments);
    out.points.push_back(pt);
  }
  return out;
}

}  // namespace detail

/// Exact unitary evolution of CSS (x) |0>, atomic moments after tracing out
/// the cavity. The photon cutoff grows until the top Fock level stays below
/// 1e-8 population at every requested time.
inline FullEvolution evolve_full(TCConfig cfg, std::span<const double> times) {
  static constexpr double top_fock_gate = 1e-8;
  for (;;) {
    cfg.validate();
    auto result = detail::evolve_full_fixed(cfg, times);
    double worst = 0.0;
    for (const auto& p : result.points) worst = std::max(worst, p.top_fock_population);
    if (worst <= top_fock_gate) return result;
    TCConfig bigger = cfg;
    ++bigger.photon_cutoff;
    if (bigger.photon_cutoff > cfg.n_atoms() + 1 ||
        bigger.dimension() > TCConfig::max_dimension)
      fail(ErrorKind::numerics, "photon cutoff insufficient: top Fock population " +
                                    format_double(worst));
    cfg = bigger;
  }
}

/// Effective atom-only model in the same frame: Omega Sz^2 - Omega Sz.
inline SpinMoments effective_moments(const SystemParams& p, double t) {
  const double omega = p.coupling_g * p.coupling_g / p.delta;
  auto s = css(p.n_atoms);
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    const double m = s.m_at(i);
    s.amplitudes[i] *= std::polar(1.0, -(omega * m * m - omega * m) * t);
  }
  return moments(s);
}

}  // namespace vacuumsq

#endif  // VACUUMSQ_ORACLE_HPP
