#ifndef VACUUMSQ_CORE_HPP
#define VACUUMSQ_CORE_HPP

// Physical parameters, unit conventions and the error taxonomy shared by
// every other header.
//
// Units: all rates stored in these types are angular frequencies (rad/s).
// Values at the user boundary (config files, CLI) are plain frequencies in
// Hz and are converted with hz_to_angular().

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace vacuumsq {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double hz_to_angular(double hz) noexcept { return two_pi * hz; }
constexpr double angular_to_hz(double w) noexcept { return w / two_pi; }

/// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { config, physics, numerics, io };

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::physics: return "physics";
    case ErrorKind::numerics: return "numerics";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

/// N two-level atoms in a single-mode cavity.
struct SystemParams {
  int n_atoms = 1;
  double coupling_g = 0.0;  // rad/s, half the single-photon Rabi frequency
  double kappa = 0.0;       // rad/s, cavity photon loss rate
  double gamma = 0.0;       // rad/s, free-space decay rate of |e>
  double delta = 0.0;       // rad/s, cavity-atom detuning
  std::optional<double> omega0;  // rad/s, only used by feasibility reporting

  void validate() const {
    if (n_atoms < 1) fail(ErrorKind::physics, "n_atoms must be >= 1");
    if (!(coupling_g > 0.0) || !std::isfinite(coupling_g))
      fail(ErrorKind::physics, "coupling_g must be positive and finite");
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
      fail(ErrorKind::physics, "kappa must be >= 0");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
      fail(ErrorKind::physics, "gamma must be >= 0");
    if (delta == 0.0 || !std::isfinite(delta))
      fail(ErrorKind::physics, "delta must be nonzero and finite");
    if (omega0 && !(*omega0 > 0.0))
      fail(ErrorKind::physics, "omega0 must be positive when given");
  }

  /// Dispersive (adiabatic-elimination) regime heuristic. Reported, never enforced.
  bool regime_ok() const noexcept {
    const double scale =
        std::max(coupling_g * std::sqrt(static_cast<double>(n_atoms)), kappa);
    return std::abs(delta) >= 10.0 * scale;
  }
};

struct DerivedParams {
  double spin_S = 0.5;       // N/2
  double eta = 0.0;          // 4 g^2 / (Gamma kappa), +inf for a lossless system
  double omega_twist = 0.0;  // g^2 / Delta, rad/s; carries the sign of Delta
};

inline DerivedParams derive_params(const SystemParams& p) {
  p.validate();
  DerivedParams d;
  d.spin_S = 0.5 * static_cast<double>(p.n_atoms);
  const double g2 = p.coupling_g * p.coupling_g;
  const double loss = p.gamma * p.kappa;
  d.eta = loss > 0.0 ? 4.0 * g2 / loss : std::numeric_limits<double>::infinity();
  d.omega_twist = g2 / p.delta;
  return d;
}

/// Inverts eta = 4 g^2 / (Gamma kappa).
inline double coupling_from_cooperativity(double eta, double gamma, double kappa) {
  if (!(eta > 0.0) || !(gamma > 0.0) || !(kappa > 0.0))
    fail(ErrorKind::physics,
         "coupling from cooperativity needs eta, gamma and kappa all positive");
  return 0.5 * std::sqrt(eta * gamma * kappa);
}

/// Inputs for the cavity-robustness arithmetic.
struct FeasibilityParams {
  double fsr = 0.0;              // rad/s, free spectral range nu
  double fsr_jitter = 0.0;       // rad/s, std-dev of cavity frequency noise
  double noise_bandwidth = 0.0;  // Hz
  double squeeze_time = 0.0;     // s

  void validate() const {
    if (!(fsr > 0.0) || !(fsr_jitter > 0.0) || !(noise_bandwidth > 0.0) ||
        !(squeeze_time > 0.0))
      fail(ErrorKind::physics, "feasibility parameters must all be positive");
  }
};

inline double to_db(double ratio) { return 10.0 * std::log10(ratio); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace vacuumsq

#endif  // VACUUMSQ_CORE_HPP
