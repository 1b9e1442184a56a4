#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace ecsim {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Error hierarchy. The CLI maps each family onto an exit code.

/// Invalid physical parameters or configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The two branches of a cat superposition cancel exactly (N == 0).
class DegenerateSuperposition : public std::domain_error {
 public:
  DegenerateSuperposition() : std::domain_error("degenerate superposition") {}
};

/// A Fock-space truncation cannot represent the state to the required tail bound.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The oracle would exceed its memory budget.
class ResourceRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical routine failed to converge or produced an inconsistent result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical constants of the three-cavity model. Angular frequencies and rates
/// share one (arbitrary) unit; times are measured in its inverse.
struct SystemParams {
  double omega_c = 0.0;  // cavity frequency
  double delta = 0.0;    // detuning, exciton frequency is omega_c - delta
  double g = 0.0;        // dot-cavity coupling
  double c_hop = 0.0;    // cavity-cavity hopping
  double gamma_c = 0.0;  // photon loss per cavity
  double gamma_e = 0.0;  // exciton loss per dot

  void validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(omega_c) || !finite(delta) || !finite(g) || !finite(c_hop) ||
        !finite(gamma_c) || !finite(gamma_e))
      throw ConfigError("params: all fields must be finite");
    if (!(g > 0.0)) throw ConfigError("params.g: must be > 0");
    if (c_hop < 0.0) throw ConfigError("params.c_hop: must be >= 0");
    if (gamma_c < 0.0) throw ConfigError("params.gamma_c: must be >= 0");
    if (gamma_e < 0.0) throw ConfigError("params.gamma_e: must be >= 0");
  }
};

/// Closed (Hamiltonian) or dissipative (Lindblad, zero temperature) dynamics.
enum class Dynamics { closed, dissipative };

/// Initial exciton-mode superposition |alpha1> + e^{i theta} |alpha2> on dot 1.
struct CatStateSpec {
  Complex alpha1{0.0, 0.0};
  Complex alpha2{0.0, 0.0};
  double theta = 0.0;

  /// Even (theta = 0) or odd (theta = pi) cat with alpha1 = -alpha2 = alpha.
  static CatStateSpec symmetric(double alpha, double theta) {
    return CatStateSpec{Complex(alpha, 0.0), Complex(-alpha, 0.0), theta};
  }
};

/// <beta|alpha> for single-mode coherent states, returned as its logarithm.
inline Complex log_coherent_overlap(Complex beta, Complex alpha) {
  return -0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(beta) * alpha;
}

}  // namespace ecsim
