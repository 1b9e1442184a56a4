#pragma once

// Six-mode linear propagator of the coupled cavity/exciton system.
//
// Mode ordering throughout: a1, a2, a3 (cavities), b1, b2, b3 (excitons).
// Heisenberg operators evolve as x(t) = U(t) x(0) with U(t) = exp(-i M t).
// The dissipative generator adds -i*gamma on the diagonal, which is the same
// as substituting omega_c -> omega_c - i gamma_c and
// delta -> delta + i (gamma_e - gamma_c) in the closed-form coefficients.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "ecsim/types.hpp"

namespace ecsim {

using Matrix6c = Eigen::Matrix<Complex, 6, 6>;

struct AuxFrequencies {
  Complex a_freq;
  Complex b_freq;
};

/// Eight distinct propagator entries; the full 6x6 matrix is fixed by the
/// three-fold permutation symmetry of the cavity triangle.
struct ModeCoefficients {
  Complex u11, u12, u21, u22;
  Complex v11, v12, v21, v22;
  double t = 0.0;

  /// Expands into the full 6x6 propagator.
  Matrix6c matrix() const {
    Matrix6c m;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const bool same = (i == j);
        m(i, j) = same ? u11 : u12;
        m(i, j + 3) = same ? v11 : v12;
        m(i + 3, j) = same ? u21 : u22;
        m(i + 3, j + 3) = same ? v21 : v22;
      }
    }
    return m;
  }
};

/// Evaluation switches. `printed_u2_prefactor` drops the 1/g from the u21/u22
/// prefactor; it exists only so validation can demonstrate that this variant
/// disagrees with the matrix exponential.
struct PropagatorOptions {
  bool printed_u2_prefactor = false;
};

namespace detail {

struct EffectiveFrequencies {
  Complex omega;  // omega_c, or omega_c - i gamma_c
  Complex delta;  // delta, or delta + i (gamma_e - gamma_c)
};

inline EffectiveFrequencies effective_frequencies(const SystemParams& p, Dynamics dyn) {
  if (dyn == Dynamics::closed) return {Complex(p.omega_c, 0.0), Complex(p.delta, 0.0)};
  return {Complex(p.omega_c, -p.gamma_c), Complex(p.delta, p.gamma_e - p.gamma_c)};
}

// sin(x t / 2) / x, entire in x.
inline Complex half_sin_over(Complex x, double t) {
  const Complex z = 0.5 * x * t;
  if (std::abs(z) < 1e-4) {
    const Complex z2 = z * z;
    return 0.5 * t * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
  }
  return std::sin(z) / x;
}

/// exp(w) cos(x t/2) and exp(w) sin(x t/2)/x with the growth of the
/// trigonometric factors folded into the exponent, so long lossy times stay
/// finite.
struct PhasedTrig {
  Complex cos_part;
  Complex sin_part;
};

inline PhasedTrig phased_trig(Complex w, Complex x, double t) {
  const Complex z = 0.5 * x * t;
  if (std::abs(z) < 1e-4) {
    const Complex e = std::exp(w);
    return {e * std::cos(z), e * half_sin_over(x, t)};
  }
  const Complex ep = std::exp(w + kI * z);
  const Complex em = std::exp(w - kI * z);
  return {0.5 * (ep + em), (ep - em) / (2.0 * kI * x)};
}

}  // namespace detail

/// A and B of the closed-form solution (principal square roots).
inline AuxFrequencies aux_frequencies(const SystemParams& params, Dynamics dyn) {
  const auto eff = detail::effective_frequencies(params, dyn);
  const double c = params.c_hop;
  const double g = params.g;
  const Complex d = eff.delta;
  const Complex a_sq = 4.0 * c * c + 4.0 * c * d + d * d + 4.0 * g * g;
  const Complex b_sq = c * c - 2.0 * c * d + d * d + 4.0 * g * g;
  return {std::sqrt(a_sq), std::sqrt(b_sq)};
}

/// Closed-form coefficients for explicitly supplied A and B. Every entry
/// depends on A and B only through even functions, so either sign works.
inline ModeCoefficients mode_coefficients_from(const SystemParams& params, const AuxFrequencies& aux,
                                               double t, Dynamics dyn,
                                               const PropagatorOptions& opts = {}) {
  if (!(params.g > 0.0)) throw ConfigError("params.g: must be > 0 (1/(6g) prefactor)");
  if (t < 0.0) throw ConfigError("time must be >= 0");

  const auto eff = detail::effective_frequencies(params, dyn);
  const double c = params.c_hop;
  const Complex d = eff.delta;
  const Complex A = aux.a_freq;
  const Complex B = aux.b_freq;

  // Global phase folded into the two branch exponents so that growth and
  // decay cancel inside one exponential at long times.
  const auto ta = detail::phased_trig(-kI * (eff.omega + c - 0.5 * d) * t, A, t);
  const auto tb = detail::phased_trig(-kI * (eff.omega - 0.5 * (c + d)) * t, B, t);
  const Complex cA = ta.cos_part, sA = ta.sin_part;
  const Complex cB = tb.cos_part, sB = tb.sin_part;

  const Complex ka = 2.0 * c + d;  // (2c + delta)
  const Complex kb = c - d;        // (c - delta)

  // (-A + ka^2/A) sin(At/2) and (B - kb^2/B) sin(Bt/2), phases included
  const Complex sin_termA = (ka * ka - A * A) * sA;
  const Complex sin_termB = (B * B - kb * kb) * sB;

  const double u2_scale = opts.printed_u2_prefactor ? 1.0 : params.g;
  const Complex pre_u2 = kI / (6.0 * u2_scale);
  const Complex pre_v1 = kI / (6.0 * params.g);

  ModeCoefficients m;
  m.t = t;
  m.u21 = pre_u2 * (sin_termA - 2.0 * sin_termB);
  m.u22 = pre_u2 * (sin_termA + sin_termB);
  m.v11 = pre_v1 * (sin_termA - 2.0 * sin_termB);
  m.v12 = pre_v1 * (sin_termA + sin_termB);

  const Complex exc_a = cA + kI * ka * sA;
  const Complex exc_b = cB - kI * kb * sB;
  m.v21 = 1.0 / 3.0 * (exc_a + 2.0 * exc_b);
  m.v22 = 1.0 / 3.0 * (exc_a - exc_b);

  const Complex cav_a = cA - kI * ka * sA;
  const Complex cav_b = cB + kI * kb * sB;
  m.u11 = 1.0 / 3.0 * (cav_a + 2.0 * cav_b);
  m.u12 = 1.0 / 3.0 * (cav_a - cav_b);
  return m;
}

inline ModeCoefficients mode_coefficients(const SystemParams& params, double t, Dynamics dyn,
                                          const PropagatorOptions& opts = {}) {
  return mode_coefficients_from(params, aux_frequencies(params, dyn), t, dyn, opts);
}

/// Heisenberg generator M with dx/dt = -i M x.
inline Matrix6c generator_matrix(const SystemParams& params, Dynamics dyn) {
  const bool diss = (dyn == Dynamics::dissipative);
  const Complex cav(params.omega_c, diss ? -params.gamma_c : 0.0);
  const Complex exc(params.omega_c - params.delta, diss ? -params.gamma_e : 0.0);
  Matrix6c m = Matrix6c::Zero();
  for (int i = 0; i < 3; ++i) {
    m(i, i) = cav;
    m(i + 3, i + 3) = exc;
    m(i, i + 3) = params.g;
    m(i + 3, i) = params.g;
    for (int j = 0; j < 3; ++j)
      if (j != i) m(i, j) = params.c_hop;
  }
  return m;
}

/// exp(-i M t) by eigendecomposition, with a Pade scaling-and-squaring
/// fallback when the eigenvector basis is ill-conditioned.
inline Matrix6c propagator_numeric(const SystemParams& params, double t, Dynamics dyn) {
  if (t < 0.0) throw ConfigError("time must be >= 0");
  const Matrix6c m = generator_matrix(params, dyn);
  if (t == 0.0) return Matrix6c::Identity();

  if (dyn == Dynamics::closed || (params.gamma_c == params.gamma_e)) {
    // Hermitian up to a uniform shift: unitary eigenbasis.
    const double shift = (dyn == Dynamics::closed) ? 0.0 : params.gamma_c;
    Matrix6c herm = m;
    herm.diagonal().array() += Complex(0.0, shift);
    Eigen::SelfAdjointEigenSolver<Matrix6c> es(herm);
    if (es.info() != Eigen::Success) throw NumericalError("propagator: eigensolver failed");
    const auto& vecs = es.eigenvectors();
    Eigen::Matrix<Complex, 6, 1> phases;
    for (int k = 0; k < 6; ++k) phases(k) = std::exp(Complex(-shift * t, -es.eigenvalues()(k) * t));
    return vecs * phases.asDiagonal() * vecs.adjoint();
  }

  Eigen::ComplexEigenSolver<Matrix6c> es(m);
  if (es.info() == Eigen::Success) {
    const Matrix6c vecs = es.eigenvectors();
    Eigen::JacobiSVD<Matrix6c> svd(vecs);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(5);
    if (std::isfinite(cond) && cond < 1e4) {
      Eigen::Matrix<Complex, 6, 1> phases;
      for (int k = 0; k < 6; ++k) phases(k) = std::exp(-kI * es.eigenvalues()(k) * t);
      return vecs * phases.asDiagonal() * vecs.inverse();
    }
  }
  const Matrix6c arg = (-kI * t) * m;
  Matrix6c out = arg.exp();
  if (!out.allFinite()) throw NumericalError("propagator: matrix exponential did not converge");
  return out;
}

/// Real parts of the six single-particle eigenfrequencies, ascending.
inline std::array<double, 6> mode_frequencies(const SystemParams& params) {
  Eigen::SelfAdjointEigenSolver<Matrix6c> es(generator_matrix(params, Dynamics::closed));
  std::array<double, 6> out{};
  for (int k = 0; k < 6; ++k) out[k] = es.eigenvalues()(k);
  return out;
}

/// Smallest non-zero gap between single-particle frequencies. This sets the
/// revival period of the exciton populations.
inline double slowest_beat_frequency(const SystemParams& params) {
  const auto f = mode_frequencies(params);
  const double scale = std::max(1.0, std::abs(f.back() - f.front()));
  double best = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      const double gap = std::abs(f[j] - f[i]);
      if (gap > 1e-9 * scale && (best == 0.0 || gap < best)) best = gap;
    }
  return best;
}

/// Largest of |A|, |B|: the fastest oscillation in the coefficients.
inline double fastest_frequency(const SystemParams& params) {
  const auto aux = aux_frequencies(params, Dynamics::closed);
  return std::max(std::abs(aux.a_freq), std::abs(aux.b_freq));
}

}  // namespace ecsim
