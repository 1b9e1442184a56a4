#pragma once

// Coherent-state bookkeeping for the cat superposition prepared on dot 1.
//
// Because the dynamics are linear in the mode operators, each branch
// |alpha_k> stays a product of coherent states; only its six amplitudes
// (a column of the propagator scaled by alpha_k) and the branch coherence
// need tracking.

#include <algorithm>
#include <array>
#include <cmath>

#include "ecsim/propagator.hpp"
#include "ecsim/types.hpp"

namespace ecsim {

enum class CoherenceModel {
  /// kappa = <cavity branch 2 | cavity branch 1>: only the cavities are traced out.
  cavity_only,
  /// kappa also accounts for the amplitude carried away into the environment.
  dilation_consistent,
};

struct BranchAmplitudes {
  std::array<Complex, 6> beta1{};  // c1, c2, c3, e1, e2, e3
  std::array<Complex, 6> beta2{};
  double t = 0.0;
};

/// Reduced exciton state
///   rho_e = (|B1><B1| + |B2><B2| + kappa e^{-i theta} |B1><B2| + h.c.) / N
/// where |Bk> is the three-mode coherent product of branch k.
struct ReducedExcitonState {
  std::array<Complex, 3> exciton_beta1{};
  std::array<Complex, 3> exciton_beta2{};
  double norm_n = 1.0;
  Complex kappa{1.0, 0.0};
  double theta = 0.0;
  CoherenceModel coherence_model = CoherenceModel::dilation_consistent;
  Complex log_kappa{0.0, 0.0};

  /// log <B2|B1> over the three exciton modes.
  Complex log_exciton_overlap() const {
    Complex acc{0.0, 0.0};
    for (int i = 0; i < 3; ++i) acc += log_coherent_overlap(exciton_beta2[i], exciton_beta1[i]);
    return acc;
  }

  /// Trace of the unnormalized bracket, 2 + 2 Re(kappa e^{-i theta} <B2|B1>).
  /// Equals N whenever the coherence is consistent with the initial overlap.
  double trace_weight() const {
    const Complex w = log_kappa + log_exciton_overlap();
    return two_plus_two_re_exp(w, theta);
  }

  // 2 + 2 e^{Re w} cos(Im w - theta), arranged to avoid cancellation near -2.
  static double two_plus_two_re_exp(Complex w, double theta) {
    const double phi = w.imag() - theta;
    const double half = std::cos(0.5 * phi);
    return 4.0 * half * half + 2.0 * std::cos(phi) * std::expm1(w.real());
  }
};

namespace detail {

inline Complex log_initial_overlap(const CatStateSpec& cat) {
  return log_coherent_overlap(cat.alpha2, cat.alpha1);
}

// |alpha1|^2 + |alpha2|^2 - 2 alpha2^* alpha1
inline Complex branch_distance(const CatStateSpec& cat) {
  return std::norm(cat.alpha1) + std::norm(cat.alpha2) - 2.0 * std::conj(cat.alpha2) * cat.alpha1;
}

inline constexpr double kNormalizationFloor = 1e-14;

}  // namespace detail

/// N = 2 + 2 cos(theta + Im(alpha1^* alpha2)) exp(-(|alpha1|^2+|alpha2|^2)/2 + Re(alpha1^* alpha2)).
inline double normalization(const CatStateSpec& cat) {
  const Complex x = std::conj(cat.alpha1) * cat.alpha2;
  const double expo = -0.5 * (std::norm(cat.alpha1) + std::norm(cat.alpha2)) + x.real();
  // Same value as 2 + 2 Re(e^{-i theta} <alpha2|alpha1>).
  const double n = ReducedExcitonState::two_plus_two_re_exp(Complex(expo, -x.imag()), cat.theta);
  if (!(n > detail::kNormalizationFloor)) throw DegenerateSuperposition();
  return n;
}

/// Amplitudes of both branches: alpha_k times the propagator column of mode b1.
inline BranchAmplitudes branch_amplitudes(const ModeCoefficients& m, const CatStateSpec& cat) {
  BranchAmplitudes out;
  out.t = m.t;
  const std::array<Complex, 6> column{m.u21, m.u22, m.u22, m.v21, m.v22, m.v22};
  for (int k = 0; k < 6; ++k) {
    out.beta1[k] = cat.alpha1 * column[k];
    out.beta2[k] = cat.alpha2 * column[k];
  }
  return out;
}

inline BranchAmplitudes branch_amplitudes(const SystemParams& params, const CatStateSpec& cat, double t,
                                          Dynamics dyn) {
  return branch_amplitudes(mode_coefficients(params, t, dyn), cat);
}

/// Logarithm of the branch coherence factor kappa.
inline Complex log_coherence_factor(const ModeCoefficients& m, const CatStateSpec& cat, CoherenceModel model) {
  const Complex dist = detail::branch_distance(cat);
  double traced = 0.0;
  if (model == CoherenceModel::cavity_only) {
    traced = std::norm(m.u21) + 2.0 * std::norm(m.u22);
  } else {
    traced = 1.0 - std::norm(m.v21) - 2.0 * std::norm(m.v22);
  }
  return -0.5 * dist * traced;
}

inline Complex coherence_factor(const SystemParams& params, const CatStateSpec& cat, double t, Dynamics dyn,
                                CoherenceModel model) {
  return std::exp(log_coherence_factor(mode_coefficients(params, t, dyn), cat, model));
}

inline ReducedExcitonState reduced_exciton_state(const ModeCoefficients& m, const CatStateSpec& cat,
                                                 CoherenceModel model) {
  ReducedExcitonState s;
  s.norm_n = normalization(cat);
  const std::array<Complex, 3> column{m.v21, m.v22, m.v22};
  for (int i = 0; i < 3; ++i) {
    s.exciton_beta1[i] = cat.alpha1 * column[i];
    s.exciton_beta2[i] = cat.alpha2 * column[i];
  }
  s.log_kappa = log_coherence_factor(m, cat, model);
  s.kappa = std::exp(s.log_kappa);
  s.theta = cat.theta;
  s.coherence_model = model;
  return s;
}

inline ReducedExcitonState reduced_exciton_state(const SystemParams& params, const CatStateSpec& cat, double t,
                                                 Dynamics dyn, CoherenceModel model) {
  return reduced_exciton_state(mode_coefficients(params, t, dyn), cat, model);
}

/// Total mean photon number in the three cavities.
///
/// Cross terms use the initial branch overlap <alpha2|alpha1>: it equals the
/// six-mode overlap <B2|B1> under closed evolution and is what survives the
/// environment trace under loss.
inline double mean_cavity_photons(const ModeCoefficients& m, const CatStateSpec& cat) {
  const double n = normalization(cat);
  const auto br = branch_amplitudes(m, cat);
  const Complex overlap_phase = std::exp(detail::log_initial_overlap(cat) - kI * cat.theta);
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    acc += std::norm(br.beta1[i]) + std::norm(br.beta2[i]) +
           2.0 * std::real(overlap_phase * std::conj(br.beta2[i]) * br.beta1[i]);
  }
  return std::max(0.0, acc / n);
}

inline double mean_cavity_photons(const SystemParams& params, const CatStateSpec& cat, double t, Dynamics dyn) {
  return mean_cavity_photons(mode_coefficients(params, t, dyn), cat);
}

/// Mean total excitation of the initial state; bounds the photon number.
inline double initial_excitation(const CatStateSpec& cat) {
  const double n = normalization(cat);
  const Complex overlap_phase = std::exp(detail::log_initial_overlap(cat) - kI * cat.theta);
  return (std::norm(cat.alpha1) + std::norm(cat.alpha2) +
          2.0 * std::real(overlap_phase * std::conj(cat.alpha2) * cat.alpha1)) /
         n;
}

}  // namespace ecsim
