#pragma once

// Three-qubit encoding of the reduced exciton state and the GHZ / W
// projector witnesses evaluated on it.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ecsim/cat_dynamics.hpp"
#include "ecsim/propagator.hpp"
#include "ecsim/types.hpp"

namespace ecsim {

using Matrix8c = Eigen::Matrix<Complex, 8, 8>;
using Vector8c = Eigen::Matrix<Complex, 8, 1>;

/// 8x8 density matrix over |e1 e2 e3>, basis |000> ... |111> with e1 the
/// most significant bit.
struct QubitDensityMatrix {
  Matrix8c entries = Matrix8c::Zero();
};

enum class WitnessKind { ghz, w };

/// Per-mode orthonormalization of the two branch coherent states:
/// branch 1 -> |0>, branch 2 -> p|0> + sqrt(1-|p|^2)|1> with p = <b1|b2>.
struct ModeEncoding {
  Complex p;
  double s;  // sqrt(1 - |p|^2), real and non-negative
};

namespace detail {

inline constexpr double kOverlapSlack = 1e-12;

inline ModeEncoding encode_mode(Complex beta1, Complex beta2) {
  const Complex p = std::exp(log_coherent_overlap(beta1, beta2));
  const double p2 = std::norm(p);
  if (p2 > 1.0 + kOverlapSlack) throw NumericalError("encode_qubits: coherent overlap exceeds 1");
  // 1 - |p|^2 = -expm1(2 Re log p) keeps precision when p -> 1.
  const double re_log = log_coherent_overlap(beta1, beta2).real();
  const double one_minus = std::max(0.0, -std::expm1(2.0 * re_log));
  return {p, std::sqrt(one_minus)};
}

inline Vector8c product_state(const std::array<std::array<Complex, 2>, 3>& modes) {
  Vector8c v;
  for (int idx = 0; idx < 8; ++idx) {
    const int b0 = (idx >> 2) & 1, b1 = (idx >> 1) & 1, b2 = idx & 1;
    v(idx) = modes[0][b0] * modes[1][b1] * modes[2][b2];
  }
  return v;
}

inline const Vector8c& target_state(WitnessKind kind) {
  static const Vector8c ghz = [] {
    Vector8c v = Vector8c::Zero();
    v(0) = v(7) = 1.0 / std::sqrt(2.0);
    return v;
  }();
  static const Vector8c w = [] {
    Vector8c v = Vector8c::Zero();
    v(1) = v(2) = v(4) = 1.0 / std::sqrt(3.0);
    return v;
  }();
  return kind == WitnessKind::ghz ? ghz : w;
}

}  // namespace detail

inline std::array<ModeEncoding, 3> mode_encodings(const ReducedExcitonState& state) {
  std::array<ModeEncoding, 3> enc{};
  for (int i = 0; i < 3; ++i) enc[i] = detail::encode_mode(state.exciton_beta1[i], state.exciton_beta2[i]);
  return enc;
}

/// Branch product states |Phi1> = |000>, |Phi2> = (x) (p_i|0> + s_i|1>).
inline std::array<Vector8c, 2> encoded_branches(const ReducedExcitonState& state) {
  const auto enc = mode_encodings(state);
  std::array<std::array<Complex, 2>, 3> one{}, two{};
  for (int i = 0; i < 3; ++i) {
    one[i] = {Complex(1.0, 0.0), Complex(0.0, 0.0)};
    two[i] = {enc[i].p, Complex(enc[i].s, 0.0)};
  }
  return {detail::product_state(one), detail::product_state(two)};
}

/// Encoded three-qubit density matrix, normalized to unit trace.
inline QubitDensityMatrix encode_qubits(const ReducedExcitonState& state) {
  const auto [phi1, phi2] = encoded_branches(state);
  const Complex coh = state.kappa * std::exp(-kI * state.theta);
  const double weight = state.trace_weight();
  if (!(weight > 0.0)) throw NumericalError("encode_qubits: non-positive trace");
  QubitDensityMatrix rho;
  rho.entries = phi1 * phi1.adjoint() + phi2 * phi2.adjoint() + coh * phi1 * phi2.adjoint() +
                std::conj(coh) * phi2 * phi1.adjoint();
  rho.entries /= weight;
  return rho;
}

/// <target|rho|target>
inline double fidelity_squared(const QubitDensityMatrix& rho, WitnessKind target) {
  const Vector8c& v = detail::target_state(target);
  return std::real(v.dot(rho.entries * v));
}

/// 1/2 - <GHZ|rho|GHZ>
inline double ghz_witness_value(const QubitDensityMatrix& rho) {
  return 0.5 - fidelity_squared(rho, WitnessKind::ghz);
}

/// 2/3 - <W|rho|W>
inline double w_witness_value(const QubitDensityMatrix& rho) {
  return 2.0 / 3.0 - fidelity_squared(rho, WitnessKind::w);
}

inline double witness_value(const QubitDensityMatrix& rho, WitnessKind kind) {
  return kind == WitnessKind::ghz ? ghz_witness_value(rho) : w_witness_value(rho);
}

inline double witness_offset(WitnessKind kind) { return kind == WitnessKind::ghz ? 0.5 : 2.0 / 3.0; }

/// Everything needed to evaluate a witness at an arbitrary time.
struct WitnessScenario {
  SystemParams params;
  CatStateSpec cat;
  WitnessKind kind = WitnessKind::ghz;
  Dynamics dynamics = Dynamics::closed;
  CoherenceModel model = CoherenceModel::dilation_consistent;
};

struct WitnessSample {
  double witness = 0.0;
  double fidelity_sq = 0.0;
  double photons = 0.0;
  double kappa_abs = 0.0;
};

namespace detail {

// <target|rho|target> straight from the two branch vectors, without forming rho.
inline double branch_fidelity(const std::array<Vector8c, 2>& phi, Complex coh, double weight, WitnessKind kind) {
  const Vector8c& v = target_state(kind);
  const Complex f1 = v.dot(phi[0]);
  const Complex f2 = v.dot(phi[1]);
  return (std::norm(f1) + std::norm(f2) + 2.0 * std::real(coh * f1 * std::conj(f2))) / weight;
}

}  // namespace detail

/// Both witnesses at one time point.
struct DualSample {
  double ghz = 0.0;
  double w = 0.0;
  double fidelity_ghz = 0.0;
  double fidelity_w = 0.0;
  double photons = 0.0;
  double kappa_abs = 0.0;
};

inline DualSample sample_both(const SystemParams& params, const CatStateSpec& cat, Dynamics dyn,
                              CoherenceModel model, double t) {
  const ModeCoefficients m = mode_coefficients(params, t, dyn);
  const ReducedExcitonState state = reduced_exciton_state(m, cat, model);
  const auto phi = encoded_branches(state);
  const Complex coh = state.kappa * std::exp(-kI * state.theta);
  const double weight = state.trace_weight();
  if (!(weight > 0.0)) throw NumericalError("encode_qubits: non-positive trace");
  DualSample out;
  out.fidelity_ghz = detail::branch_fidelity(phi, coh, weight, WitnessKind::ghz);
  out.fidelity_w = detail::branch_fidelity(phi, coh, weight, WitnessKind::w);
  out.ghz = witness_offset(WitnessKind::ghz) - out.fidelity_ghz;
  out.w = witness_offset(WitnessKind::w) - out.fidelity_w;
  out.photons = mean_cavity_photons(m, cat);
  out.kappa_abs = std::abs(state.kappa);
  return out;
}

inline WitnessSample sample_witness(const WitnessScenario& sc, double t) {
  const ModeCoefficients m = mode_coefficients(sc.params, t, sc.dynamics);
  const ReducedExcitonState state = reduced_exciton_state(m, sc.cat, sc.model);
  const auto phi = encoded_branches(state);
  const double weight = state.trace_weight();
  if (!(weight > 0.0)) throw NumericalError("encode_qubits: non-positive trace");
  WitnessSample out;
  out.fidelity_sq = detail::branch_fidelity(phi, state.kappa * std::exp(-kI * state.theta), weight, sc.kind);
  out.witness = witness_offset(sc.kind) - out.fidelity_sq;
  out.photons = mean_cavity_photons(m, sc.cat);
  out.kappa_abs = std::abs(state.kappa);
  return out;
}

struct WitnessSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> photon_numbers;
  WitnessKind kind = WitnessKind::ghz;
  WitnessScenario source;
};

inline void check_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw ConfigError("time grid: values must be >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("time grid: must be strictly increasing");
  }
}

inline WitnessSeries witness_series(const SystemParams& params, const CatStateSpec& cat,
                                    std::span<const double> grid, WitnessKind kind, Dynamics dyn,
                                    CoherenceModel model) {
  check_grid(grid);
  WitnessSeries s;
  s.kind = kind;
  s.source = WitnessScenario{params, cat, kind, dyn, model};
  s.times.assign(grid.begin(), grid.end());
  s.values.reserve(grid.size());
  s.photon_numbers.reserve(grid.size());
  for (double t : grid) {
    const auto sample = sample_witness(s.source, t);
    s.values.push_back(sample.witness);
    s.photon_numbers.push_back(sample.photons);
  }
  return s;
}

struct OptimalTime {
  double t_star = 0.0;
  double value = 0.0;
};

namespace detail {

// Golden-section minimization of f on [lo, hi] down to `tol` in t.
inline OptimalTime golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  const double mid = 0.5 * (a + b);
  return {mid, f(mid)};
}

}  // namespace detail

/// Grid argmin (first occurrence on ties), optionally refined by golden-section
/// search inside the bracketing grid cells to 1e-6 in time.
inline OptimalTime find_optimal_time(const WitnessSeries& series, bool refine) {
  if (series.times.empty()) throw ConfigError("find_optimal_time: empty series");
  std::size_t best = 0;
  for (std::size_t i = 1; i < series.values.size(); ++i)
    if (series.values[i] < series.values[best]) best = i;
  OptimalTime out{series.times[best], series.values[best]};
  if (!refine || series.times.size() < 2) return out;

  const double lo = series.times[best == 0 ? 0 : best - 1];
  const double hi = series.times[std::min(best + 1, series.times.size() - 1)];
  if (!(hi > lo)) return out;
  const auto f = [&](double t) { return sample_witness(series.source, t).witness; };
  const OptimalTime refined = detail::golden_section(f, lo, hi, 1e-6);
  if (refined.value < out.value) out = refined;
  return out;
}

/// Minimum of the witness over each consecutive window of one fast oscillation
/// period; the lower envelope used for revival detection.
struct WindowMinimum {
  double t = 0.0;
  double value = 0.0;
};

struct DenseScan {
  std::vector<WindowMinimum> windows;
  OptimalTime global_min{0.0, std::numeric_limits<double>::infinity()};
  double max_photons = 0.0;
  std::size_t points = 0;
  // grid t_k = origin + k * step; windows start at origin + j * window
  double origin = 0.0;
  double step = 0.0;
  double window = 0.0;
  std::size_t next_index = 0;
  long current_window = -1;
};

/// Grid spacing giving `points_per_period` samples per shortest coefficient period.
inline double dense_step(const SystemParams& params, double points_per_period = 40.0) {
  const double period = 2.0 * kPi / fastest_frequency(params);
  return period / points_per_period;
}

/// Continues a scan on its grid up to and including `t1`.
inline void extend_scan(DenseScan& scan, const WitnessScenario& sc, double t1) {
  const auto last = static_cast<std::size_t>(std::floor((t1 - scan.origin) / scan.step + 1e-9));
  for (std::size_t i = scan.next_index; i <= last; ++i) {
    const double t = scan.origin + static_cast<double>(i) * scan.step;
    const auto s = sample_witness(sc, t);
    ++scan.points;
    scan.max_photons = std::max(scan.max_photons, s.photons);
    if (s.witness < scan.global_min.value) scan.global_min = {t, s.witness};
    const long w = static_cast<long>(std::floor((t - scan.origin) / scan.window));
    if (w != scan.current_window) {
      scan.windows.push_back({t, s.witness});
      scan.current_window = w;
    } else if (s.witness < scan.windows.back().value) {
      scan.windows.back() = {t, s.witness};
    }
  }
  scan.next_index = std::max(scan.next_index, last + 1);
}

/// Streams the witness over [t0, t1] at `step` without storing the samples,
/// keeping per-window minima.
inline DenseScan dense_scan(const WitnessScenario& sc, double t0, double t1, double step, double window) {
  if (!(t1 > t0) || !(step > 0.0) || !(window > 0.0)) throw ConfigError("dense_scan: invalid range");
  DenseScan scan;
  scan.origin = t0;
  scan.step = step;
  scan.window = window;
  extend_scan(scan, sc, t1);
  return scan;
}

/// Revival minima: window minima that are the lowest value within +-`radius`
/// in time, with that neighbourhood fully inside the scanned range.
inline std::vector<WindowMinimum> revival_minima(const std::vector<WindowMinimum>& windows, double t0, double t1,
                                                 double radius) {
  std::vector<WindowMinimum> out;
  const std::size_t n = windows.size();
  if (n == 0) return out;
  // sparse table of range minima over the window values
  std::vector<std::vector<double>> table{std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) table[0][k] = windows[k].value;
  for (std::size_t len = 2; len <= n; len *= 2) {
    const auto& prev = table.back();
    std::vector<double> next(n - len + 1);
    for (std::size_t k = 0; k + len <= n; ++k) next[k] = std::min(prev[k], prev[k + len / 2]);
    table.push_back(std::move(next));
  }
  const auto range_min = [&](std::size_t lo, std::size_t hi) {  // inclusive, lo <= hi
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= hi - lo + 1) ++level;
    return std::min(table[level][lo], table[level][hi + 1 - (std::size_t{1} << level)]);
  };
  std::size_t lo = 0, hi = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = windows[k].t;
    if (t - radius < t0 || t + radius > t1) continue;
    while (windows[lo].t < t - radius) ++lo;
    if (hi < k) hi = k;
    while (hi + 1 < n && windows[hi + 1].t <= t + radius) ++hi;
    const double v = windows[k].value;
    // earlier equal values win, so plateaus yield one minimum
    if (k > lo && range_min(lo, k - 1) <= v) continue;
    if (k < hi && range_min(k + 1, hi) < v) continue;
    out.push_back(windows[k]);
  }
  return out;
}

/// Neighbourhood radius for revival detection: a quarter of the slowest beat period.
inline double revival_radius(const SystemParams& params) {
  const double beat = slowest_beat_frequency(params);
  if (!(beat > 0.0)) return std::numeric_limits<double>::infinity();
  return 0.25 * 2.0 * kPi / beat;
}

}  // namespace ecsim
