#pragma once

// Brute-force reference dynamics in a truncated occupation-number basis.
//
// The rotating-wave Hamiltonian conserves the total excitation number and the
// loss terms only lower it, so truncating on the *global* excitation number is
// exact up to the Poisson tail of the initial state.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <lapacke.h>

#include "ecsim/cat_dynamics.hpp"
#include "ecsim/propagator.hpp"
#include "ecsim/types.hpp"

namespace ecsim {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using SparseReal = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr double kTailBound = 1e-10;

/// Bytes the oracle may allocate for one dense density matrix. Overridden by
/// the ECSIM_ORACLE_MEMORY_BYTES environment variable.
inline std::size_t oracle_memory_budget() {
  constexpr std::size_t kDefault = std::size_t{2} << 30;
  if (const char* env = std::getenv("ECSIM_ORACLE_MEMORY_BYTES")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefault;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Occupation-number states of `Modes` bosonic modes with total <= n_max,
/// ordered by total excitation and then in descending lexicographic order, so
/// the single-excitation sector lists the modes in their natural order.
template <std::size_t Modes>
class FockBasis {
 public:
  using Occupation = std::array<int, Modes>;

  explicit FockBasis(int n_max) : n_max_(n_max) {
    if (n_max < 0) throw ConfigError("n_max must be >= 0");
    states_.reserve(binomial(static_cast<std::size_t>(n_max) + Modes, Modes));
    sector_begin_.push_back(0);
    Occupation occ{};
    for (int total = 0; total <= n_max; ++total) {
      enumerate(0, total, occ);
      sector_begin_.push_back(states_.size());
    }
    index_.reserve(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(key(states_[i]), i);
  }

  int n_max() const { return n_max_; }
  std::size_t size() const { return states_.size(); }
  const Occupation& state(std::size_t i) const { return states_[i]; }
  std::size_t sector_begin(int total) const { return sector_begin_[static_cast<std::size_t>(total)]; }
  std::size_t sector_end(int total) const { return sector_begin_[static_cast<std::size_t>(total) + 1]; }

  std::optional<std::size_t> index(const Occupation& occ) const {
    int total = 0;
    for (int n : occ) {
      if (n < 0) return std::nullopt;
      total += n;
    }
    if (total > n_max_) return std::nullopt;
    const auto it = index_.find(key(occ));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  static int total(const Occupation& occ) {
    int s = 0;
    for (int n : occ) s += n;
    return s;
  }

 private:
  void enumerate(std::size_t mode, int remaining, Occupation& occ) {
    if (mode + 1 == Modes) {
      occ[mode] = remaining;
      states_.push_back(occ);
      return;
    }
    for (int n = remaining; n >= 0; --n) {
      occ[mode] = n;
      enumerate(mode + 1, remaining - n, occ);
    }
  }

  std::uint64_t key(const Occupation& occ) const {
    std::uint64_t k = 0;
    for (int n : occ) k = k * static_cast<std::uint64_t>(n_max_ + 1) + static_cast<std::uint64_t>(n);
    return k;
  }

  int n_max_;
  std::vector<Occupation> states_;
  std::vector<std::size_t> sector_begin_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Six-mode basis: a1, a2, a3, b1, b2, b3.
using TruncatedBasis = FockBasis<6>;
/// Three exciton modes: b1, b2, b3.
using ExcitonBasis = FockBasis<3>;

/// Builds the six-mode basis, refusing when one dense density matrix over it
/// would exceed the memory budget.
inline TruncatedBasis build_basis(int n_max, std::size_t budget_bytes = oracle_memory_budget()) {
  if (n_max < 0) throw ConfigError("n_max must be >= 0");
  const std::size_t count = binomial(static_cast<std::size_t>(n_max) + 6, 6);
  const double bytes = static_cast<double>(count) * static_cast<double>(count) * sizeof(Complex);
  if (bytes > static_cast<double>(budget_bytes)) {
    throw ResourceRefusal("oracle basis n_max=" + std::to_string(n_max) + " has " + std::to_string(count) +
                          " states; a density matrix needs " + std::to_string(static_cast<long double>(bytes)) +
                          " bytes, budget is " + std::to_string(budget_bytes));
  }
  return TruncatedBasis(n_max);
}

/// P(n > n_max) for a Poisson distribution of mean `mu`.
inline double poisson_tail(double mu, int n_max) {
  if (mu <= 0.0) return 0.0;
  double term = std::exp(-mu);
  for (int n = 1; n <= n_max + 1; ++n) term *= mu / n;
  double tail = 0.0;
  for (int n = n_max + 1; n < n_max + 2000; ++n) {
    tail += term;
    term *= mu / (n + 1);
    if (term < 1e-30 * std::max(tail, 1e-300) || term == 0.0) break;
  }
  return tail;
}

inline std::string format_tail(double tail) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", tail);
  return buf;
}

/// Smallest n_max whose Poisson tail for mean `mu` is below `tail`.
inline int required_n_max(double mu, double tail = kTailBound) {
  int n = 0;
  while (poisson_tail(mu, n) >= tail) ++n;
  return n;
}

/// Rotating-wave Hamiltonian in the occupation basis (real symmetric).
inline SparseReal build_hamiltonian(const SystemParams& params, const TruncatedBasis& basis) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(basis.size() * 13);
  const double omega_e = params.omega_c - params.delta;
  // hop(from, to): a_to^dagger a_from
  auto add_hop = [&](std::size_t col, const TruncatedBasis::Occupation& occ, int from, int to, double amp) {
    if (amp == 0.0 || occ[from] == 0) return;
    auto next = occ;
    next[from] -= 1;
    next[to] += 1;
    const auto row = basis.index(next);
    if (!row) return;
    trips.emplace_back(static_cast<int>(*row), static_cast<int>(col),
                       amp * std::sqrt(static_cast<double>(occ[from])) * std::sqrt(static_cast<double>(next[to])));
  };
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& occ = basis.state(i);
    const double diag = params.omega_c * (occ[0] + occ[1] + occ[2]) + omega_e * (occ[3] + occ[4] + occ[5]);
    if (diag != 0.0) trips.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);
    for (int site = 0; site < 3; ++site) {
      add_hop(i, occ, site, site + 3, params.g);  // b^dagger a
      add_hop(i, occ, site + 3, site, params.g);  // a^dagger b
      const int next_site = (site + 1) % 3;
      add_hop(i, occ, next_site, site, params.c_hop);  // a_i^dagger a_{i+1}
      add_hop(i, occ, site, next_site, params.c_hop);  // a_{i+1}^dagger a_i
    }
  }
  const auto n = static_cast<int>(basis.size());
  SparseReal h(n, n);
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

/// A pure state or a density matrix over a TruncatedBasis.
struct OracleState {
  std::variant<VectorXc, MatrixXc> data;
  double t = 0.0;

  bool is_pure() const { return std::holds_alternative<VectorXc>(data); }
  const VectorXc& vector() const { return std::get<VectorXc>(data); }
  const MatrixXc& matrix() const { return std::get<MatrixXc>(data); }

  MatrixXc density() const {
    if (is_pure()) return vector() * vector().adjoint();
    return matrix();
  }
};

/// Unit vector on a single occupation state.
inline VectorXc basis_vector(const TruncatedBasis& basis, const TruncatedBasis::Occupation& occ) {
  const auto idx = basis.index(occ);
  if (!idx) throw ConfigError("occupation outside the truncated basis");
  VectorXc v = VectorXc::Zero(static_cast<Eigen::Index>(basis.size()));
  v(static_cast<Eigen::Index>(*idx)) = 1.0;
  return v;
}

namespace detail {

// e^{-|a|^2/2} a^n / sqrt(n!) for n = 0..n_max
inline std::vector<Complex> coherent_coefficients(Complex alpha, int n_max) {
  std::vector<Complex> c(static_cast<std::size_t>(n_max) + 1);
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= n_max; ++n) c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

}  // namespace detail

/// Unnormalized Fock expansion of |alpha1> + e^{i theta}|alpha2> on mode b1.
inline VectorXc cat_initial_vector_unnormalized(const CatStateSpec& cat, const TruncatedBasis& basis) {
  const int n_max = basis.n_max();
  for (Complex a : {cat.alpha1, cat.alpha2}) {
    const double tail = poisson_tail(std::norm(a), n_max);
    if (tail >= kTailBound) {
      throw TruncationError("cat_initial_vector: Poisson tail " + format_tail(tail) + " at n_max=" +
                            std::to_string(n_max) + "; need n_max >= " +
                            std::to_string(required_n_max(std::norm(a))));
    }
  }
  const auto c1 = detail::coherent_coefficients(cat.alpha1, n_max);
  const auto c2 = detail::coherent_coefficients(cat.alpha2, n_max);
  const Complex phase = std::exp(kI * cat.theta);
  VectorXc v = VectorXc::Zero(static_cast<Eigen::Index>(basis.size()));
  for (int n = 0; n <= n_max; ++n) {
    const auto idx = basis.index({0, 0, 0, n, 0, 0});
    v(static_cast<Eigen::Index>(*idx)) = c1[n] + phase * c2[n];
  }
  return v;
}

/// Normalized initial cat state.
inline OracleState cat_initial_vector(const CatStateSpec& cat, const TruncatedBasis& basis) {
  normalization(cat);  // rejects degenerate superpositions
  VectorXc v = cat_initial_vector_unnormalized(cat, basis);
  const double norm = v.norm();
  if (!(norm > 0.0)) throw DegenerateSuperposition();
  v /= norm;
  return OracleState{v, 0.0};
}

/// Closed evolution by per-sector eigendecomposition of the Hamiltonian.
/// Sectors are diagonalized once and reused across times.
class ClosedEvolver {
 public:
  ClosedEvolver(const SystemParams& params, const TruncatedBasis& basis) : basis_(&basis) {
    const SparseReal h = build_hamiltonian(params, basis);
    for (int n = 0; n <= basis.n_max(); ++n) {
      const auto begin = static_cast<Eigen::Index>(basis.sector_begin(n));
      const auto dim = static_cast<Eigen::Index>(basis.sector_end(n)) - begin;
      Eigen::MatrixXd block = Eigen::MatrixXd(h.block(begin, begin, dim, dim));
      Eigen::VectorXd evals(dim);
      const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(dim),
                                             block.data(), static_cast<lapack_int>(dim), evals.data());
      if (info != 0) throw NumericalError("sector eigendecomposition failed (info=" + std::to_string(info) + ")");
      sectors_.push_back({begin, dim, std::move(block), std::move(evals)});
    }
  }

  VectorXc evolve(const VectorXc& psi0, double t) const {
    if (psi0.size() != static_cast<Eigen::Index>(basis_->size())) throw ConfigError("state dimension mismatch");
    VectorXc out(psi0.size());
    for (const auto& s : sectors_) {
      const VectorXc seg = psi0.segment(s.begin, s.dim);
      Eigen::VectorXd re = s.vecs.transpose() * seg.real();
      Eigen::VectorXd im = s.vecs.transpose() * seg.imag();
      VectorXc coeff(s.dim);
      for (Eigen::Index k = 0; k < s.dim; ++k)
        coeff(k) = Complex(re(k), im(k)) * std::exp(Complex(0.0, -s.evals(k) * t));
      out.segment(s.begin, s.dim) = s.vecs.cast<Complex>() * coeff;
    }
    return out;
  }

  OracleState evolve(const OracleState& psi0, double t) const {
    if (!psi0.is_pure()) throw ConfigError("evolve_closed: expects a pure state");
    return OracleState{evolve(psi0.vector(), t), psi0.t + t};
  }

 private:
  struct Sector {
    Eigen::Index begin;
    Eigen::Index dim;
    Eigen::MatrixXd vecs;
    Eigen::VectorXd evals;
  };
  const TruncatedBasis* basis_;
  std::vector<Sector> sectors_;
};

inline OracleState evolve_closed(const SystemParams& params, const TruncatedBasis& basis, const OracleState& psi0,
                                 double t) {
  return ClosedEvolver(params, basis).evolve(psi0, t);
}

/// Largest step the Lindblad integrator accepts: 0.1 / max(|A|, |B|, rates).
inline double max_lindblad_step(const SystemParams& params) {
  const double scale = std::max({fastest_frequency(params), params.gamma_c, params.gamma_e, 1e-12});
  return 0.1 / scale;
}

/// Zero-temperature master equation
///   drho/dt = -i[H, rho] + sum_L (2 L rho L^dagger - L^dagger L rho - rho L^dagger L)
/// with L = sqrt(gamma_c) a_i and sqrt(gamma_e) b_i, integrated by classical RK4.
/// With this convention <a> decays as e^{-gamma t}.
class LindbladIntegrator {
 public:
  LindbladIntegrator(const SystemParams& params, const TruncatedBasis& basis,
                     std::size_t budget_bytes = oracle_memory_budget())
      : params_(params), dim_(static_cast<Eigen::Index>(basis.size())) {
    constexpr double kWorkMatrices = 6.0;
    const double bytes = kWorkMatrices * static_cast<double>(dim_) * static_cast<double>(dim_) * sizeof(Complex);
    if (bytes > static_cast<double>(budget_bytes))
      throw ResourceRefusal("Lindblad integrator needs " + std::to_string(static_cast<long double>(bytes)) +
                            " bytes for " + std::to_string(dim_) + " states; budget is " +
                            std::to_string(budget_bytes));
    hamiltonian_ = build_hamiltonian(params, basis);
    hamiltonian_.makeCompressed();
    decay_.resize(dim_);
    for (std::size_t l = 0; l < 6; ++l) {
      raise_[l].assign(basis.size(), -1);
      weight_[l].assign(basis.size(), 0.0);
    }
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const auto& occ = basis.state(i);
      decay_(static_cast<Eigen::Index>(i)) =
          params.gamma_c * (occ[0] + occ[1] + occ[2]) + params.gamma_e * (occ[3] + occ[4] + occ[5]);
      for (std::size_t l = 0; l < 6; ++l) {
        auto up = occ;
        up[l] += 1;
        if (const auto j = basis.index(up)) {
          raise_[l][i] = static_cast<long>(*j);
          weight_[l][i] = std::sqrt(static_cast<double>(up[l]));
        }
      }
    }
  }

  Eigen::Index dimension() const { return dim_; }

  /// drho/dt for Hermitian rho.
  void derivative(const MatrixXc& rho, MatrixXc& out) const {
    // Z = -i H rho - Gamma rho; drho/dt = Z + Z^dagger + jumps
    MatrixXc& z = scratch_;
    z.resize(dim_, dim_);
    const auto* outer = hamiltonian_.outerIndexPtr();
    const auto* inner = hamiltonian_.innerIndexPtr();
    const auto* vals = hamiltonian_.valuePtr();
    for (Eigen::Index col = 0; col < dim_; ++col) {
      const Complex* src = rho.col(col).data();
      Complex* dst = z.col(col).data();
      for (Eigen::Index row = 0; row < dim_; ++row) {
        double re = 0.0, im = 0.0;
        for (auto k = outer[row]; k < outer[row + 1]; ++k) {
          re += vals[k] * src[inner[k]].real();
          im += vals[k] * src[inner[k]].imag();
        }
        const double d = decay_(row);
        dst[row] = Complex(im - d * src[row].real(), -re - d * src[row].imag());
      }
    }
    out.noalias() = z + z.adjoint();
    for (std::size_t l = 0; l < 6; ++l) {
      const double rate = 2.0 * (l < 3 ? params_.gamma_c : params_.gamma_e);
      if (rate == 0.0) continue;
      const auto& up = raise_[l];
      const auto& w = weight_[l];
      for (Eigen::Index col = 0; col < dim_; ++col) {
        const long ucol = up[static_cast<std::size_t>(col)];
        if (ucol < 0) continue;
        const double wc = rate * w[static_cast<std::size_t>(col)];
        const Complex* src = rho.col(ucol).data();
        Complex* dst = out.col(col).data();
        for (Eigen::Index row = 0; row < dim_; ++row) {
          const long urow = up[static_cast<std::size_t>(row)];
          if (urow >= 0) dst[row] += (wc * w[static_cast<std::size_t>(row)]) * src[urow];
        }
      }
    }
  }

  /// Advances rho by `duration` using equal RK4 steps no larger than `dt`.
  void evolve(MatrixXc& rho, double duration, double dt) const {
    if (duration < 0.0) throw ConfigError("evolve_lindblad: negative duration");
    if (!(dt > 0.0) || dt > max_lindblad_step(params_) * (1.0 + 1e-12))
      throw ConfigError("evolve_lindblad: step " + std::to_string(dt) + " exceeds limit " +
                        std::to_string(max_lindblad_step(params_)));
    if (rho.rows() != dim_ || rho.cols() != dim_) throw ConfigError("evolve_lindblad: dimension mismatch");
    if (duration == 0.0) return;
    const auto steps = static_cast<long>(std::ceil(duration / dt - 1e-9));
    const double h = duration / static_cast<double>(steps);
    MatrixXc k(dim_, dim_), acc(dim_, dim_), probe(dim_, dim_);
    for (long s = 0; s < steps; ++s) {
      derivative(rho, k);
      acc = k;
      probe = rho + (0.5 * h) * k;
      derivative(probe, k);
      acc += 2.0 * k;
      probe = rho + (0.5 * h) * k;
      derivative(probe, k);
      acc += 2.0 * k;
      probe = rho + h * k;
      derivative(probe, k);
      acc += k;
      rho += (h / 6.0) * acc;
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
  }

 private:
  SystemParams params_;
  Eigen::Index dim_;
  SparseReal hamiltonian_;
  Eigen::VectorXd decay_;
  std::array<std::vector<long>, 6> raise_;
  std::array<std::vector<double>, 6> weight_;
  mutable MatrixXc scratch_;
};

inline OracleState evolve_lindblad(const SystemParams& params, const TruncatedBasis& basis, const OracleState& rho0,
                                   double t, double dt) {
  MatrixXc rho = rho0.density();
  LindbladIntegrator(params, basis).evolve(rho, t, dt);
  return OracleState{std::move(rho), rho0.t + t};
}

/// Density matrix over the exciton Fock space (ExcitonBasis with the same n_max).
struct ExcitonDensity {
  ExcitonBasis basis;
  MatrixXc rho;
};

/// Partial trace over the three cavity modes.
inline ExcitonDensity reduce_to_excitons(const OracleState& state, const TruncatedBasis& basis) {
  ExcitonBasis ebasis(basis.n_max());
  const TruncatedBasis::Occupation zero{};
  (void)zero;
  // group global indices by cavity configuration
  std::unordered_map<std::uint64_t, std::vector<std::pair<Eigen::Index, Eigen::Index>>> groups;
  const auto base = static_cast<std::uint64_t>(basis.n_max() + 1);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& occ = basis.state(i);
    const std::uint64_t cav = (static_cast<std::uint64_t>(occ[0]) * base + occ[1]) * base + occ[2];
    const auto e = ebasis.index({occ[3], occ[4], occ[5]});
    groups[cav].emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*e));
  }
  const auto de = static_cast<Eigen::Index>(ebasis.size());
  MatrixXc rho = MatrixXc::Zero(de, de);
  if (state.is_pure()) {
    const VectorXc& psi = state.vector();
    for (const auto& [cav, members] : groups)
      for (const auto& [gi, ei] : members)
        for (const auto& [gj, ej] : members) rho(ei, ej) += psi(gi) * std::conj(psi(gj));
  } else {
    const MatrixXc& full = state.matrix();
    for (const auto& [cav, members] : groups)
      for (const auto& [gi, ei] : members)
        for (const auto& [gj, ej] : members) rho(ei, ej) += full(gi, gj);
  }
  return {std::move(ebasis), std::move(rho)};
}

/// Fock expansion of a three-mode coherent product over `basis`.
inline VectorXc coherent_product_vector(const std::array<Complex, 3>& beta, const ExcitonBasis& basis) {
  std::array<std::vector<Complex>, 3> coeff;
  for (int i = 0; i < 3; ++i) coeff[i] = detail::coherent_coefficients(beta[i], basis.n_max());
  VectorXc v(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto& occ = basis.state(k);
    v(static_cast<Eigen::Index>(k)) = coeff[0][occ[0]] * coeff[1][occ[1]] * coeff[2][occ[2]];
  }
  return v;
}

/// Closed-form reduced exciton state expanded in the oracle's exciton Fock basis.
inline ExcitonDensity closed_form_exciton_fock(const ReducedExcitonState& state, int n_max) {
  for (const auto* beta : {&state.exciton_beta1, &state.exciton_beta2}) {
    double mu = 0.0;
    for (Complex b : *beta) mu += std::norm(b);
    const double tail = poisson_tail(mu, n_max);
    if (tail >= kTailBound)
      throw TruncationError("closed_form_exciton_fock: Poisson tail " + format_tail(tail) + " at n_max=" +
                            std::to_string(n_max));
  }
  ExcitonBasis basis(n_max);
  const VectorXc b1 = coherent_product_vector(state.exciton_beta1, basis);
  const VectorXc b2 = coherent_product_vector(state.exciton_beta2, basis);
  const Complex coh = state.kappa * std::exp(-kI * state.theta);
  MatrixXc rho = b1 * b1.adjoint() + b2 * b2.adjoint() + coh * b1 * b2.adjoint() + std::conj(coh) * b2 * b1.adjoint();
  rho /= state.trace_weight();
  return {std::move(basis), std::move(rho)};
}

/// 0.5 * sum |eig(rho - sigma)|
inline double trace_distance(const MatrixXc& rho, const MatrixXc& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols() || rho.rows() != rho.cols())
    throw ConfigError("trace_distance: dimension mismatch");
  MatrixXc diff = rho - sigma;
  diff = 0.5 * (diff + diff.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(diff, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("trace_distance: eigensolver failed");
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Projects an exciton Fock density onto the qubit encoding of `state`:
/// per mode |0> = |beta1_i>, |1> = (|beta2_i> - p_i |beta1_i>) / s_i.
/// Modes with s_i == 0 use an arbitrary orthogonal complement; their |1>
/// carries no weight.
inline Eigen::Matrix<Complex, 8, 8> project_to_qubits(const ExcitonDensity& fock, const ReducedExcitonState& state) {
  const int n_max = fock.basis.n_max();
  std::array<std::array<std::vector<Complex>, 2>, 3> mode_vecs;
  for (int i = 0; i < 3; ++i) {
    const auto x = detail::coherent_coefficients(state.exciton_beta1[i], n_max);
    const auto y = detail::coherent_coefficients(state.exciton_beta2[i], n_max);
    const Complex p = std::exp(log_coherent_overlap(state.exciton_beta1[i], state.exciton_beta2[i]));
    const double s = std::sqrt(std::max(0.0, 1.0 - std::norm(p)));
    std::vector<Complex> one(x.size());
    if (s > 1e-12) {
      for (std::size_t n = 0; n < x.size(); ++n) one[n] = (y[n] - p * x[n]) / s;
    } else {
      std::fill(one.begin(), one.end(), Complex(0.0, 0.0));
    }
    mode_vecs[i] = {x, one};
  }
  const auto de = static_cast<Eigen::Index>(fock.basis.size());
  Eigen::Matrix<Complex, Eigen::Dynamic, 8> iso(de, 8);
  for (Eigen::Index k = 0; k < de; ++k) {
    const auto& occ = fock.basis.state(static_cast<std::size_t>(k));
    for (int q = 0; q < 8; ++q) {
      const int q0 = (q >> 2) & 1, q1 = (q >> 1) & 1, q2 = q & 1;
      iso(k, q) = mode_vecs[0][q0][occ[0]] * mode_vecs[1][q1][occ[1]] * mode_vecs[2][q2][occ[2]];
    }
  }
  return iso.adjoint() * fock.rho * iso;
}

}  // namespace ecsim
