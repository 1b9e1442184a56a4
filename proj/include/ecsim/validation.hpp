#pragma once

// Self-checks behind `ecsim validate`: closed form vs matrix exponential,
// structural invariants, and (full level) the Fock-space oracle.

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ecsim/cat_dynamics.hpp"
#include "ecsim/fock_oracle.hpp"
#include "ecsim/propagator.hpp"
#include "ecsim/qubit_witness.hpp"
#include "ecsim/types.hpp"

namespace ecsim {

enum class ValidationLevel { fast, full };

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double required = 0.0;  // pass when measured < required
  bool passed = false;
  std::string note;
};

struct OracleArbitration {
  double dilation_distance = 0.0;
  double cavity_only_distance = 0.0;
  CoherenceModel favored = CoherenceModel::dilation_consistent;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  std::optional<OracleArbitration> arbitration;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

struct ValidationOptions {
  ValidationLevel level = ValidationLevel::fast;
  PropagatorOptions propagator;
  std::ostream* progress = nullptr;
};

inline constexpr std::uint64_t kValidationSeed = 20240611;

/// One random draw from the parameter box used by the equivalence checks.
struct ParameterDraw {
  SystemParams params;
  double t = 0.0;
};

inline std::vector<ParameterDraw> parameter_draws(std::size_t count, std::uint64_t seed = kValidationSeed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(0.0, 5.0), g(0.0, 50.0), d(-600.0, 600.0), gam(0.0, 0.2),
      t(0.0, 1.0), w(-100.0, 100.0);
  std::vector<ParameterDraw> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ParameterDraw draw;
    draw.params.omega_c = w(rng);
    draw.params.delta = d(rng);
    draw.params.g = std::max(1e-3, 50.0 - g(rng));  // (0, 50]
    draw.params.c_hop = c(rng);
    draw.params.gamma_c = gam(rng);
    draw.params.gamma_e = gam(rng);
    draw.t = t(rng);
    out.push_back(draw);
  }
  return out;
}

/// max |closed form - exp(-iMt)| over the draws, closed and dissipative.
inline double propagator_equivalence_error(const std::vector<ParameterDraw>& draws,
                                           const PropagatorOptions& opts = {}) {
  double worst = 0.0;
  for (const auto& d : draws)
    for (Dynamics dyn : {Dynamics::closed, Dynamics::dissipative}) {
      const Matrix6c closed = mode_coefficients(d.params, d.t, dyn, opts).matrix();
      const Matrix6c numeric = propagator_numeric(d.params, d.t, dyn);
      worst = std::max(worst, (closed - numeric).cwiseAbs().maxCoeff());
    }
  return worst;
}

inline double unitarity_error(const std::vector<ParameterDraw>& draws) {
  double worst = 0.0;
  for (const auto& d : draws) {
    const Matrix6c u = mode_coefficients(d.params, d.t, Dynamics::closed).matrix();
    worst = std::max(worst, (u * u.adjoint() - Matrix6c::Identity()).cwiseAbs().maxCoeff());
  }
  return worst;
}

inline double symmetry_error(const std::vector<ParameterDraw>& draws) {
  double worst = 0.0;
  for (const auto& d : draws)
    for (Dynamics dyn : {Dynamics::closed, Dynamics::dissipative}) {
      const Matrix6c u = mode_coefficients(d.params, d.t, dyn).matrix();
      worst = std::max(worst, (u - u.transpose()).cwiseAbs().maxCoeff());
    }
  return worst;
}

inline double branch_invariance_error(const std::vector<ParameterDraw>& draws) {
  double worst = 0.0;
  for (const auto& d : draws)
    for (Dynamics dyn : {Dynamics::closed, Dynamics::dissipative}) {
      const AuxFrequencies aux = aux_frequencies(d.params, dyn);
      const Matrix6c ref = mode_coefficients_from(d.params, aux, d.t, dyn).matrix();
      const Matrix6c neg_a = mode_coefficients_from(d.params, {-aux.a_freq, aux.b_freq}, d.t, dyn).matrix();
      const Matrix6c neg_b = mode_coefficients_from(d.params, {aux.a_freq, -aux.b_freq}, d.t, dyn).matrix();
      worst = std::max({worst, (ref - neg_a).cwiseAbs().maxCoeff(), (ref - neg_b).cwiseAbs().maxCoeff()});
    }
  return worst;
}

/// Largest violation of trace, Hermiticity, positivity and witness bounds for
/// the encoded qubit state over a time grid.
inline double qubit_state_violation(const SystemParams& params, const CatStateSpec& cat, Dynamics dyn,
                                    CoherenceModel model, double t_end, int points) {
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t = t_end * i / (points - 1);
    const auto rho = encode_qubits(reduced_exciton_state(params, cat, t, dyn, model)).entries;
    worst = std::max(worst, std::abs(rho.trace() - 1.0));
    worst = std::max(worst, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix8c> es(rho, Eigen::EigenvaluesOnly);
    worst = std::max(worst, -es.eigenvalues().minCoeff());
    const double ghz = ghz_witness_value({rho});
    const double w = w_witness_value({rho});
    worst = std::max({worst, -0.5 - ghz, ghz - 0.5, -1.0 / 3.0 - w, w - 2.0 / 3.0});
  }
  return worst;
}

/// Oracle sample times for the closed comparison.
inline std::vector<double> closed_oracle_times() {
  std::vector<double> t;
  for (int k = 1; k <= 20; ++k) t.push_back(0.15 * k);
  return t;
}

/// Oracle sample times for the master-equation comparison.
inline std::vector<double> lindblad_oracle_times() {
  std::vector<double> t;
  for (int k = 1; k <= 10; ++k) t.push_back(0.015 * k);
  return t;
}

/// Max trace distance between closed-form and oracle exciton states, closed dynamics.
inline double closed_oracle_distance(const SystemParams& params, const CatStateSpec& cat, int n_max,
                                     const std::vector<double>& times) {
  const TruncatedBasis basis = build_basis(n_max);
  const ClosedEvolver evolver(params, basis);
  const OracleState psi0 = cat_initial_vector(cat, basis);
  double worst = 0.0;
  for (double t : times) {
    const ExcitonDensity oracle = reduce_to_excitons(evolver.evolve(psi0, t), basis);
    const ExcitonDensity model = closed_form_exciton_fock(
        reduced_exciton_state(params, cat, t, Dynamics::closed, CoherenceModel::dilation_consistent), n_max);
    worst = std::max(worst, trace_distance(oracle.rho, model.rho));
  }
  return worst;
}

/// Max trace distance to the master-equation oracle for both coherence models.
inline OracleArbitration lindblad_oracle_distances(const SystemParams& params, const CatStateSpec& cat, int n_max,
                                                   const std::vector<double>& times,
                                                   std::ostream* progress = nullptr) {
  const TruncatedBasis basis = build_basis(n_max);
  const LindbladIntegrator integrator(params, basis);
  MatrixXc rho = cat_initial_vector(cat, basis).density();
  const double dt = max_lindblad_step(params);
  OracleArbitration out;
  double now = 0.0;
  for (double t : times) {
    integrator.evolve(rho, t - now, dt);
    now = t;
    const ExcitonDensity oracle = reduce_to_excitons(OracleState{rho, t}, basis);
    for (CoherenceModel m : {CoherenceModel::dilation_consistent, CoherenceModel::cavity_only}) {
      const ExcitonDensity model =
          closed_form_exciton_fock(reduced_exciton_state(params, cat, t, Dynamics::dissipative, m), n_max);
      const double d = trace_distance(oracle.rho, model.rho);
      double& slot = m == CoherenceModel::dilation_consistent ? out.dilation_distance : out.cavity_only_distance;
      slot = std::max(slot, d);
    }
    if (progress) *progress << "  lindblad t=" << t << " done\n" << std::flush;
  }
  out.favored = out.dilation_distance <= out.cavity_only_distance ? CoherenceModel::dilation_consistent
                                                                  : CoherenceModel::cavity_only;
  return out;
}

inline ValidationReport run_validation(const ValidationOptions& opts = {}) {
  ValidationReport report;
  auto add = [&](std::string name, double measured, double required, std::string note = {}) {
    report.checks.push_back({std::move(name), measured, required, measured < required, std::move(note)});
    if (opts.progress) {
      const auto& c = report.checks.back();
      *opts.progress << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << c.measured
                     << " required<" << c.required << "\n"
                     << std::flush;
    }
  };

  const auto draws = parameter_draws(200);
  add("propagator closed form vs matrix exponential", propagator_equivalence_error(draws, opts.propagator), 1e-9,
      opts.propagator.printed_u2_prefactor ? "u21/u22 evaluated without the 1/g factor" : "");
  add("closed propagator unitarity", unitarity_error(draws), 1e-12);
  add("propagator symmetry", symmetry_error(draws), 1e-12);
  add("square-root branch invariance", branch_invariance_error(draws), 1e-12);

  SystemParams base;
  base.g = 30.0;
  base.c_hop = 1.0;
  double worst_state = 0.0;
  for (double delta : {0.0, -500.0}) {
    base.delta = delta;
    const double t_end = delta == 0.0 ? 3.0 : 200.0;
    for (const auto& cat : {CatStateSpec::symmetric(2.0, 0.0), CatStateSpec::symmetric(0.01, kPi)}) {
      for (CoherenceModel m : {CoherenceModel::dilation_consistent, CoherenceModel::cavity_only})
        worst_state = std::max(worst_state, qubit_state_violation(base, cat, Dynamics::closed, m, t_end, 400));
      SystemParams lossy = base;
      lossy.gamma_c = 0.05;
      lossy.gamma_e = 0.001;
      worst_state = std::max(worst_state, qubit_state_violation(lossy, cat, Dynamics::dissipative,
                                                                CoherenceModel::dilation_consistent, t_end, 400));
    }
  }
  add("encoded qubit state trace/Hermitian/PSD/witness bounds", worst_state, 1e-10);

  if (opts.level == ValidationLevel::full) {
    SystemParams p;
    p.g = 30.0;
    p.c_hop = 1.0;
    const CatStateSpec cat = CatStateSpec::symmetric(0.5, 0.0);
    if (opts.progress) *opts.progress << "  closed oracle (n_max=10)...\n" << std::flush;
    add("oracle closed trace distance", closed_oracle_distance(p, cat, 10, closed_oracle_times()), 1e-6);

    p.gamma_c = 0.05;
    p.gamma_e = 0.001;
    const int n_max = required_n_max(std::norm(cat.alpha1));
    if (opts.progress) *opts.progress << "  lindblad oracle (n_max=" << n_max << ")...\n" << std::flush;
    const OracleArbitration arb = lindblad_oracle_distances(p, cat, n_max, lindblad_oracle_times(), opts.progress);
    add("oracle dissipative trace distance (dilation_consistent)", arb.dilation_distance, 1e-4);
    report.arbitration = arb;
  }
  return report;
}

inline void print_validation(std::ostream& out, const ValidationReport& report) {
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS" : "FAIL") << "  " << c.name << ": measured " << c.measured << ", required < "
        << c.required;
    if (!c.note.empty()) out << " (" << c.note << ")";
    out << "\n";
  }
  if (report.arbitration) {
    const auto& a = *report.arbitration;
    out << "oracle arbitration: dilation_consistent distance " << a.dilation_distance
        << ", cavity_only distance " << a.cavity_only_distance << "; favored model "
        << (a.favored == CoherenceModel::dilation_consistent ? "dilation_consistent" : "cavity_only")
        << " by a factor of "
        << (std::min(a.dilation_distance, a.cavity_only_distance) > 0.0
                ? std::max(a.dilation_distance, a.cavity_only_distance) /
                      std::min(a.dilation_distance, a.cavity_only_distance)
                : std::numeric_limits<double>::infinity())
        << "\n";
  }
  out << (report.passed() ? "validation passed" : "validation FAILED") << "\n";
}

}  // namespace ecsim
