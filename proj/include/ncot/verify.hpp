#pragma once

// Reproducible experiment suites for the metric axioms, the KMS duality and
// the degenerate cases (non-generating generators, non-faithful states).
// Every random object is derived from (seed, trial index), so any report can
// be replayed.

#include <cstdint>
#include <string>
#include <vector>

#include "ncot/solver.hpp"

namespace ncot {

/// splitmix64 of the combined inputs; decorrelates per-trial streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t slot);

/// Random u.c.p. map: Wishart Choi on the block pattern, then
/// C -> (1 (x) T^{-1/2}) C (1 (x) T^{-1/2}) with T = Tr_1 C.
Channel random_ucp_channel(const FdAlgebra& source, const FdAlgebra& target, std::uint64_t seed);

/// Random modular-covariant u.c.p. map with nu o E = mu: a random u.c.p.
/// Choi restricted to the covariant pattern, projected onto the affine
/// constraints, and mixed with the collapse channel until strictly positive.
Channel random_covariant_channel(const State& mu, const State& nu, std::uint64_t seed);

/// The state nu o E on the source algebra of E.
State pull_back(const State& nu, const Channel& e);

/// Max over an orthonormal basis w of the generated subalgebra of ||E(w) - w||.
double identity_residual(const Channel& e, const std::vector<CMatrix>& basis);

struct SuiteOptions {
  double tolerance = 1e-5;           // symmetry and triangle, in W2 units
  double self_tolerance = 1e-3;      // W2(mu, mu)
  double separation_distance = 0.05;  // trace distance that must be resolved
  double separation_floor = 1e-4;    // ... by at least this W2
  double mode_tolerance = 1e-6;      // all-plans value above modular value
  bool allow_nongenerating = false;
  SolverOptions solver;
};

struct IndiscernibleOutcome {
  double w2 = 0.0;
  double trace_distance = 0.0;
  double identity_residual = 0.0;  // of the optimal channel for the self pair
};

struct AxiomReport {
  std::string suite;
  Mode mode = Mode::Modular;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  SuiteOptions options;
  bool generating = true;

  double max_symmetry_gap = 0.0;
  double max_triangle_violation = 0.0;
  double max_self_distance = 0.0;
  double max_identity_residual = 0.0;
  double max_mode_excess = 0.0;  // asymmetric suite: d - W2 over distinct pairs
  std::vector<double> symmetry_gaps;
  std::vector<IndiscernibleOutcome> indiscernibles;
  std::size_t indiscernible_failures = 0;
  std::size_t nonconverged = 0;
  bool symmetry_asserted = true;
  bool passed = true;
};

/// Random faithful triples (mu, nu, xi): symmetry, triangle, self-distance
/// and separation of distinct states, in modular mode.
AxiomReport axiom_suite(const FdAlgebra& algebra, const GeneratorSet& k, std::size_t trials, std::uint64_t seed,
                        const SuiteOptions& opts = {});

/// The same harness for the all-plans distance d. Symmetry gaps are
/// recorded but do not affect `passed`; d <= W2 is checked on every pair.
AxiomReport asymmetric_suite(const FdAlgebra& algebra, const GeneratorSet& k, std::size_t trials,
                             std::uint64_t seed, const SuiteOptions& opts = {});

struct KmsReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double max_term_gap = 0.0;         // per generator, cost(E) vs cost(E^sigma)
  double max_involution_gap = 0.0;   // ||(E^sigma)^sigma - E||
  double max_marginal_residual = 0.0;  // mu o E^sigma vs nu
  double max_ucp_defect = 0.0;       // negative Choi part and unitality of E^sigma
  bool passed = true;
};

/// Random covariant E from mu to nu: term-by-term cost symmetry under the
/// KMS dual, plus involution and marginal checks.
KmsReport kms_symmetry_check(const State& mu, const State& nu, const GeneratorSet& k, std::size_t trials,
                             std::uint64_t seed);

/// Random matched pairs (E, nu o E = mu) on `algebra`, covariance not
/// required: involution, marginal and u.c.p. of the KMS dual.
KmsReport kms_duality_check(const FdAlgebra& algebra, std::size_t trials, std::uint64_t seed);

struct SubadditivityReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  double max_violation = 0.0;  // I(E2 o E1)^{1/2} - I(E1)^{1/2} - I(E2)^{1/2}
  bool passed = true;
};

/// Chains xi <- E2 - nu <- E1 - mu of random u.c.p. maps with matched
/// marginals. No solver involved.
SubadditivityReport subadditivity_suite(const FdAlgebra& algebra, const GeneratorSet& k, std::size_t trials,
                                        std::uint64_t seed);

struct PseudometricReport {
  double trace_distance = 0.0;
  double slice_cost = 0.0;           // transport cost of the slice expectation
  double slice_covariance = 0.0;     // covariance residual of the slice expectation
  double slice_marginal = 0.0;
  double solver_cost = 0.0;          // SDP value with the factor generators
  double w2 = 0.0;                   // sqrt of the smaller of the two
  std::size_t generated_dim = 0;
  std::size_t algebra_dim = 0;
  double w2_generating = 0.0;        // SDP value with a generating set
  bool states_equal = false;
  bool passed = false;
};

/// M_2 (x) M_2 with mu = lambda (x) zeta, nu = lambda (x) eta and generators
/// spanning M_2 (x) 1: distinct states at distance zero.
PseudometricReport pseudometric_demo(const std::vector<double>& lambda = {0.6, 0.4},
                                     const std::vector<double>& zeta = {0.8, 0.2},
                                     const std::vector<double>& eta = {0.3, 0.7}, const SolverOptions& opts = {});

/// Distance between arbitrary states: both are compressed to their supports
/// and each side uses its own compressed generators. Equals solve_w2 when
/// both states are faithful.
W2Result nonfaithful_distance(const State& zeta, const State& eta, const GeneratorSet& k, Mode mode = Mode::Modular,
                              const SolverOptions& opts = {});

struct NonfaithfulReport {
  double self_distance = 0.0;       // rho(zeta, zeta), zeta rank deficient
  double orthogonal_distance = 0.0;  // rho(|0><0|, |1><1|) with Pauli generators
  double orthogonal_expected = 0.0;  // sqrt(sum_l |<0|k_l|0> - <1|k_l|1>|^2)
  bool passed = false;
};

NonfaithfulReport nonfaithful_demo(const SolverOptions& opts = {});

}  // namespace ncot
