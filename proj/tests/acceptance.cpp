// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ncot/modular.hpp"
#include "ncot/oracles.hpp"
#include "ncot/verify.hpp"

using namespace ncot;

namespace {

constexpr std::uint64_t kSeed = 20240611;

// Tolerances.
constexpr double kClassicalTol = 1e-5;
constexpr double kFixtureValue = 0.3;
constexpr double kSelfDistanceTol = 1e-3;
constexpr double kIdentityResidualTol = 1e-6;
constexpr double kSymmetryTol = 1e-5;
constexpr double kTriangleTol = 1e-5;
constexpr double kSubadditivityTol = 1e-9;
constexpr double kInvolutionTol = 1e-9;
constexpr double kDualMarginalTol = 1e-10;
constexpr double kTermSymmetryTol = 1e-8;
constexpr double kCostFormTol = 1e-9;
constexpr double kSeparationDistance = 0.05;
constexpr double kSeparationFloor = 1e-4;
constexpr double kPseudometricTol = 1e-6;
constexpr double kPseudometricTraceDistance = 0.2;
constexpr double kGeneratingFloor = 1e-2;
constexpr double kGridTol = 2e-3;
constexpr std::size_t kGridResolution = 400;
constexpr double kModeTol = 1e-6;

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> diagonal_of(const State& s) {
  std::vector<double> d(s.algebra().dim());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = s.density()(i, i).real();
  return d;
}

GeneratorSet indicators(std::size_t m) {
  std::vector<CMatrix> k;
  for (std::size_t i = 0; i < m; ++i) k.push_back(CMatrix::unit(m, i, i));
  return GeneratorSet(std::move(k));
}

std::vector<double> indicator_cost(const GeneratorSet& k, std::size_t m) {
  std::vector<double> c(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (const auto& g : k) c[i * m + j] += std::norm(g(i, i) - g(j, j));
  return c;
}

State random_qubit(std::uint64_t seed) { return random_faithful_state(FdAlgebra::full(2), seed); }

Outcome classical_reduction() {
  double worst = 0.0;
  std::size_t nonconverged = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const std::size_t m = 2 + t % 5;
    const FdAlgebra alg = FdAlgebra::abelian(m);
    const State mu = random_faithful_state(alg, derive_seed(kSeed, t, 11));
    const State nu = random_faithful_state(alg, derive_seed(kSeed, t, 12));
    const GeneratorSet k = indicators(m);
    const W2Result r = solve_w2(mu, nu, k);
    nonconverged += !r.converged;
    const double lp = transportation_lp(diagonal_of(mu), diagonal_of(nu), indicator_cost(k, m)).value;
    worst = std::max(worst, std::abs(r.w2 * r.w2 - lp));
  }
  const FdAlgebra c2 = FdAlgebra::abelian(2);
  const State mu = make_state(c2, CMatrix::diagonal(std::vector<double>{0.7, 0.3}));
  const State nu = make_state(c2, CMatrix::diagonal(std::vector<double>{0.4, 0.6}));
  const W2Result fixture = solve_w2(mu, nu, GeneratorSet({CMatrix::unit(2, 1, 1)}));
  const double fixture_error = std::abs(fixture.w2 * fixture.w2 - kFixtureValue);
  return {worst <= kClassicalTol && fixture_error <= kClassicalTol && nonconverged == 0 && fixture.converged,
          fmt("max |W2^2 - LP| = %.2e over 50 instances, fixture W2^2 = %.8f, nonconverged %zu", worst,
              fixture.w2 * fixture.w2, nonconverged)};
}

Outcome self_distance() {
  double worst_w2 = 0.0, worst_identity = 0.0;
  std::size_t nonconverged = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const FdAlgebra alg = FdAlgebra::full(t % 2 ? 3 : 2);
    const GeneratorSet k = hermitian_basis(alg);
    const auto basis = generated_subalgebra(alg, k);
    const State mu = random_faithful_state(alg, derive_seed(kSeed, t, 21));
    const W2Result r = solve_w2(mu, mu, k);
    nonconverged += !r.converged;
    worst_w2 = std::max(worst_w2, r.w2);
    worst_identity = std::max(worst_identity, identity_residual(r.optimal_channel, basis));
  }
  return {worst_w2 <= kSelfDistanceTol && worst_identity <= kIdentityResidualTol && nonconverged == 0,
          fmt("max W2(mu,mu) = %.2e, max identity residual = %.2e, nonconverged %zu", worst_w2, worst_identity,
              nonconverged)};
}

// Shared by the symmetry and triangle criteria.
const AxiomReport& qubit_axioms() {
  static const AxiomReport report = [] {
    SuiteOptions opts;
    opts.tolerance = kSymmetryTol;
    return axiom_suite(FdAlgebra::full(2), pauli_generators(), 100, kSeed, opts);
  }();
  return report;
}

Outcome symmetry() {
  const AxiomReport& r = qubit_axioms();
  return {r.max_symmetry_gap <= kSymmetryTol && r.nonconverged == 0 && r.symmetry_gaps.size() == 100,
          fmt("max |W2(mu,nu) - W2(nu,mu)| = %.2e over %zu pairs, nonconverged %zu", r.max_symmetry_gap,
              r.symmetry_gaps.size(), r.nonconverged)};
}

Outcome triangle() {
  const AxiomReport& r = qubit_axioms();
  const FdAlgebra c3 = FdAlgebra::abelian(3);
  const SubadditivityReport m2 = subadditivity_suite(FdAlgebra::full(2), pauli_generators(), 500, kSeed);
  const SubadditivityReport a3 = subadditivity_suite(c3, hermitian_basis(c3), 500, kSeed + 1);
  const double chain = std::max(m2.max_violation, a3.max_violation);
  return {r.max_triangle_violation <= kTriangleTol && r.nonconverged == 0 && chain <= kSubadditivityTol,
          fmt("max triangle violation = %.2e over 100 triples, max chain violation = %.2e over 2 x 500 chains",
              r.max_triangle_violation, chain)};
}

Outcome duality() {
  const KmsReport matched = kms_duality_check(FdAlgebra::full(2), 100, kSeed);
  double term = 0.0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const State mu = random_qubit(derive_seed(kSeed, t, 51));
    const State nu = random_qubit(derive_seed(kSeed, t, 52));
    term = std::max(term, kms_symmetry_check(mu, nu, pauli_generators(), 10, derive_seed(kSeed, t, 53)).max_term_gap);
  }
  return {matched.max_involution_gap <= kInvolutionTol && matched.max_marginal_residual <= kDualMarginalTol &&
              term <= kTermSymmetryTol,
          fmt("involution %.2e, dual marginal %.2e (100 matched), per-term gap %.2e (100 covariant)",
              matched.max_involution_gap, matched.max_marginal_residual, term)};
}

Outcome cost_forms() {
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const FdAlgebra alg = t % 3 == 0 ? FdAlgebra::full(3) : t % 3 == 1 ? FdAlgebra::full(2) : FdAlgebra({2, 1});
    const GeneratorSet k = t % 3 == 1 ? pauli_generators() : hermitian_basis(alg);
    const State nu = random_faithful_state(alg, derive_seed(kSeed, t, 61));
    const Channel e = random_ucp_channel(alg, alg, derive_seed(kSeed, t, 62));
    const State mu = pull_back(nu, e);
    const TransportPlan omega = channel_to_plan(e, nu);
    const double channel_form = cost_channel(e, mu, nu, k).total;
    worst = std::max(worst, std::abs(channel_form - cost_plan(omega, mu, nu, k).total));
    worst = std::max(worst, std::abs(channel_form - cost_plan_gram(omega, mu, nu, k).total));
  }
  return {worst <= kCostFormTol, fmt("max |channel - plan| over plan and Gram paths = %.2e on 50 cases", worst)};
}

Outcome indiscernibles() {
  std::size_t pairs = 0, failures = 0, nonconverged = 0;
  double smallest = INFINITY;
  for (std::uint64_t t = 0; pairs < 50; ++t) {
    const State mu = random_qubit(derive_seed(kSeed, t, 71));
    const State nu = random_qubit(derive_seed(kSeed, t, 72));
    if (trace_distance(mu, nu) < kSeparationDistance) continue;
    ++pairs;
    const W2Result r = solve_w2(mu, nu, pauli_generators());
    nonconverged += !r.converged;
    failures += r.w2 < kSeparationFloor;
    smallest = std::min(smallest, r.w2);
  }
  return {failures == 0 && nonconverged == 0,
          fmt("min W2 = %.3e over 50 pairs with trace distance >= %.2f, failures %zu", smallest, kSeparationDistance,
              failures)};
}

Outcome pseudometric() {
  const PseudometricReport r = pseudometric_demo();
  return {r.w2 <= kPseudometricTol && r.trace_distance > kPseudometricTraceDistance &&
              r.w2_generating >= kGeneratingFloor && r.generated_dim < r.algebra_dim,
          fmt("W2 = %.2e, trace distance = %.3f, generated dim %zu of %zu, generating W2 = %.3f", r.w2,
              r.trace_distance, r.generated_dim, r.algebra_dim, r.w2_generating)};
}

Outcome grid_agreement() {
  const FdAlgebra m2 = FdAlgebra::full(2);
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    double p = u(rng), q = u(rng);
    while (std::abs(p - 0.5) < 0.02) p = u(rng);
    // A few instances with matching or mirrored ratios keep an off-diagonal transfer.
    if (t % 7 == 1) q = p;
    if (t % 7 == 2) q = 1.0 - p;
    while (t % 7 > 2 && std::abs(q - 0.5) < 0.02) q = u(rng);
    const State mu = make_state(m2, CMatrix::diagonal(std::vector<double>{p, 1.0 - p}));
    const State nu = make_state(m2, CMatrix::diagonal(std::vector<double>{q, 1.0 - q}));
    const double grid = qubit_grid_oracle(mu, nu, pauli_generators(), kGridResolution).value;
    worst = std::max(worst, std::abs(grid - solve_w2(mu, nu, pauli_generators()).cost));
  }
  return {worst <= kGridTol, fmt("max |grid - SDP| = %.2e on 20 instances", worst)};
}

Outcome mode_monotonicity() {
  double excess = 0.0;
  for (std::uint64_t t = 0; t < 40; ++t) {
    const FdAlgebra alg = t % 2 ? FdAlgebra::full(2) : FdAlgebra::full(3);
    const GeneratorSet k = t % 2 ? pauli_generators() : hermitian_basis(alg);
    const State mu = random_faithful_state(alg, derive_seed(kSeed, t, 91));
    const State nu = random_faithful_state(alg, derive_seed(kSeed, t, 92));
    excess = std::max(excess, solve_w2(mu, nu, k, Mode::All).w2 - solve_w2(mu, nu, k, Mode::Modular).w2);
  }
  SuiteOptions opts;
  opts.mode_tolerance = kModeTol;
  const AxiomReport r = asymmetric_suite(FdAlgebra::full(2), pauli_generators(), 50, kSeed, opts);
  excess = std::max(excess, r.max_mode_excess);
  return {excess <= kModeTol && r.passed,
          fmt("max d - W2 = %.2e; asymmetric suite: triangle %.2e, self %.2e, separation failures %zu, "
              "symmetry gap (recorded) %.3f",
              excess, r.max_triangle_violation, r.max_self_distance, r.indiscernible_failures, r.max_symmetry_gap)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"classical reduction", classical_reduction},
      {"self-distance", self_distance},
      {"symmetry", symmetry},
      {"triangle inequality", triangle},
      {"duality identities", duality},
      {"cost-form equivalence", cost_forms},
      {"indiscernibles", indiscernibles},
      {"pseudometric counterexample", pseudometric},
      {"qubit oracle agreement", grid_agreement},
      {"mode monotonicity", mode_monotonicity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s [%zu] %s: %s (%.1fs)\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(), s);
    std::fflush(stdout);
    failed += !o.passed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
