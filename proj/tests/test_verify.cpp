#include <doctest.h>

#include <cmath>

#include "ncot/modular.hpp"
#include "ncot/oracles.hpp"
#include "support.hpp"

using namespace ncot;
using ncot::testing::diagonal_cost;

TEST_SUITE("verify") {
  TEST_CASE("seed derivation is deterministic and decorrelated") {
    CHECK(derive_seed(7, 3, 1) == derive_seed(7, 3, 1));
    CHECK(derive_seed(7, 3, 1) != derive_seed(7, 3, 2));
    CHECK(derive_seed(7, 3, 1) != derive_seed(7, 4, 1));
    CHECK(derive_seed(7, 3, 1) != derive_seed(8, 3, 1));
  }

  TEST_CASE("random covariant channels are modular transport plans") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const FdAlgebra alg = s % 2 ? FdAlgebra::full(2) : FdAlgebra({2, 1});
      const State mu = random_faithful_state(alg, derive_seed(s, 0, 1));
      const State nu = random_faithful_state(alg, derive_seed(s, 0, 2));
      const Channel e = random_covariant_channel(mu, nu, s);
      REQUIRE(e.cp_slack() > 0.0);
      REQUIRE(e.unitality_residual() <= 1e-10);
      REQUIRE(e.marginal_residual(mu, nu) <= 1e-10);
      REQUIRE(covariance_residual(e, mu, nu) <= 1e-10);
    }
  }

  TEST_CASE("pull-back yields the matched source state") {
    const FdAlgebra m3 = FdAlgebra::full(3);
    const State nu = random_faithful_state(m3, 1);
    const Channel e = random_ucp_channel(m3, m3, 2);
    CHECK(e.marginal_residual(pull_back(nu, e), nu) <= 1e-12);
  }

  TEST_CASE("axiom suite on qubits") {
    const AxiomReport r = axiom_suite(FdAlgebra::full(2), pauli_generators(), 25, 7);
    CHECK(r.passed);
    CHECK(r.nonconverged == 0);
    CHECK(r.symmetry_gaps.size() == 25);
    CHECK(r.max_symmetry_gap <= 1e-5);
    CHECK(r.max_triangle_violation <= 1e-5);
    CHECK(r.max_self_distance <= 1e-3);
    CHECK(r.max_identity_residual <= 1e-6);
  }

  TEST_CASE("axiom suite is replayable") {
    const AxiomReport a = axiom_suite(FdAlgebra::full(2), pauli_generators(), 3, 11);
    const AxiomReport b = axiom_suite(FdAlgebra::full(2), pauli_generators(), 3, 11);
    CHECK(a.symmetry_gaps == b.symmetry_gaps);
    CHECK(a.max_triangle_violation == b.max_triangle_violation);
  }

  TEST_CASE("empty suites") {
    const AxiomReport r = axiom_suite(FdAlgebra::full(2), pauli_generators(), 0, 1);
    CHECK(r.passed);
    CHECK(r.symmetry_gaps.empty());
    CHECK(r.indiscernibles.empty());
    CHECK(kms_duality_check(FdAlgebra::full(2), 0, 1).passed);
    CHECK(subadditivity_suite(FdAlgebra::full(2), pauli_generators(), 0, 1).passed);
  }

  TEST_CASE("axiom suite on C^3 matches the transportation LP") {
    const FdAlgebra c3 = FdAlgebra::abelian(3);
    const GeneratorSet k = hermitian_basis(c3);
    CHECK(axiom_suite(c3, k, 20, 3).passed);
    const auto cost = diagonal_cost(k, 3);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const State mu = random_faithful_state(c3, derive_seed(s, 5, 1));
      const State nu = random_faithful_state(c3, derive_seed(s, 5, 2));
      std::vector<double> p(3), q(3);
      for (std::size_t i = 0; i < 3; ++i) p[i] = mu.density()(i, i).real(), q[i] = nu.density()(i, i).real();
      const double lp = transportation_lp(p, q, cost).value;
      REQUIRE(std::abs(solve_w2(mu, nu, k).cost - lp) <= 1e-6);
    }
  }

  TEST_CASE("non-generating sets need the override") {
    const FdAlgebra t = FdAlgebra::tensor_product(2, 2);
    CHECK_THROWS_AS(axiom_suite(t, first_factor_basis(t), 1, 1), InputError);
    SuiteOptions opts;
    opts.allow_nongenerating = true;
    const AxiomReport r = axiom_suite(t, first_factor_basis(t), 1, 1, opts);
    CHECK_FALSE(r.generating);
  }

  TEST_CASE("asymmetric suite") {
    const AxiomReport r = asymmetric_suite(FdAlgebra::full(2), pauli_generators(), 10, 7);
    CHECK(r.passed);
    CHECK_FALSE(r.symmetry_asserted);
    CHECK(r.symmetry_gaps.size() == 10);
    CHECK(r.max_mode_excess <= 1e-6);
    const State mu = random_faithful_state(FdAlgebra::full(2), 3);
    CHECK(solve_w2(mu, mu, pauli_generators(), Mode::All).w2 <= 1e-3);
  }

  TEST_CASE("KMS symmetry of costs") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const State mu = random_faithful_state(m2, 21);
    const State nu = random_faithful_state(m2, 22);
    const KmsReport r = kms_symmetry_check(mu, nu, pauli_generators(), 100, 3);
    CHECK(r.passed);
    CHECK(r.max_term_gap <= 1e-8);

    // Collapse channel: both sides are closed-form.
    const Channel collapse = Channel::collapse(mu, m2);
    const Channel dual = kms_dual(collapse, mu, nu);
    const CostReport fwd = cost_channel(collapse, mu, nu, pauli_generators());
    const CostReport bwd = cost_channel(dual, nu, mu, pauli_generators());
    for (std::size_t l = 0; l < 3; ++l) CHECK(std::abs(fwd.per_generator[l] - bwd.per_generator[l]) <= 1e-12);

    const Channel id = Channel::identity(m2);
    CHECK(std::abs(cost_channel(kms_dual(id, mu, mu), mu, mu, pauli_generators()).total) <= 1e-12);
  }

  TEST_CASE("KMS symmetry with non-Hermitian generators uses the same index") {
    const FdAlgebra m3 = FdAlgebra::full(3);
    const GeneratorSet k({CMatrix::unit(3, 0, 1), CMatrix::unit(3, 1, 0), CMatrix::unit(3, 2, 2)});
    const KmsReport r =
        kms_symmetry_check(random_faithful_state(m3, 1), random_faithful_state(m3, 2), k, 20, 4);
    CHECK(r.passed);
  }

  TEST_CASE("subadditivity of composed costs") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const State mu = random_faithful_state(m2, 31);
    const Channel id = Channel::identity(m2);
    CHECK(std::abs(cost_channel(compose(id, id), mu, mu, pauli_generators()).total) <= 1e-14);

    const State nu = random_faithful_state(m2, 32);
    const State xi = random_faithful_state(m2, 33);
    const Channel e1 = random_covariant_channel(mu, nu, 34);
    const Channel e2 = Channel::collapse(nu, m2);
    const double a = cost_channel(e1, mu, nu, pauli_generators()).total;
    const double b = cost_channel(e2, nu, xi, pauli_generators()).total;
    const double ab = cost_channel(compose(e1, e2), mu, xi, pauli_generators()).total;
    CHECK(std::sqrt(ab) <= std::sqrt(a) + std::sqrt(b) + 1e-12);

    const SubadditivityReport r2 = subadditivity_suite(m2, pauli_generators(), 500, 5);
    CHECK(r2.passed);
    CHECK(r2.max_violation <= 1e-9);
    const FdAlgebra c3 = FdAlgebra::abelian(3);
    CHECK(subadditivity_suite(c3, hermitian_basis(c3), 500, 6).passed);
  }

  TEST_CASE("pseudometric counterexample") {
    const PseudometricReport r = pseudometric_demo();
    CHECK(r.passed);
    CHECK_FALSE(r.states_equal);
    CHECK(r.trace_distance == doctest::Approx(0.5));
    CHECK(r.trace_distance > 0.2);
    CHECK(r.w2 <= 1e-6);
    CHECK(r.slice_covariance <= 1e-10);
    CHECK(std::abs(r.slice_cost) <= 1e-12);
    CHECK(r.generated_dim == 4);
    CHECK(r.algebra_dim == 16);
    CHECK(r.w2_generating >= 1e-2);
  }

  TEST_CASE("pseudometric demo with equal slices") {
    const PseudometricReport r = pseudometric_demo({0.6, 0.4}, {0.8, 0.2}, {0.8, 0.2});
    CHECK(r.states_equal);
    CHECK(r.passed);
    CHECK(r.w2 <= 1e-6);
  }

  TEST_CASE("support-compressed distance") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const State mu = random_faithful_state(m2, 41);
    const State nu = random_faithful_state(m2, 42);
    const double direct = solve_w2(mu, nu, pauli_generators()).w2;
    CHECK(std::abs(nonfaithful_distance(mu, nu, pauli_generators()).w2 - direct) <= 1e-8);

    const NonfaithfulReport r = nonfaithful_demo();
    CHECK(r.passed);
    CHECK(r.self_distance <= 1e-6);
    CHECK(r.orthogonal_expected == doctest::Approx(2.0));
    CHECK(std::abs(r.orthogonal_distance - 2.0) <= 1e-6);
  }
}
