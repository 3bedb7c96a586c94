#include <doctest.h>

#include <cmath>

#include "ncot/modular.hpp"
#include "support.hpp"

using namespace ncot;
using ncot::testing::diagonal_state;
using ncot::testing::random_element;

namespace {

struct Fixture {
  FdAlgebra c2 = FdAlgebra::abelian(2);
  State mu = diagonal_state(c2, {0.7, 0.3});
  State nu = diagonal_state(c2, {0.4, 0.6});
  GeneratorSet k = GeneratorSet({CMatrix::unit(2, 1, 1)});
};

// cost_channel evaluated term by term from the defining formula.
double direct_cost(const Channel& e, const State& mu, const State& nu, const GeneratorSet& k) {
  double s = 0.0;
  for (const auto& a : k) {
    const CMatrix ea = e(a);
    s += (mu(a.adjoint() * a) + nu(a.adjoint() * a)).real() - 2.0 * nu(a.adjoint() * ea).real();
  }
  return s;
}

}  // namespace

TEST_SUITE("transport") {
  TEST_CASE("Choi conventions match direct evaluation") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const State nu = random_faithful_state(m2, 1);
    const Channel e = random_ucp_channel(m2, m2, 2);
    const State mu = pull_back(nu, e);
    const CMatrix c = e.choi();
    CHECK(distance(partial_trace(c, 1, 2, 2), CMatrix::identity(2)) <= 1e-10);
    const CMatrix marginal = partial_trace(kron(CMatrix::identity(2), nu.density()) * c, 2, 2, 2);
    CHECK(distance(marginal, mu.density().transpose()) <= 1e-10);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
      const CMatrix x = random_element(m2, rng);
      const CMatrix from_choi = partial_trace(kron(x.transpose(), CMatrix::identity(2)) * c, 1, 2, 2);
      REQUIRE(distance(from_choi, e(x)) <= 1e-12);
      REQUIRE(std::abs(nu(e(x)) - mu(x)) <= 1e-12);
    }
    CHECK(e.representation_residual() <= 1e-11);
    CHECK(e.cp_slack() >= -1e-9);
    CHECK(e.unitality_residual() <= 1e-9);
  }

  TEST_CASE("channels between block algebras pinch their inputs and outputs") {
    const FdAlgebra src({2, 1});
    const FdAlgebra tgt({1, 2});
    const Channel e = random_ucp_channel(src, tgt, 4);
    CHECK_NOTHROW(e.require_ucp());
    std::mt19937_64 rng(5);
    const CMatrix x = ncot::testing::random_matrix(3, 3, rng);
    CHECK(distance(e(x), e(src.pinch(x))) <= 1e-12);
    CHECK(tgt.contains(e(x), 1e-12));
  }

  TEST_CASE("non-CP maps are rejected") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const Channel transpose = Channel::from_map(m2, m2, [](const CMatrix& x) { return x.transpose(); });
    CHECK(transpose.cp_slack() < -0.5);
    CHECK_THROWS_AS(transpose.require_ucp(), InputError);
  }

  TEST_CASE("composition") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const Channel id = Channel::identity(m2);
    CHECK(superop_distance(compose(id, id), id) <= 1e-15);
    const Channel e1 = random_ucp_channel(m2, m2, 6);
    const Channel e2 = random_ucp_channel(m2, m2, 7);
    const Channel e3 = random_ucp_channel(m2, m2, 8);
    CHECK(superop_distance(compose(compose(e1, e2), e3), compose(e1, compose(e2, e3))) <= 1e-12);
    const CMatrix x{{1, 2}, {3, 4}};
    CHECK(distance(compose(e1, e2)(x), e2(e1(x))) <= 1e-12);

    const State nu = random_faithful_state(m2, 9);
    const State mu = pull_back(nu, e1);
    const Channel collapsed = compose(e1, Channel::collapse(nu, m2));
    CHECK(superop_distance(collapsed, Channel::collapse(mu, m2)) <= 1e-12);
  }

  TEST_CASE("composition of covariant channels is covariant") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const State mu = random_faithful_state(m2, 10);
    const State nu = random_faithful_state(m2, 11);
    const State xi = random_faithful_state(m2, 12);
    const Channel e1 = random_covariant_channel(mu, nu, 13);
    const Channel e2 = random_covariant_channel(nu, xi, 14);
    CHECK(covariance_residual(compose(e1, e2), mu, xi) <= 1e-10);
    CHECK(compose(e1, e2).marginal_residual(mu, xi) <= 1e-10);
  }

  TEST_CASE("plan of the identity is the diagonal plan") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const State mu = random_faithful_state(m2, 15);
    const TransportPlan delta = channel_to_plan(Channel::identity(m2), mu);
    const CMatrix s = mu.power(0.5);
    std::mt19937_64 rng(16);
    for (int t = 0; t < 10; ++t) {
      const CMatrix a = random_element(m2, rng), m = random_element(m2, rng);
      // <Lambda, a R(m) Lambda> = Tr(s^dagger a s m)
      REQUIRE(std::abs(delta(a, m) - (s * a * s * m).trace()) <= 1e-12);
    }
    CHECK(superop_distance(plan_to_channel(delta, mu), Channel::identity(m2)) <= 1e-10);
  }

  TEST_CASE("plan of the collapse channel is the product plan") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const State mu = random_faithful_state(m2, 17);
    const State nu = random_faithful_state(m2, 18);
    const TransportPlan omega = channel_to_plan(Channel::collapse(mu, m2), nu);
    std::mt19937_64 rng(19);
    for (int t = 0; t < 10; ++t) {
      const CMatrix a = random_element(m2, rng), m = random_element(m2, rng);
      REQUIRE(std::abs(omega(a, m) - mu(a) * nu(m)) <= 1e-12);
    }
    CHECK(superop_distance(plan_to_channel(omega, nu), Channel::collapse(mu, m2)) <= 1e-10);
  }

  TEST_CASE("plans of random channels are positive states with the right marginals") {
    const FdAlgebra alg({2, 1});
    for (std::uint64_t s = 0; s < 100; ++s) {
      const State nu = random_faithful_state(alg, derive_seed(s, 0, 1));
      const Channel e = random_ucp_channel(alg, alg, derive_seed(s, 0, 2));
      const State mu = pull_back(nu, e);
      const TransportPlan omega = channel_to_plan(e, nu);
      REQUIRE(omega.marginal_residual(mu, nu) <= 1e-10);
      REQUIRE(superop_distance(plan_to_channel(omega, nu), e) <= 1e-10);
      if (s < 20) REQUIRE(omega.positivity_slack(s) >= -1e-9);
    }
  }

  TEST_CASE("cost of the abelian fixture") {
    const Fixture f;
    const Channel collapse = Channel::collapse(f.mu, f.c2);
    const CostReport r = cost_channel(collapse, f.mu, f.nu, f.k);
    CHECK(r.total == doctest::Approx(0.54).epsilon(1e-12));
    CHECK(r.path == "channel-form");
    const TransportPlan omega = channel_to_plan(collapse, f.nu);
    CHECK(cost_plan(omega, f.mu, f.nu, f.k).total == doctest::Approx(0.54).epsilon(1e-12));
    CHECK(cost_plan_gram(omega, f.mu, f.nu, f.k).total == doctest::Approx(0.54).epsilon(1e-12));

    const ObjectiveMatrix obj = objective_matrix(f.mu, f.nu, f.k);
    CHECK(obj.constant == doctest::Approx(0.9));
    CHECK(inner(collapse.choi(), obj.m).real() == doctest::Approx(0.36));
  }

  TEST_CASE("cost of the identity vanishes") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const State mu = random_faithful_state(m2, 20);
    CHECK(std::abs(cost_channel(Channel::identity(m2), mu, mu, pauli_generators()).total) <= 1e-14);
    const TransportPlan delta = channel_to_plan(Channel::identity(m2), mu);
    CHECK(std::abs(cost_plan(delta, mu, mu, pauli_generators()).total) <= 1e-12);
  }

  TEST_CASE("cost requires matched marginals") {
    const Fixture f;
    CHECK_THROWS_AS(cost_channel(Channel::identity(f.c2), f.mu, f.nu, f.k), InputError);
  }

  TEST_CASE("channel, plan and Gram costs agree") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const FdAlgebra m3 = FdAlgebra::full(3);
    for (std::uint64_t s = 0; s < 30; ++s) {
      const FdAlgebra& alg = s % 3 == 0 ? m3 : m2;
      const GeneratorSet k = s % 3 == 0 ? hermitian_basis(alg) : pauli_generators();
      const State nu = random_faithful_state(alg, derive_seed(s, 3, 1));
      const Channel e = random_ucp_channel(alg, alg, derive_seed(s, 3, 2));
      const State mu = pull_back(nu, e);
      const CostReport channel_form = cost_channel(e, mu, nu, k);
      const TransportPlan omega = channel_to_plan(e, nu);
      const CostReport plan_form = cost_plan(omega, mu, nu, k);
      const CostReport gram_form = cost_plan_gram(omega, mu, nu, k);
      REQUIRE(std::abs(channel_form.total - direct_cost(e, mu, nu, k)) <= 1e-12);
      double sum = 0.0;
      for (std::size_t l = 0; l < k.size(); ++l) {
        REQUIRE(channel_form.per_generator[l] >= -1e-9);
        REQUIRE(std::abs(channel_form.per_generator[l] - plan_form.per_generator[l]) <= 1e-10);
        REQUIRE(std::abs(channel_form.per_generator[l] - gram_form.per_generator[l]) <= 1e-10);
        sum += channel_form.per_generator[l];
      }
      REQUIRE(std::abs(sum - channel_form.total) <= 1e-12);
    }
  }

  TEST_CASE("objective matrix reproduces the cross terms") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const ObjectiveMatrix zero = objective_matrix(random_faithful_state(m2, 1), random_faithful_state(m2, 2),
                                                  GeneratorSet({CMatrix(2, 2)}));
    CHECK(zero.m.max_abs() == 0.0);
    CHECK(zero.constant == 0.0);
    for (std::uint64_t s = 0; s < 100; ++s) {
      const State nu = random_faithful_state(m2, derive_seed(s, 4, 1));
      const Channel e = random_ucp_channel(m2, m2, derive_seed(s, 4, 2));
      const State mu = pull_back(nu, e);
      const ObjectiveMatrix obj = objective_matrix(mu, nu, pauli_generators());
      REQUIRE(is_hermitian(obj.m));
      const double via_choi = obj.constant - inner(e.choi(), obj.m).real();
      REQUIRE(std::abs(via_choi - cost_channel(e, mu, nu, pauli_generators()).total) <= 1e-10);
    }
  }

  TEST_CASE("Kadison inequality holds for constructed channels") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    for (std::uint64_t s = 0; s < 20; ++s)
      REQUIRE(kadison_slack(random_ucp_channel(m2, m2, s), pauli_generators()) >= -1e-9);
  }

  TEST_CASE("multiplicative domain of the identity") {
    const FdAlgebra m2 = FdAlgebra::full(2);
    const DomainReport r = multiplicative_domain_check(Channel::identity(m2), pauli_generators(), 2);
    CHECK(r.fixed);
    CHECK(r.domain_dim == 4);
    CHECK(r.identity_residual <= 1e-12);
  }

  TEST_CASE("slice expectation fixes the first factor and nothing more") {
    const FdAlgebra a = FdAlgebra::tensor_product(2, 2);
    const State zeta = diagonal_state(FdAlgebra::full(2), {0.8, 0.2});
    const Channel e = slice_expectation(a, zeta);
    CHECK(distance(e(CMatrix::identity(4)), CMatrix::identity(4)) <= 1e-14);
    std::mt19937_64 rng(23);
    for (int t = 0; t < 10; ++t) {
      const CMatrix x = random_element(FdAlgebra::full(2), rng);
      const CMatrix y = random_element(FdAlgebra::full(2), rng);
      REQUIRE(distance(e(kron(x, CMatrix::identity(2))), kron(x, CMatrix::identity(2))) <= 1e-12);
      REQUIRE(distance(e(kron(x, y)), zeta(y) * kron(x, CMatrix::identity(2))) <= 1e-12);
    }
    CHECK(superop_distance(compose(e, e), e) <= 1e-12);
    const State lz = make_state(a, kron(CMatrix::diagonal(std::vector<double>{0.6, 0.4}), zeta.density()));
    CHECK(e.marginal_residual(lz, lz) <= 1e-12);

    const DomainReport r = multiplicative_domain_check(e, first_factor_basis(a), 2);
    CHECK(r.fixed);
    CHECK(r.domain_dim == 4);
    CHECK(r.identity_residual <= 1e-12);
    CHECK(superop_distance(e, Channel::identity(a)) > 0.5);

    CHECK_THROWS_AS(slice_expectation(FdAlgebra::full(4), zeta), InputError);
  }
}
