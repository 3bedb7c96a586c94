#include "ncot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include "ncot/modular.hpp"

namespace ncot {

namespace {

enum Slot : std::uint64_t { kFirst = 1, kSecond, kThird, kChannel, kChannel2, kState };

std::vector<CMatrix> subalgebra_basis(const FdAlgebra& alg, const GeneratorSet& k, bool allow_nongenerating,
                                      bool* generating) {
  auto basis = generated_subalgebra(alg, k);
  *generating = basis.size() == alg.element_dim();
  if (!*generating && !allow_nongenerating)
    throw InputError("generators do not generate the algebra (" + std::to_string(basis.size()) + " of " +
                     std::to_string(alg.element_dim()) + " dimensions)");
  return basis;
}

double positive_part(double v) { return std::max(0.0, v); }

AxiomReport metric_suite(const char* name, Mode mode, const FdAlgebra& algebra, const GeneratorSet& k,
                         std::size_t trials, std::uint64_t seed, const SuiteOptions& opts) {
  if (!k.adjoint_closed()) throw InputError(std::string(name) + ": generators are not closed under adjoints");
  AxiomReport rep;
  rep.suite = name;
  rep.mode = mode;
  rep.trials = trials;
  rep.seed = seed;
  rep.options = opts;
  rep.symmetry_asserted = mode == Mode::Modular;
  const auto basis = subalgebra_basis(algebra, k, opts.allow_nongenerating, &rep.generating);

  auto solve = [&](const State& a, const State& b, Mode m) {
    W2Result r = solve_w2(a, b, k, m, opts.solver);
    if (!r.converged) ++rep.nonconverged;
    return r;
  };

  for (std::size_t t = 0; t < trials; ++t) {
    const State mu = random_faithful_state(algebra, derive_seed(seed, t, kFirst));
    const State nu = random_faithful_state(algebra, derive_seed(seed, t, kSecond));
    const State xi = random_faithful_state(algebra, derive_seed(seed, t, kThird));

    const W2Result mn = solve(mu, nu, mode);
    const W2Result nm = solve(nu, mu, mode);
    const W2Result nx = solve(nu, xi, mode);
    const W2Result mx = solve(mu, xi, mode);
    const W2Result mm = solve(mu, mu, mode);

    const double gap = std::abs(mn.w2 - nm.w2);
    rep.symmetry_gaps.push_back(gap);
    rep.max_symmetry_gap = std::max(rep.max_symmetry_gap, gap);
    rep.max_triangle_violation = std::max(rep.max_triangle_violation, positive_part(mx.w2 - mn.w2 - nx.w2));
    rep.max_self_distance = std::max(rep.max_self_distance, mm.w2);

    IndiscernibleOutcome out;
    out.w2 = mn.w2;
    out.trace_distance = trace_distance(mu, nu);
    out.identity_residual = identity_residual(mm.optimal_channel, basis);
    rep.max_identity_residual = std::max(rep.max_identity_residual, out.identity_residual);
    if (rep.generating && out.trace_distance >= opts.separation_distance && out.w2 < opts.separation_floor)
      ++rep.indiscernible_failures;
    rep.indiscernibles.push_back(out);

    if (mode == Mode::All) {
      for (const auto& [d, a, b] : {std::tuple{&mn, &mu, &nu}, std::tuple{&nx, &nu, &xi}}) {
        const W2Result w = solve(*a, *b, Mode::Modular);
        rep.max_mode_excess = std::max(rep.max_mode_excess, positive_part(d->w2 - w.w2));
      }
    }
  }
  rep.passed = rep.nonconverged == 0 && rep.max_triangle_violation <= opts.tolerance &&
               rep.max_self_distance <= opts.self_tolerance && rep.indiscernible_failures == 0 &&
               rep.max_mode_excess <= opts.mode_tolerance;
  if (rep.symmetry_asserted) rep.passed = rep.passed && rep.max_symmetry_gap <= opts.tolerance;
  return rep;
}

double ucp_defect(const Channel& e) { return std::max(positive_part(-e.cp_slack()), e.unitality_residual()); }

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t slot) {
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + trial * 0xD1B54A32D192ED03ULL + slot * 0x8CB92BA72F3D8DD7ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Channel random_ucp_channel(const FdAlgebra& source, const FdAlgebra& target, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const std::size_t na = source.dim();
  const std::size_t nb = target.dim();
  const std::size_t n = na * nb;
  // Group Choi indices (i, k) by (block of i, block of k); G is block
  // diagonal over the groups, so C = G G^dagger respects the pattern.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t k = 0; k < nb; ++k) groups[{source.block_of(i), target.block_of(k)}].push_back(i * nb + k);
  CMatrix gm(n, n);
  for (const auto& [key, idx] : groups)
    for (std::size_t r : idx)
      for (std::size_t c : idx) gm(r, c) = Complex(g(rng), g(rng));
  const CMatrix c = gm * gm.adjoint();
  const CMatrix t = partial_trace(c, 1, na, nb);
  const CMatrix s = kron(CMatrix::identity(na), matrix_power(t.hermitian_part(), -0.5));
  return Channel::from_choi(source, target, (s * c * s).hermitian_part());
}

Channel random_covariant_channel(const State& mu, const State& nu, std::uint64_t seed) {
  const SdpProblem p = assemble(mu, nu, GeneratorSet{}, Mode::Modular);
  const Channel e = random_ucp_channel(mu.algebra(), nu.algebra(), seed);
  auto x = p.coordinates(e.choi());
  p.project_affine(x);
  double lambda = p.anchor_weight(x);
  // Keep a margin so the result is strictly inside the cone.
  lambda += 0.1 * (1.0 - lambda);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1.0 - lambda) * x[i] + lambda * p.anchor[i];
  return Channel::from_choi(mu.algebra(), nu.algebra(), p.choi(x).hermitian_part());
}

State pull_back(const State& nu, const Channel& e) {
  const CMatrix rho = trace_adjoint(e)(nu.density());
  return make_state(e.source(), e.source().pinch(rho.hermitian_part()));
}

double identity_residual(const Channel& e, const std::vector<CMatrix>& basis) {
  double worst = 0.0;
  for (const auto& w : basis) worst = std::max(worst, distance(e(w), w));
  return worst;
}

AxiomReport axiom_suite(const FdAlgebra& algebra, const GeneratorSet& k, std::size_t trials, std::uint64_t seed,
                        const SuiteOptions& opts) {
  return metric_suite("axioms", Mode::Modular, algebra, k, trials, seed, opts);
}

AxiomReport asymmetric_suite(const FdAlgebra& algebra, const GeneratorSet& k, std::size_t trials,
                             std::uint64_t seed, const SuiteOptions& opts) {
  return metric_suite("asymmetric", Mode::All, algebra, k, trials, seed, opts);
}

KmsReport kms_symmetry_check(const State& mu, const State& nu, const GeneratorSet& k, std::size_t trials,
                             std::uint64_t seed) {
  KmsReport rep;
  rep.trials = trials;
  rep.seed = seed;
  for (std::size_t t = 0; t < trials; ++t) {
    const Channel e = random_covariant_channel(mu, nu, derive_seed(seed, t, kChannel));
    const Channel dual = kms_dual(e, mu, nu);
    const CostReport fwd = cost_channel(e, mu, nu, k);
    const CostReport bwd = cost_channel(dual, nu, mu, k);
    for (std::size_t l = 0; l < k.size(); ++l)
      rep.max_term_gap = std::max(rep.max_term_gap, std::abs(fwd.per_generator[l] - bwd.per_generator[l]));
    rep.max_involution_gap = std::max(rep.max_involution_gap, superop_distance(kms_dual(dual, nu, mu), e));
    rep.max_marginal_residual = std::max(rep.max_marginal_residual, dual.marginal_residual(nu, mu));
    rep.max_ucp_defect = std::max(rep.max_ucp_defect, ucp_defect(dual));
  }
  rep.passed = rep.max_term_gap <= 1e-8 && rep.max_involution_gap <= 1e-9 && rep.max_marginal_residual <= 1e-10 &&
               rep.max_ucp_defect <= 1e-9;
  return rep;
}

KmsReport kms_duality_check(const FdAlgebra& algebra, std::size_t trials, std::uint64_t seed) {
  KmsReport rep;
  rep.trials = trials;
  rep.seed = seed;
  for (std::size_t t = 0; t < trials; ++t) {
    const State nu = random_faithful_state(algebra, derive_seed(seed, t, kState));
    const Channel e = random_ucp_channel(algebra, algebra, derive_seed(seed, t, kChannel));
    const State mu = pull_back(nu, e);
    const Channel dual = kms_dual(e, mu, nu);
    rep.max_involution_gap = std::max(rep.max_involution_gap, superop_distance(kms_dual(dual, nu, mu), e));
    rep.max_marginal_residual = std::max(rep.max_marginal_residual, dual.marginal_residual(nu, mu));
    rep.max_ucp_defect = std::max(rep.max_ucp_defect, ucp_defect(dual));
  }
  rep.passed = rep.max_involution_gap <= 1e-9 && rep.max_marginal_residual <= 1e-10 && rep.max_ucp_defect <= 1e-9;
  return rep;
}

SubadditivityReport subadditivity_suite(const FdAlgebra& algebra, const GeneratorSet& k, std::size_t trials,
                                        std::uint64_t seed) {
  SubadditivityReport rep;
  rep.trials = trials;
  rep.seed = seed;
  for (std::size_t t = 0; t < trials; ++t) {
    const State xi = random_faithful_state(algebra, derive_seed(seed, t, kState));
    const Channel e2 = random_ucp_channel(algebra, algebra, derive_seed(seed, t, kChannel2));
    const State nu = pull_back(xi, e2);
    const Channel e1 = random_ucp_channel(algebra, algebra, derive_seed(seed, t, kChannel));
    const State mu = pull_back(nu, e1);
    const double first = cost_channel(e1, mu, nu, k).total;
    const double second = cost_channel(e2, nu, xi, k).total;
    const double both = cost_channel(compose(e1, e2), mu, xi, k).total;
    const double lhs = std::sqrt(std::max(0.0, both));
    const double rhs = std::sqrt(std::max(0.0, first)) + std::sqrt(std::max(0.0, second));
    rep.max_violation = std::max(rep.max_violation, positive_part(lhs - rhs));
  }
  rep.passed = rep.max_violation <= rep.tolerance;
  return rep;
}

PseudometricReport pseudometric_demo(const std::vector<double>& lambda, const std::vector<double>& zeta,
                                     const std::vector<double>& eta, const SolverOptions& opts) {
  if (lambda.size() != 2 || zeta.size() != 2 || eta.size() != 2)
    throw InputError("pseudometric_demo: expected qubit spectra");
  const FdAlgebra m2 = FdAlgebra::full(2);
  const FdAlgebra a = FdAlgebra::tensor_product(2, 2);
  const CMatrix l = CMatrix::diagonal(lambda);
  const State z = make_state(m2, CMatrix::diagonal(zeta));
  const State mu = make_state(a, kron(l, CMatrix::diagonal(zeta)));
  const State nu = make_state(a, kron(l, CMatrix::diagonal(eta)));
  const GeneratorSet k = first_factor_basis(a);

  PseudometricReport rep;
  rep.trace_distance = trace_distance(mu, nu);
  rep.states_equal = rep.trace_distance <= 1e-12;
  rep.algebra_dim = a.element_dim();
  rep.generated_dim = generated_subalgebra(a, k).size();

  const Channel slice = slice_expectation(a, z);
  rep.slice_marginal = slice.marginal_residual(mu, nu);
  rep.slice_covariance = covariance_residual(slice, mu, nu);
  rep.slice_cost = cost_channel(slice, mu, nu, k).total;
  rep.solver_cost = solve_w2(mu, nu, k, Mode::Modular, opts).cost;
  // Both are feasible values of the infimum; the slice map is exact.
  rep.w2 = std::sqrt(std::max(0.0, std::min(rep.slice_cost, rep.solver_cost)));
  rep.w2_generating = solve_w2(mu, nu, hermitian_basis(a), Mode::Modular, opts).w2;

  rep.passed = rep.slice_covariance <= 1e-10 && rep.slice_marginal <= 1e-10 && std::abs(rep.slice_cost) <= 1e-12 &&
               rep.w2 <= 1e-6 && rep.generated_dim < rep.algebra_dim;
  if (!rep.states_equal) rep.passed = rep.passed && rep.trace_distance > 0.2 && rep.w2_generating >= 1e-2;
  return rep;
}

W2Result nonfaithful_distance(const State& zeta, const State& eta, const GeneratorSet& k, Mode mode,
                              const SolverOptions& opts) {
  if (!(zeta.algebra() == eta.algebra())) throw InputError("nonfaithful_distance: states live on different algebras");
  if (!k.adjoint_closed()) throw InputError("nonfaithful_distance: generators are not closed under adjoints");
  const CompressedProblem src = support_compress(zeta, k);
  const CompressedProblem tgt = support_compress(eta, k);
  return solve_transport(src.state, tgt.state, src.generators, tgt.generators, mode, opts);
}

NonfaithfulReport nonfaithful_demo(const SolverOptions& opts) {
  const FdAlgebra m2 = FdAlgebra::full(2);
  const FdAlgebra m3 = FdAlgebra::full(3);
  NonfaithfulReport rep;

  const State deficient = make_state(m3, CMatrix{{0.5, 0.2, 0.0}, {0.2, 0.5, 0.0}, {0.0, 0.0, 0.0}});
  {
    // The identity on the compressed algebra is a feasible plan of cost 0.
    const CompressedProblem c = support_compress(deficient, hermitian_basis(m3));
    const double witness = cost_channel(Channel::identity(c.algebra), c.state, c.state, c.generators).total;
    const double solved = nonfaithful_distance(deficient, deficient, hermitian_basis(m3), Mode::Modular, opts).cost;
    rep.self_distance = std::sqrt(std::max(0.0, std::min(witness, solved)));
  }

  const State up = make_state(m2, CMatrix{{1.0, 0.0}, {0.0, 0.0}});
  const State down = make_state(m2, CMatrix{{0.0, 0.0}, {0.0, 1.0}});
  const GeneratorSet k = pauli_generators();
  rep.orthogonal_distance = nonfaithful_distance(up, down, k, Mode::Modular, opts).w2;
  double expected = 0.0;
  for (const auto& g : k) expected += std::norm(g(0, 0) - g(1, 1));
  rep.orthogonal_expected = std::sqrt(expected);

  rep.passed = rep.self_distance <= 1e-6 && std::abs(rep.orthogonal_distance - rep.orthogonal_expected) <= 1e-6;
  return rep;
}

}  // namespace ncot
