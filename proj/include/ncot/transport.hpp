#pragma once

// Transport plans and their cost. A plan from mu to nu is a state omega on
// A (.) B', with B' realized as right multiplications R(m) on the
// Hilbert-Schmidt space of B. Plans correspond one-to-one to u.c.p. maps E
// with nu o E = mu through omega(a (x) R(m)) = Tr(rho_nu^{1/2} E(a) rho_nu^{1/2} m).

#include <string>
#include <vector>

#include "ncot/channel.hpp"

namespace ncot {

class TransportPlan {
 public:
  TransportPlan() = default;
  /// table(r, s) = omega(e_r (x) R(f_s)) over the unit bases of A and B.
  TransportPlan(FdAlgebra source, FdAlgebra target, CMatrix table);

  const FdAlgebra& source() const { return source_; }
  const FdAlgebra& target() const { return target_; }
  const CMatrix& table() const { return table_; }

  /// omega(a (x) R(m)), extended linearly.
  Complex operator()(const CMatrix& a, const CMatrix& m) const;

  /// max |omega(a (x) 1) - mu(a)| and |omega(1 (x) R(m)) - nu(m)| over units.
  double marginal_residual(const State& mu, const State& nu) const;
  /// min over `samples` random x in A (.) B' of omega(x^* x), normalized by
  /// the coefficient norm of x.
  double positivity_slack(std::uint64_t seed, std::size_t samples = 100) const;

 private:
  FdAlgebra source_;
  FdAlgebra target_;
  CMatrix table_;
  std::vector<std::pair<std::size_t, std::size_t>> src_units_;
  std::vector<std::pair<std::size_t, std::size_t>> tgt_units_;
};

TransportPlan channel_to_plan(const Channel& e, const State& nu);
Channel plan_to_channel(const TransportPlan& omega, const State& nu);

struct CostReport {
  double total = 0.0;
  std::vector<double> per_generator;
  std::string path;  // "channel-form" or "gns-form"
};

/// sum_l mu(a_l^* a_l) + nu(b_l^* b_l) - nu(E(a_l)^* b_l) - nu(b_l^* E(a_l)),
/// with a = source generators and b = target generators. Requires nu o E = mu.
CostReport cost_channel(const Channel& e, const State& mu, const State& nu, const GeneratorSet& source_k,
                        const GeneratorSet& target_k);
inline CostReport cost_channel(const Channel& e, const State& mu, const State& nu, const GeneratorSet& k) {
  return cost_channel(e, mu, nu, k, k);
}

/// ||pi_mu(k_l) Omega - pi_nu(k_l) Omega||^2 evaluated from the plan, with
/// pi_nu(k) Omega = pi(1 (x) R(rho_nu^{-1/2} k rho_nu^{1/2})) Omega.
CostReport cost_plan(const TransportPlan& omega, const State& mu, const State& nu, const GeneratorSet& k);

/// Same quantity, computed as c^dagger G c with G the Gram matrix of the
/// vectors (e_r (x) R(f_s)) Omega and c the coefficients of k (x) 1 - 1 (x) R(m).
CostReport cost_plan_gram(const TransportPlan& omega, const State& mu, const State& nu, const GeneratorSet& k);

struct ObjectiveMatrix {
  CMatrix m;          // Hermitian, on C^{N_A} (x) C^{N_B}
  double constant = 0.0;  // sum_l mu(a_l^* a_l) + nu(b_l^* b_l)
};

/// cost(E) = constant - Tr(C(E) m), with m = sum_l X_l + X_l^dagger and
/// X_l = a_l^T (x) rho_nu b_l^*.
ObjectiveMatrix objective_matrix(const State& mu, const State& nu, const GeneratorSet& source_k,
                                 const GeneratorSet& target_k);
inline ObjectiveMatrix objective_matrix(const State& mu, const State& nu, const GeneratorSet& k) {
  return objective_matrix(mu, nu, k, k);
}

struct DomainReport {
  bool fixed = false;
  std::size_t domain_dim = 0;
  double generator_residual = 0.0;  // max ||E(k_l) - k_l||
  double kadison_residual = 0.0;    // max ||E(k_l^* k_l) - E(k_l)^* E(k_l)||
  double identity_residual = 0.0;   // max over the word span of ||E(w) - w|| (if checked)
};

/// Checks whether E fixes the generators and lies multiplicatively on them;
/// if so, measures how far E is from the identity on the span of words up to
/// word_len.
DomainReport multiplicative_domain_check(const Channel& e, const GeneratorSet& k, std::size_t word_len,
                                         double tol = 1e-8);

/// min over generators of the smallest eigenvalue of E(k^* k) - E(k)^* E(k).
double kadison_slack(const Channel& e, const GeneratorSet& k);

}  // namespace ncot
