#pragma once

#include <functional>

#include "ncot/algebra.hpp"

namespace ncot {

/// Linear map between block algebras, stored both as a superoperator and as
/// a Choi matrix C = sum_{ij} e_ij (x) E(e_ij) on C^{N_A} (x) C^{N_B}.
///
/// The source side is pre-composed with the block pinching of the source
/// algebra and outputs are pinched into the target algebra, so one Choi
/// convention covers every block structure. Under this convention
///   E(x)           = Tr_1[(x^T (x) 1) C]
///   E(1) = 1       <=> Tr_1(C) = 1
///   nu o E = mu    <=> Tr_2[(1 (x) rho_nu) C] = rho_mu^T
class Channel {
 public:
  Channel() = default;

  static Channel from_choi(const FdAlgebra& source, const FdAlgebra& target, const CMatrix& choi);
  static Channel from_map(const FdAlgebra& source, const FdAlgebra& target,
                          const std::function<CMatrix(const CMatrix&)>& map);
  /// Superoperator S with vec(E(x)) = S vec(x), row-major vec.
  static Channel from_superop(const FdAlgebra& source, const FdAlgebra& target, const CMatrix& superop);

  static Channel identity(const FdAlgebra& algebra);
  /// a -> mu(a) 1 into the target algebra.
  static Channel collapse(const State& mu, const FdAlgebra& target);

  const FdAlgebra& source() const { return source_; }
  const FdAlgebra& target() const { return target_; }
  const CMatrix& choi() const { return choi_; }
  const CMatrix& superop() const { return superop_; }

  CMatrix operator()(const CMatrix& x) const;

  /// Smallest Choi eigenvalue (>= 0 iff completely positive).
  double cp_slack() const;
  double unitality_residual() const;
  /// ||nu o E - mu|| as the Frobenius norm of the density mismatch.
  double marginal_residual(const State& mu, const State& nu) const;
  /// Max over unit basis elements of ||E(a) from Choi - E(a) from superop||.
  double representation_residual() const;

  /// Throws InputError unless E is u.c.p. within tol.
  void require_ucp(double tol = 1e-9) const;

 private:
  FdAlgebra source_;
  FdAlgebra target_;
  CMatrix choi_;
  CMatrix superop_;
};

/// Trace-pairing adjoint map E^dagger: B -> A, Tr(E^dagger(y) x) = Tr(y E(x)).
/// Not unital in general.
Channel trace_adjoint(const Channel& e);

/// E2 o E1
Channel compose(const Channel& e1, const Channel& e2);

/// Frobenius distance of the superoperators.
double superop_distance(const Channel& e, const Channel& f);

/// Conditional expectation x (x) y -> zeta(y) x (x) 1 on M (x) N.
Channel slice_expectation(const FdAlgebra& algebra, const State& zeta);

}  // namespace ncot
