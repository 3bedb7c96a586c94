#pragma once

// Tomita-Takesaki data for faithful states on block algebras. In the
// Hilbert-Schmidt standard form the cyclic vector is rho^{1/2}, the algebra
// acts by left multiplication, the commutant by right multiplication,
// J(x) = x^dagger and Delta(x) = rho x rho^{-1}.

#include <array>
#include <numbers>
#include <vector>

#include "ncot/channel.hpp"

namespace ncot {

inline constexpr double kSectorTolerance = 1e-9;
inline constexpr std::array<double, 4> kDefaultTimes = {0.3, 1.0, std::numbers::sqrt2, std::numbers::pi};

struct ModularData {
  CMatrix sqrt_density;
  CMatrix inv_sqrt_density;
  /// sector[i][j] is the class of log(p_i / p_j) over eigen-index pairs;
  /// pairs share a class iff their log ratios agree within kSectorTolerance.
  std::vector<std::vector<std::size_t>> sector;
  std::size_t sector_count = 0;
};

ModularData modular_data(const State& mu);

/// Groups real values into classes whose sorted neighbours differ by at most
/// tol. Returns the class label of each input.
std::vector<std::size_t> cluster_values(const std::vector<double>& values, double tol,
                                        std::size_t* count = nullptr);

/// sigma_t^mu(a) = rho^{it} a rho^{-it}
CMatrix modular_apply(const State& mu, const CMatrix& a, double t);

/// max over t and unit basis elements a of ||E(sigma_t^mu(a)) - sigma_t^nu(E(a))||_F
double covariance_residual(const Channel& e, const State& mu, const State& nu,
                           std::span<const double> times = kDefaultTimes);

/// ||[C, conj(rho_mu) (x) rho_nu^{-1}]||_F for the Choi matrix C of E.
double covariance_commutator(const Channel& e, const State& mu, const State& nu);

/// Left-right multiplication superoperator x -> l x r on row-major vectors.
CMatrix sandwich_superop(const CMatrix& left, const CMatrix& right);

/// Modular operator Delta_mu as a superoperator on the Hilbert-Schmidt space.
CMatrix modular_operator(const State& mu);

/// Contraction K with K(a rho_mu^{1/2}) = E(a) rho_nu^{1/2}, as a matrix on
/// row-major vectors of the Hilbert-Schmidt space. Requires nu o E = mu.
struct KContraction {
  CMatrix matrix;
  double norm = 0.0;
};
KContraction k_contraction(const Channel& e, const State& mu, const State& nu);

/// KMS dual E^sigma: B -> A,
///   E^sigma(b) = rho_mu^{-1/2} E^dagger(rho_nu^{1/2} b rho_nu^{1/2}) rho_mu^{-1/2}.
/// Requires faithful states and nu o E = mu.
Channel kms_dual(const Channel& e, const State& mu, const State& nu);

/// The modular automorphism sigma_t^mu as a channel on the state's algebra.
Channel modular_channel(const State& mu, double t);

}  // namespace ncot
