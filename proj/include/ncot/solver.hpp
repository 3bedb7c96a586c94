#pragma once

// The W2 program: minimize the transport cost over Choi matrices of u.c.p.
// maps E with nu o E = mu (and, in modular mode, E o sigma^mu = sigma^nu o E).
//
// The Choi matrix is expressed in the frame conj(U) (x) V, where U and V
// diagonalize rho_mu and rho_nu block by block. In that frame the modular
// covariance condition [C, conj(rho_mu) (x) rho_nu^{-1}] = 0 says exactly that
// the Choi matrix is block diagonal over classes of equal log(p_i / q_k), so
// the cone becomes a product of small PSD blocks and the only affine rows
// left are unitality and the mu-marginal.

#include <optional>
#include <string>
#include <vector>

#include "ncot/transport.hpp"

namespace ncot {

enum class Mode { Modular, All };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

struct SolverOptions {
  double eps_abs = 1e-9;
  double eps_rel = 1e-8;
  int max_iter = 200000;
  double relaxation = 1.6;
  double rho = 1.0;  // initial penalty, relative to the unit-normalized cost
  bool adaptive_rho = true;
  int adapt_every = 25;
};

/// One real coordinate of the vectorized block-diagonal Choi matrix.
struct ChoiCoordinate {
  enum Kind { Diagonal, Real, Imag } kind;
  std::size_t r, s;  // rotated Choi indices, r <= s
};

class SdpProblem {
 public:
  Mode mode = Mode::Modular;
  FdAlgebra source;
  FdAlgebra target;
  CMatrix source_frame;  // U: eigenvectors of rho_mu (block diagonal)
  CMatrix target_frame;  // V: eigenvectors of rho_nu (block diagonal)
  std::vector<double> source_spectrum;  // p
  std::vector<double> target_spectrum;  // q

  std::vector<std::vector<std::size_t>> blocks;  // rotated Choi indices i * N_B + k
  std::vector<std::size_t> block_offset;          // first coordinate of each block
  std::vector<ChoiCoordinate> coords;

  std::vector<double> cost;  // minimize constant + cost . x
  double constant = 0.0;

  std::size_t row_count = 0;       // affine rows before orthonormalization
  std::vector<double> row_basis;   // rank x dim, orthonormal rows
  std::vector<double> row_rhs;     // rank
  std::vector<double> anchor;      // collapse channel, strictly feasible

  std::size_t dim() const { return coords.size(); }
  std::size_t rank() const { return row_rhs.size(); }

  /// Choi matrix (original frame) of a coordinate vector.
  CMatrix choi(std::span<const double> x) const;
  /// Rotates and vectorizes a Choi matrix; mass outside the block pattern is
  /// reported through `dropped` and discarded.
  std::vector<double> coordinates(const CMatrix& choi, double* dropped = nullptr) const;

  void project_affine(std::vector<double>& x) const;
  void project_cone(std::vector<double>& x) const;
  /// Euclidean residual of the orthonormalized affine rows.
  double affine_residual(std::span<const double> x) const;
  /// Smallest eigenvalue over the PSD blocks.
  double cone_slack(std::span<const double> x) const;
  double objective(std::span<const double> x) const;
  /// Smallest lambda in [0, 1) with (1 - lambda) x + lambda anchor PSD.
  double anchor_weight(std::span<const double> x) const;

  /// Pattern mass + affine residual + negative cone part for a Choi matrix.
  double feasibility_residual(const CMatrix& choi) const;
};

/// Requires faithful states; generator lists of equal length.
SdpProblem assemble(const State& mu, const State& nu, const GeneratorSet& source_k, const GeneratorSet& target_k,
                    Mode mode);
inline SdpProblem assemble(const State& mu, const State& nu, const GeneratorSet& k, Mode mode) {
  return assemble(mu, nu, k, k, mode);
}

struct AdmmResult {
  std::vector<double> x;  // affine-feasible iterate, repaired into the cone
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;  // affine residual of x
  double dual_residual = 0.0;    // rho ||z - z_prev|| of the splitting at termination
  double gap = 0.0;              // primal objective minus dual estimate
  double repair = 0.0;           // weight of the collapse channel mixed in
};

/// Over-relaxed ADMM with residual balancing. Deterministic.
AdmmResult admm_solve(const SdpProblem& p, const SolverOptions& opts = {});

struct W2Result {
  double w2 = 0.0;
  double cost = 0.0;  // W2^2 as evaluated on optimal_channel
  Channel optimal_channel;
  CostReport cost_report;
  Mode mode = Mode::Modular;
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double covariance_residual = 0.0;
  double unitality_residual = 0.0;
  double marginal_residual = 0.0;
  double cp_slack = 0.0;
  std::size_t affine_rows = 0;
  std::size_t variables = 0;
  std::vector<std::string> warnings;
};

/// General form with separate source/target generator lists.
W2Result solve_transport(const State& mu, const State& nu, const GeneratorSet& source_k,
                         const GeneratorSet& target_k, Mode mode, const SolverOptions& opts = {});

/// W2(mu, nu) (modular mode) or d(mu, nu) (all plans). Requires adjoint-closed k.
W2Result solve_w2(const State& mu, const State& nu, const GeneratorSet& k, Mode mode = Mode::Modular,
                  const SolverOptions& opts = {});

}  // namespace ncot
