#pragma once

// Finite-dimensional von Neumann algebras realized as block-diagonal
// subalgebras of M_N, together with their states and generator tuples.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncot/linalg.hpp"

namespace ncot {

/// Direct sum M_{n_1} + ... + M_{n_m}, embedded block-diagonally in M_N.
class FdAlgebra {
 public:
  FdAlgebra() = default;
  explicit FdAlgebra(std::vector<std::size_t> block_dims,
                     std::optional<std::pair<std::size_t, std::size_t>> tensor_factors = {});

  static FdAlgebra full(std::size_t n) { return FdAlgebra({n}); }
  /// C^m as the diagonal matrices.
  static FdAlgebra abelian(std::size_t m) { return FdAlgebra(std::vector<std::size_t>(m, 1)); }
  /// M_{d1} (x) M_{d2}; a single block with the factorization recorded.
  static FdAlgebra tensor_product(std::size_t d1, std::size_t d2) {
    return FdAlgebra({d1 * d2}, std::pair{d1, d2});
  }

  const std::vector<std::size_t>& block_dims() const { return blocks_; }
  const std::optional<std::pair<std::size_t, std::size_t>>& tensor_factors() const {
    return tensor_;
  }
  std::size_t dim() const { return n_; }
  /// Linear dimension sum n_i^2.
  std::size_t element_dim() const;
  std::size_t block_of(std::size_t index) const { return block_index_[index]; }
  std::size_t block_offset(std::size_t block) const { return offsets_[block]; }
  bool same_block(std::size_t i, std::size_t j) const { return block_index_[i] == block_index_[j]; }
  bool is_abelian() const;

  /// Zero out everything outside the diagonal blocks.
  CMatrix pinch(const CMatrix& x) const;
  /// Frobenius mass outside the diagonal blocks.
  double off_block_norm(const CMatrix& x) const;
  bool contains(const CMatrix& x, double tol = 1e-14) const;

  /// Matrix units e_{ij} with i, j in a common block, block by block.
  std::vector<std::pair<std::size_t, std::size_t>> unit_indices() const;
  std::vector<CMatrix> unit_basis() const;

  friend bool operator==(const FdAlgebra&, const FdAlgebra&) = default;

 private:
  std::vector<std::size_t> blocks_;
  std::optional<std::pair<std::size_t, std::size_t>> tensor_;
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> block_index_;
};

/// Normal state a -> Tr(density * a). The eigendecomposition is computed
/// block by block so that eigenvectors never mix blocks.
class State {
 public:
  State() = default;

  const FdAlgebra& algebra() const { return algebra_; }
  const CMatrix& density() const { return density_; }
  const HermEig& eig() const { return eig_; }
  bool faithful() const { return faithful_; }
  double min_eigenvalue() const { return eig_.values.empty() ? 0.0 : min_eig_; }

  Complex operator()(const CMatrix& a) const;

  /// density^s; requires a faithful state.
  CMatrix power(double s) const;
  /// density^{it}
  CMatrix modular_unitary(double t) const;

 private:
  friend State make_state(const FdAlgebra& algebra, const CMatrix& density);
  FdAlgebra algebra_;
  CMatrix density_;
  HermEig eig_;  // eigenvalues in block order, not globally sorted
  double min_eig_ = 0.0;
  bool faithful_ = false;
};

/// Faithfulness threshold on the smallest eigenvalue: 1e-10 * N.
double faithfulness_floor(const FdAlgebra& algebra);

State make_state(const FdAlgebra& algebra, const CMatrix& density);

/// Deterministic full-rank state; every eigenvalue is at least `floor`.
State random_faithful_state(const FdAlgebra& algebra, std::uint64_t seed, double floor = 0.01);

double trace_distance(const State& a, const State& b);

class GeneratorSet {
 public:
  GeneratorSet() = default;
  explicit GeneratorSet(std::vector<CMatrix> k, std::vector<std::string> names = {});

  std::size_t size() const { return k_.size(); }
  bool empty() const { return k_.empty(); }
  const CMatrix& operator[](std::size_t l) const { return k_[l]; }
  const std::vector<CMatrix>& elements() const { return k_; }
  const std::vector<std::string>& names() const { return names_; }
  auto begin() const { return k_.begin(); }
  auto end() const { return k_.end(); }

  /// Index l' with k_{l'} = k_l^dagger, if any.
  std::optional<std::size_t> adjoint_partner(std::size_t l, double tol = 1e-12) const;
  bool adjoint_closed(double tol = 1e-12) const;

 private:
  std::vector<CMatrix> k_;
  std::vector<std::string> names_;
};

GeneratorSet pauli_generators();
/// Orthonormal Hermitian basis of the algebra (diagonal units plus the
/// symmetric and antisymmetric off-diagonal combinations, per block).
GeneratorSet hermitian_basis(const FdAlgebra& algebra);
/// Orthonormal Hermitian basis of M_{d1} (x) 1 inside M_{d1} (x) M_{d2}.
GeneratorSet first_factor_basis(const FdAlgebra& algebra);

/// Orthonormal (Frobenius) basis of span{words in gens of length <= max_len},
/// including the empty word 1.
std::vector<CMatrix> word_span(const FdAlgebra& algebra, const GeneratorSet& gens,
                               std::size_t max_len);

/// Orthonormal basis of the unital *-algebra generated by gens. Throws
/// NumericalError if the span is still growing at max_word_len.
std::vector<CMatrix> generated_subalgebra(const FdAlgebra& algebra, const GeneratorSet& gens,
                                          std::size_t max_word_len = 16);

bool generates(const FdAlgebra& algebra, const GeneratorSet& gens);

/// Orthogonal projection of x onto the span of an orthonormal basis.
CMatrix project_onto_span(const std::vector<CMatrix>& basis, const CMatrix& x);

struct CompressedProblem {
  FdAlgebra algebra;      // p M p, blocks of the support ranks
  State state;            // faithful on the compressed algebra
  GeneratorSet generators;  // p k p in support coordinates
  CMatrix isometry;       // N x r, columns span the support
};

/// Restrict a state to its support p M p. The isometry is block-diagonal in
/// the original block structure; zero-rank blocks are dropped.
CompressedProblem support_compress(const State& zeta, const GeneratorSet& gens);

}  // namespace ncot
