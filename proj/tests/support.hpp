#pragma once

// Random fixtures and small helpers shared by the unit tests.

#include <cstdint>
#include <random>

#include "ncot/verify.hpp"

namespace ncot::testing {

inline CMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (auto& z : m.data()) z = Complex(g(rng), g(rng));
  return m;
}

inline CMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  return random_matrix(n, n, rng).hermitian_part();
}

inline CMatrix random_positive(std::size_t n, std::mt19937_64& rng, double shift = 0.1) {
  const CMatrix g = random_matrix(n, n, rng);
  return g * g.adjoint() + shift * CMatrix::identity(n);
}

/// Random element of the block algebra (zero outside the blocks).
inline CMatrix random_element(const FdAlgebra& alg, std::mt19937_64& rng) {
  return alg.pinch(random_matrix(alg.dim(), alg.dim(), rng));
}

inline State diagonal_state(const FdAlgebra& alg, std::initializer_list<double> p) {
  return make_state(alg, CMatrix::diagonal(std::vector<double>(p)));
}

/// Indicator generators diag(e_i) of C^m.
inline GeneratorSet indicator_generators(std::size_t m) {
  std::vector<CMatrix> k;
  for (std::size_t i = 0; i < m; ++i) k.push_back(CMatrix::unit(m, i, i));
  return GeneratorSet(std::move(k));
}

/// Classical cost c_ij = sum_l |k_l(i) - k_l(j)|^2 for diagonal generators.
inline std::vector<double> diagonal_cost(const GeneratorSet& k, std::size_t m) {
  std::vector<double> c(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (const auto& g : k) c[i * m + j] += std::norm(g(i, i) - g(j, j));
  return c;
}

}  // namespace ncot::testing
