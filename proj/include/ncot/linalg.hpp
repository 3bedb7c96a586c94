#pragma once

// Dense complex matrices and the handful of spectral routines the rest of the
// library is built on. Sizes stay well below 100x100, so everything is plain
// row-major storage with O(n^3) algorithms.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "ncot/error.hpp"

namespace ncot {

using Complex = std::complex<double>;

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  /// Row-major nested initializer, e.g. {{0, 1}, {1, 0}}.
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const double> d);
  static CMatrix diagonal(std::span<const Complex> d);
  /// Matrix unit e_{ij} in M_n.
  static CMatrix unit(std::size_t n, std::size_t i, std::size_t j);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conj() const;
  Complex trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  /// (M + M^dagger) / 2
  CMatrix hermitian_part() const;

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(Complex s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
  friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
  friend bool operator==(const CMatrix& a, const CMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Frobenius inner product Tr(a^dagger b).
Complex inner(const CMatrix& a, const CMatrix& b);
double distance(const CMatrix& a, const CMatrix& b);
/// ||H - H^dagger||_F <= tol * (1 + ||H||_F)
bool is_hermitian(const CMatrix& h, double tol = 1e-12);

struct HermEig {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns are eigenvectors

  CMatrix reconstruct() const;
};

/// Cyclic complex Jacobi. Throws InputError for non-Hermitian input and
/// NumericalError if the sweep cap is hit.
HermEig herm_eig(const CMatrix& h);

/// V diag(f(lambda)) V^dagger for the given decomposition.
CMatrix spectral_apply(const HermEig& eig, double (*f)(double));
CMatrix spectral_apply(const HermEig& eig, std::span<const Complex> values);

/// P^s for positive definite P. Throws InputError when P is not PD.
CMatrix matrix_power(const CMatrix& p, double s);
/// P^{it} for positive definite P; unitary.
CMatrix unitary_power(const CMatrix& p, double t);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Partial trace over tensor leg 1 or 2 of a matrix on C^{d1} (x) C^{d2}.
CMatrix partial_trace(const CMatrix& m, int leg, std::size_t d1, std::size_t d2);

/// Frobenius-nearest positive semidefinite matrix (eigenvalue clipping).
CMatrix psd_project(const CMatrix& h);

/// Largest singular value, via the eigenvalues of A^dagger A.
double operator_norm(const CMatrix& a);
/// Sum of singular values.
double trace_norm(const CMatrix& a);

/// Row-major vectorization helpers; vec(a * x * b) = kron(a, b^T) vec(x).
std::vector<Complex> vec(const CMatrix& m);
CMatrix unvec(std::span<const Complex> v, std::size_t rows, std::size_t cols);

}  // namespace ncot
