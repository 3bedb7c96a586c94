#include "ncot/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ncot {

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw InputError("CMatrix: entry count " + std::to_string(data_.size()) +
                     " does not match shape " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("CMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> d) {
  CMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> d) {
  CMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMatrix CMatrix::unit(std::size_t n, std::size_t i, std::size_t j) {
  CMatrix m(n, n);
  m(i, j) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

CMatrix CMatrix::transpose() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

CMatrix CMatrix::conj() const {
  CMatrix r = *this;
  for (auto& z : r.data_) z = std::conj(z);
  return r;
}

Complex CMatrix::trace() const {
  if (!square()) throw InputError("trace of non-square matrix");
  Complex t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

CMatrix CMatrix::hermitian_part() const { return (*this + adjoint()) * 0.5; }

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw InputError("matrix sum: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw InputError("matrix difference: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols_ != b.rows_) {
    throw InputError("matrix product: inner dimensions " + std::to_string(a.cols_) + " vs " +
                     std::to_string(b.rows_));
  }
  CMatrix r(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      const Complex* brow = &b.data_[k * b.cols_];
      Complex* rrow = &r.data_[i * r.cols_];
      for (std::size_t j = 0; j < b.cols_; ++j) rrow[j] += aik * brow[j];
    }
  }
  return r;
}

Complex inner(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("inner: shape mismatch");
  Complex s = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t k = 0; k < da.size(); ++k) s += std::conj(da[k]) * db[k];
  return s;
}

double distance(const CMatrix& a, const CMatrix& b) { return (a - b).frobenius_norm(); }

bool is_hermitian(const CMatrix& h, double tol) {
  if (!h.square()) return false;
  return distance(h, h.adjoint()) <= tol * (1.0 + h.frobenius_norm());
}

CMatrix HermEig::reconstruct() const {
  const std::size_t n = values.size();
  CMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += vectors(i, k) * values[k] * std::conj(vectors(j, k));
      r(i, j) = s;
    }
  return r;
}

namespace {

double off_diagonal_norm2(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return s;
}

}  // namespace

HermEig herm_eig(const CMatrix& h) {
  if (!is_hermitian(h, 1e-12)) throw InputError("herm_eig: input is not Hermitian");
  const std::size_t n = h.rows();
  CMatrix a = h.hermitian_part();
  CMatrix v = CMatrix::identity(n);

  constexpr int kMaxSweeps = 100;
  const double scale = std::max(a.frobenius_norm(), std::numeric_limits<double>::min());
  const double stop = std::pow(1e-15 * scale, 2);

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm2(a) <= stop) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Skip entries that can no longer move the diagonal.
        if (sweep > 3 && mag < 1e-300 + 1e-18 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const Complex phase = apq / mag;  // e^{i phi}
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J = diag(1, e^{-i phi}) * [[c, s], [-s, c]]; A <- J^dagger A J, V <- V J.
        const Complex jqp = -s * std::conj(phase);
        const Complex jqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp + jqp * akq;
          a(k, q) = s * akp + jqq * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk + std::conj(jqp) * aqk;
          a(q, k) = s * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp + jqp * vkq;
          v(k, q) = s * vkp + jqq * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps && off_diagonal_norm2(a) > std::pow(1e-12 * scale, 2)) {
    throw NumericalError("herm_eig: Jacobi sweeps did not converge");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  HermEig out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

CMatrix spectral_apply(const HermEig& eig, std::span<const Complex> values) {
  const std::size_t n = eig.values.size();
  CMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += eig.vectors(i, k) * values[k] * std::conj(eig.vectors(j, k));
      r(i, j) = s;
    }
  return r;
}

CMatrix spectral_apply(const HermEig& eig, double (*f)(double)) {
  std::vector<Complex> vals(eig.values.size());
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = f(eig.values[k]);
  return spectral_apply(eig, vals);
}

namespace {

HermEig positive_definite_eig(const CMatrix& p, const char* who) {
  HermEig e = herm_eig(p);
  if (e.values.empty() || e.values.front() <= 0.0) {
    throw InputError(std::string(who) + ": matrix is not positive definite");
  }
  return e;
}

}  // namespace

CMatrix matrix_power(const CMatrix& p, double s) {
  const HermEig e = positive_definite_eig(p, "matrix_power");
  std::vector<Complex> vals(e.values.size());
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = std::pow(e.values[k], s);
  return spectral_apply(e, vals);
}

CMatrix unitary_power(const CMatrix& p, double t) {
  const HermEig e = positive_definite_eig(p, "unitary_power");
  std::vector<Complex> vals(e.values.size());
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = std::polar(1.0, t * std::log(e.values[k]));
  return spectral_apply(e, vals);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return r;
}

CMatrix partial_trace(const CMatrix& m, int leg, std::size_t d1, std::size_t d2) {
  if (!m.square() || m.rows() != d1 * d2) {
    throw InputError("partial_trace: matrix is not square of size d1*d2");
  }
  if (leg == 1) {
    CMatrix r(d2, d2);
    for (std::size_t i = 0; i < d1; ++i)
      for (std::size_t k = 0; k < d2; ++k)
        for (std::size_t l = 0; l < d2; ++l) r(k, l) += m(i * d2 + k, i * d2 + l);
    return r;
  }
  if (leg == 2) {
    CMatrix r(d1, d1);
    for (std::size_t i = 0; i < d1; ++i)
      for (std::size_t j = 0; j < d1; ++j)
        for (std::size_t k = 0; k < d2; ++k) r(i, j) += m(i * d2 + k, j * d2 + k);
    return r;
  }
  throw InputError("partial_trace: leg must be 1 or 2");
}

CMatrix psd_project(const CMatrix& h) {
  const HermEig e = herm_eig(h);
  std::vector<Complex> vals(e.values.size());
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = std::max(e.values[k], 0.0);
  return spectral_apply(e, vals);
}

double operator_norm(const CMatrix& a) {
  const HermEig e = herm_eig(a.adjoint() * a);
  return e.values.empty() ? 0.0 : std::sqrt(std::max(e.values.back(), 0.0));
}

double trace_norm(const CMatrix& a) {
  const HermEig e = herm_eig(a.adjoint() * a);
  double s = 0.0;
  for (double v : e.values) s += std::sqrt(std::max(v, 0.0));
  return s;
}

std::vector<Complex> vec(const CMatrix& m) { return {m.data().begin(), m.data().end()}; }

CMatrix unvec(std::span<const Complex> v, std::size_t rows, std::size_t cols) {
  return CMatrix(rows, cols, std::vector<Complex>(v.begin(), v.end()));
}

}  // namespace ncot
