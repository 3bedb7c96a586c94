#include "ncot/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ncot {

FdAlgebra::FdAlgebra(std::vector<std::size_t> block_dims,
                     std::optional<std::pair<std::size_t, std::size_t>> tensor_factors)
    : blocks_(std::move(block_dims)), tensor_(tensor_factors) {
  if (blocks_.empty()) throw InputError("FdAlgebra: at least one block is required");
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (blocks_[b] == 0) throw InputError("FdAlgebra: block dimensions must be positive");
    offsets_.push_back(n_);
    for (std::size_t i = 0; i < blocks_[b]; ++i) block_index_.push_back(b);
    n_ += blocks_[b];
  }
  if (tensor_) {
    if (blocks_.size() != 1 || tensor_->first * tensor_->second != n_) {
      throw InputError("FdAlgebra: tensor factors must multiply to a single block dimension");
    }
  }
}

std::size_t FdAlgebra::element_dim() const {
  std::size_t d = 0;
  for (auto n : blocks_) d += n * n;
  return d;
}

bool FdAlgebra::is_abelian() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](std::size_t n) { return n == 1; });
}

CMatrix FdAlgebra::pinch(const CMatrix& x) const {
  if (x.rows() != n_ || x.cols() != n_) throw InputError("pinch: matrix size does not match algebra");
  CMatrix r(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (same_block(i, j)) r(i, j) = x(i, j);
  return r;
}

double FdAlgebra::off_block_norm(const CMatrix& x) const {
  if (x.rows() != n_ || x.cols() != n_) throw InputError("matrix size does not match algebra");
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (!same_block(i, j)) s += std::norm(x(i, j));
  return std::sqrt(s);
}

bool FdAlgebra::contains(const CMatrix& x, double tol) const {
  return x.rows() == n_ && x.cols() == n_ && off_block_norm(x) <= tol * (1.0 + x.frobenius_norm());
}

std::vector<std::pair<std::size_t, std::size_t>> FdAlgebra::unit_indices() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(element_dim());
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (std::size_t i = 0; i < blocks_[b]; ++i)
      for (std::size_t j = 0; j < blocks_[b]; ++j) out.emplace_back(offsets_[b] + i, offsets_[b] + j);
  return out;
}

std::vector<CMatrix> FdAlgebra::unit_basis() const {
  std::vector<CMatrix> out;
  for (auto [i, j] : unit_indices()) out.push_back(CMatrix::unit(n_, i, j));
  return out;
}

// ---------------------------------------------------------------------------

double faithfulness_floor(const FdAlgebra& algebra) { return 1e-10 * double(algebra.dim()); }

Complex State::operator()(const CMatrix& a) const {
  // Tr(rho a) without forming the product.
  Complex s = 0.0;
  const std::size_t n = density_.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += density_(i, j) * a(j, i);
  return s;
}

CMatrix State::power(double s) const {
  if (!faithful_) throw InputError("state power: state is not faithful");
  std::vector<Complex> vals(eig_.values.size());
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = std::pow(eig_.values[k], s);
  return spectral_apply(eig_, vals);
}

CMatrix State::modular_unitary(double t) const {
  if (!faithful_) throw InputError("modular group: state is not faithful");
  std::vector<Complex> vals(eig_.values.size());
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = std::polar(1.0, t * std::log(eig_.values[k]));
  return spectral_apply(eig_, vals);
}

namespace {

CMatrix block_of(const CMatrix& m, std::size_t off, std::size_t n) {
  CMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = m(off + i, off + j);
  return r;
}

HermEig block_eig(const FdAlgebra& algebra, const CMatrix& h) {
  HermEig out;
  out.vectors = CMatrix(algebra.dim(), algebra.dim());
  for (std::size_t b = 0; b < algebra.block_dims().size(); ++b) {
    const std::size_t n = algebra.block_dims()[b];
    const std::size_t off = algebra.block_offset(b);
    const HermEig e = herm_eig(block_of(h, off, n));
    for (std::size_t k = 0; k < n; ++k) {
      out.values.push_back(e.values[k]);
      for (std::size_t i = 0; i < n; ++i) out.vectors(off + i, off + k) = e.vectors(i, k);
    }
  }
  return out;
}

}  // namespace

State make_state(const FdAlgebra& algebra, const CMatrix& density) {
  const std::size_t n = algebra.dim();
  if (density.rows() != n || density.cols() != n) {
    throw InputError("make_state: density is " + std::to_string(density.rows()) + "x" +
                     std::to_string(density.cols()) + ", algebra needs " + std::to_string(n));
  }
  if (!algebra.contains(density, 1e-12)) throw InputError("make_state: density has support outside the blocks");
  if (!is_hermitian(density, 1e-12)) throw InputError("make_state: density is not Hermitian");
  const Complex tr = density.trace();
  if (std::abs(tr - 1.0) > 1e-12) {
    throw InputError("make_state: trace is " + std::to_string(tr.real()) + ", expected 1");
  }
  State s;
  s.algebra_ = algebra;
  s.density_ = algebra.pinch(density.hermitian_part());
  s.eig_ = block_eig(algebra, s.density_);
  s.min_eig_ = *std::min_element(s.eig_.values.begin(), s.eig_.values.end());
  if (s.min_eig_ < -1e-12) {
    throw InputError("make_state: density has negative eigenvalue " + std::to_string(s.min_eig_));
  }
  s.faithful_ = s.min_eig_ >= faithfulness_floor(algebra);
  return s;
}

State random_faithful_state(const FdAlgebra& algebra, std::uint64_t seed, double floor) {
  const std::size_t n = algebra.dim();
  if (floor * double(n) >= 1.0) throw InputError("random_faithful_state: floor too large for dimension");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  CMatrix w(n, n);
  for (std::size_t b = 0; b < algebra.block_dims().size(); ++b) {
    const std::size_t nb = algebra.block_dims()[b];
    const std::size_t off = algebra.block_offset(b);
    CMatrix g(nb, nb);
    for (auto& z : g.data()) z = Complex(gauss(rng), gauss(rng));
    const CMatrix gg = g * g.adjoint();
    for (std::size_t i = 0; i < nb; ++i)
      for (std::size_t j = 0; j < nb; ++j) w(off + i, off + j) = gg(i, j);
  }
  HermEig e = block_eig(algebra, w.hermitian_part());
  double total = 0.0;
  for (double& v : e.values) total += (v = std::max(v, 0.0));
  for (double& v : e.values) v = floor + (1.0 - floor * double(n)) * v / total;
  CMatrix rho = e.reconstruct().hermitian_part();
  rho *= 1.0 / rho.trace().real();
  return make_state(algebra, algebra.pinch(rho));
}

double trace_distance(const State& a, const State& b) {
  return 0.5 * trace_norm(a.density() - b.density());
}

// ---------------------------------------------------------------------------

GeneratorSet::GeneratorSet(std::vector<CMatrix> k, std::vector<std::string> names)
    : k_(std::move(k)), names_(std::move(names)) {
  if (!names_.empty() && names_.size() != k_.size()) {
    throw InputError("GeneratorSet: name count does not match generator count");
  }
  if (names_.empty()) {
    for (std::size_t l = 0; l < k_.size(); ++l) names_.push_back("k" + std::to_string(l + 1));
  }
  for (const auto& m : k_) {
    if (!m.square() || m.rows() != k_.front().rows()) throw InputError("GeneratorSet: inconsistent shapes");
  }
}

std::optional<std::size_t> GeneratorSet::adjoint_partner(std::size_t l, double tol) const {
  const CMatrix adj = k_[l].adjoint();
  // Prefer the element itself when it is self-adjoint.
  if (distance(adj, k_[l]) <= tol) return l;
  for (std::size_t m = 0; m < k_.size(); ++m)
    if (distance(adj, k_[m]) <= tol) return m;
  return std::nullopt;
}

bool GeneratorSet::adjoint_closed(double tol) const {
  for (std::size_t l = 0; l < k_.size(); ++l)
    if (!adjoint_partner(l, tol)) return false;
  return true;
}

GeneratorSet pauli_generators() {
  const Complex i(0.0, 1.0);
  return GeneratorSet({CMatrix{{0, 1}, {1, 0}}, CMatrix{{0, -i}, {i, 0}}, CMatrix{{1, 0}, {0, -1}}},
                      {"sx", "sy", "sz"});
}

GeneratorSet hermitian_basis(const FdAlgebra& algebra) {
  const std::size_t n = algebra.dim();
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<CMatrix> k;
  for (std::size_t b = 0; b < algebra.block_dims().size(); ++b) {
    const std::size_t off = algebra.block_offset(b);
    const std::size_t nb = algebra.block_dims()[b];
    for (std::size_t p = 0; p < nb; ++p) k.push_back(CMatrix::unit(n, off + p, off + p));
    for (std::size_t p = 0; p < nb; ++p)
      for (std::size_t q = p + 1; q < nb; ++q) {
        CMatrix s(n, n), a(n, n);
        s(off + p, off + q) = s(off + q, off + p) = r;
        a(off + p, off + q) = Complex(0, -r);
        a(off + q, off + p) = Complex(0, r);
        k.push_back(std::move(s));
        k.push_back(std::move(a));
      }
  }
  return GeneratorSet(std::move(k));
}

GeneratorSet first_factor_basis(const FdAlgebra& algebra) {
  if (!algebra.tensor_factors()) throw InputError("first_factor_basis: algebra is not a tensor product");
  const auto [d1, d2] = *algebra.tensor_factors();
  std::vector<CMatrix> k;
  for (const auto& h : hermitian_basis(FdAlgebra::full(d1))) k.push_back(kron(h, CMatrix::identity(d2)));
  return GeneratorSet(std::move(k));
}

namespace {

// Gram-Schmidt step: orthonormalize x against basis, append if independent.
bool extend_basis(std::vector<CMatrix>& basis, CMatrix x, double tol) {
  const double norm0 = x.frobenius_norm();
  if (norm0 == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& e : basis) x -= e * inner(e, x);
  const double norm = x.frobenius_norm();
  if (norm <= tol * std::max(1.0, norm0)) return false;
  basis.push_back(x * (1.0 / norm));
  return true;
}

}  // namespace

std::vector<CMatrix> word_span(const FdAlgebra& algebra, const GeneratorSet& gens, std::size_t max_len) {
  constexpr double kTol = 1e-10;
  std::vector<CMatrix> basis;
  extend_basis(basis, CMatrix::identity(algebra.dim()), kTol);
  std::size_t frontier_begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t frontier_end = basis.size();
    if (frontier_begin == frontier_end) break;
    for (std::size_t b = frontier_begin; b < frontier_end; ++b)
      for (const auto& k : gens) extend_basis(basis, basis[b] * k, kTol);
    frontier_begin = frontier_end;
  }
  return basis;
}

std::vector<CMatrix> generated_subalgebra(const FdAlgebra& algebra, const GeneratorSet& gens,
                                          std::size_t max_word_len) {
  if (!gens.adjoint_closed(1e-12)) throw InputError("generated_subalgebra: generators are not adjoint-closed");
  for (const auto& k : gens)
    if (!algebra.contains(k, 1e-12)) throw InputError("generated_subalgebra: generator outside the algebra");
  // The span of words of length <= L is closed once it stops growing, or
  // once it exhausts the algebra.
  std::vector<CMatrix> prev = word_span(algebra, gens, 0);
  for (std::size_t len = 1; len <= max_word_len; ++len) {
    std::vector<CMatrix> cur = word_span(algebra, gens, len);
    if (cur.size() == prev.size() || cur.size() == algebra.element_dim()) return cur;
    prev = std::move(cur);
  }
  throw NumericalError("generated_subalgebra: span still growing at word length " +
                       std::to_string(max_word_len));
}

bool generates(const FdAlgebra& algebra, const GeneratorSet& gens) {
  return generated_subalgebra(algebra, gens).size() == algebra.element_dim();
}

CMatrix project_onto_span(const std::vector<CMatrix>& basis, const CMatrix& x) {
  CMatrix r(x.rows(), x.cols());
  for (const auto& e : basis) r += e * inner(e, x);
  return r;
}

CompressedProblem support_compress(const State& zeta, const GeneratorSet& gens) {
  const FdAlgebra& alg = zeta.algebra();
  if (std::abs(zeta.density().trace()) == 0.0) throw InputError("support_compress: zero state");
  const double cutoff = faithfulness_floor(alg);
  const HermEig& e = zeta.eig();

  std::vector<std::size_t> ranks;
  std::vector<std::size_t> columns;
  for (std::size_t b = 0; b < alg.block_dims().size(); ++b) {
    const std::size_t off = alg.block_offset(b);
    std::size_t r = 0;
    for (std::size_t k = 0; k < alg.block_dims()[b]; ++k)
      if (e.values[off + k] >= cutoff) {
        columns.push_back(off + k);
        ++r;
      }
    if (r > 0) ranks.push_back(r);
  }
  if (columns.empty()) throw InputError("support_compress: zero state");

  CompressedProblem out;
  if (zeta.faithful()) {
    out.algebra = alg;
    out.state = zeta;
    out.generators = gens;
    out.isometry = CMatrix::identity(alg.dim());
    return out;
  }
  CMatrix p(alg.dim(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (std::size_t i = 0; i < alg.dim(); ++i) p(i, c) = e.vectors(i, columns[c]);

  out.algebra = FdAlgebra(ranks);
  CMatrix rho = p.adjoint() * zeta.density() * p;
  rho = out.algebra.pinch(rho.hermitian_part());
  rho *= 1.0 / rho.trace().real();
  out.state = make_state(out.algebra, rho);
  std::vector<CMatrix> k;
  for (const auto& g : gens) k.push_back(out.algebra.pinch(p.adjoint() * g * p));
  out.generators = GeneratorSet(std::move(k), gens.names());
  out.isometry = std::move(p);
  return out;
}

}  // namespace ncot
