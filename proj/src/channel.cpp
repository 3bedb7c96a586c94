#include "ncot/channel.hpp"

#include <algorithm>
#include <cmath>

namespace ncot {

namespace {

void require_same_source_target_shape(const FdAlgebra& source, const FdAlgebra& target,
                                      const CMatrix& choi) {
  const std::size_t d = source.dim() * target.dim();
  if (choi.rows() != d || choi.cols() != d) {
    throw InputError("Channel: Choi matrix must be " + std::to_string(d) + "x" + std::to_string(d));
  }
}

}  // namespace

Channel Channel::from_choi(const FdAlgebra& source, const FdAlgebra& target, const CMatrix& choi) {
  require_same_source_target_shape(source, target, choi);
  const std::size_t na = source.dim();
  const std::size_t nb = target.dim();
  Channel e;
  e.source_ = source;
  e.target_ = target;
  e.choi_ = CMatrix(na * nb, na * nb);
  e.superop_ = CMatrix(nb * nb, na * na);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) {
      if (!source.same_block(i, j)) continue;
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) {
          if (!target.same_block(k, l)) continue;
          const Complex c = choi(i * nb + k, j * nb + l);
          e.choi_(i * nb + k, j * nb + l) = c;
          e.superop_(k * nb + l, i * na + j) = c;
        }
    }
  return e;
}

Channel Channel::from_superop(const FdAlgebra& source, const FdAlgebra& target, const CMatrix& superop) {
  const std::size_t na = source.dim();
  const std::size_t nb = target.dim();
  if (superop.rows() != nb * nb || superop.cols() != na * na) {
    throw InputError("Channel: superoperator has the wrong shape");
  }
  CMatrix choi(na * nb, na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) choi(i * nb + k, j * nb + l) = superop(k * nb + l, i * na + j);
  return from_choi(source, target, choi);
}

Channel Channel::from_map(const FdAlgebra& source, const FdAlgebra& target,
                          const std::function<CMatrix(const CMatrix&)>& map) {
  const std::size_t na = source.dim();
  const std::size_t nb = target.dim();
  CMatrix choi(na * nb, na * nb);
  for (auto [i, j] : source.unit_indices()) {
    const CMatrix out = map(CMatrix::unit(na, i, j));
    if (out.rows() != nb || out.cols() != nb) throw InputError("Channel::from_map: map output has wrong shape");
    for (std::size_t k = 0; k < nb; ++k)
      for (std::size_t l = 0; l < nb; ++l) choi(i * nb + k, j * nb + l) = out(k, l);
  }
  return from_choi(source, target, choi);
}

Channel Channel::identity(const FdAlgebra& algebra) {
  return from_map(algebra, algebra, [](const CMatrix& x) { return x; });
}

Channel Channel::collapse(const State& mu, const FdAlgebra& target) {
  const CMatrix one = CMatrix::identity(target.dim());
  return from_map(mu.algebra(), target, [&](const CMatrix& x) { return one * mu(x); });
}

CMatrix Channel::operator()(const CMatrix& x) const {
  const std::size_t na = source_.dim();
  const std::size_t nb = target_.dim();
  if (x.rows() != na || x.cols() != na) throw InputError("Channel: argument has wrong shape");
  CMatrix out(nb, nb);
  auto xv = x.data();
  auto ov = out.data();
  for (std::size_t r = 0; r < nb * nb; ++r) {
    Complex s = 0.0;
    for (std::size_t c = 0; c < na * na; ++c) s += superop_(r, c) * xv[c];
    ov[r] = s;
  }
  return out;
}

double Channel::cp_slack() const {
  const HermEig e = herm_eig(choi_.hermitian_part());
  return e.values.front();
}

double Channel::unitality_residual() const {
  return distance((*this)(CMatrix::identity(source_.dim())), CMatrix::identity(target_.dim()));
}

double Channel::marginal_residual(const State& mu, const State& nu) const {
  const std::size_t na = source_.dim();
  // (nu o E)(e_ij) for every unit gives the transposed density of nu o E.
  CMatrix pulled(na, na);
  for (auto [i, j] : source_.unit_indices()) pulled(j, i) = nu((*this)(CMatrix::unit(na, i, j)));
  return distance(pulled, mu.density());
}

double Channel::representation_residual() const {
  const std::size_t na = source_.dim();
  const std::size_t nb = target_.dim();
  double worst = 0.0;
  for (auto [i, j] : source_.unit_indices()) {
    const CMatrix x = CMatrix::unit(na, i, j);
    CMatrix xt_one = kron(x.transpose(), CMatrix::identity(nb));
    const CMatrix from_choi = partial_trace(xt_one * choi_, 1, na, nb);
    worst = std::max(worst, distance(from_choi, (*this)(x)));
  }
  return worst;
}

void Channel::require_ucp(double tol) const {
  const double slack = cp_slack();
  if (slack < -tol) throw InputError("channel is not completely positive (Choi eigenvalue " + std::to_string(slack) + ")");
  const double unit = unitality_residual();
  if (unit > tol) throw InputError("channel is not unital (residual " + std::to_string(unit) + ")");
}

Channel trace_adjoint(const Channel& e) {
  // S^dagger acts on row-major vectors of B; Tr(E^dag(y) x) = Tr(y E(x))
  // gives vec(E^dag(y)) = S^T vec(y) in the row-major/transpose pairing.
  const std::size_t na = e.source().dim();
  const std::size_t nb = e.target().dim();
  CMatrix s(na * na, nb * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l)
          // Tr(E^dag(e_kl) e_ji) = Tr(e_kl E(e_ji)) = E(e_ji)_{lk}
          s(i * na + j, k * nb + l) = e.superop()(l * nb + k, j * na + i);
  return Channel::from_superop(e.target(), e.source(), s);
}

Channel compose(const Channel& e1, const Channel& e2) {
  if (!(e1.target() == e2.source())) throw InputError("compose: target of first map is not source of second");
  return Channel::from_superop(e1.source(), e2.target(), e2.superop() * e1.superop());
}

double superop_distance(const Channel& e, const Channel& f) { return distance(e.superop(), f.superop()); }

Channel slice_expectation(const FdAlgebra& algebra, const State& zeta) {
  if (!algebra.tensor_factors()) throw InputError("slice_expectation: algebra is not a declared tensor product");
  const auto [d1, d2] = *algebra.tensor_factors();
  if (zeta.algebra().dim() != d2 || zeta.algebra().block_dims().size() != 1) {
    throw InputError("slice_expectation: state must live on the full second factor");
  }
  const CMatrix one_rho = kron(CMatrix::identity(d1), zeta.density());
  const CMatrix one2 = CMatrix::identity(d2);
  return Channel::from_map(algebra, algebra, [&](const CMatrix& x) {
    return kron(partial_trace(one_rho * x, 2, d1, d2), one2);
  });
}

}  // namespace ncot
