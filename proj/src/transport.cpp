#include "ncot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ncot {

namespace {

constexpr std::size_t kNoUnit = static_cast<std::size_t>(-1);

std::vector<std::vector<std::size_t>> unit_lookup(const FdAlgebra& alg) {
  std::vector<std::vector<std::size_t>> idx(alg.dim(), std::vector<std::size_t>(alg.dim(), kNoUnit));
  std::size_t r = 0;
  for (auto [i, j] : alg.unit_indices()) idx[i][j] = r++;
  return idx;
}

CMatrix random_element(const FdAlgebra& alg, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix x(alg.dim(), alg.dim());
  for (auto [i, j] : alg.unit_indices()) x(i, j) = Complex(g(rng), g(rng));
  return x;
}

}  // namespace

TransportPlan::TransportPlan(FdAlgebra source, FdAlgebra target, CMatrix table)
    : source_(std::move(source)), target_(std::move(target)), table_(std::move(table)) {
  src_units_ = source_.unit_indices();
  tgt_units_ = target_.unit_indices();
  if (table_.rows() != src_units_.size() || table_.cols() != tgt_units_.size()) {
    throw InputError("TransportPlan: table shape does not match the algebras");
  }
}

Complex TransportPlan::operator()(const CMatrix& a, const CMatrix& m) const {
  Complex s = 0.0;
  for (std::size_t r = 0; r < src_units_.size(); ++r) {
    const Complex ar = a(src_units_[r].first, src_units_[r].second);
    if (ar == Complex{}) continue;
    Complex row = 0.0;
    for (std::size_t c = 0; c < tgt_units_.size(); ++c)
      row += m(tgt_units_[c].first, tgt_units_[c].second) * table_(r, c);
    s += ar * row;
  }
  return s;
}

double TransportPlan::marginal_residual(const State& mu, const State& nu) const {
  const CMatrix one_a = CMatrix::identity(source_.dim());
  const CMatrix one_b = CMatrix::identity(target_.dim());
  double worst = 0.0;
  for (auto [i, j] : src_units_) {
    const CMatrix a = CMatrix::unit(source_.dim(), i, j);
    worst = std::max(worst, std::abs((*this)(a, one_b) - mu(a)));
  }
  for (auto [k, l] : tgt_units_) {
    const CMatrix m = CMatrix::unit(target_.dim(), k, l);
    worst = std::max(worst, std::abs((*this)(one_a, m) - nu(m)));
  }
  return worst;
}

double TransportPlan::positivity_slack(std::uint64_t seed, std::size_t samples) const {
  std::mt19937_64 rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  constexpr std::size_t kTerms = 3;
  for (std::size_t n = 0; n < samples; ++n) {
    std::vector<CMatrix> a, m;
    double scale = 0.0;
    for (std::size_t t = 0; t < kTerms; ++t) {
      a.push_back(random_element(source_, rng));
      m.push_back(random_element(target_, rng));
      scale += std::pow(a.back().frobenius_norm() * m.back().frobenius_norm(), 2);
    }
    // (a_s (x) R(m_s))^* (a_t (x) R(m_t)) = a_s^* a_t (x) R(m_t m_s^*)
    Complex v = 0.0;
    for (std::size_t s = 0; s < kTerms; ++s)
      for (std::size_t t = 0; t < kTerms; ++t) v += (*this)(a[s].adjoint() * a[t], m[t] * m[s].adjoint());
    worst = std::min(worst, v.real() / scale);
  }
  return worst;
}

TransportPlan channel_to_plan(const Channel& e, const State& nu) {
  if (!nu.faithful()) throw InputError("channel_to_plan: target state is not faithful");
  e.require_ucp(1e-9);
  const CMatrix s = nu.power(0.5);
  const auto src = e.source().unit_indices();
  const auto tgt = e.target().unit_indices();
  CMatrix table(src.size(), tgt.size());
  for (std::size_t r = 0; r < src.size(); ++r) {
    const CMatrix x = s * e(CMatrix::unit(e.source().dim(), src[r].first, src[r].second)) * s;
    // Tr(x f_kl) = x_lk
    for (std::size_t c = 0; c < tgt.size(); ++c) table(r, c) = x(tgt[c].second, tgt[c].first);
  }
  return TransportPlan(e.source(), e.target(), std::move(table));
}

Channel plan_to_channel(const TransportPlan& omega, const State& nu) {
  if (!nu.faithful()) throw InputError("plan_to_channel: target state is not faithful");
  const std::size_t na = omega.source().dim();
  const std::size_t nb = omega.target().dim();
  const CMatrix s_inv = nu.power(-0.5);
  const auto src = omega.source().unit_indices();
  const auto tgt = omega.target().unit_indices();
  CMatrix choi(na * nb, na * nb);
  for (std::size_t r = 0; r < src.size(); ++r) {
    CMatrix x(nb, nb);
    for (std::size_t c = 0; c < tgt.size(); ++c) x(tgt[c].second, tgt[c].first) = omega.table()(r, c);
    const CMatrix ea = s_inv * x * s_inv;
    const auto [i, j] = src[r];
    for (std::size_t k = 0; k < nb; ++k)
      for (std::size_t l = 0; l < nb; ++l) choi(i * nb + k, j * nb + l) = ea(k, l);
  }
  return Channel::from_choi(omega.source(), omega.target(), choi);
}

CostReport cost_channel(const Channel& e, const State& mu, const State& nu, const GeneratorSet& source_k,
                        const GeneratorSet& target_k) {
  if (source_k.size() != target_k.size()) throw InputError("cost_channel: generator lists differ in length");
  const double r = e.marginal_residual(mu, nu);
  if (r > 1e-9) throw InputError("cost_channel: nu o E != mu (residual " + std::to_string(r) + ")");
  CostReport rep;
  rep.path = "channel-form";
  for (std::size_t l = 0; l < source_k.size(); ++l) {
    const CMatrix& a = source_k[l];
    const CMatrix& b = target_k[l];
    const CMatrix ea = e(a);
    const double term = (mu(a.adjoint() * a) + nu(b.adjoint() * b) - nu(ea.adjoint() * b) -
                         nu(b.adjoint() * ea)).real();
    rep.per_generator.push_back(term);
    rep.total += term;
  }
  return rep;
}

CostReport cost_plan(const TransportPlan& omega, const State& mu, const State& nu, const GeneratorSet& k) {
  (void)mu;
  if (!nu.faithful()) throw InputError("cost_plan: target state is not faithful");
  const CMatrix one_a = CMatrix::identity(omega.source().dim());
  const CMatrix one_b = CMatrix::identity(omega.target().dim());
  const CMatrix sp = nu.power(0.5);
  const CMatrix sm = nu.power(-0.5);
  CostReport rep;
  rep.path = "gns-form";
  for (const auto& kl : k) {
    const CMatrix m = sm * kl * sp;
    const CMatrix ka = kl.adjoint();
    const Complex v = omega(ka * kl, one_b) + omega(one_a, m * m.adjoint()) - omega(ka, m) - omega(kl, m.adjoint());
    rep.per_generator.push_back(v.real());
    rep.total += v.real();
  }
  return rep;
}

CostReport cost_plan_gram(const TransportPlan& omega, const State& mu, const State& nu, const GeneratorSet& k) {
  (void)mu;
  if (!nu.faithful()) throw InputError("cost_plan_gram: target state is not faithful");
  const FdAlgebra& A = omega.source();
  const FdAlgebra& B = omega.target();
  const auto src = A.unit_indices();
  const auto tgt = B.unit_indices();
  const auto src_idx = unit_lookup(A);
  const auto tgt_idx = unit_lookup(B);
  const CMatrix sp = nu.power(0.5);
  const CMatrix sm = nu.power(-0.5);

  struct Coef {
    std::size_t i, j, k, l;  // vector (e_ij (x) R(f_kl)) Omega
    Complex c;
  };
  CostReport rep;
  rep.path = "gns-form";
  for (const auto& kl : k) {
    const CMatrix m = sm * kl * sp;
    std::vector<Coef> coefs;
    // k (x) 1 = sum k_ij e_ij (x) sum_q R(f_qq)
    for (auto [i, j] : src)
      if (kl(i, j) != Complex{})
        for (std::size_t q = 0; q < B.dim(); ++q) coefs.push_back({i, j, q, q, kl(i, j)});
    // -1 (x) R(m) = -sum_p e_pp (x) sum m_kl R(f_kl)
    for (std::size_t p = 0; p < A.dim(); ++p)
      for (auto [a, b] : tgt)
        if (m(a, b) != Complex{}) coefs.push_back({p, p, a, b, -m(a, b)});

    // <x, y> = omega((e_ij (x) R(f_kl))^* (e_i'j' (x) R(f_k'l')))
    //        = delta_{ii'} delta_{ll'} omega(e_jj' (x) R(f_k'k))
    Complex total = 0.0;
    for (const auto& x : coefs)
      for (const auto& y : coefs) {
        if (x.i != y.i || x.l != y.l) continue;
        const std::size_t r = src_idx[x.j][y.j];
        const std::size_t c = tgt_idx[y.k][x.k];
        if (r == kNoUnit || c == kNoUnit) continue;
        total += std::conj(x.c) * y.c * omega.table()(r, c);
      }
    rep.per_generator.push_back(total.real());
    rep.total += total.real();
  }
  return rep;
}

ObjectiveMatrix objective_matrix(const State& mu, const State& nu, const GeneratorSet& source_k,
                                 const GeneratorSet& target_k) {
  if (source_k.size() != target_k.size()) throw InputError("objective_matrix: generator lists differ in length");
  const std::size_t na = mu.algebra().dim();
  const std::size_t nb = nu.algebra().dim();
  ObjectiveMatrix out;
  out.m = CMatrix(na * nb, na * nb);
  for (std::size_t l = 0; l < source_k.size(); ++l) {
    const CMatrix& a = source_k[l];
    const CMatrix& b = target_k[l];
    const CMatrix x = kron(a.transpose(), nu.density() * b.adjoint());
    out.m += x;
    out.m += x.adjoint();
    out.constant += (mu(a.adjoint() * a) + nu(b.adjoint() * b)).real();
  }
  return out;
}

double kadison_slack(const Channel& e, const GeneratorSet& k) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& kl : k) {
    const CMatrix ek = e(kl);
    const CMatrix gap = (e(kl.adjoint() * kl) - ek.adjoint() * ek).hermitian_part();
    worst = std::min(worst, herm_eig(gap).values.front());
  }
  return worst;
}

DomainReport multiplicative_domain_check(const Channel& e, const GeneratorSet& k, std::size_t word_len, double tol) {
  DomainReport rep;
  for (const auto& kl : k) {
    const CMatrix ek = e(kl);
    rep.generator_residual = std::max(rep.generator_residual, distance(ek, kl));
    rep.kadison_residual = std::max(rep.kadison_residual, distance(e(kl.adjoint() * kl), ek.adjoint() * ek));
  }
  rep.fixed = rep.generator_residual <= tol && rep.kadison_residual <= tol;
  if (rep.fixed) {
    const auto span = word_span(e.source(), k, word_len);
    rep.domain_dim = span.size();
    for (const auto& w : span) rep.identity_residual = std::max(rep.identity_residual, distance(e(w), w));
  }
  return rep;
}

}  // namespace ncot
