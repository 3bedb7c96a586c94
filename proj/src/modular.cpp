#include "ncot/modular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ncot {

namespace {

void require_faithful(const State& s, const char* who) {
  if (!s.faithful()) throw InputError(std::string(who) + ": state is not faithful");
}

void require_marginal(const Channel& e, const State& mu, const State& nu, double tol, const char* who) {
  const double r = e.marginal_residual(mu, nu);
  if (r > tol) throw InputError(std::string(who) + ": nu o E != mu (residual " + std::to_string(r) + ")");
}

}  // namespace

std::vector<std::size_t> cluster_values(const std::vector<double>& values, double tol, std::size_t* count) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::size_t> label(values.size());
  std::size_t cls = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r > 0 && values[order[r]] - values[order[r - 1]] > tol) ++cls;
    label[order[r]] = cls;
  }
  if (count) *count = values.empty() ? 0 : cls + 1;
  return label;
}

ModularData modular_data(const State& mu) {
  require_faithful(mu, "modular_data");
  ModularData d;
  d.sqrt_density = mu.power(0.5);
  d.inv_sqrt_density = mu.power(-0.5);
  const auto& p = mu.eig().values;
  const std::size_t n = p.size();
  std::vector<double> logs;
  logs.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) logs.push_back(std::log(p[i]) - std::log(p[j]));
  const auto labels = cluster_values(logs, kSectorTolerance, &d.sector_count);
  d.sector.assign(n, std::vector<std::size_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d.sector[i][j] = labels[i * n + j];
  return d;
}

CMatrix modular_apply(const State& mu, const CMatrix& a, double t) {
  require_faithful(mu, "modular_apply");
  return mu.modular_unitary(t) * a * mu.modular_unitary(-t);
}

double covariance_residual(const Channel& e, const State& mu, const State& nu, std::span<const double> times) {
  double worst = 0.0;
  const auto basis = e.source().unit_basis();
  for (double t : times) {
    const CMatrix um = mu.modular_unitary(t);
    const CMatrix um_inv = um.adjoint();
    const CMatrix un = nu.modular_unitary(t);
    const CMatrix un_inv = un.adjoint();
    for (const auto& a : basis) {
      const CMatrix lhs = e(um * a * um_inv);
      const CMatrix rhs = un * e(a) * un_inv;
      worst = std::max(worst, distance(lhs, rhs));
    }
  }
  return worst;
}

double covariance_commutator(const Channel& e, const State& mu, const State& nu) {
  require_faithful(nu, "covariance_commutator");
  const CMatrix d = kron(mu.density().conj(), nu.power(-1.0));
  const CMatrix& c = e.choi();
  return distance(c * d, d * c);
}

CMatrix sandwich_superop(const CMatrix& left, const CMatrix& right) { return kron(left, right.transpose()); }

CMatrix modular_operator(const State& mu) { return sandwich_superop(mu.density(), mu.power(-1.0)); }

KContraction k_contraction(const Channel& e, const State& mu, const State& nu) {
  require_faithful(mu, "k_contraction");
  require_faithful(nu, "k_contraction");
  require_marginal(e, mu, nu, 1e-10, "k_contraction");
  const std::size_t na = mu.algebra().dim();
  const std::size_t nb = nu.algebra().dim();
  // K = R(rho_nu^{1/2}) S R(rho_mu^{-1/2}) with R(m) the right multiplication.
  const CMatrix right_in = sandwich_superop(CMatrix::identity(na), mu.power(-0.5));
  const CMatrix right_out = sandwich_superop(CMatrix::identity(nb), nu.power(0.5));
  KContraction k;
  k.matrix = right_out * e.superop() * right_in;
  k.norm = operator_norm(k.matrix);
  return k;
}

Channel kms_dual(const Channel& e, const State& mu, const State& nu) {
  require_faithful(mu, "kms_dual");
  require_faithful(nu, "kms_dual");
  require_marginal(e, mu, nu, 1e-9, "kms_dual");
  const Channel adj = trace_adjoint(e);
  const CMatrix mu_m = mu.power(-0.5);
  const CMatrix nu_p = nu.power(0.5);
  return Channel::from_map(e.target(), e.source(), [&](const CMatrix& b) {
    return mu_m * adj(nu_p * b * nu_p) * mu_m;
  });
}

Channel modular_channel(const State& mu, double t) {
  const CMatrix u = mu.modular_unitary(t);
  const CMatrix ui = u.adjoint();
  return Channel::from_map(mu.algebra(), mu.algebra(), [&](const CMatrix& a) { return u * a * ui; });
}

}  // namespace ncot
