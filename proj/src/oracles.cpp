#include "ncot/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace ncot {

namespace {

constexpr double kPivotTolerance = 1e-12;

// Dense tableau for min c.x, A x = b, x >= 0 with b >= 0.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

  double& a(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return t_[i * (n_ + 1) + n_]; }
  double& reduced(std::size_t j) { return t_[m_ * (n_ + 1) + j]; }
  double& value() { return t_[m_ * (n_ + 1) + n_]; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double pv = a(r, c);
    for (std::size_t j = 0; j <= n_; ++j) t_[r * (n_ + 1) + j] /= pv;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_[i * (n_ + 1) + c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) t_[i * (n_ + 1) + j] -= f * t_[r * (n_ + 1) + j];
    }
    basis_[r] = c;
    ++pivots_;
  }

  // Bland's rule: smallest improving column, ties in the ratio test broken
  // by the smallest basic index. Columns with allowed[j] == false never enter.
  void optimize(const std::vector<bool>& allowed) {
    for (;;) {
      std::size_t enter = n_;
      for (std::size_t j = 0; j < n_; ++j)
        if (allowed[j] && reduced(j) < -kPivotTolerance) {
          enter = j;
          break;
        }
      if (enter == n_) return;
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        if (a(i, enter) <= kPivotTolerance) continue;
        const double ratio = rhs(i) / a(i, enter);
        if (ratio < best - kPivotTolerance || (ratio <= best + kPivotTolerance && leave < m_ && basis_[i] < basis_[leave])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == m_) throw NumericalError("transportation_lp: unbounded direction");
      pivot(leave, enter);
    }
  }

  int pivots() const { return pivots_; }

 private:
  std::size_t m_, n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  int pivots_ = 0;
};

void require_distribution(const std::vector<double>& v, const char* name) {
  double s = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) throw InputError(std::string("transportation_lp: negative entry in ") + name);
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-12) throw InputError(std::string("transportation_lp: ") + name + " does not sum to 1");
}

}  // namespace

LpResult transportation_lp(const std::vector<double>& p, const std::vector<double>& q,
                           const std::vector<double>& cost) {
  require_distribution(p, "p");
  require_distribution(q, "q");
  const std::size_t m = p.size();
  const std::size_t n = q.size();
  if (cost.size() != m * n) throw InputError("transportation_lp: cost has the wrong size");
  const std::size_t vars = m * n;
  const std::size_t rows = m + n;
  // Columns: couplings, then one artificial per row.
  Tableau t(rows, vars + rows);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.a(i, i * n + j) = 1.0;
    t.rhs(i) = p[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) t.a(m + j, i * n + j) = 1.0;
    t.rhs(m + j) = q[j];
  }
  for (std::size_t r = 0; r < rows; ++r) {
    t.a(r, vars + r) = 1.0;
    t.basis()[r] = vars + r;
  }

  // Phase 1: minimize the sum of artificials.
  for (std::size_t j = 0; j < vars; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += t.a(r, j);
    t.reduced(j) = -s;
  }
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) total += t.rhs(r);
  t.value() = -total;
  std::vector<bool> allowed(vars + rows, true);
  t.optimize(allowed);
  if (t.value() < -1e-9) throw NumericalError("transportation_lp: infeasible marginals");

  // Drive remaining artificials out of the basis where possible; rows where
  // no coupling column has a nonzero entry are redundant and stay at zero.
  for (std::size_t r = 0; r < rows; ++r) {
    if (t.basis()[r] < vars) continue;
    for (std::size_t j = 0; j < vars; ++j)
      if (std::abs(t.a(r, j)) > kPivotTolerance) {
        t.pivot(r, j);
        break;
      }
  }

  // Phase 2 with artificials barred from entering.
  for (std::size_t j = vars; j < vars + rows; ++j) allowed[j] = false;
  for (std::size_t j = 0; j < vars + rows; ++j) t.reduced(j) = j < vars ? cost[j] : 0.0;
  t.value() = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t b = t.basis()[r];
    const double cb = b < vars ? cost[b] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < vars + rows; ++j) t.reduced(j) -= cb * t.a(r, j);
    t.value() -= cb * t.rhs(r);
  }
  t.optimize(allowed);

  LpResult out;
  out.rows = m;
  out.cols = n;
  out.coupling.assign(vars, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    if (t.basis()[r] < vars) out.coupling[t.basis()[r]] = std::max(0.0, t.rhs(r));
  for (std::size_t j = 0; j < vars; ++j) out.value += cost[j] * out.coupling[j];
  out.pivots = t.pivots();
  return out;
}

namespace {

void require_diagonal_qubit(const State& s, const char* who) {
  if (!(s.algebra() == FdAlgebra::full(2))) throw InputError(std::string(who) + ": expected a state on M_2");
  const CMatrix& d = s.density();
  if (std::abs(d(0, 1)) > 1e-12) throw InputError(std::string(who) + ": state is not diagonal");
  if (std::abs(d(0, 0).real() - d(1, 1).real()) <= 1e-9)
    throw InputError(std::string(who) + ": degenerate spectrum merges the modular sectors");
  if (!s.faithful()) throw InputError(std::string(who) + ": state is not faithful");
}

}  // namespace

GridResult qubit_grid_oracle(const State& mu, const State& nu, const GeneratorSet& k, std::size_t resolution) {
  require_diagonal_qubit(mu, "qubit_grid_oracle");
  require_diagonal_qubit(nu, "qubit_grid_oracle");
  if (resolution < 1) throw InputError("qubit_grid_oracle: resolution must be positive");
  const double p1 = mu.density()(0, 0).real(), p2 = mu.density()(1, 1).real();
  const double q1 = nu.density()(0, 0).real(), q2 = nu.density()(1, 1).real();

  // e12 carries the ratio p1/p2 and must land where nu has the same ratio.
  enum class Transfer { None, Keep, Flip } transfer = Transfer::None;
  if (std::abs(std::log(p1 / p2) - std::log(q1 / q2)) <= 1e-9) transfer = Transfer::Keep;
  else if (std::abs(std::log(p1 / p2) - std::log(q2 / q1)) <= 1e-9) transfer = Transfer::Flip;

  const CMatrix e12 = CMatrix::unit(2, 0, 1);
  const CMatrix e21 = CMatrix::unit(2, 1, 0);
  const CMatrix& target_off = transfer == Transfer::Flip ? e21 : e12;

  double fixed = 0.0;
  for (const auto& a : k) fixed += (mu(a.adjoint() * a) + nu(a.adjoint() * a)).real();

  auto evaluate = [&](double s1, double s2, Complex z) {
    double v = fixed;
    for (const auto& a : k) {
      CMatrix ea = CMatrix::diagonal(std::vector<double>{s1, s2}) * a(0, 0) +
                   CMatrix::diagonal(std::vector<double>{1.0 - s1, 1.0 - s2}) * a(1, 1);
      ea += target_off * (z * a(0, 1));
      ea += target_off.adjoint() * (std::conj(z) * a(1, 0));
      v -= 2.0 * nu(ea.adjoint() * a).real();
    }
    return v;
  };

  // q1 s1 + q2 s2 = p1 with s1, s2 in [0, 1]
  const double lo = std::max(0.0, (p1 - q2) / q1);
  const double hi = std::min(1.0, p1 / q1);
  const std::size_t phases = transfer == Transfer::None ? 1 : resolution;
  GridResult best;
  best.value = std::numeric_limits<double>::infinity();
  best.off_diagonal = transfer != Transfer::None;
  for (std::size_t g = 0; g <= resolution; ++g) {
    const double s1 = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(resolution);
    const double s2 = std::clamp((p1 - q1 * s1) / q2, 0.0, 1.0);
    double radius = 0.0;
    if (transfer == Transfer::Keep) radius = std::sqrt(std::max(0.0, s1 * (1.0 - s2)));
    if (transfer == Transfer::Flip) radius = std::sqrt(std::max(0.0, s2 * (1.0 - s1)));
    for (std::size_t f = 0; f < phases; ++f) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(f) / static_cast<double>(phases);
      const Complex z = std::polar(radius, theta);
      const double v = evaluate(s1, s2, z);
      if (v < best.value) best = {v, s1, s2, z, best.off_diagonal};
    }
  }
  return best;
}

}  // namespace ncot
