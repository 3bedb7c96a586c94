#include "ncot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <tuple>

#include "ncot/modular.hpp"

namespace ncot {

namespace {

constexpr double kRowDropTolerance = 1e-10;
constexpr double kClipTolerance = 1e-8;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Real linear functional on the coordinate vector, accumulated from complex
// weights on individual rotated Choi entries.
class RowBuilder {
 public:
  RowBuilder(std::size_t dim, const std::vector<std::vector<std::size_t>>& where)
      : where_(where), re_(dim, 0.0), im_(dim, 0.0) {}

  // Adds w * C_rs to the functional (both real and imaginary parts).
  void add(std::size_t r, std::size_t s, Complex w) {
    const std::size_t a = where_[r][s];
    if (a == kNone) return;
    if (r == s) {
      re_[a] += w.real();
      im_[a] += w.imag();
      return;
    }
    const double h = 1.0 / std::numbers::sqrt2;
    // coordinates (x_a, x_b) hold sqrt2 (Re, Im) of C_{min,max}
    const std::size_t b = a + 1;
    const double sign = r < s ? 1.0 : -1.0;  // C_sr = conj(C_rs)
    re_[a] += h * w.real();
    re_[b] -= sign * h * w.imag();
    im_[a] += h * w.imag();
    im_[b] += sign * h * w.real();
  }

  std::vector<double>& re() { return re_; }
  std::vector<double>& im() { return im_; }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

 private:
  const std::vector<std::vector<std::size_t>>& where_;
  std::vector<double> re_, im_;
};

// Rotated Choi index pair -> first coordinate index (Real part for r != s).
std::vector<std::vector<std::size_t>> coordinate_table(const SdpProblem& p, std::size_t n) {
  std::vector<std::vector<std::size_t>> where(n, std::vector<std::size_t>(n, RowBuilder::kNone));
  for (std::size_t c = 0; c < p.coords.size(); ++c) {
    const auto& q = p.coords[c];
    if (q.kind == ChoiCoordinate::Imag) continue;
    where[q.r][q.s] = c;
    where[q.s][q.r] = c;
  }
  return where;
}

// Modified Gram-Schmidt (two passes) over rows, carrying the right-hand side.
void orthonormalize(SdpProblem& p, std::vector<std::vector<double>>& rows, std::vector<double>& rhs) {
  const std::size_t n = p.dim();
  std::vector<std::vector<double>> kept;
  std::vector<double> kept_rhs;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto v = rows[r];
    double b = rhs[r];
    const double n0 = norm(v);
    if (n0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t q = 0; q < kept.size(); ++q) {
        const double c = dot(kept[q], v);
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * kept[q][i];
        b -= c * kept_rhs[q];
      }
    const double nv = norm(v);
    if (nv <= kRowDropTolerance * n0) continue;
    for (auto& x : v) x /= nv;
    kept.push_back(std::move(v));
    kept_rhs.push_back(b / nv);
  }
  p.row_basis.assign(kept.size() * n, 0.0);
  for (std::size_t q = 0; q < kept.size(); ++q) std::copy(kept[q].begin(), kept[q].end(), p.row_basis.begin() + q * n);
  p.row_rhs = std::move(kept_rhs);
}

CMatrix block_matrix(const SdpProblem& p, std::size_t b, std::span<const double> x) {
  const std::size_t m = p.blocks[b].size();
  CMatrix h(m, m);
  std::size_t c = p.block_offset[b];
  for (std::size_t t = 0; t < m; ++t) h(t, t) = x[c++];
  const double h2 = 1.0 / std::numbers::sqrt2;
  for (std::size_t t = 0; t < m; ++t)
    for (std::size_t u = t + 1; u < m; ++u) {
      const Complex v(x[c] * h2, x[c + 1] * h2);
      h(t, u) = v;
      h(u, t) = std::conj(v);
      c += 2;
    }
  return h;
}

void store_block(const SdpProblem& p, std::size_t b, const CMatrix& h, std::span<double> x) {
  const std::size_t m = p.blocks[b].size();
  std::size_t c = p.block_offset[b];
  for (std::size_t t = 0; t < m; ++t) x[c++] = h(t, t).real();
  const double s2 = std::numbers::sqrt2;
  for (std::size_t t = 0; t < m; ++t)
    for (std::size_t u = t + 1; u < m; ++u) {
      const Complex v = 0.5 * (h(t, u) + std::conj(h(u, t)));
      x[c] = s2 * v.real();
      x[c + 1] = s2 * v.imag();
      c += 2;
    }
}

CMatrix rotation(const SdpProblem& p) { return kron(p.source_frame.conj(), p.target_frame); }

void require_faithful(const State& s, const char* who) {
  if (!s.faithful()) throw InputError(std::string(who) + ": state is not faithful");
}

}  // namespace

std::string to_string(Mode m) { return m == Mode::Modular ? "modular" : "all"; }

Mode parse_mode(const std::string& s) {
  if (s == "modular") return Mode::Modular;
  if (s == "all") return Mode::All;
  throw InputError("unknown mode '" + s + "' (expected modular or all)");
}

CMatrix SdpProblem::choi(std::span<const double> x) const {
  const std::size_t nb = target.dim();
  const std::size_t n = source.dim() * nb;
  CMatrix rotated(n, n);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const CMatrix h = block_matrix(*this, b, x);
    for (std::size_t t = 0; t < blocks[b].size(); ++t)
      for (std::size_t u = 0; u < blocks[b].size(); ++u) rotated(blocks[b][t], blocks[b][u]) = h(t, u);
  }
  const CMatrix w = rotation(*this);
  return w * rotated * w.adjoint();
}

std::vector<double> SdpProblem::coordinates(const CMatrix& c, double* dropped) const {
  const CMatrix w = rotation(*this);
  const CMatrix rotated = w.adjoint() * c * w;
  std::vector<double> x(dim(), 0.0);
  std::vector<std::size_t> block_of(rotated.rows(), blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t m = blocks[b].size();
    CMatrix h(m, m);
    for (std::size_t t = 0; t < m; ++t) {
      block_of[blocks[b][t]] = b;
      for (std::size_t u = 0; u < m; ++u) h(t, u) = rotated(blocks[b][t], blocks[b][u]);
    }
    store_block(*this, b, h, x);
  }
  if (dropped) {
    // Summed directly; subtracting the kept mass from the total cancels badly.
    double outside = 0.0;
    for (std::size_t r = 0; r < rotated.rows(); ++r)
      for (std::size_t col = 0; col < rotated.cols(); ++col)
        if (block_of[r] == blocks.size() || block_of[r] != block_of[col]) outside += std::norm(rotated(r, col));
    *dropped = std::sqrt(outside);
  }
  return x;
}

void SdpProblem::project_affine(std::vector<double>& x) const {
  const std::size_t n = dim();
  for (std::size_t q = 0; q < rank(); ++q) {
    std::span<const double> row(row_basis.data() + q * n, n);
    const double c = dot(row, x) - row_rhs[q];
    for (std::size_t i = 0; i < n; ++i) x[i] -= c * row[i];
  }
}

void SdpProblem::project_cone(std::vector<double>& x) const {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t m = blocks[b].size();
    if (m == 1) {
      x[block_offset[b]] = std::max(0.0, x[block_offset[b]]);
      continue;
    }
    const CMatrix h = block_matrix(*this, b, x);
    const auto eig = herm_eig(h);
    if (eig.values.front() >= 0.0) continue;
    std::vector<Complex> clipped(m);
    for (std::size_t t = 0; t < m; ++t) clipped[t] = std::max(0.0, eig.values[t]);
    store_block(*this, b, spectral_apply(eig, clipped), x);
  }
}

double SdpProblem::affine_residual(std::span<const double> x) const {
  const std::size_t n = dim();
  double s = 0.0;
  for (std::size_t q = 0; q < rank(); ++q) {
    const double c = dot(std::span<const double>(row_basis.data() + q * n, n), x) - row_rhs[q];
    s += c * c;
  }
  return std::sqrt(s);
}

double SdpProblem::cone_slack(std::span<const double> x) const {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < blocks.size(); ++b)
    worst = std::min(worst, herm_eig(block_matrix(*this, b, x)).values.front());
  return worst;
}

double SdpProblem::objective(std::span<const double> x) const { return constant + dot(cost, x); }

double SdpProblem::anchor_weight(std::span<const double> x) const {
  // The anchor is diagonal and positive on every block; need x + s anchor >= 0.
  double s = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t m = blocks[b].size();
    CMatrix h = block_matrix(*this, b, x);
    for (std::size_t t = 0; t < m; ++t) {
      const double d = 1.0 / std::sqrt(anchor[block_offset[b] + t]);
      for (std::size_t u = 0; u < m; ++u) {
        h(t, u) *= d;
        h(u, t) *= d;
      }
    }
    s = std::max(s, -herm_eig(h).values.front());
  }
  return s / (1.0 + s);
}

double SdpProblem::feasibility_residual(const CMatrix& c) const {
  double dropped = 0.0;
  const auto x = coordinates(c, &dropped);
  return dropped + affine_residual(x) + std::max(0.0, -cone_slack(x));
}

SdpProblem assemble(const State& mu, const State& nu, const GeneratorSet& source_k, const GeneratorSet& target_k,
                    Mode mode) {
  require_faithful(mu, "assemble");
  require_faithful(nu, "assemble");
  if (source_k.size() != target_k.size()) throw InputError("assemble: generator lists differ in length");

  SdpProblem p;
  p.mode = mode;
  p.source = mu.algebra();
  p.target = nu.algebra();
  p.source_frame = mu.eig().vectors;
  p.target_frame = nu.eig().vectors;
  p.source_spectrum = mu.eig().values;
  p.target_spectrum = nu.eig().values;
  const std::size_t na = p.source.dim();
  const std::size_t nb = p.target.dim();
  const std::size_t n = na * nb;

  // Sector label of each rotated index (i, k): log p_i - log q_k.
  std::vector<std::size_t> sector(n, 0);
  if (mode == Mode::Modular) {
    std::vector<double> logs(n);
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t k = 0; k < nb; ++k)
        logs[i * nb + k] = std::log(p.source_spectrum[i]) - std::log(p.target_spectrum[k]);
    sector = cluster_values(logs, kSectorTolerance);
  }
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> block_id;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t k = 0; k < nb; ++k) {
      const auto key = std::tuple{p.source.block_of(i), p.target.block_of(k), sector[i * nb + k]};
      auto [it, inserted] = block_id.try_emplace(key, p.blocks.size());
      if (inserted) p.blocks.emplace_back();
      p.blocks[it->second].push_back(i * nb + k);
    }
  for (const auto& blk : p.blocks) {
    p.block_offset.push_back(p.coords.size());
    for (std::size_t t = 0; t < blk.size(); ++t) p.coords.push_back({ChoiCoordinate::Diagonal, blk[t], blk[t]});
    for (std::size_t t = 0; t < blk.size(); ++t)
      for (std::size_t u = t + 1; u < blk.size(); ++u) {
        p.coords.push_back({ChoiCoordinate::Real, blk[t], blk[u]});
        p.coords.push_back({ChoiCoordinate::Imag, blk[t], blk[u]});
      }
  }

  const auto obj = objective_matrix(mu, nu, source_k, target_k);
  p.constant = obj.constant;
  {
    // cost . x = -Tr(C M) = -Tr(C~ M~) with M~ in the rotated frame
    const CMatrix w = rotation(p);
    const CMatrix m_rot = w.adjoint() * obj.m * w;
    p.cost.assign(p.dim(), 0.0);
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
      const std::size_t m = p.blocks[b].size();
      CMatrix h(m, m);
      for (std::size_t t = 0; t < m; ++t)
        for (std::size_t u = 0; u < m; ++u) h(t, u) = m_rot(p.blocks[b][t], p.blocks[b][u]);
      store_block(p, b, h, p.cost);
    }
    for (auto& c : p.cost) c = -c;
  }

  const auto where = coordinate_table(p, n);
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  auto push = [&](RowBuilder& rb, Complex target, bool with_imag) {
    rows.push_back(std::move(rb.re()));
    rhs.push_back(target.real());
    if (with_imag) {
      rows.push_back(std::move(rb.im()));
      rhs.push_back(target.imag());
    }
  };
  // Unitality: sum_i C~_{(i,k),(i,l)} = delta_kl.
  for (std::size_t k = 0; k < nb; ++k)
    for (std::size_t l = k; l < nb; ++l) {
      if (!p.target.same_block(k, l)) continue;
      RowBuilder rb(p.dim(), where);
      for (std::size_t i = 0; i < na; ++i) rb.add(i * nb + k, i * nb + l, 1.0);
      push(rb, k == l ? 1.0 : 0.0, k != l);
    }
  // Marginal: sum_k q_k C~_{(i,k),(j,k)} = p_i delta_ij.
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = i; j < na; ++j) {
      if (!p.source.same_block(i, j)) continue;
      RowBuilder rb(p.dim(), where);
      for (std::size_t k = 0; k < nb; ++k) rb.add(i * nb + k, j * nb + k, p.target_spectrum[k]);
      push(rb, i == j ? p.source_spectrum[i] : 0.0, i != j);
    }
  p.row_count = rows.size();
  orthonormalize(p, rows, rhs);

  // Collapse channel a -> mu(a) 1: C~ = diag(p) (x) 1.
  p.anchor.assign(p.dim(), 0.0);
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    for (std::size_t t = 0; t < p.blocks[b].size(); ++t)
      p.anchor[p.block_offset[b] + t] = p.source_spectrum[p.blocks[b][t] / nb];
  return p;
}


namespace {

struct Certificate {
  std::vector<double> x;  // feasible point
  double repair = 0.0;
  double primal = 0.0;  // scaled objective at x
  double lower = 0.0;   // scaled lower bound
};

// Feasible primal point from the cone iterate and a valid lower bound from the
// scaled dual iterate. The primal is the affine projection of z, mixed toward
// the anchor until it is PSD. The dual takes the slack Z = Pi_K(-rho u) and
// multipliers w = Q (c - Z); any feasible C~ has trace N_B, so
// b.w + N_B min(0, lambda_min(c - Q^T w)) bounds the scaled objective below.
Certificate certify(const SdpProblem& p, std::span<const double> c, std::span<const double> z,
                    std::span<const double> u, double rho) {
  const std::size_t n = p.dim();
  Certificate out;
  out.x.assign(z.begin(), z.end());
  p.project_affine(out.x);
  out.repair = p.anchor_weight(out.x);
  for (std::size_t i = 0; i < n; ++i) out.x[i] = (1.0 - out.repair) * out.x[i] + out.repair * p.anchor[i];
  out.primal = dot(c, out.x);

  std::vector<double> slack(n);
  for (std::size_t i = 0; i < n; ++i) slack[i] = -rho * u[i];
  p.project_cone(slack);
  std::vector<double> dual_slack(c.begin(), c.end());
  for (std::size_t q = 0; q < p.rank(); ++q) {
    std::span<const double> row(p.row_basis.data() + q * n, n);
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) w += row[i] * (c[i] - slack[i]);
    out.lower += w * p.row_rhs[q];
    for (std::size_t i = 0; i < n; ++i) dual_slack[i] -= w * row[i];
  }
  out.lower += static_cast<double>(p.target.dim()) * std::min(0.0, p.cone_slack(dual_slack));
  return out;
}

// Isometric real coordinates of an m x m Hermitian matrix, in the same
// layout as the blocks of SdpProblem.
CMatrix unpack_hermitian(std::span<const double> y, std::size_t m) {
  CMatrix h(m, m);
  std::size_t c = 0;
  for (std::size_t t = 0; t < m; ++t) h(t, t) = y[c++];
  const double h2 = 1.0 / std::numbers::sqrt2;
  for (std::size_t t = 0; t < m; ++t)
    for (std::size_t u = t + 1; u < m; ++u) {
      h(t, u) = Complex(y[c] * h2, y[c + 1] * h2);
      h(u, t) = std::conj(h(t, u));
      c += 2;
    }
  return h;
}

void pack_hermitian(const CMatrix& h, std::span<double> y) {
  const std::size_t m = h.rows();
  std::size_t c = 0;
  for (std::size_t t = 0; t < m; ++t) y[c++] = h(t, t).real();
  const double s2 = std::numbers::sqrt2;
  for (std::size_t t = 0; t < m; ++t)
    for (std::size_t u = t + 1; u < m; ++u) {
      const Complex v = 0.5 * (h(t, u) + std::conj(h(u, t)));
      y[c] = s2 * v.real();
      y[c + 1] = s2 * v.imag();
      c += 2;
    }
}

// Face of the cone spanned by the dominant eigenvectors of a PSD iterate:
// every block is V Y V^dagger with V fixed and Y Hermitian. The maps between
// block coordinates and face coordinates are adjoint isometries.
struct Face {
  std::vector<CMatrix> range;  // per block, m x r
  std::vector<std::size_t> offset;
  std::size_t dim = 0;

  /// Eigenvectors above rel_tol times the largest eigenvalue (at least 1).
  Face(const SdpProblem& p, std::span<const double> z, double rel_tol) {
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
      const auto eig = herm_eig(block_matrix(p, b, z));
      const double cut = rel_tol * std::max(1.0, eig.values.back());
      std::size_t r = 0;
      for (double v : eig.values) r += v > cut;
      add(eig, r);
    }
  }

  /// The top ranks[b] eigenvectors of each block.
  Face(const SdpProblem& p, std::span<const double> z, const std::vector<std::size_t>& ranks) {
    for (std::size_t b = 0; b < p.blocks.size(); ++b) add(herm_eig(block_matrix(p, b, z)), ranks[b]);
  }

  std::vector<std::size_t> ranks() const {
    std::vector<std::size_t> r;
    for (const auto& v : range) r.push_back(v.cols());
    return r;
  }

  void add(const HermEig& eig, std::size_t r) {
    const std::size_t m = eig.values.size();
    CMatrix v(m, r);
    for (std::size_t c = 0; c < r; ++c)
      for (std::size_t i = 0; i < m; ++i) v(i, c) = eig.vectors(i, m - r + c);
    offset.push_back(dim);
    dim += r * r;
    range.push_back(std::move(v));
  }

  std::vector<double> compress(const SdpProblem& p, std::span<const double> x) const {
    std::vector<double> y(dim, 0.0);
    for (std::size_t b = 0; b < range.size(); ++b) {
      if (range[b].cols() == 0) continue;
      const CMatrix h = range[b].adjoint() * block_matrix(p, b, x) * range[b];
      pack_hermitian(h, std::span<double>(y).subspan(offset[b], h.rows() * h.rows()));
    }
    return y;
  }

  std::vector<double> expand(const SdpProblem& p, std::span<const double> y) const {
    std::vector<double> x(p.dim(), 0.0);
    for (std::size_t b = 0; b < range.size(); ++b) {
      const std::size_t r = range[b].cols();
      if (r == 0) continue;
      const CMatrix h = range[b] * unpack_hermitian(y.subspan(offset[b], r * r), r) * range[b].adjoint();
      store_block(p, b, h, x);
    }
    return x;
  }
};

// Solves the problem restricted to the face of z exactly: the point of
// face-and-affine-set closest to z, and the multipliers closest to the ADMM
// estimate that make the dual slack orthogonal to the face. Returns nothing
// if the face guess is inconsistent.
std::optional<Certificate> polish(const SdpProblem& p, std::span<const double> c, std::span<const double> z,
                                  std::span<const double> u, double rho) {
  const std::size_t n = p.dim();
  const std::size_t m = p.rank();
  Face face(p, z, 1e-7);
  if (face.dim == 0) return std::nullopt;

  std::vector<std::vector<double>> a(m);  // rows of Q restricted to the face
  HermEig eig;
  double cut = 0.0;
  auto restrict_rows = [&] {
    for (std::size_t q = 0; q < m; ++q)
      a[q] = face.compress(p, std::span<const double>(p.row_basis.data() + q * n, n));
    CMatrix gram(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) gram(i, j) = gram(j, i) = dot(a[i], a[j]);
    eig = herm_eig(gram);
    cut = 1e-12 * std::max(eig.values.back(), 1e-300);
  };
  auto solve_gram = [&](const std::vector<double>& rhs) {
    std::vector<double> coef(m, 0.0), out(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      if (eig.values[j] <= cut) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += eig.vectors(i, j).real() * rhs[i];
      coef[j] = s / eig.values[j];
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out[i] += eig.vectors(i, j).real() * coef[j];
    return out;
  };
  // Closest point of face-and-affine-set to x, in face coordinates.
  auto face_point = [&](std::span<const double> x) {
    std::vector<double> y = face.compress(p, x);
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<double> res(m);
      for (std::size_t q = 0; q < m; ++q) res[q] = dot(a[q], y) - p.row_rhs[q];
      const auto w = solve_gram(res);
      for (std::size_t q = 0; q < m; ++q)
        for (std::size_t i = 0; i < face.dim; ++i) y[i] -= w[q] * a[q][i];
    }
    return face.expand(p, y);
  };

  // A low-rank face read off an inexact iterate is slightly tilted and may
  // miss the affine set; alternate between the two to straighten it.
  constexpr int kRefinements = 30;
  constexpr double kAffineTolerance = 1e-10;
  restrict_rows();
  Certificate out;
  out.x = face_point(z);
  for (int r = 0; r < kRefinements && p.affine_residual(out.x) > 1e-2 * kAffineTolerance; ++r) {
    std::vector<double> x = out.x;
    p.project_affine(x);
    face = Face(p, x, face.ranks());
    restrict_rows();
    out.x = face_point(x);
  }
  if (p.affine_residual(out.x) > kAffineTolerance || p.cone_slack(out.x) < -1e-12) return std::nullopt;
  out.primal = dot(c, out.x);

  // w = w0 + pinv(A^T) (A^T-residual), pinv(A^T) = G^+ A
  std::vector<double> slack0(u.begin(), u.end());
  for (auto& v : slack0) v *= -rho;
  p.project_cone(slack0);
  std::vector<double> w(m);
  for (std::size_t q = 0; q < m; ++q) {
    std::span<const double> row(p.row_basis.data() + q * n, n);
    for (std::size_t i = 0; i < n; ++i) w[q] += row[i] * (c[i] - slack0[i]);
  }
  auto cf = face.compress(p, c);
  for (std::size_t q = 0; q < m; ++q)
    for (std::size_t i = 0; i < face.dim; ++i) cf[i] -= w[q] * a[q][i];
  std::vector<double> ac(m);
  for (std::size_t q = 0; q < m; ++q) ac[q] = dot(a[q], cf);
  const auto dw = solve_gram(ac);
  for (std::size_t q = 0; q < m; ++q) w[q] += dw[q];
  std::vector<double> slack(c.begin(), c.end());
  for (std::size_t q = 0; q < m; ++q) {
    out.lower += w[q] * p.row_rhs[q];
    for (std::size_t i = 0; i < n; ++i) slack[i] -= w[q] * p.row_basis[q * n + i];
  }
  out.lower += static_cast<double>(p.target.dim()) * std::min(0.0, p.cone_slack(slack));
  return out;
}

// Keeps the lower bound of `cert` and takes the primal of `other` if better.
void adopt_primal(Certificate& cert, const Certificate& other) {
  if (other.primal >= cert.primal) return;
  cert.x = other.x;
  cert.primal = other.primal;
  cert.repair = other.repair;
}

}  // namespace

AdmmResult admm_solve(const SdpProblem& p, const SolverOptions& opts) {
  const std::size_t n = p.dim();
  // Only the component of the cost along the affine set matters; dropping
  // the normal part changes the objective on the feasible set by a constant
  // and keeps the splitting well conditioned.
  std::vector<double> c = p.cost;
  for (std::size_t q = 0; q < p.rank(); ++q) {
    std::span<const double> row(p.row_basis.data() + q * n, n);
    const double w = dot(row, c);
    for (std::size_t i = 0; i < n; ++i) c[i] -= w * row[i];
  }
  const double cost_scale = std::max(norm(c), 1e-12 * std::max(1.0, norm(p.cost)));
  for (auto& v : c) v /= cost_scale;

  double rho = opts.rho;
  const double alpha = opts.relaxation;
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  constexpr int kCertifyEvery = 10;
  constexpr int kPolishEvery = 50;
  auto gap_ok = [&](const Certificate& cf) {
    return cf.primal - cf.lower <= opts.eps_rel * (1.0 + std::abs(cf.primal));
  };

  std::vector<double> x(n), xh(n), z = p.anchor, z_prev(n), u(n, 0.0);
  AdmmResult res;
  std::optional<Certificate> cert;
  int it = 0;
  int last_certified = -kCertifyEvery;
  double s_norm = 0.0;
  for (; it < opts.max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) x[i] = z[i] - u[i] - c[i] / rho;
    p.project_affine(x);
    for (std::size_t i = 0; i < n; ++i) xh[i] = alpha * x[i] + (1.0 - alpha) * z[i];
    z_prev = z;
    for (std::size_t i = 0; i < n; ++i) z[i] = xh[i] + u[i];
    p.project_cone(z);
    for (std::size_t i = 0; i < n; ++i) u[i] += xh[i] - z[i];

    const double r_norm = distance(x, z);
    s_norm = rho * distance(z, z_prev);
    const double eps_pri = opts.eps_abs * sqrt_n + opts.eps_rel * std::max(norm(x), norm(z));
    const double eps_dual = opts.eps_abs * sqrt_n + opts.eps_rel * rho * norm(u);
    const bool small = r_norm <= eps_pri && s_norm <= eps_dual;
    if ((small && it - last_certified >= kCertifyEvery) || (it + 1) % kPolishEvery == 0) {
      // Residuals alone can stall on a flat face; demand a certified gap,
      // from the exact face solution if that succeeds.
      last_certified = it;
      const auto polished = polish(p, c, z, u, rho);
      cert = polished;
      if (!cert || !gap_ok(*cert)) cert = small ? std::optional(certify(p, c, z, u, rho)) : std::nullopt;
      // The face point can be the better primal even when its own dual
      // bound is loose (rank-deficient optima such as the identity).
      if (cert && polished) adopt_primal(*cert, *polished);
      if (cert && gap_ok(*cert)) {
        res.converged = true;
        ++it;
        break;
      }
      cert.reset();
    }
    if (opts.adaptive_rho && opts.adapt_every > 0 && (it + 1) % opts.adapt_every == 0) {
      // Balance the relative residuals; rescale the scaled dual accordingly.
      const double rel_pri = r_norm / std::max(std::max(norm(x), norm(z)), 1e-300);
      const double rel_dual = s_norm / std::max(rho * norm(u), 1e-300);
      const double factor = std::clamp(std::sqrt(rel_pri / std::max(rel_dual, 1e-300)), 1e-3, 1e3);
      if ((factor > 5.0 || factor < 0.2) && rho * factor >= 1e-6 && rho * factor <= 1e6) {
        rho *= factor;
        for (auto& v : u) v /= factor;
      }
    }
  }
  if (!cert) {
    cert = certify(p, c, z, u, rho);
    if (const auto polished = polish(p, c, z, u, rho)) adopt_primal(*cert, *polished);
  }
  res.iterations = it;
  res.dual_residual = s_norm;
  res.repair = cert->repair;
  res.x = std::move(cert->x);
  res.primal_residual = p.affine_residual(res.x);
  res.objective = p.objective(res.x);
  res.gap = std::max(0.0, (cert->primal - cert->lower) * cost_scale);
  return res;
}

W2Result solve_transport(const State& mu, const State& nu, const GeneratorSet& source_k,
                         const GeneratorSet& target_k, Mode mode, const SolverOptions& opts) {
  const SdpProblem p = assemble(mu, nu, source_k, target_k, mode);
  const AdmmResult a = admm_solve(p, opts);

  W2Result r;
  r.mode = mode;
  r.iterations = a.iterations;
  r.converged = a.converged;
  r.primal_residual = a.primal_residual;
  r.dual_residual = a.dual_residual;
  r.gap = a.gap;
  r.affine_rows = p.row_count;
  r.variables = p.dim();
  r.optimal_channel = Channel::from_choi(p.source, p.target, p.choi(a.x));
  r.unitality_residual = r.optimal_channel.unitality_residual();
  r.marginal_residual = r.optimal_channel.marginal_residual(mu, nu);
  r.cp_slack = r.optimal_channel.cp_slack();
  r.covariance_residual = covariance_residual(r.optimal_channel, mu, nu);
  if (a.repair > 0.0) r.warnings.push_back("iterate mixed with the collapse channel, weight " + std::to_string(a.repair));
  if (!a.converged) r.warnings.push_back("iteration cap reached before convergence");

  r.cost_report = cost_channel(r.optimal_channel, mu, nu, source_k, target_k);
  double value = r.cost_report.total;
  if (value < 0.0) {
    if (value < -kClipTolerance)
      throw NumericalError("negative transport cost " + std::to_string(value) + "; the problem is mis-assembled");
    r.warnings.push_back("clipped negative cost " + std::to_string(value) + " to 0");
    value = 0.0;
  }
  r.cost = value;
  r.w2 = std::sqrt(value);
  return r;
}

W2Result solve_w2(const State& mu, const State& nu, const GeneratorSet& k, Mode mode, const SolverOptions& opts) {
  require_faithful(mu, "solve_w2");
  require_faithful(nu, "solve_w2");
  if (!k.adjoint_closed()) throw InputError("solve_w2: generators are not closed under adjoints");
  if (!(mu.algebra() == nu.algebra())) throw InputError("solve_w2: states live on different algebras");
  return solve_transport(mu, nu, k, k, mode, opts);
}

}  // namespace ncot
