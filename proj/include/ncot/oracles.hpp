#pragma once

// Independent reference solvers used to cross-check the SDP.

#include <vector>

#include "ncot/algebra.hpp"

namespace ncot {

struct LpResult {
  double value = 0.0;
  std::vector<double> coupling;  // rows x cols, row-major
  std::size_t rows = 0;
  std::size_t cols = 0;
  int pivots = 0;

  double at(std::size_t i, std::size_t j) const { return coupling[i * cols + j]; }
};

/// min sum c_ij pi_ij over couplings pi >= 0 with row sums p and column sums
/// q. Two-phase dense simplex with Bland's rule; cost is rows x cols row-major.
LpResult transportation_lp(const std::vector<double>& p, const std::vector<double>& q,
                           const std::vector<double>& cost);

/// Minimum of the transport cost over a grid of modular-covariant channels
/// between diagonal, non-degenerate qubit states. Such channels act as
/// e11 -> diag(s1, s2), e22 -> 1 - diag(s1, s2) and send e12 either to 0 or
/// to a multiple z of e12 or e21, depending on which spectral ratios match.
/// The grid runs over s1 on the marginal-feasible interval and, when an
/// off-diagonal survives, over the phase of z on the CP boundary.
struct GridResult {
  double value = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  Complex z = 0.0;
  bool off_diagonal = false;  // whether some off-diagonal transfer is allowed
};
GridResult qubit_grid_oracle(const State& mu, const State& nu, const GeneratorSet& k, std::size_t resolution);

}  // namespace ncot
