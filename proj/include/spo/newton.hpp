#pragma once

#include "spo/kkt.hpp"

#include <optional>

namespace spo::newton {

using kkt::OperatorKind;
using ncp::NcpKind;

struct NewtonOptions {
  int max_iter = 100;
  double eps = 1e-6;   // S-stationarity tolerance
  double delta = 1e-4; // support threshold
  // l2 bound on the primal block d_x of the Newton step. The auxiliary and
  // multiplier blocks are exempt: gamma_i legitimately travels towards
  // rho / x_i, which is of order rho/delta on barely-nonzero components.
  double step_safety = 100.0;
  // separate bound for the cold first step, which legitimately clears every
  // spurious presolve component at once; nullopt means step_safety
  std::optional<double> first_step_safety;
  NcpKind ncp = NcpKind::FischerBurmeister;
  OperatorKind kind = OperatorKind::Full;
};

// (x0, e, 0, 0, 0): y starts at the all-one vector, multipliers at zero.
PrimalDualPoint default_init(const SpoProblem &problem, const Vector &x0);

// Dense LU with partial pivoting; nullopt signals a pivot below
// 1e-12 * max|entry|.
std::optional<Vector> linear_solve(const Matrix &matrix, const Vector &rhs);

// Nonsmooth Lagrange-Newton iteration z+ = z - H^{-1} T(z) with one
// B-subdifferential element per step and the S-stationarity check as the
// termination criterion. No globalization.
SolveReport solve_from(const SpoProblem &problem, const PrimalDualPoint &start,
                       const NewtonOptions &options);

SolveReport solve(const SpoProblem &problem, const Vector &x0,
                  const NewtonOptions &options);

} // namespace spo::newton
