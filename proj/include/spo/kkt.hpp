#pragma once

#include "spo/model.hpp"
#include "spo/ncp.hpp"

namespace spo::kkt {

using ncp::NcpKind;

// Full:          T(x, y, lambda, mu, gamma), size 3n + m + p
// Reduced:       T_red(x, lambda, mu, gamma), y eliminated, size 2n + m + p
// Complementary: T_C, x >= 0 encoded through phi(x_i, y_i), size 3n + m + p
enum class OperatorKind { Full, Reduced, Complementary };

const char *to_string(OperatorKind kind);

// Block offsets into the stacked residual. stat_y is -1 for the reduced
// operator, which has no y rows.
struct BlockLayout {
  Index stat_x = 0;
  Index stat_y = -1;
  Index ineq = 0;
  Index eq = 0;
  Index compl_block = 0;
  Index size = 0;
};

BlockLayout block_layout(const SpoProblem &problem, OperatorKind kind);

struct KktResidual {
  Vector vector;
  BlockLayout layout;

  double norm() const { return vector.norm(); }
};

// Multipliers determined by (x, lambda, mu) alone at any KKT point of the
// quadratic reformulation; sigma_star extends it to the linear one.
struct MultiplierSet {
  Vector y_star;
  Vector gamma_star;
  Vector sigma_star;
};

// Stacked residual of the chosen operator. The reduced kind ignores
// point.y. Complementary requires problem.nonneg (split the variables
// first otherwise).
KktResidual residual(const SpoProblem &problem, const PrimalDualPoint &point,
                     OperatorKind kind,
                     NcpKind ncp_kind = NcpKind::FischerBurmeister);

// One B-subdifferential element of the operator, assembled from the
// paper-exact block layouts with NCP rows chosen by the deterministic
// selection rules in spo::ncp. Column order matches the unknown order
// (x, y, lambda, mu, gamma) resp. (x, lambda, mu, gamma).
Matrix jacobian(const SpoProblem &problem, const PrimalDualPoint &point,
                OperatorKind kind,
                NcpKind ncp_kind = NcpKind::FischerBurmeister);

// y*, gamma*, sigma* as functions of (x, lambda, mu): on the numerical
// zero set I_0(x; delta) they are (1, -grad_i L^SP, rho), elsewhere
// (0, rho/x_i, 0).
MultiplierSet recover_multipliers(const SpoProblem &problem, const Vector &x,
                                  const Vector &lambda, const Vector &mu,
                                  double delta);

// Termination quantity: || (grad L^SP on the support; Phi_g; h) ||_2,
// extended by max{0, -x} on the support when the problem is nonnegative.
double s_stationarity_residual(const SpoProblem &problem, const Vector &x,
                               const Vector &lambda, const Vector &mu,
                               double delta,
                               NcpKind ncp_kind = NcpKind::FischerBurmeister);

// Lifted reformulation in (x+, x-) >= 0 of a free-variable problem.
struct SplitProblem {
  SpoProblem lifted; // dimension 2n, nonneg = true

  // x = x+ - x-.
  static Vector recover(const Vector &split_x);
  // (max(x,0), max(-x,0)) stacked.
  static Vector embed(const Vector &x);
};

SplitProblem split_variables(const SpoProblem &problem);

// Residual of the linear reformulation's KKT system, with both
// complementarity groups rendered through the NCP function:
// rows (lambda, g) as phi(-g_j, lambda_j) and rows (sigma, y) as
// phi(1 - y_i, sigma_i). Requires point.sigma.
Vector residual_spolin(const SpoProblem &problem, const PrimalDualPoint &point,
                       NcpKind ncp_kind = NcpKind::FischerBurmeister);

} // namespace spo::kkt
