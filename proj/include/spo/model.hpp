#pragma once

#include "spo/types.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <variant>

namespace spo {

// Smooth-part evaluation: value, gradient and Hessian at a point.
struct ObjectiveValue {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

// Vector-valued constraint evaluation: values, Jacobian (one row per
// constraint) and one Hessian per constraint.
struct ConstraintValue {
  Vector values;
  Matrix jacobian;
  std::vector<Matrix> hessians;
};

using ObjectiveOracle = std::function<ObjectiveValue(const Vector &)>;
using ConstraintOracle = std::function<ConstraintValue(const Vector &)>;

// How the l1 term of the surrogate enters the QP: not at all (it is
// constant on the feasible set), as the linear term rho e^T x (valid under
// x >= 0), or through the (x+, x-) >= 0 split for free variables.
enum class L1Mode { Skip, AddLinear, Split };

// Structural description the l1 pre-processing stage can act on. Problems
// without one require a caller-supplied initial point.
struct QpPresolveForm {
  Matrix q;    // quadratic term of the smooth objective
  Vector c;    // linear term
  Matrix a_eq; // equality rows a_eq x = b_eq
  Vector b_eq;
  Matrix a_in; // inequality rows a_in x <= b_in
  Vector b_in;
  bool nonneg = false; // bound x >= 0 in the surrogate QP
  L1Mode l1_mode = L1Mode::Skip;
};

struct CompositePresolveForm {
  std::optional<double> lipschitz_hint;
};

using PresolveForm = std::variant<QpPresolveForm, CompositePresolveForm>;

// Oracle bundle for  min f(x) + rho*||x||_0  s.t.  g(x) <= 0, h(x) = 0.
// `nonneg` marks the structural constraint x >= 0, which is kept out of g:
// the complementary operator encodes it through an NCP function and the
// termination test appends a violation block for it.
class SpoProblem {
public:
  Index n = 0;
  Index m = 0;
  Index p = 0;
  double rho = 1.0;
  bool nonneg = false;

  ObjectiveOracle f_oracle;
  ConstraintOracle g_oracle; // unset allowed when m == 0
  ConstraintOracle h_oracle; // unset allowed when p == 0

  std::optional<PresolveForm> presolve_form;

  // Evaluation wrappers: throw std::invalid_argument on dimension
  // mismatches and symmetrize every Hessian as (H + H^T)/2 to guard
  // user-supplied oracles.
  ObjectiveValue eval_f(const Vector &x) const;
  ConstraintValue eval_g(const Vector &x) const;
  ConstraintValue eval_h(const Vector &x) const;
};

// z = (x, y, lambda, mu, gamma), optionally extended by the bound
// multipliers sigma used by the linear-reformulation residual check.
struct PrimalDualPoint {
  Vector x;
  Vector y;
  Vector lambda;
  Vector mu;
  Vector gamma;
  std::optional<Vector> sigma;
};

// Numerical index sets at a primal-dual point. All lists are ascending.
struct IndexSets {
  IndexList i0;        // |x_i| < delta
  IndexList ig;        // |g_j(x)| <= active_tol
  IndexList i_xy;      // |x_i| < delta and |y_i| < delta
  IndexList i_glambda; // |g_j(x)| <= active_tol and |lambda_j| <= active_tol
};

enum class SolveStatus { Converged, MaxIterations, StepBlowup, LinearSolveFailure };

const char *to_string(SolveStatus status);

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  // S-stationarity residual per iterate; entry 0 belongs to the initial
  // point, so the length is always iterations + 1.
  std::vector<double> residual_history;
  // ||T(z_k)||_2 along the same iterates, for convergence-rate studies.
  std::vector<double> op_residual_history;
  PrimalDualPoint final_point;
  double objective = 0.0; // F_rho at the support threshold delta
  Index l0_count = 0;
};

// Number of components with |x_i| >= delta; delta = 0 counts exact
// nonzeros.
Index l0_norm(const Vector &x, double delta);

// Ascending support {i : |x_i| >= delta} (exact nonzeros for delta = 0).
IndexList support_set(const Vector &x, double delta);

// F_rho(x) = f(x) + rho * ||x||_0(delta).
double eval_spo_objective(const SpoProblem &problem, const Vector &x,
                          double delta);

struct LagrangianValue {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

// L^SP = f + lambda^T g + mu^T h with gradient and Hessian in x. The
// sparsity term is deliberately not part of this Lagrangian.
LagrangianValue lagrangian_sp(const SpoProblem &problem, const Vector &x,
                              const Vector &lambda, const Vector &mu);

IndexSets index_sets(const SpoProblem &problem, const PrimalDualPoint &point,
                     double delta, double active_tol);

} // namespace spo
