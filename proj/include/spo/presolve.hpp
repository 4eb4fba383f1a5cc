#pragma once

#include "spo/model.hpp"

#include <functional>
#include <optional>

namespace spo::presolve {

// min 1/2 x^T Q x + c^T x  s.t.  a_eq x = b_eq, a_in x <= b_in,
// optionally x >= 0.
struct QpSpec {
  Matrix q;
  Vector c;
  Matrix a_eq;
  Vector b_eq;
  Matrix a_in;
  Vector b_in;
  bool nonneg = false;
};

using SmoothOracle = std::function<std::pair<double, Vector>(const Vector &)>;

// Composite problem  min smooth(x) + l1_weight * ||x||_1.
struct CompositeSpec {
  SmoothOracle smooth_oracle;
  std::optional<double> lipschitz_hint;
  double l1_weight = 0.0;
};

// Componentwise sign(v) * max(|v| - t, 0).
Vector soft_threshold(const Vector &v, double t);

struct FistaResult {
  Vector x;
  double objective = 0.0;
  double gradient_mapping_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Accelerated proximal gradient with backtracking line search and adaptive
// restart on objective increase; returns the best iterate seen.
FistaResult fista(const CompositeSpec &spec, const Vector &x_init,
                  int max_iter = 2000, double tol = 1e-8);

enum class QpStatus { Solved, MaxIterations, Infeasible };

struct QpResult {
  QpStatus status = QpStatus::MaxIterations;
  Vector x;
  Vector eq_multipliers;  // for a_eq x = b_eq
  Vector in_multipliers;  // for a_in x <= b_in, then x >= 0 (as -x <= 0)
  double kkt_residual = 0.0;
  int iterations = 0;
};

// Primal-dual path-following interior-point method with fixed centering
// sigma = 0.1 and fraction-to-boundary 0.995, run until the reconstructed
// KKT residual drops below tol. Multiplier convention:
//   Q x + c + a_eq^T mu + a_in^T lambda - lambda_bnd = 0,
// with lambda, lambda_bnd >= 0.
QpResult qp_solve(const QpSpec &spec, int max_iter = 200, double tol = 1e-8);

// Independent re-evaluation of the KKT residual of a candidate solution;
// used by tests and by qp_solve's own termination check.
double qp_kkt_residual(const QpSpec &spec, const Vector &x, const Vector &mu,
                       const Vector &lambda);

// l1-surrogate pre-processing: dispatches on problem.presolve_form.
// nullopt when the problem belongs to no recognized family and the caller
// must supply an initial point.
std::optional<Vector> presolve_l1(const SpoProblem &problem);

} // namespace spo::presolve
