#include "spo/model.hpp"

#include <cmath>

namespace spo {

namespace {

void require(bool ok, const char *what) {
  if (!ok)
    throw std::invalid_argument(what);
}

Matrix symmetrized(const Matrix &h) { return 0.5 * (h + h.transpose()); }

ConstraintValue empty_constraints(Index n) {
  ConstraintValue out;
  out.values = Vector::Zero(0);
  out.jacobian = Matrix::Zero(0, n);
  return out;
}

} // namespace

const char *to_string(SolveStatus status) {
  switch (status) {
  case SolveStatus::Converged:
    return "converged";
  case SolveStatus::MaxIterations:
    return "max_iterations";
  case SolveStatus::StepBlowup:
    return "step_blowup";
  case SolveStatus::LinearSolveFailure:
    return "linear_solve_failure";
  }
  return "unknown";
}

ObjectiveValue SpoProblem::eval_f(const Vector &x) const {
  require(x.size() == n, "eval_f: x has wrong dimension");
  require(static_cast<bool>(f_oracle), "eval_f: missing objective oracle");
  ObjectiveValue out = f_oracle(x);
  require(out.gradient.size() == n, "eval_f: gradient has wrong dimension");
  require(out.hessian.rows() == n && out.hessian.cols() == n,
          "eval_f: Hessian has wrong dimensions");
  out.hessian = symmetrized(out.hessian);
  return out;
}

ConstraintValue SpoProblem::eval_g(const Vector &x) const {
  require(x.size() == n, "eval_g: x has wrong dimension");
  if (m == 0)
    return empty_constraints(n);
  require(static_cast<bool>(g_oracle), "eval_g: missing inequality oracle");
  ConstraintValue out = g_oracle(x);
  require(out.values.size() == m, "eval_g: values have wrong dimension");
  require(out.jacobian.rows() == m && out.jacobian.cols() == n,
          "eval_g: Jacobian has wrong dimensions");
  require(out.hessians.size() == static_cast<std::size_t>(m),
          "eval_g: wrong number of Hessians");
  for (auto &h : out.hessians) {
    require(h.rows() == n && h.cols() == n,
            "eval_g: constraint Hessian has wrong dimensions");
    h = symmetrized(h);
  }
  return out;
}

ConstraintValue SpoProblem::eval_h(const Vector &x) const {
  require(x.size() == n, "eval_h: x has wrong dimension");
  if (p == 0)
    return empty_constraints(n);
  require(static_cast<bool>(h_oracle), "eval_h: missing equality oracle");
  ConstraintValue out = h_oracle(x);
  require(out.values.size() == p, "eval_h: values have wrong dimension");
  require(out.jacobian.rows() == p && out.jacobian.cols() == n,
          "eval_h: Jacobian has wrong dimensions");
  require(out.hessians.size() == static_cast<std::size_t>(p),
          "eval_h: wrong number of Hessians");
  for (auto &h : out.hessians) {
    require(h.rows() == n && h.cols() == n,
            "eval_h: constraint Hessian has wrong dimensions");
    h = symmetrized(h);
  }
  return out;
}

Index l0_norm(const Vector &x, double delta) {
  if (delta < 0.0)
    throw std::invalid_argument("l0_norm: delta must be nonnegative");
  Index count = 0;
  for (Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    if (delta == 0.0 ? a > 0.0 : a >= delta)
      ++count;
  }
  return count;
}

IndexList support_set(const Vector &x, double delta) {
  if (delta < 0.0)
    throw std::invalid_argument("support_set: delta must be nonnegative");
  IndexList support;
  for (Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    if (delta == 0.0 ? a > 0.0 : a >= delta)
      support.push_back(i);
  }
  return support;
}

double eval_spo_objective(const SpoProblem &problem, const Vector &x,
                          double delta) {
  return problem.eval_f(x).value +
         problem.rho * static_cast<double>(l0_norm(x, delta));
}

LagrangianValue lagrangian_sp(const SpoProblem &problem, const Vector &x,
                              const Vector &lambda, const Vector &mu) {
  if (lambda.size() != problem.m || mu.size() != problem.p)
    throw std::invalid_argument("lagrangian_sp: multiplier dimensions");

  const ObjectiveValue f = problem.eval_f(x);
  LagrangianValue out;
  out.value = f.value;
  out.gradient = f.gradient;
  out.hessian = f.hessian;

  if (problem.m > 0) {
    const ConstraintValue g = problem.eval_g(x);
    out.value += lambda.dot(g.values);
    out.gradient += g.jacobian.transpose() * lambda;
    for (Index j = 0; j < problem.m; ++j)
      out.hessian += lambda[j] * g.hessians[static_cast<std::size_t>(j)];
  }
  if (problem.p > 0) {
    const ConstraintValue h = problem.eval_h(x);
    out.value += mu.dot(h.values);
    out.gradient += h.jacobian.transpose() * mu;
    for (Index i = 0; i < problem.p; ++i)
      out.hessian += mu[i] * h.hessians[static_cast<std::size_t>(i)];
  }
  return out;
}

IndexSets index_sets(const SpoProblem &problem, const PrimalDualPoint &point,
                     double delta, double active_tol) {
  if (delta < 0.0 || active_tol < 0.0)
    throw std::invalid_argument("index_sets: tolerances must be nonnegative");

  IndexSets sets;
  for (Index i = 0; i < point.x.size(); ++i) {
    const bool x_zero = std::abs(point.x[i]) < delta;
    if (x_zero)
      sets.i0.push_back(i);
    if (x_zero && point.y.size() == point.x.size() &&
        std::abs(point.y[i]) < delta)
      sets.i_xy.push_back(i);
  }
  if (problem.m > 0) {
    const Vector g = problem.eval_g(point.x).values;
    for (Index j = 0; j < problem.m; ++j) {
      if (std::abs(g[j]) <= active_tol) {
        sets.ig.push_back(j);
        if (j < point.lambda.size() && std::abs(point.lambda[j]) <= active_tol)
          sets.i_glambda.push_back(j);
      }
    }
  }
  return sets;
}

} // namespace spo
