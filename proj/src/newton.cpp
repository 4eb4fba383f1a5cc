#include "spo/newton.hpp"

#include <cmath>

namespace spo::newton {

namespace {

void apply_step(PrimalDualPoint &z, const Vector &d, const SpoProblem &problem,
                OperatorKind kind) {
  const Index n = problem.n, m = problem.m, p = problem.p;
  if (kind == OperatorKind::Reduced) {
    z.x += d.segment(0, n);
    z.lambda += d.segment(n, m);
    z.mu += d.segment(n + m, p);
    z.gamma += d.segment(n + m + p, n);
  } else {
    z.x += d.segment(0, n);
    z.y += d.segment(n, n);
    z.lambda += d.segment(2 * n, m);
    z.mu += d.segment(2 * n + m, p);
    z.gamma += d.segment(2 * n + m + p, n);
  }
}

} // namespace

PrimalDualPoint default_init(const SpoProblem &problem, const Vector &x0) {
  if (x0.size() != problem.n)
    throw std::invalid_argument("default_init: x0 has wrong dimension");
  PrimalDualPoint z;
  z.x = x0;
  z.y = Vector::Ones(problem.n);
  z.lambda = Vector::Zero(problem.m);
  z.mu = Vector::Zero(problem.p);
  z.gamma = Vector::Zero(problem.n);
  return z;
}

std::optional<Vector> linear_solve(const Matrix &matrix, const Vector &rhs) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size())
    throw std::invalid_argument("linear_solve: system is not square");
  if (matrix.rows() == 0)
    return Vector::Zero(0);

  // Row equilibration keeps the pivot test meaningful when single rows
  // (the multiplier transients) dwarf the rest of the system.
  Matrix scaled = matrix;
  Vector row_scale(matrix.rows());
  for (Index i = 0; i < matrix.rows(); ++i) {
    const double peak = matrix.row(i).cwiseAbs().maxCoeff();
    if (!(peak > 0.0) || !std::isfinite(peak))
      return std::nullopt;
    row_scale[i] = 1.0 / peak;
    scaled.row(i) *= row_scale[i];
  }

  // LU with partial pivoting is backward stable, and the Newton iteration
  // keeps contracting through mildly degenerate systems (the multiplier
  // transients routinely push the condition number past 1e12), so only
  // exact rank deficiency is reported; garbage directions from such solves
  // are caught by the step safeguard instead.
  Eigen::PartialPivLU<Matrix> lu(scaled);
  const Vector pivots = lu.matrixLU().diagonal();
  for (Index i = 0; i < pivots.size(); ++i) {
    const double piv = std::abs(pivots[i]);
    if (!std::isfinite(piv) || piv == 0.0)
      return std::nullopt;
  }
  Vector x = lu.solve(rhs.cwiseProduct(row_scale));
  if (!x.allFinite())
    return std::nullopt;
  return x;
}

SolveReport solve_from(const SpoProblem &problem, const PrimalDualPoint &start,
                       const NewtonOptions &options) {
  if (options.max_iter < 1 || options.eps < 0.0 || options.delta < 0.0 ||
      options.step_safety <= 0.0)
    throw std::invalid_argument("solve: invalid options");

  SolveReport report;
  PrimalDualPoint z = start;

  auto record = [&](double &sres) {
    sres = kkt::s_stationarity_residual(problem, z.x, z.lambda, z.mu,
                                        options.delta, options.ncp);
    report.residual_history.push_back(sres);
    report.op_residual_history.push_back(
        kkt::residual(problem, z, options.kind, options.ncp).norm());
  };

  double sres = 0.0;
  record(sres);
  report.status = SolveStatus::MaxIterations;

  while (true) {
    if (std::isfinite(sres) && sres <= options.eps) {
      report.status = SolveStatus::Converged;
      break;
    }
    if (report.iterations >= options.max_iter)
      break;

    const kkt::KktResidual r =
        kkt::residual(problem, z, options.kind, options.ncp);
    const Matrix jac = kkt::jacobian(problem, z, options.kind, options.ncp);
    const std::optional<Vector> d = linear_solve(jac, -r.vector);
    if (!d) {
      report.status = SolveStatus::LinearSolveFailure;
      break;
    }
    const double bound =
        report.iterations == 0
            ? options.first_step_safety.value_or(options.step_safety)
            : options.step_safety;
    const double primal_step = d->head(problem.n).norm();
    if (!d->allFinite() || primal_step > bound) {
      report.status = SolveStatus::StepBlowup;
      break;
    }
    apply_step(z, *d, problem, options.kind);
    ++report.iterations;
    record(sres);
  }

  if (options.kind == OperatorKind::Reduced)
    z.y = Vector::Ones(problem.n) -
          z.gamma.cwiseProduct(z.x) / problem.rho;

  report.final_point = z;
  report.objective = eval_spo_objective(problem, z.x, options.delta);
  report.l0_count = l0_norm(z.x, options.delta);
  return report;
}

SolveReport solve(const SpoProblem &problem, const Vector &x0,
                  const NewtonOptions &options) {
  return solve_from(problem, default_init(problem, x0), options);
}

} // namespace spo::newton
