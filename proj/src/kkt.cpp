#include "spo/kkt.hpp"

#include <cmath>

namespace spo::kkt {

namespace {

void require(bool ok, const char *what) {
  if (!ok)
    throw std::invalid_argument(what);
}

void check_point(const SpoProblem &problem, const PrimalDualPoint &point,
                 OperatorKind kind) {
  require(point.x.size() == problem.n, "kkt: x has wrong dimension");
  require(point.lambda.size() == problem.m, "kkt: lambda has wrong dimension");
  require(point.mu.size() == problem.p, "kkt: mu has wrong dimension");
  require(point.gamma.size() == problem.n, "kkt: gamma has wrong dimension");
  if (kind != OperatorKind::Reduced)
    require(point.y.size() == problem.n, "kkt: y has wrong dimension");
  if (kind == OperatorKind::Complementary)
    require(problem.nonneg,
            "kkt: complementary operator requires a nonnegative problem");
}

Vector phi_g_values(const SpoProblem &problem, const Vector &g,
                    const Vector &lambda, NcpKind ncp_kind) {
  Vector out(problem.m);
  for (Index j = 0; j < problem.m; ++j)
    out[j] = ncp::phi(ncp_kind, -g[j], lambda[j]);
  return out;
}

} // namespace

const char *to_string(OperatorKind kind) {
  switch (kind) {
  case OperatorKind::Full:
    return "full";
  case OperatorKind::Reduced:
    return "reduced";
  case OperatorKind::Complementary:
    return "complementary";
  }
  return "unknown";
}

BlockLayout block_layout(const SpoProblem &problem, OperatorKind kind) {
  const Index n = problem.n, m = problem.m, p = problem.p;
  BlockLayout layout;
  if (kind == OperatorKind::Reduced) {
    layout.stat_x = 0;
    layout.stat_y = -1;
    layout.ineq = n;
    layout.eq = n + m;
    layout.compl_block = n + m + p;
    layout.size = 2 * n + m + p;
  } else {
    layout.stat_x = 0;
    layout.stat_y = n;
    layout.ineq = 2 * n;
    layout.eq = 2 * n + m;
    layout.compl_block = 2 * n + m + p;
    layout.size = 3 * n + m + p;
  }
  return layout;
}

KktResidual residual(const SpoProblem &problem, const PrimalDualPoint &point,
                     OperatorKind kind, NcpKind ncp_kind) {
  check_point(problem, point, kind);
  const Index n = problem.n, m = problem.m, p = problem.p;
  const double rho = problem.rho;

  const LagrangianValue lag =
      lagrangian_sp(problem, point.x, point.lambda, point.mu);
  const Vector g =
      m > 0 ? problem.eval_g(point.x).values : Vector::Zero(0).eval();
  const Vector h =
      p > 0 ? problem.eval_h(point.x).values : Vector::Zero(0).eval();

  KktResidual out;
  out.layout = block_layout(problem, kind);
  out.vector.resize(out.layout.size);

  if (kind == OperatorKind::Reduced) {
    const Vector y_elim =
        Vector::Ones(n) - point.gamma.cwiseProduct(point.x) / rho;
    out.vector.segment(out.layout.stat_x, n) =
        lag.gradient + point.gamma.cwiseProduct(y_elim);
    out.vector.segment(out.layout.ineq, m) =
        phi_g_values(problem, g, point.lambda, ncp_kind);
    out.vector.segment(out.layout.eq, p) = h;
    out.vector.segment(out.layout.compl_block, n) =
        point.x.cwiseProduct(y_elim);
    return out;
  }

  out.vector.segment(out.layout.stat_x, n) =
      lag.gradient + point.gamma.cwiseProduct(point.y);
  out.vector.segment(out.layout.stat_y, n) =
      rho * (point.y - Vector::Ones(n)) + point.gamma.cwiseProduct(point.x);
  out.vector.segment(out.layout.ineq, m) =
      phi_g_values(problem, g, point.lambda, ncp_kind);
  out.vector.segment(out.layout.eq, p) = h;
  if (kind == OperatorKind::Full) {
    out.vector.segment(out.layout.compl_block, n) =
        point.x.cwiseProduct(point.y);
  } else {
    for (Index i = 0; i < n; ++i)
      out.vector[out.layout.compl_block + i] =
          ncp::phi(ncp_kind, point.x[i], point.y[i]);
  }
  return out;
}

Matrix jacobian(const SpoProblem &problem, const PrimalDualPoint &point,
                OperatorKind kind, NcpKind ncp_kind) {
  check_point(problem, point, kind);
  const Index n = problem.n, m = problem.m, p = problem.p;
  const double rho = problem.rho;

  const LagrangianValue lag =
      lagrangian_sp(problem, point.x, point.lambda, point.mu);
  const ConstraintValue g = problem.eval_g(point.x);
  const ConstraintValue h = problem.eval_h(point.x);
  const BlockLayout layout = block_layout(problem, kind);

  // Rows of Phi_g: J1 (m x n, in x) and the diagonal J2 (in lambda).
  Matrix j1_phi_g = Matrix::Zero(m, n);
  Vector j2_phi_g = Vector::Zero(m);
  for (Index j = 0; j < m; ++j) {
    const ncp::ConstraintBsubRow row = ncp::phi_bsub_constraint(
        ncp_kind, g.values[j], g.jacobian.row(j).transpose(), point.lambda[j]);
    j1_phi_g.row(j) = row.row_x.transpose();
    j2_phi_g[j] = row.d_lambda;
  }

  Matrix out = Matrix::Zero(layout.size, layout.size);

  if (kind == OperatorKind::Reduced) {
    // Unknown order (x, lambda, mu, gamma).
    const Index cx = 0, cl = n, cm = n + m, cg = n + m + p;
    const Vector y_slope =
        Vector::Ones(n) - 2.0 * point.gamma.cwiseProduct(point.x) / rho;
    out.block(layout.stat_x, cx, n, n) =
        lag.hessian - Matrix((point.gamma.cwiseAbs2() / rho).asDiagonal());
    out.block(layout.stat_x, cl, n, m) = g.jacobian.transpose();
    out.block(layout.stat_x, cm, n, p) = h.jacobian.transpose();
    out.block(layout.stat_x, cg, n, n) = y_slope.asDiagonal();
    out.block(layout.ineq, cx, m, n) = j1_phi_g;
    out.block(layout.ineq, cl, m, m) = j2_phi_g.asDiagonal();
    out.block(layout.eq, cx, p, n) = h.jacobian;
    out.block(layout.compl_block, cx, n, n) = y_slope.asDiagonal();
    out.block(layout.compl_block, cg, n, n) =
        (-point.x.cwiseAbs2() / rho).asDiagonal();
    return out;
  }

  // Unknown order (x, y, lambda, mu, gamma).
  const Index cx = 0, cy = n, cl = 2 * n, cm = 2 * n + m, cg = 2 * n + m + p;
  out.block(layout.stat_x, cx, n, n) = lag.hessian;
  out.block(layout.stat_x, cy, n, n) = point.gamma.asDiagonal();
  out.block(layout.stat_x, cl, n, m) = g.jacobian.transpose();
  out.block(layout.stat_x, cm, n, p) = h.jacobian.transpose();
  out.block(layout.stat_x, cg, n, n) = point.y.asDiagonal();

  out.block(layout.stat_y, cx, n, n) = point.gamma.asDiagonal();
  out.block(layout.stat_y, cy, n, n) = rho * Matrix::Identity(n, n);
  out.block(layout.stat_y, cg, n, n) = point.x.asDiagonal();

  out.block(layout.ineq, cx, m, n) = j1_phi_g;
  out.block(layout.ineq, cl, m, m) = j2_phi_g.asDiagonal();

  out.block(layout.eq, cx, p, n) = h.jacobian;

  if (kind == OperatorKind::Full) {
    out.block(layout.compl_block, cx, n, n) = point.y.asDiagonal();
    out.block(layout.compl_block, cy, n, n) = point.x.asDiagonal();
  } else {
    Vector c_x(n), c_y(n);
    for (Index i = 0; i < n; ++i) {
      const ncp::BsubRow row = ncp::phi_bsub(ncp_kind, point.x[i], point.y[i]);
      c_x[i] = row.d_a;
      c_y[i] = row.d_b;
    }
    out.block(layout.compl_block, cx, n, n) = c_x.asDiagonal();
    out.block(layout.compl_block, cy, n, n) = c_y.asDiagonal();
  }
  return out;
}

MultiplierSet recover_multipliers(const SpoProblem &problem, const Vector &x,
                                  const Vector &lambda, const Vector &mu,
                                  double delta) {
  require(delta >= 0.0, "recover_multipliers: delta must be nonnegative");
  const Vector grad = lagrangian_sp(problem, x, lambda, mu).gradient;
  const Index n = problem.n;

  MultiplierSet out;
  out.y_star = Vector::Zero(n);
  out.gamma_star = Vector::Zero(n);
  out.sigma_star = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const double a = std::abs(x[i]);
    const bool zero = delta == 0.0 ? a == 0.0 : a < delta;
    if (zero) {
      out.y_star[i] = 1.0;
      out.gamma_star[i] = -grad[i];
      out.sigma_star[i] = problem.rho;
    } else {
      out.gamma_star[i] = problem.rho / x[i];
    }
  }
  return out;
}

double s_stationarity_residual(const SpoProblem &problem, const Vector &x,
                               const Vector &lambda, const Vector &mu,
                               double delta, NcpKind ncp_kind) {
  require(delta >= 0.0, "s_stationarity_residual: delta must be nonnegative");
  const Vector grad = lagrangian_sp(problem, x, lambda, mu).gradient;
  const IndexList support = support_set(x, delta);

  double sq = 0.0;
  for (Index i : support)
    sq += grad[i] * grad[i];
  if (problem.m > 0) {
    const Vector g = problem.eval_g(x).values;
    for (Index j = 0; j < problem.m; ++j) {
      const double v = ncp::phi(ncp_kind, -g[j], lambda[j]);
      sq += v * v;
    }
  }
  if (problem.p > 0)
    sq += problem.eval_h(x).values.squaredNorm();
  if (problem.nonneg) {
    for (Index i : support) {
      const double v = std::max(0.0, -x[i]);
      sq += v * v;
    }
  }
  return std::sqrt(sq);
}

Vector SplitProblem::recover(const Vector &split_x) {
  const Index n = split_x.size() / 2;
  return split_x.head(n) - split_x.tail(n);
}

Vector SplitProblem::embed(const Vector &x) {
  Vector out(2 * x.size());
  out.head(x.size()) = x.cwiseMax(0.0);
  out.tail(x.size()) = (-x).cwiseMax(0.0);
  return out;
}

SplitProblem split_variables(const SpoProblem &problem) {
  require(!problem.nonneg,
          "split_variables: problem is already nonnegative");
  const Index n = problem.n;

  auto lift_hessian = [n](const Matrix &h) {
    Matrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = h;
    out.topRightCorner(n, n) = -h;
    out.bottomLeftCorner(n, n) = -h;
    out.bottomRightCorner(n, n) = h;
    return out;
  };
  auto lift_jacobian = [n](const Matrix &j) {
    Matrix out(j.rows(), 2 * n);
    out.leftCols(n) = j;
    out.rightCols(n) = -j;
    return out;
  };

  SplitProblem split;
  split.lifted.n = 2 * n;
  split.lifted.m = problem.m;
  split.lifted.p = problem.p;
  split.lifted.rho = problem.rho;
  split.lifted.nonneg = true;

  const SpoProblem base = problem;
  split.lifted.f_oracle = [base, lift_hessian, lift_jacobian,
                           n](const Vector &u) {
    const ObjectiveValue f = base.eval_f(SplitProblem::recover(u));
    ObjectiveValue out;
    out.value = f.value;
    out.gradient = lift_jacobian(f.gradient.transpose()).transpose();
    out.hessian = lift_hessian(f.hessian);
    return out;
  };
  if (problem.m > 0) {
    split.lifted.g_oracle = [base, lift_hessian, lift_jacobian](const Vector &u) {
      const ConstraintValue g = base.eval_g(SplitProblem::recover(u));
      ConstraintValue out;
      out.values = g.values;
      out.jacobian = lift_jacobian(g.jacobian);
      for (const auto &h : g.hessians)
        out.hessians.push_back(lift_hessian(h));
      return out;
    };
  }
  if (problem.p > 0) {
    split.lifted.h_oracle = [base, lift_hessian, lift_jacobian](const Vector &u) {
      const ConstraintValue h = base.eval_h(SplitProblem::recover(u));
      ConstraintValue out;
      out.values = h.values;
      out.jacobian = lift_jacobian(h.jacobian);
      for (const auto &hh : h.hessians)
        out.hessians.push_back(lift_hessian(hh));
      return out;
    };
  }
  return split;
}

Vector residual_spolin(const SpoProblem &problem, const PrimalDualPoint &point,
                       NcpKind ncp_kind) {
  check_point(problem, point, OperatorKind::Full);
  require(point.sigma.has_value(), "residual_spolin: sigma missing");
  require(point.sigma->size() == problem.n,
          "residual_spolin: sigma has wrong dimension");
  const Index n = problem.n, m = problem.m, p = problem.p;
  const Vector &sigma = *point.sigma;

  const LagrangianValue lag =
      lagrangian_sp(problem, point.x, point.lambda, point.mu);
  const Vector g =
      m > 0 ? problem.eval_g(point.x).values : Vector::Zero(0).eval();
  const Vector h =
      p > 0 ? problem.eval_h(point.x).values : Vector::Zero(0).eval();

  Vector out(4 * n + m + p);
  Index at = 0;
  out.segment(at, n) = lag.gradient + point.gamma.cwiseProduct(point.y);
  at += n;
  out.segment(at, n) = -problem.rho * Vector::Ones(n) +
                       point.gamma.cwiseProduct(point.x) + sigma;
  at += n;
  for (Index j = 0; j < m; ++j)
    out[at + j] = ncp::phi(ncp_kind, -g[j], point.lambda[j]);
  at += m;
  out.segment(at, p) = h;
  at += p;
  out.segment(at, n) = point.x.cwiseProduct(point.y);
  at += n;
  for (Index i = 0; i < n; ++i)
    out[at + i] = ncp::phi(ncp_kind, 1.0 - point.y[i], sigma[i]);
  return out;
}

} // namespace spo::kkt
