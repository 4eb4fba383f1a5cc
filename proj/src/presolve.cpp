#include "spo/presolve.hpp"

#include "spo/newton.hpp"

#include <cmath>
#include <limits>

namespace spo::presolve {

namespace {

void require(bool ok, const char *what) {
  if (!ok)
    throw std::invalid_argument(what);
}

void validate(const QpSpec &spec) {
  const Index n = spec.q.rows();
  require(spec.q.cols() == n, "qp: Q must be square");
  require(spec.c.size() == n, "qp: c has wrong dimension");
  require(spec.a_eq.rows() == spec.b_eq.size() &&
              (spec.a_eq.rows() == 0 || spec.a_eq.cols() == n),
          "qp: equality block dimensions");
  require(spec.a_in.rows() == spec.b_in.size() &&
              (spec.a_in.rows() == 0 || spec.a_in.cols() == n),
          "qp: inequality block dimensions");
  const double asym = (spec.q - spec.q.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-10 * (1.0 + spec.q.cwiseAbs().maxCoeff()),
          "qp: Q is not symmetric");
}

// All inequality rows stacked: a_in x <= b_in followed by -x <= 0.
void stack_inequalities(const QpSpec &spec, Matrix &a, Vector &b) {
  const Index n = spec.q.rows();
  const Index mi = spec.a_in.rows();
  const Index k = mi + (spec.nonneg ? n : 0);
  a.resize(k, n);
  b.resize(k);
  if (mi > 0) {
    a.topRows(mi) = spec.a_in;
    b.head(mi) = spec.b_in;
  }
  if (spec.nonneg) {
    a.bottomRows(n) = -Matrix::Identity(n, n);
    b.tail(n).setZero();
  }
}

} // namespace

Vector soft_threshold(const Vector &v, double t) {
  require(t >= 0.0, "soft_threshold: t must be nonnegative");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - t;
    out[i] = a > 0.0 ? (v[i] > 0.0 ? a : -a) : 0.0;
  }
  return out;
}

FistaResult fista(const CompositeSpec &spec, const Vector &x_init,
                  int max_iter, double tol) {
  require(spec.l1_weight >= 0.0, "fista: l1 weight must be nonnegative");
  require(static_cast<bool>(spec.smooth_oracle), "fista: missing oracle");

  const double w = spec.l1_weight;
  auto objective = [&](const Vector &x, double smooth_value) {
    return smooth_value + w * x.lpNorm<1>();
  };

  double lips = spec.lipschitz_hint.value_or(1.0);
  Vector x_prev = x_init;
  Vector y = x_init;
  double t = 1.0;
  double obj_prev = objective(x_init, spec.smooth_oracle(x_init).first);

  FistaResult result;
  result.x = x_init;
  result.objective = obj_prev;
  result.gradient_mapping_norm = std::numeric_limits<double>::infinity();

  for (int k = 0; k < max_iter; ++k) {
    bool restarted = false;
    Vector x_new;
    double obj_new = 0.0;
    while (true) {
      const auto [f_y, g_y] = spec.smooth_oracle(y);
      double f_new = 0.0;
      while (true) {
        x_new = soft_threshold(y - g_y / lips, w / lips);
        f_new = spec.smooth_oracle(x_new).first;
        const Vector diff = x_new - y;
        const double quad =
            f_y + g_y.dot(diff) + 0.5 * lips * diff.squaredNorm();
        if (f_new <= quad + 1e-12 * std::abs(f_new) || lips > 1e18)
          break;
        lips *= 2.0;
      }
      obj_new = objective(x_new, f_new);
      // adaptive restart: drop the momentum once the objective increases
      if (obj_new > obj_prev + 1e-15 && !restarted && (y - x_prev).norm() > 0.0) {
        restarted = true;
        t = 1.0;
        y = x_prev;
        continue;
      }
      break;
    }

    result.gradient_mapping_norm = lips * (y - x_new).norm();
    result.iterations = k + 1;
    if (obj_new <= result.objective) {
      result.objective = obj_new;
      result.x = x_new;
    }
    if (result.gradient_mapping_norm <= tol) {
      result.converged = true;
      break;
    }

    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_new + ((t - 1.0) / t_new) * (x_new - x_prev);
    x_prev = x_new;
    obj_prev = obj_new;
    t = t_new;
  }
  return result;
}

double qp_kkt_residual(const QpSpec &spec, const Vector &x, const Vector &mu,
                       const Vector &lambda) {
  Matrix a;
  Vector b;
  stack_inequalities(spec, a, b);
  require(lambda.size() == a.rows(), "qp_kkt_residual: lambda dimension");
  require(mu.size() == spec.a_eq.rows(), "qp_kkt_residual: mu dimension");

  Vector stat = spec.q * x + spec.c;
  if (spec.a_eq.rows() > 0)
    stat += spec.a_eq.transpose() * mu;
  if (a.rows() > 0)
    stat += a.transpose() * lambda;

  double res = stat.lpNorm<Eigen::Infinity>();
  if (spec.a_eq.rows() > 0)
    res = std::max(res,
                   (spec.a_eq * x - spec.b_eq).lpNorm<Eigen::Infinity>());
  if (a.rows() > 0) {
    const Vector viol = (a * x - b).cwiseMax(0.0);
    res = std::max(res, viol.lpNorm<Eigen::Infinity>());
    res = std::max(res, (-lambda).cwiseMax(0.0).lpNorm<Eigen::Infinity>());
    res = std::max(
        res, lambda.cwiseProduct(a * x - b).cwiseAbs().maxCoeff());
  }
  return res;
}

QpResult qp_solve(const QpSpec &spec, int max_iter, double tol) {
  validate(spec);
  const Index n = spec.q.rows();
  const Index p = spec.a_eq.rows();
  const Matrix q_sym = 0.5 * (spec.q + spec.q.transpose());

  Matrix a;
  Vector b;
  stack_inequalities(spec, a, b);
  const Index k = a.rows();

  QpResult result;

  if (k == 0) {
    // equality-constrained QP: one saddle-point solve
    Matrix sys = Matrix::Zero(n + p, n + p);
    sys.topLeftCorner(n, n) = q_sym;
    if (p > 0) {
      sys.topRightCorner(n, p) = spec.a_eq.transpose();
      sys.bottomLeftCorner(p, n) = spec.a_eq;
    }
    Vector rhs(n + p);
    rhs.head(n) = -spec.c;
    rhs.tail(p) = spec.b_eq;
    const auto sol = newton::linear_solve(sys, rhs);
    if (!sol) {
      result.status = QpStatus::Infeasible;
      return result;
    }
    result.x = sol->head(n);
    result.eq_multipliers = sol->tail(p);
    result.in_multipliers = Vector::Zero(0);
    result.kkt_residual =
        qp_kkt_residual(spec, result.x, result.eq_multipliers,
                        result.in_multipliers);
    result.status =
        result.kkt_residual <= tol ? QpStatus::Solved : QpStatus::Infeasible;
    return result;
  }

  // infeasible start: least-norm equality solution, slacks and duals at
  // the scale of the objective data
  Vector x = Vector::Zero(n);
  if (p > 0) {
    const Matrix gram = spec.a_eq * spec.a_eq.transpose();
    const auto w = newton::linear_solve(gram, spec.b_eq);
    if (w)
      x = spec.a_eq.transpose() * *w;
  }
  const double c_scale = spec.c.size() > 0 ? spec.c.cwiseAbs().maxCoeff() : 0.0;
  const double warm = std::max(1.0, std::sqrt(c_scale));
  Vector s = (b - a * x).cwiseMax(warm);
  Vector lambda = Vector::Constant(k, warm);
  Vector mu = Vector::Zero(p);

  constexpr double kSigma = 0.1;
  constexpr double kBoundary = 0.995;

  for (int iter = 0; iter < max_iter; ++iter) {
    result.iterations = iter;
    result.kkt_residual = qp_kkt_residual(spec, x, mu, lambda);
    if (result.kkt_residual <= tol) {
      result.status = QpStatus::Solved;
      break;
    }

    Vector r_d = q_sym * x + spec.c + a.transpose() * lambda;
    if (p > 0)
      r_d += spec.a_eq.transpose() * mu;
    const Vector r_p1 = p > 0 ? (spec.a_eq * x - spec.b_eq).eval() : Vector();
    const Vector r_p2 = a * x + s - b;
    const double mu_hat = s.dot(lambda) / static_cast<double>(k);
    const Vector r_c =
        s.cwiseProduct(lambda) - Vector::Constant(k, kSigma * mu_hat);

    const Vector d_over_s = lambda.cwiseQuotient(s);
    Matrix sys = Matrix::Zero(n + p, n + p);
    sys.topLeftCorner(n, n) =
        q_sym + a.transpose() * d_over_s.asDiagonal() * a;
    if (p > 0) {
      sys.topRightCorner(n, p) = spec.a_eq.transpose();
      sys.bottomLeftCorner(p, n) = spec.a_eq;
    }
    Vector rhs(n + p);
    rhs.head(n) =
        -r_d - a.transpose() *
                   ((-r_c + lambda.cwiseProduct(r_p2)).cwiseQuotient(s));
    if (p > 0)
      rhs.tail(p) = -r_p1;

    const auto step = newton::linear_solve(sys, rhs);
    if (!step)
      break;
    const Vector dx = step->head(n);
    const Vector dmu = step->tail(p);
    const Vector ds = -r_p2 - a * dx;
    const Vector dlambda =
        (-r_c - lambda.cwiseProduct(ds)).cwiseQuotient(s);

    double alpha_p = 1.0, alpha_d = 1.0;
    for (Index i = 0; i < k; ++i) {
      if (ds[i] < 0.0)
        alpha_p = std::min(alpha_p, -kBoundary * s[i] / ds[i]);
      if (dlambda[i] < 0.0)
        alpha_d = std::min(alpha_d, -kBoundary * lambda[i] / dlambda[i]);
    }
    x += alpha_p * dx;
    s += alpha_p * ds;
    lambda += alpha_d * dlambda;
    mu += alpha_d * dmu;
  }

  result.x = x;
  result.eq_multipliers = mu;
  result.in_multipliers = lambda;
  result.kkt_residual = qp_kkt_residual(spec, x, mu, lambda);
  if (result.status != QpStatus::Solved) {
    double primal_inf = 0.0;
    if (p > 0)
      primal_inf = (spec.a_eq * x - spec.b_eq).lpNorm<Eigen::Infinity>();
    primal_inf = std::max(
        primal_inf, (a * x - b).cwiseMax(0.0).lpNorm<Eigen::Infinity>());
    result.status = primal_inf > 1e-6 ? QpStatus::Infeasible
                                      : QpStatus::MaxIterations;
  }
  return result;
}

std::optional<Vector> presolve_l1(const SpoProblem &problem) {
  if (!problem.presolve_form.has_value())
    return std::nullopt;

  if (const auto *qp = std::get_if<QpPresolveForm>(&*problem.presolve_form)) {
    if (qp->l1_mode != L1Mode::Split) {
      Vector c = qp->c;
      if (qp->l1_mode == L1Mode::AddLinear)
        c.array() += problem.rho; // ||x||_1 = e^T x under x >= 0
      QpSpec spec{qp->q, c, qp->a_eq, qp->b_eq, qp->a_in, qp->b_in,
                  qp->nonneg};
      const QpResult r = qp_solve(spec);
      if (r.status != QpStatus::Solved)
        throw std::runtime_error("presolve_l1: surrogate QP did not solve");
      return r.x;
    }
    // rho * ||x||_1 through the (x+, x-) >= 0 split
    const Index n = qp->q.rows();
    QpSpec spec;
    spec.q.resize(2 * n, 2 * n);
    spec.q.topLeftCorner(n, n) = qp->q;
    spec.q.topRightCorner(n, n) = -qp->q;
    spec.q.bottomLeftCorner(n, n) = -qp->q;
    spec.q.bottomRightCorner(n, n) = qp->q;
    spec.c.resize(2 * n);
    spec.c.head(n) = qp->c + Vector::Constant(n, problem.rho);
    spec.c.tail(n) = -qp->c + Vector::Constant(n, problem.rho);
    spec.a_eq.resize(qp->a_eq.rows(), 2 * n);
    if (qp->a_eq.rows() > 0) {
      spec.a_eq.leftCols(n) = qp->a_eq;
      spec.a_eq.rightCols(n) = -qp->a_eq;
    }
    spec.b_eq = qp->b_eq;
    spec.a_in.resize(qp->a_in.rows(), 2 * n);
    if (qp->a_in.rows() > 0) {
      spec.a_in.leftCols(n) = qp->a_in;
      spec.a_in.rightCols(n) = -qp->a_in;
    }
    spec.b_in = qp->b_in;
    spec.nonneg = true;
    // tolerance relative to the objective scale; the surrogate only has to
    // deliver an initial point
    const double scale = 1.0 + spec.c.cwiseAbs().maxCoeff();
    const QpResult r = qp_solve(spec, 300, 1e-8 * scale);
    if (r.status != QpStatus::Solved)
      throw std::runtime_error("presolve_l1: split QP did not solve");
    return (r.x.head(n) - r.x.tail(n)).eval();
  }

  const auto &composite = std::get<CompositePresolveForm>(*problem.presolve_form);
  CompositeSpec spec;
  const SpoProblem base = problem;
  spec.smooth_oracle = [base](const Vector &x) {
    const ObjectiveValue f = base.eval_f(x);
    return std::make_pair(f.value, f.gradient);
  };
  spec.lipschitz_hint = composite.lipschitz_hint;
  spec.l1_weight = problem.rho;
  return fista(spec, Vector::Zero(problem.n)).x;
}

} // namespace spo::presolve
