#include "spo/analysis.hpp"

#include "spo/newton.hpp"
#include "spo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spo::analysis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RankInfo {
  Index rank = 0;
  double smallest_singular_value = kInf;
};

// Rank of a row matrix with the project-wide relative SVD cutoff. The
// smallest singular value refers to the full-row-rank question: rows that
// outnumber columns report 0.
RankInfo row_rank(const Matrix &rows) {
  RankInfo info;
  if (rows.rows() == 0)
    return info;
  if (rows.rows() > rows.cols()) {
    info.smallest_singular_value = 0.0;
    Eigen::JacobiSVD<Matrix> svd(rows);
    const Vector &sv = svd.singularValues();
    const double cutoff = kRankCutoff * sv[0];
    info.rank = (sv.array() > cutoff).count();
    return info;
  }
  Eigen::JacobiSVD<Matrix> svd(rows);
  const Vector &sv = svd.singularValues();
  info.smallest_singular_value = sv[sv.size() - 1];
  const double cutoff = kRankCutoff * sv[0];
  info.rank = (sv.array() > cutoff).count();
  return info;
}

// Orthonormal basis of the null space of C via Householder QR of C^T; the
// trailing columns of Q complement the row space.
Matrix null_space_basis(const Matrix &c) {
  const Index n = c.cols();
  if (c.rows() == 0)
    return Matrix::Identity(n, n);
  Eigen::ColPivHouseholderQR<Matrix> qr(c.transpose());
  qr.setThreshold(kRankCutoff);
  const Index r = qr.rank();
  const Matrix q = qr.householderQ();
  return q.rightCols(n - r);
}

IndexList active_set(const Vector &g, double tol) {
  IndexList out;
  for (Index j = 0; j < g.size(); ++j)
    if (std::abs(g[j]) <= tol)
      out.push_back(j);
  return out;
}

IndexList zero_set(const Vector &x, double delta) {
  IndexList out;
  for (Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    if (delta == 0.0 ? a == 0.0 : a < delta)
      out.push_back(i);
  }
  return out;
}

} // namespace

CqReport check_sp_licq(const SpoProblem &problem, const Vector &x,
                       double delta, double active_tol) {
  if (delta < 0.0 || active_tol < 0.0)
    throw std::invalid_argument("check_sp_licq: tolerances must be nonnegative");

  const IndexList i0 = zero_set(x, delta);
  IndexList ig;
  Matrix g_jac(0, problem.n);
  if (problem.m > 0) {
    const ConstraintValue g = problem.eval_g(x);
    ig = active_set(g.values, active_tol);
    g_jac = g.jacobian;
  }
  Matrix h_jac(0, problem.n);
  if (problem.p > 0)
    h_jac = problem.eval_h(x).jacobian;

  const Index k = static_cast<Index>(ig.size()) + problem.p +
                  static_cast<Index>(i0.size());
  Matrix rows(k, problem.n);
  Index at = 0;
  for (Index j : ig)
    rows.row(at++) = g_jac.row(j);
  for (Index i = 0; i < problem.p; ++i)
    rows.row(at++) = h_jac.row(i);
  for (Index i : i0) {
    rows.row(at).setZero();
    rows(at, i) = 1.0;
    ++at;
  }

  const RankInfo info = row_rank(rows);
  CqReport report;
  report.gradient_matrix_rank = info.rank;
  report.needed_rank = k;
  report.smallest_singular_value = info.smallest_singular_value;
  report.holds = info.rank == k;
  return report;
}

LicqEquivalence check_licq_equivalence(const SpoProblem &problem,
                                       const PrimalDualPoint &point,
                                       double delta) {
  const Index n = problem.n;
  if (point.x.size() != n || point.y.size() != n)
    throw std::invalid_argument("check_licq_equivalence: point dimensions");
  for (Index i = 0; i < n; ++i)
    if (std::abs(point.x[i]) < delta && std::abs(point.y[i]) < delta)
      throw std::domain_error(
          "check_licq_equivalence: bi-active set is nonempty");

  IndexList ig;
  Matrix g_jac(0, n);
  if (problem.m > 0) {
    const ConstraintValue g = problem.eval_g(point.x);
    ig = active_set(g.values, kActiveTol);
    g_jac = g.jacobian;
  }
  Matrix h_jac(0, n);
  if (problem.p > 0)
    h_jac = problem.eval_h(point.x).jacobian;

  // Gradients over (x, y) of the active constraints of the quadratic
  // reformulation: g rows, h rows, and all n rows of x o y = 0.
  const Index base_rows = static_cast<Index>(ig.size()) + problem.p + n;
  IndexList y_active;
  for (Index i = 0; i < n; ++i)
    if (std::abs(point.y[i] - 1.0) <= kActiveTol)
      y_active.push_back(i);

  Matrix rows(base_rows + static_cast<Index>(y_active.size()), 2 * n);
  rows.setZero();
  Index at = 0;
  for (Index j : ig)
    rows.row(at++).head(n) = g_jac.row(j);
  for (Index i = 0; i < problem.p; ++i)
    rows.row(at++).head(n) = h_jac.row(i);
  for (Index i = 0; i < n; ++i) {
    rows(at, i) = point.y[i];
    rows(at, n + i) = point.x[i];
    ++at;
  }
  const Index sq_rows = at;
  for (Index i : y_active) {
    rows(at, n + i) = 1.0; // gradient of y_i <= 1
    ++at;
  }

  LicqEquivalence out;
  out.sp_licq = check_sp_licq(problem, point.x, delta, kActiveTol).holds;
  out.licq_sq = row_rank(rows.topRows(sq_rows)).rank == sq_rows;
  out.licq_lin = row_rank(rows).rank == rows.rows();
  return out;
}

SoscReport check_strong_sp_sosc(const SpoProblem &problem, const Vector &x,
                                const Vector &lambda, const Vector &mu,
                                double delta) {
  const Index n = problem.n;
  const IndexList i0 = zero_set(x, delta);

  IndexList strict_active;
  Matrix g_jac(0, n);
  if (problem.m > 0) {
    const ConstraintValue g = problem.eval_g(x);
    g_jac = g.jacobian;
    for (Index j : active_set(g.values, kActiveTol))
      if (lambda[j] > kActiveTol)
        strict_active.push_back(j);
  }
  Matrix h_jac(0, n);
  if (problem.p > 0)
    h_jac = problem.eval_h(x).jacobian;

  Matrix rows(static_cast<Index>(strict_active.size()) + problem.p +
                  static_cast<Index>(i0.size()),
              n);
  rows.setZero();
  Index at = 0;
  for (Index j : strict_active)
    rows.row(at++) = g_jac.row(j);
  for (Index i = 0; i < problem.p; ++i)
    rows.row(at++) = h_jac.row(i);
  for (Index i : i0)
    rows(at++, i) = 1.0;

  const Matrix basis = null_space_basis(rows);
  SoscReport report;
  report.subspace_dim = basis.cols();
  if (basis.cols() == 0) {
    report.holds = true;
    report.min_eig = kInf;
    return report;
  }
  const Matrix hess = lagrangian_sp(problem, x, lambda, mu).hessian;
  const Matrix reduced = basis.transpose() * hess * basis;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced);
  report.min_eig = eig.eigenvalues()[0];
  report.holds = report.min_eig > 0.0;
  return report;
}

bool check_second_order_necessary(const SpoProblem &problem, const Vector &x,
                                  const Vector &lambda, const Vector &mu,
                                  double delta, int n_samples,
                                  std::uint64_t seed) {
  const Index n = problem.n;
  const IndexList i0 = zero_set(x, delta);

  IndexList strict_active, weak_active;
  Matrix g_jac(0, n);
  if (problem.m > 0) {
    const ConstraintValue g = problem.eval_g(x);
    g_jac = g.jacobian;
    for (Index j : active_set(g.values, kActiveTol)) {
      if (lambda[j] > kActiveTol)
        strict_active.push_back(j);
      else
        weak_active.push_back(j);
    }
  }
  Matrix h_jac(0, n);
  if (problem.p > 0)
    h_jac = problem.eval_h(x).jacobian;

  Matrix eq_rows(static_cast<Index>(strict_active.size()) + problem.p +
                     static_cast<Index>(i0.size()),
                 n);
  eq_rows.setZero();
  Index at = 0;
  for (Index j : strict_active)
    eq_rows.row(at++) = g_jac.row(j);
  for (Index i = 0; i < problem.p; ++i)
    eq_rows.row(at++) = h_jac.row(i);
  for (Index i : i0)
    eq_rows(at++, i) = 1.0;

  const Matrix basis = null_space_basis(eq_rows);
  if (basis.cols() == 0)
    return true; // trivial cone

  const Matrix hess = lagrangian_sp(problem, x, lambda, mu).hessian;
  Rng rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    Vector eta(basis.cols());
    for (Index i = 0; i < eta.size(); ++i)
      eta[i] = rng.normal();
    const Vector d = basis * eta;
    const double dn = d.norm();
    if (dn == 0.0)
      continue;
    bool in_cone = true;
    for (Index j : weak_active) {
      if (g_jac.row(j).dot(d) > kRankCutoff * dn) {
        in_cone = false;
        break;
      }
    }
    if (!in_cone)
      continue;
    if (d.dot(hess * d) < -1e-10 * dn * dn)
      return false;
  }
  return true;
}

namespace {

struct RowOption {
  Vector row_x;   // n entries for the x columns
  double diag_a = 0.0; // lambda column (constraint rows) or x column (xy rows)
  double diag_b = 0.0; // y column (only xy rows)
};

struct DegenerateRow {
  bool is_constraint = false; // otherwise an x/y complementarity row
  Index index = 0;            // j within Phi_g resp. i within Phi(x, y)
  std::vector<RowOption> options;
};

} // namespace

BdRegularityReport check_bd_regularity(const SpoProblem &problem,
                                       const PrimalDualPoint &point,
                                       OperatorKind kind, NcpKind ncp_kind,
                                       int enumerate_cap,
                                       double degenerate_tol) {
  if (enumerate_cap < 1)
    throw std::invalid_argument("check_bd_regularity: cap must be positive");

  const Index n = problem.n, m = problem.m;
  const kkt::BlockLayout layout = kkt::block_layout(problem, kind);
  const Matrix base = kkt::jacobian(problem, point, kind, ncp_kind);

  std::vector<DegenerateRow> degenerate;
  if (m > 0) {
    const ConstraintValue g = problem.eval_g(point.x);
    for (Index j = 0; j < m; ++j) {
      const double gj = g.values[j];
      const double lj = point.lambda[j];
      const Vector grad = g.jacobian.row(j).transpose();
      DegenerateRow row;
      row.is_constraint = true;
      row.index = j;
      if (ncp_kind == NcpKind::FischerBurmeister) {
        if (std::hypot(gj, lj) > degenerate_tol)
          continue;
        const ncp::ConstraintBsubRow e_dir =
            ncp::phi_fb_bsub_constraint(gj, grad, lj, kInf);
        row.options.push_back({e_dir.row_x, e_dir.d_lambda, 0.0});
        row.options.push_back({Vector::Zero(n), -1.0, 0.0});
        row.options.push_back({grad, 0.0, 0.0});
      } else {
        if (std::abs(-gj - lj) > degenerate_tol)
          continue;
        row.options.push_back({-grad, 0.0, 0.0});
        row.options.push_back({Vector::Zero(n), 1.0, 0.0});
      }
      degenerate.push_back(std::move(row));
    }
  }
  if (kind == OperatorKind::Complementary) {
    for (Index i = 0; i < n; ++i) {
      const double xi = point.x[i], yi = point.y[i];
      DegenerateRow row;
      row.index = i;
      if (ncp_kind == NcpKind::FischerBurmeister) {
        if (std::hypot(xi, yi) > degenerate_tol)
          continue;
        const double v = -1.0 / std::sqrt(2.0) - 1.0;
        row.options.push_back({Vector(), v, v});
        row.options.push_back({Vector(), 0.0, -1.0});
        row.options.push_back({Vector(), -1.0, 0.0});
      } else {
        if (std::abs(xi - yi) > degenerate_tol)
          continue;
        row.options.push_back({Vector(), 1.0, 0.0});
        row.options.push_back({Vector(), 0.0, 1.0});
      }
      degenerate.push_back(std::move(row));
    }
  }

  double total = 1.0;
  for (const auto &row : degenerate)
    total *= static_cast<double>(row.options.size());

  BdRegularityReport report;
  report.complete = total <= static_cast<double>(enumerate_cap);
  report.min_sigma = kInf;
  if (layout.size == 0) {
    report.regular = true;
    return report;
  }

  const Index cx = 0;
  const Index cy = kind == OperatorKind::Reduced ? -1 : n;
  const Index cl = kind == OperatorKind::Reduced ? n : 2 * n;

  std::vector<std::size_t> choice(degenerate.size(), 0);
  const int limit =
      report.complete ? static_cast<int>(total) : enumerate_cap;
  for (int count = 0; count < limit; ++count) {
    Matrix element = base;
    for (std::size_t k = 0; k < degenerate.size(); ++k) {
      const DegenerateRow &row = degenerate[k];
      const RowOption &opt = row.options[choice[k]];
      if (row.is_constraint) {
        const Index r = layout.ineq + row.index;
        element.row(r).setZero();
        element.row(r).segment(cx, n) = opt.row_x.transpose();
        element(r, cl + row.index) = opt.diag_a;
      } else {
        const Index r = layout.compl_block + row.index;
        element.row(r).setZero();
        element(r, cx + row.index) = opt.diag_a;
        element(r, cy + row.index) = opt.diag_b;
      }
    }
    Eigen::JacobiSVD<Matrix> svd(element);
    const double sigma = svd.singularValues().minCoeff();
    report.min_sigma = std::min(report.min_sigma, sigma);
    ++report.elements_checked;

    // mixed-radix increment over the option choices
    for (std::size_t k = 0; k < degenerate.size(); ++k) {
      if (++choice[k] < degenerate[k].options.size())
        break;
      choice[k] = 0;
    }
  }
  report.regular = report.min_sigma > 1e-10;
  return report;
}

namespace {

struct RestrictedCandidate {
  Vector x;
  Vector lambda;
  Vector mu;
};

// Newton with simple norm backtracking on the stationarity system of the
// support-and-active-set restricted smooth problem.
std::optional<RestrictedCandidate>
solve_restricted(const SpoProblem &problem, const IndexList &support,
                 const IndexList &active, const Vector &u0) {
  const Index q = static_cast<Index>(support.size());
  const Index a = static_cast<Index>(active.size());
  const Index p = problem.p;
  const Index dim = q + a + p;

  Vector v = Vector::Zero(dim);
  v.head(q) = u0;

  auto embed = [&](const Vector &u) {
    Vector x = Vector::Zero(problem.n);
    for (Index k = 0; k < q; ++k)
      x[support[static_cast<std::size_t>(k)]] = u[k];
    return x;
  };
  auto lambda_full = [&](const Vector &lam_a) {
    Vector lambda = Vector::Zero(problem.m);
    for (Index k = 0; k < a; ++k)
      lambda[active[static_cast<std::size_t>(k)]] = lam_a[k];
    return lambda;
  };

  auto evaluate = [&](const Vector &vv, Vector &f_out, Matrix *jac) {
    const Vector x = embed(vv.head(q));
    const Vector lambda = lambda_full(vv.segment(q, a));
    const Vector mu = vv.tail(p);
    const LagrangianValue lag = lagrangian_sp(problem, x, lambda, mu);
    const ConstraintValue g = problem.eval_g(x);
    const ConstraintValue h = problem.eval_h(x);

    f_out.resize(dim);
    for (Index k = 0; k < q; ++k)
      f_out[k] = lag.gradient[support[static_cast<std::size_t>(k)]];
    for (Index k = 0; k < a; ++k)
      f_out[q + k] = g.values[active[static_cast<std::size_t>(k)]];
    f_out.tail(p) = h.values;

    if (jac) {
      jac->setZero(dim, dim);
      for (Index r = 0; r < q; ++r)
        for (Index c = 0; c < q; ++c)
          (*jac)(r, c) = lag.hessian(support[static_cast<std::size_t>(r)],
                                     support[static_cast<std::size_t>(c)]);
      for (Index r = 0; r < q; ++r) {
        for (Index k = 0; k < a; ++k)
          (*jac)(r, q + k) =
              g.jacobian(active[static_cast<std::size_t>(k)],
                         support[static_cast<std::size_t>(r)]);
        for (Index i = 0; i < p; ++i)
          (*jac)(r, q + a + i) =
              h.jacobian(i, support[static_cast<std::size_t>(r)]);
      }
      for (Index k = 0; k < a; ++k)
        for (Index c = 0; c < q; ++c)
          (*jac)(q + k, c) = g.jacobian(active[static_cast<std::size_t>(k)],
                                        support[static_cast<std::size_t>(c)]);
      for (Index i = 0; i < p; ++i)
        for (Index c = 0; c < q; ++c)
          (*jac)(q + a + i, c) =
              h.jacobian(i, support[static_cast<std::size_t>(c)]);
    }
  };

  Vector f;
  Matrix jac;
  evaluate(v, f, nullptr);
  double fnorm = f.norm();
  for (int iter = 0; iter < 60 && fnorm > 1e-12; ++iter) {
    evaluate(v, f, &jac);
    const std::optional<Vector> d = newton::linear_solve(jac, -f);
    if (!d)
      return std::nullopt;
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 24; ++bt, t *= 0.5) {
      Vector trial = v + t * *d;
      Vector f_trial;
      evaluate(trial, f_trial, nullptr);
      const double trial_norm = f_trial.norm();
      if (std::isfinite(trial_norm) && trial_norm <= (1.0 - 1e-4 * t) * fnorm) {
        v = std::move(trial);
        fnorm = trial_norm;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      return std::nullopt;
  }
  if (!(fnorm <= 1e-10))
    return std::nullopt;

  RestrictedCandidate out;
  out.x = embed(v.head(q));
  out.lambda = lambda_full(v.segment(q, a));
  out.mu = v.tail(p);
  return out;
}

} // namespace

OracleResult brute_force_oracle(const SpoProblem &problem, double delta) {
  if (problem.n > 12)
    throw std::invalid_argument("brute_force_oracle: n must be at most 12");
  if (problem.m > 8)
    throw std::invalid_argument("brute_force_oracle: m must be at most 8");

  const Index n = problem.n, m = problem.m;
  OracleResult result;
  Rng rng(987654321u);

  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    IndexList support;
    for (Index i = 0; i < n; ++i)
      if (mask & (1u << i))
        support.push_back(i);
    const Index q = static_cast<Index>(support.size());

    bool found_any = false;
    for (std::uint32_t amask = 0; amask < (1u << m); ++amask) {
      IndexList active;
      for (Index j = 0; j < m; ++j)
        if (amask & (1u << j))
          active.push_back(j);

      std::vector<Vector> starts;
      starts.push_back(Vector::Zero(q));
      starts.push_back(Vector::Constant(q, 0.5));
      starts.push_back(Vector::Constant(q, -0.5));
      for (int s = 0; s < 2; ++s) {
        Vector u(q);
        for (Index k = 0; k < q; ++k)
          u[k] = rng.normal();
        starts.push_back(u);
      }

      for (const Vector &u0 : starts) {
        auto candidate = solve_restricted(problem, support, active, u0);
        if (!candidate)
          continue;
        found_any = true;

        // exact-zero snapping keeps the delta = 0 semantics clean
        for (Index i = 0; i < n; ++i)
          if (std::abs(candidate->x[i]) < 1e-9)
            candidate->x[i] = 0.0;

        bool kkt_ok = true;
        for (Index j = 0; j < m; ++j) {
          if (candidate->lambda[j] < -1e-9) {
            kkt_ok = false;
            break;
          }
          candidate->lambda[j] = std::max(candidate->lambda[j], 0.0);
        }
        if (kkt_ok && m > 0) {
          const Vector g = problem.eval_g(candidate->x).values;
          for (Index j = 0; j < m; ++j)
            if (g[j] > 1e-9) {
              kkt_ok = false;
              break;
            }
        }
        if (!kkt_ok)
          continue;
        if (kkt::s_stationarity_residual(problem, candidate->x,
                                         candidate->lambda, candidate->mu,
                                         0.0) > 1e-9)
          continue;

        const bool duplicate = std::any_of(
            result.stationary_points.begin(), result.stationary_points.end(),
            [&](const OraclePoint &pt) {
              return (pt.x - candidate->x).lpNorm<Eigen::Infinity>() <= 1e-7;
            });
        if (duplicate)
          continue;

        OraclePoint point;
        point.x = candidate->x;
        point.lambda = candidate->lambda;
        point.mu = candidate->mu;
        point.f_value = problem.eval_f(point.x).value;
        point.objective = point.f_value +
                          problem.rho *
                              static_cast<double>(l0_norm(point.x, delta));
        point.support = support_set(point.x, delta);
        result.stationary_points.push_back(std::move(point));
      }
    }
    if (!found_any)
      result.failures.push_back({support, "no stationary point found"});
  }

  // local-minimality by comparison against nearby competitors
  for (auto &pt : result.stationary_points) {
    bool local = true;
    for (const auto &other : result.stationary_points) {
      if (&other == &pt)
        continue;
      if ((other.x - pt.x).norm() <= 1e-3 &&
          other.objective < pt.objective - 1e-9) {
        local = false;
        break;
      }
    }
    pt.classification = local ? OracleClassification::LocalMin
                              : OracleClassification::SStationaryOnly;
  }

  for (std::size_t i = 0; i < result.stationary_points.size(); ++i) {
    if (result.global_min_index < 0 ||
        result.stationary_points[i].objective <
            result.stationary_points[static_cast<std::size_t>(
                                         result.global_min_index)]
                .objective)
      result.global_min_index = static_cast<Index>(i);
  }
  return result;
}

} // namespace spo::analysis
