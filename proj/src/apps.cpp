#include "spo/apps.hpp"

#include "spo/rng.hpp"

#include <cmath>
#include <istream>
#include <sstream>

namespace spo::apps {

namespace {

void require(bool ok, const char *what) {
  if (!ok)
    throw std::invalid_argument(what);
}

// log(1 + exp(t)) without overflow.
double log1p_exp(double t) {
  if (t > 30.0)
    return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

// logistic function, evaluated from the side that cannot overflow
double sigmoid(double t) {
  if (t >= 0.0)
    return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

ConstraintValue linear_constraints(const Matrix &a, const Vector &b,
                                   const Vector &x) {
  ConstraintValue out;
  out.values = a * x - b;
  out.jacobian = a;
  out.hessians.assign(static_cast<std::size_t>(a.rows()),
                      Matrix::Zero(x.size(), x.size()));
  return out;
}

} // namespace

const char *family_name(const Instance &instance) {
  if (std::holds_alternative<QuadraticInstance>(instance))
    return "quadratic";
  if (std::holds_alternative<PortfolioInstance>(instance))
    return "portfolio";
  if (std::holds_alternative<SensingInstance>(instance))
    return "sensing";
  return "logistic";
}

PortfolioInstance gen_portfolio(Index n, std::uint64_t seed) {
  require(n >= 2, "gen_portfolio: n must be at least 2");
  Rng rng(seed);

  // One-factor covariance with heterogeneous idiosyncratic volatility.
  // Minimum-variance weights then concentrate on the few calmest assets,
  // the shape sparse selection is about; an isotropic random covariance
  // would spread 1/n weight over every asset instead. The volatility scale
  // keeps the variance term comparable to the sparsity penalty, and the
  // payout level is met by every single-asset portfolio, so no support
  // pattern is wedged against the inequality.
  Vector beta_load(n), idio(n);
  for (Index i = 0; i < n; ++i)
    beta_load[i] = rng.uniform(0.5, 1.5);
  for (Index i = 0; i < n; ++i) {
    const double vol = rng.uniform(0.5, 5.0);
    idio[i] = vol * vol;
  }
  constexpr double kMarketVol = 2.0;

  PortfolioInstance inst;
  inst.q = kMarketVol * kMarketVol * beta_load * beta_load.transpose();
  inst.q.diagonal() += idio;
  inst.q += 1e-4 * Matrix::Identity(n, n);
  inst.alpha.resize(n);
  for (Index i = 0; i < n; ++i)
    inst.alpha[i] = rng.uniform(0.5, 1.5);
  inst.beta = 0.9 * inst.alpha.minCoeff();
  inst.seed = seed;
  return inst;
}

SensingInstance gen_sensing(Index n, Index m, Index p, Index s,
                            std::uint64_t seed) {
  require(s >= 0 && s <= n, "gen_sensing: need 0 <= s <= n");
  require(p + m >= 1, "gen_sensing: need p + m >= 1");
  Rng rng(seed);

  const Index rows = p + m;
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  Matrix sa(rows, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < rows; ++i)
      sa(i, j) = scale * rng.normal();

  // Support amplitudes are kept away from the soft-threshold level of the
  // l1 stage across the whole benchmark penalty grid: entries at the
  // shrinkage scale would start the Newton methods inside the
  // complementarity kinks.
  constexpr double kAmplitude = 24.0;
  Vector xbar = Vector::Zero(n);
  const std::vector<Index> order = rng.permutation(n);
  for (Index k = 0; k < s; ++k) {
    const double z = rng.normal();
    xbar[order[static_cast<std::size_t>(k)]] =
        (z >= 0.0 ? 1.0 : -1.0) * kAmplitude * (1.0 + std::abs(z));
  }
  const Vector sb = sa * xbar;

  const std::vector<Index> rowperm = rng.permutation(rows);
  SensingInstance inst;
  inst.a.resize(m, n);
  inst.b.resize(m);
  inst.c.resize(p, n);
  inst.d.resize(p);
  for (Index i = 0; i < m; ++i) {
    const Index r = rowperm[static_cast<std::size_t>(i)];
    inst.a.row(i) = sa.row(r);
    inst.b[i] = sb[r];
  }
  for (Index i = 0; i < p; ++i) {
    const Index r = rowperm[static_cast<std::size_t>(m + i)];
    inst.c.row(i) = sa.row(r);
    inst.d[i] = sb[r];
  }
  inst.xbar = xbar;
  inst.s = l0_norm(xbar, 0.0);
  inst.seed = seed;
  return inst;
}

LogisticInstance gen_logistic(Index n, Index m, Index s, std::uint64_t seed) {
  require(s >= 0 && s <= n, "gen_logistic: need 0 <= s <= n");
  Rng rng(seed);

  LogisticInstance inst;
  inst.x.resize(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i)
      inst.x(i, j) = rng.uniform(-1.0, 1.0);

  Vector w = Vector::Zero(n);
  const std::vector<Index> order = rng.permutation(n);
  for (Index k = 0; k < s; ++k)
    w[order[static_cast<std::size_t>(k)]] = 3.0 * rng.normal();

  inst.y.resize(m);
  for (Index i = 0; i < m; ++i) {
    const double prob = sigmoid(inst.x.row(i).dot(w));
    inst.y[i] = rng.uniform01() < prob ? 1.0 : -1.0;
  }
  inst.seed = seed;
  return inst;
}

ObjectiveOracle logistic_oracles(const LogisticInstance &instance) {
  const Matrix x = instance.x;
  const Vector y = instance.y;
  return [x, y](const Vector &w) {
    const Index m = x.rows(), n = x.cols();
    ObjectiveValue out;
    out.value = 0.0;
    out.gradient = Vector::Zero(n);
    out.hessian = Matrix::Zero(n, n);
    const Vector scores = x * w;
    for (Index i = 0; i < m; ++i) {
      const double t = -y[i] * scores[i];
      out.value += log1p_exp(t);
      const double sig = sigmoid(t);
      out.gradient += (-y[i] * sig) * x.row(i).transpose();
      const double weight = sig * (1.0 - sig);
      if (weight > 0.0)
        out.hessian.selfadjointView<Eigen::Lower>().rankUpdate(
            x.row(i).transpose(), weight);
    }
    out.hessian.triangularView<Eigen::StrictlyUpper>() =
        out.hessian.transpose();
    return out;
  };
}

LogisticInstance parse_libsvm(std::istream &stream, bool scale_to_unit) {
  std::vector<double> labels;
  std::vector<std::vector<std::pair<Index, double>>> rows;
  Index max_index = 0;

  std::string line;
  Index line_no = 0;
  auto fail = [&](const std::string &what) {
    throw std::runtime_error("libsvm parse error at line " +
                             std::to_string(line_no) + ": " + what);
  };

  while (std::getline(stream, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos)
      continue;
    std::istringstream in(line);
    double label = 0.0;
    if (!(in >> label))
      fail("missing label");
    if (label == 0.0 || label == -1.0)
      label = -1.0;
    else if (label == 1.0)
      label = 1.0;
    else
      fail("label must be one of {0, -1, +1}");

    std::vector<std::pair<Index, double>> row;
    std::string token;
    Index prev_index = 0;
    while (in >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos)
        fail("expected <index>:<value>, got '" + token + "'");
      Index index = 0;
      double value = 0.0;
      try {
        index = static_cast<Index>(std::stoll(token.substr(0, colon)));
        value = std::stod(token.substr(colon + 1));
      } catch (const std::exception &) {
        fail("cannot parse feature '" + token + "'");
      }
      if (index < 1)
        fail("indices are 1-based");
      if (index <= prev_index)
        fail("indices must be strictly ascending");
      prev_index = index;
      max_index = std::max(max_index, index);
      row.emplace_back(index - 1, value);
    }
    labels.push_back(label);
    rows.push_back(std::move(row));
  }

  LogisticInstance inst;
  const Index m = static_cast<Index>(labels.size());
  inst.x = Matrix::Zero(m, max_index);
  inst.y.resize(m);
  for (Index i = 0; i < m; ++i) {
    inst.y[i] = labels[static_cast<std::size_t>(i)];
    for (const auto &[j, v] : rows[static_cast<std::size_t>(i)])
      inst.x(i, j) = v;
  }
  if (scale_to_unit) {
    for (Index j = 0; j < inst.x.cols(); ++j) {
      const double peak = inst.x.col(j).cwiseAbs().maxCoeff();
      if (peak > 0.0)
        inst.x.col(j) /= peak;
    }
  }
  return inst;
}

std::string serialize_libsvm(const LogisticInstance &instance) {
  std::ostringstream out;
  out.precision(17);
  for (Index i = 0; i < instance.x.rows(); ++i) {
    out << (instance.y[i] > 0.0 ? "+1" : "-1");
    for (Index j = 0; j < instance.x.cols(); ++j)
      if (instance.x(i, j) != 0.0)
        out << ' ' << (j + 1) << ':' << instance.x(i, j);
    out << '\n';
  }
  return out.str();
}

SpoProblem build_spo(const Instance &instance) {
  const double rho =
      std::visit([](const auto &inst) { return inst.rho; }, instance);
  require(rho > 0.0, "build_spo: rho must be positive");

  SpoProblem problem;

  if (const auto *quad = std::get_if<QuadraticInstance>(&instance)) {
    const Matrix q = quad->q;
    const Vector c = quad->c;
    problem.n = q.rows();
    problem.m = quad->a_in.rows();
    problem.p = quad->a_eq.rows();
    problem.rho = quad->rho;
    problem.nonneg = quad->nonneg;
    problem.f_oracle = [q, c](const Vector &x) {
      ObjectiveValue out;
      out.value = 0.5 * x.dot(q * x) + c.dot(x);
      out.gradient = q * x + c;
      out.hessian = q;
      return out;
    };
    if (problem.m > 0) {
      const Matrix a_in = quad->a_in;
      const Vector b_in = quad->b_in;
      problem.g_oracle = [a_in, b_in](const Vector &x) {
        return linear_constraints(a_in, b_in, x);
      };
    }
    if (problem.p > 0) {
      const Matrix a_eq = quad->a_eq;
      const Vector b_eq = quad->b_eq;
      problem.h_oracle = [a_eq, b_eq](const Vector &x) {
        return linear_constraints(a_eq, b_eq, x);
      };
    }
    QpPresolveForm form{q,          c,          quad->a_eq,
                        quad->b_eq, quad->a_in, quad->b_in,
                        quad->nonneg,
                        quad->nonneg ? L1Mode::AddLinear : L1Mode::Split};
    problem.presolve_form = form;
    return problem;
  }

  if (const auto *pf = std::get_if<PortfolioInstance>(&instance)) {
    const Index n = pf->q.rows();
    const Matrix q = 0.5 * (pf->q + pf->q.transpose());
    const Vector alpha = pf->alpha;
    const double beta = pf->beta;
    problem.n = n;
    problem.m = 1;
    problem.p = 1;
    problem.rho = pf->rho;
    problem.nonneg = true;
    problem.f_oracle = [q](const Vector &x) {
      ObjectiveValue out;
      out.value = 0.5 * x.dot(q * x);
      out.gradient = q * x;
      out.hessian = q;
      return out;
    };
    // payout requirement as beta - alpha^T x <= 0
    problem.g_oracle = [alpha, beta, n](const Vector &x) {
      ConstraintValue out;
      out.values = Vector::Constant(1, beta - alpha.dot(x));
      out.jacobian = -alpha.transpose();
      out.hessians.assign(1, Matrix::Zero(n, n));
      return out;
    };
    problem.h_oracle = [n](const Vector &x) {
      ConstraintValue out;
      out.values = Vector::Constant(1, x.sum() - 1.0);
      out.jacobian = Matrix::Ones(1, n);
      out.hessians.assign(1, Matrix::Zero(n, n));
      return out;
    };
    // the l1 term equals e^T x = 1 on the feasible set, so the plain QP
    // yields the surrogate solution
    QpPresolveForm form;
    form.q = q;
    form.c = Vector::Zero(n);
    form.a_eq = Matrix::Ones(1, n);
    form.b_eq = Vector::Ones(1);
    form.a_in = -alpha.transpose();
    form.b_in = Vector::Constant(1, -beta);
    form.nonneg = true;
    form.l1_mode = L1Mode::Skip;
    problem.presolve_form = form;
    return problem;
  }

  if (const auto *cs = std::get_if<SensingInstance>(&instance)) {
    const Matrix a = cs->a;
    const Vector b = cs->b;
    problem.n = a.cols();
    problem.m = 0;
    problem.p = cs->c.rows();
    problem.rho = cs->rho;
    problem.nonneg = false;
    const Matrix gram = a.transpose() * a;
    problem.f_oracle = [a, b, gram](const Vector &x) {
      ObjectiveValue out;
      const Vector r = a * x - b;
      out.value = 0.5 * r.squaredNorm();
      out.gradient = a.transpose() * r;
      out.hessian = gram;
      return out;
    };
    if (problem.p > 0) {
      const Matrix c = cs->c;
      const Vector d = cs->d;
      problem.h_oracle = [c, d](const Vector &x) {
        return linear_constraints(c, d, x);
      };
    }
    // The l1 surrogate ignores the noise-free rows and is solved as the
    // split QP in (x+, x-) >= 0. An interior-point pass keeps every entry
    // of x0 away from exact zero, which the x o y rows of the Newton
    // operators need at the first iterate.
    QpPresolveForm form;
    form.q = gram;
    form.c = -a.transpose() * b;
    form.a_eq = Matrix(0, problem.n);
    form.b_eq = Vector();
    form.a_in = Matrix(0, problem.n);
    form.b_in = Vector();
    form.nonneg = false;
    form.l1_mode = L1Mode::Split;
    problem.presolve_form = form;
    return problem;
  }

  const auto &logit = std::get<LogisticInstance>(instance);
  problem.n = logit.x.cols();
  problem.m = 0;
  problem.p = 0;
  problem.rho = logit.rho;
  problem.nonneg = false;
  problem.f_oracle = logistic_oracles(logit);
  CompositePresolveForm form;
  form.lipschitz_hint = 0.25 * logit.x.squaredNorm();
  problem.presolve_form = form;
  return problem;
}

} // namespace spo::apps
