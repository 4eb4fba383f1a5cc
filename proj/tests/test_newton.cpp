#include "spo/newton.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace spo;
using namespace spo::newton;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (const double value : values)
    v[i++] = value;
  return v;
}

} // namespace

TEST_CASE("linear_solve") {
  CHECK(linear_solve(Matrix::Identity(3, 3), vec({1, 2, 3}))
            ->isApprox(vec({1, 2, 3})));

  Matrix permuted(2, 2);
  permuted << 0, 1, 1, 0; // needs pivoting
  CHECK(linear_solve(permuted, vec({1, 2}))->isApprox(vec({2, 1})));

  Matrix singular(2, 2);
  singular << 1, 2, 2, 4;
  CHECK(!linear_solve(singular, vec({1, 1})).has_value());

  CHECK(linear_solve(Matrix::Zero(0, 0), Vector::Zero(0)).has_value());
  CHECK_THROWS_AS(linear_solve(Matrix::Zero(2, 3), vec({1, 2})),
                  std::invalid_argument);
}

TEST_CASE("default_init") {
  const SpoProblem problem = testing::quadratic_target(vec({2, 3}), 1.0);
  const PrimalDualPoint z = default_init(problem, vec({1, 0}));
  CHECK(z.x.isApprox(vec({1, 0})));
  CHECK(z.y.isApprox(vec({1, 1})));
  CHECK(z.lambda.size() == 0);
  CHECK(z.mu.size() == 0);
  CHECK(z.gamma.isApprox(vec({0, 0})));

  SpoProblem empty;
  empty.n = 0;
  const PrimalDualPoint z0 = default_init(empty, Vector::Zero(0));
  CHECK(z0.x.size() == 0);

  CHECK_THROWS_AS(default_init(problem, Vector::Zero(3)),
                  std::invalid_argument);
}

TEST_CASE("solve lands on a stationary support pattern") {
  const Vector a = vec({2, 3});
  const SpoProblem problem = testing::quadratic_target(a, 1.0);
  // for f = 1/2||x - a||^2 the stationary points zero out subsets of a
  const std::vector<Vector> stationary{vec({0, 0}), vec({2, 0}), vec({0, 3}),
                                       vec({2, 3})};

  for (const OperatorKind kind : {OperatorKind::Full, OperatorKind::Reduced}) {
    NewtonOptions options;
    options.kind = kind;
    const SolveReport report = solve(problem, vec({1, 0}), options);
    REQUIRE(report.status == SolveStatus::Converged);
    CHECK(report.iterations <= 10);
    CHECK(report.residual_history.back() <= 1e-6);
    CHECK(report.residual_history.size() ==
          static_cast<std::size_t>(report.iterations) + 1);

    bool matched = false;
    for (const Vector &target : stationary)
      if ((report.final_point.x - target).norm() <= 1e-6)
        matched = true;
    CHECK(matched);
  }
}

TEST_CASE("already stationary start terminates immediately") {
  const SpoProblem problem = testing::quadratic_target(vec({2, 3}), 1.0);
  NewtonOptions options;
  const SolveReport report = solve(problem, vec({2, 3}), options);
  CHECK(report.status == SolveStatus::Converged);
  CHECK(report.iterations == 0);
  CHECK(report.residual_history.size() == 1);
  CHECK(report.objective == doctest::Approx(2.0));
  CHECK(report.l0_count == 2);
}

TEST_CASE("oversized first step triggers the safety stop") {
  const SpoProblem problem = testing::quadratic_target(vec({300, 0}), 1.0);
  NewtonOptions options;
  const SolveReport report = solve(problem, vec({1, 0}), options);
  CHECK(report.status == SolveStatus::StepBlowup);
  CHECK(report.iterations == 0);
  CHECK(report.residual_history.size() == 1);
}

TEST_CASE("singular operator Jacobian is reported") {
  // duplicated equality rows make every operator Jacobian singular
  SpoProblem problem = testing::quadratic_target(vec({1, 1}), 1.0);
  problem.p = 2;
  problem.h_oracle = [](const Vector &x) {
    ConstraintValue out;
    out.values = Vector::Constant(2, x.sum() - 1.0);
    out.jacobian = Matrix::Ones(2, x.size());
    out.hessians.assign(2, Matrix::Zero(x.size(), x.size()));
    return out;
  };
  NewtonOptions options;
  const SolveReport report = solve(problem, vec({2, 2}), options);
  CHECK(report.status == SolveStatus::LinearSolveFailure);
}

TEST_CASE("iteration cap is honored") {
  const SpoProblem problem = testing::random_nlp(4, 2, 1, 5);
  NewtonOptions options;
  options.max_iter = 3;
  options.step_safety = 1e9; // keep the safeguard out of the way
  const SolveReport report = solve(problem, Vector::Ones(4), options);
  CHECK(report.iterations <= 3);
  if (report.status == SolveStatus::MaxIterations) {
    CHECK(report.iterations == 3);
    CHECK(report.residual_history.size() == 4);
  }
}

TEST_CASE("reduced final point carries the eliminated y") {
  const SpoProblem problem = testing::quadratic_target(vec({2, 3}), 1.0);
  NewtonOptions options;
  options.kind = OperatorKind::Reduced;
  const SolveReport report = solve(problem, vec({2, 3}), options);
  const Vector expected =
      Vector::Ones(2) -
      report.final_point.gamma.cwiseProduct(report.final_point.x);
  CHECK(report.final_point.y.isApprox(expected, 1e-12));
}

TEST_CASE("local quadratic residual contraction on a regular instance") {
  Rng rng(71);
  int observed = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    // strongly convex quadratic with full-support solution: SP-LICQ and the
    // strong second-order condition hold at the limit
    const Index n = 4;
    Matrix b(n, n);
    Rng mat_rng(seed);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        b(i, j) = mat_rng.normal();
    const Matrix m = b.transpose() * b + Matrix::Identity(n, n);
    const Vector a = Vector::Ones(n) * 2.0;

    SpoProblem problem;
    problem.n = n;
    problem.rho = 1.0;
    problem.f_oracle = [m, a](const Vector &x) {
      ObjectiveValue out;
      out.value = 0.5 * (x - a).dot(m * (x - a));
      out.gradient = m * (x - a);
      out.hessian = m;
      return out;
    };

    PrimalDualPoint star;
    star.x = a;
    star.y = Vector::Zero(n);
    star.lambda = Vector();
    star.mu = Vector();
    star.gamma = Vector::Ones(n) / 2.0; // rho / x_i

    PrimalDualPoint z0 = star;
    z0.x += 1e-2 * testing::random_vector(rng, n);
    z0.y += 1e-2 * testing::random_vector(rng, n);
    z0.gamma += 1e-2 * testing::random_vector(rng, n);

    NewtonOptions options;
    options.eps = 1e-13;
    const SolveReport report = solve_from(problem, z0, options);
    const auto &history = report.op_residual_history;
    for (std::size_t k = 0; k + 1 < history.size(); ++k) {
      if (history[k] < 1e-3 && history[k] > 1e-14) {
        CHECK(history[k + 1] <= 0.1 * history[k]);
        ++observed;
      }
    }
  }
  CHECK(observed > 0);
}
