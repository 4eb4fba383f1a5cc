#include "spo/kkt.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace spo;
using namespace spo::kkt;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (const double value : values)
    v[i++] = value;
  return v;
}

PrimalDualPoint make_point(const Vector &x, const Vector &y,
                           const Vector &lambda, const Vector &mu,
                           const Vector &gamma) {
  PrimalDualPoint point;
  point.x = x;
  point.y = y;
  point.lambda = lambda;
  point.mu = mu;
  point.gamma = gamma;
  return point;
}

Vector stack_point(const SpoProblem &problem, const PrimalDualPoint &point,
                   OperatorKind kind) {
  if (kind == OperatorKind::Reduced) {
    Vector z(2 * problem.n + problem.m + problem.p);
    z << point.x, point.lambda, point.mu, point.gamma;
    return z;
  }
  Vector z(3 * problem.n + problem.m + problem.p);
  z << point.x, point.y, point.lambda, point.mu, point.gamma;
  return z;
}

PrimalDualPoint unstack_point(const SpoProblem &problem, const Vector &z,
                              OperatorKind kind) {
  const Index n = problem.n, m = problem.m, p = problem.p;
  PrimalDualPoint point;
  if (kind == OperatorKind::Reduced) {
    point.x = z.segment(0, n);
    point.y = Vector::Ones(n);
    point.lambda = z.segment(n, m);
    point.mu = z.segment(n + m, p);
    point.gamma = z.segment(n + m + p, n);
  } else {
    point.x = z.segment(0, n);
    point.y = z.segment(n, n);
    point.lambda = z.segment(2 * n, m);
    point.mu = z.segment(2 * n + m, p);
    point.gamma = z.segment(2 * n + m + p, n);
  }
  return point;
}

} // namespace

TEST_CASE("full residual vanishes at hand-built KKT points") {
  const SpoProblem problem = testing::quadratic_target(vec({2, 3}), 1.0);

  const auto z1 = make_point(vec({2, 3}), vec({0, 0}), Vector(), Vector(),
                             vec({0.5, 1.0 / 3.0}));
  CHECK(residual(problem, z1, OperatorKind::Full).norm() ==
        doctest::Approx(0.0).epsilon(1e-14));

  const auto z2 =
      make_point(vec({0, 0}), vec({1, 1}), Vector(), Vector(), vec({2, 3}));
  CHECK(residual(problem, z2, OperatorKind::Full).norm() ==
        doctest::Approx(0.0).epsilon(1e-14));

  CHECK(residual(problem, z1, OperatorKind::Reduced).norm() ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("residual layout sizes") {
  const SpoProblem problem = testing::random_nlp(3, 2, 1, 5);
  PrimalDualPoint point = make_point(Vector::Ones(3), Vector::Ones(3),
                                     Vector::Ones(2), Vector::Ones(1),
                                     Vector::Ones(3));
  CHECK(residual(problem, point, OperatorKind::Full).vector.size() == 12);
  CHECK(residual(problem, point, OperatorKind::Reduced).vector.size() == 9);
  CHECK_THROWS_AS(residual(problem, point, OperatorKind::Complementary),
                  std::invalid_argument);
}

TEST_CASE("jacobian fixed blocks") {
  const SpoProblem problem = testing::random_nlp(3, 2, 1, 9);
  Rng rng(13);
  PrimalDualPoint point = make_point(
      testing::random_vector(rng, 3), testing::random_vector(rng, 3),
      testing::random_vector(rng, 2), testing::random_vector(rng, 1),
      testing::random_vector(rng, 3));

  const Matrix full = jacobian(problem, point, OperatorKind::Full);
  const BlockLayout layout = block_layout(problem, OperatorKind::Full);
  CHECK(full.block(layout.stat_y, problem.n, 3, 3)
            .isApprox(problem.rho * Matrix::Identity(3, 3)));

  const Matrix reduced = jacobian(problem, point, OperatorKind::Reduced);
  const Matrix expected =
      lagrangian_sp(problem, point.x, point.lambda, point.mu).hessian -
      Matrix((point.gamma.cwiseAbs2() / problem.rho).asDiagonal());
  CHECK(reduced.topLeftCorner(3, 3).isApprox(expected, 1e-12));
}

TEST_CASE("jacobian matches finite differences at differentiable points") {
  Rng rng(17);
  for (const OperatorKind kind :
       {OperatorKind::Full, OperatorKind::Reduced,
        OperatorKind::Complementary}) {
    for (const ncp::NcpKind ncp_kind :
         {ncp::NcpKind::FischerBurmeister, ncp::NcpKind::Minimum}) {
      SpoProblem problem = testing::random_nlp(3, 2, 1, 31);
      problem.nonneg = kind == OperatorKind::Complementary;
      for (int trial = 0; trial < 5; ++trial) {
        // keep every NCP argument pair away from its kink
        PrimalDualPoint point = make_point(
            testing::random_vector(rng, 3), testing::random_vector(rng, 3),
            testing::random_vector(rng, 2), testing::random_vector(rng, 1),
            testing::random_vector(rng, 3));
        for (Index i = 0; i < 3; ++i) {
          if (std::abs(point.x[i]) < 0.3)
            point.x[i] += point.x[i] >= 0 ? 0.5 : -0.5;
          if (std::abs(point.y[i]) < 0.3)
            point.y[i] += point.y[i] >= 0 ? 0.5 : -0.5;
        }
        if (ncp_kind == ncp::NcpKind::Minimum) {
          const Vector g = problem.eval_g(point.x).values;
          bool near_tie = false;
          for (Index j = 0; j < 2; ++j)
            if (std::abs(-g[j] - point.lambda[j]) < 0.05)
              near_tie = true;
          for (Index i = 0; i < 3; ++i)
            if (std::abs(point.x[i] - point.y[i]) < 0.05)
              near_tie = true;
          if (near_tie)
            continue;
        }

        const Matrix jac = jacobian(problem, point, kind, ncp_kind);
        const Matrix fd = testing::fd_jacobian(
            [&](const Vector &z) {
              return residual(problem, unstack_point(problem, z, kind), kind,
                              ncp_kind)
                  .vector;
            },
            stack_point(problem, point, kind));
        CHECK((jac - fd).norm() <= 1e-5 * std::max(1.0, jac.norm()));
      }
    }
  }
}

TEST_CASE("recover_multipliers") {
  SpoProblem problem;
  problem.n = 2;
  problem.rho = 1.0;
  problem.f_oracle = [](const Vector &x) {
    Vector g(2);
    g << 0.0, -3.0;
    return ObjectiveValue{0.0, g, Matrix::Zero(x.size(), x.size())};
  };
  const MultiplierSet set =
      recover_multipliers(problem, vec({0.5, 0}), Vector(), Vector(), 1e-4);
  CHECK(set.y_star.isApprox(vec({0, 1})));
  CHECK(set.gamma_star.isApprox(vec({2, 3})));
  CHECK(set.sigma_star.isApprox(vec({0, 1})));

  SpoProblem plain = testing::quadratic_target(vec({0, 0}), 2.0);
  const MultiplierSet full_support =
      recover_multipliers(plain, vec({1, 1}), Vector(), Vector(), 1e-4);
  CHECK(full_support.y_star.isApprox(vec({0, 0})));
  CHECK(full_support.gamma_star.isApprox(vec({2, 2})));
  CHECK(full_support.sigma_star.isApprox(vec({0, 0})));

  SpoProblem linear;
  linear.n = 2;
  linear.rho = 1.0;
  const Vector a = vec({0.7, -0.2});
  linear.f_oracle = [a](const Vector &x) {
    return ObjectiveValue{a.dot(x), a, Matrix::Zero(x.size(), x.size())};
  };
  const MultiplierSet empty_support =
      recover_multipliers(linear, vec({0, 0}), Vector(), Vector(), 1e-4);
  CHECK(empty_support.y_star.isApprox(vec({1, 1})));
  CHECK(empty_support.gamma_star.isApprox(-a));
  CHECK(empty_support.sigma_star.isApprox(vec({1, 1})));
}

TEST_CASE("s_stationarity_residual on the diagonal quadratic") {
  const SpoProblem problem = testing::quadratic_target(vec({2, 3}), 1.0);
  CHECK(s_stationarity_residual(problem, vec({2, 3}), Vector(), Vector(),
                                1e-4) == doctest::Approx(0.0));
  CHECK(s_stationarity_residual(problem, vec({0, 0}), Vector(), Vector(),
                                1e-4) == doctest::Approx(0.0));
  CHECK(s_stationarity_residual(problem, vec({2, 0}), Vector(), Vector(),
                                1e-4) == doctest::Approx(0.0));
  CHECK(s_stationarity_residual(problem, vec({1, 0}), Vector(), Vector(),
                                1e-4) == doctest::Approx(1.0));
}

TEST_CASE("s_stationarity_residual adds the sign block for nonneg problems") {
  SpoProblem problem = testing::quadratic_target(vec({-2, 3}), 1.0);
  problem.nonneg = true;
  // x = (-2, 3) is stationary for f but violates the sign constraint
  const double res = s_stationarity_residual(problem, vec({-2, 3}), Vector(),
                                             Vector(), 1e-4);
  CHECK(res == doctest::Approx(2.0));
}

TEST_CASE("reduction consistency: eliminating y reproduces the full residual") {
  Rng rng(41);
  const SpoProblem problem = testing::random_nlp(4, 2, 1, 77);
  for (int trial = 0; trial < 20; ++trial) {
    PrimalDualPoint w = make_point(
        testing::random_vector(rng, 4), Vector::Zero(4),
        testing::random_vector(rng, 2), testing::random_vector(rng, 1),
        testing::random_vector(rng, 4));
    const Vector reduced = residual(problem, w, OperatorKind::Reduced).vector;

    PrimalDualPoint z = w;
    z.y = Vector::Ones(4) - w.gamma.cwiseProduct(w.x) / problem.rho;
    const KktResidual full = residual(problem, z, OperatorKind::Full);

    Vector full_without_y(reduced.size());
    full_without_y << full.vector.segment(full.layout.stat_x, 4),
        full.vector.segment(full.layout.ineq, 2),
        full.vector.segment(full.layout.eq, 1),
        full.vector.segment(full.layout.compl_block, 4);
    CHECK((reduced - full_without_y).norm() <= 1e-12);
  }
}

TEST_CASE("split_variables recombines values and derivatives") {
  const Vector a = vec({1.5, -2.0, 0.0});
  const SpoProblem problem = testing::quadratic_target(a, 1.0);
  const SplitProblem split = split_variables(problem);
  CHECK(split.lifted.n == 6);
  CHECK(split.lifted.nonneg);

  const Vector embedded = SplitProblem::embed(a);
  CHECK(SplitProblem::recover(embedded).isApprox(a));
  CHECK(split.lifted.eval_f(embedded).value == doctest::Approx(0.0));

  Rng rng(2);
  const Vector u = testing::random_vector(rng, 6).cwiseAbs();
  const ObjectiveValue lifted_f = split.lifted.eval_f(u);
  const ObjectiveValue base_f = problem.eval_f(SplitProblem::recover(u));
  CHECK(lifted_f.gradient.head(3).isApprox(base_f.gradient));
  CHECK(lifted_f.gradient.tail(3).isApprox(-base_f.gradient));

  CHECK_THROWS_AS(split_variables(split.lifted), std::invalid_argument);
}

TEST_CASE("split complementary system size is 6n + m + p") {
  // free-variable problem with p equality rows, lifted for the
  // complementary operator
  SpoProblem problem = testing::random_nlp(5, 0, 2, 3);
  const SplitProblem split = split_variables(problem);
  PrimalDualPoint z;
  z.x = SplitProblem::embed(Vector::Ones(5));
  z.y = Vector::Ones(10);
  z.lambda = Vector();
  z.mu = Vector::Zero(2);
  z.gamma = Vector::Zero(10);
  const KktResidual r =
      residual(split.lifted, z, OperatorKind::Complementary);
  CHECK(r.vector.size() == 6 * 5 + 0 + 2);
  CHECK(jacobian(split.lifted, z, OperatorKind::Complementary).rows() ==
        6 * 5 + 2);
}

TEST_CASE("spolin residual vanishes with recovered multipliers") {
  const SpoProblem problem = testing::quadratic_target(vec({2, 3}), 1.0);
  PrimalDualPoint point = make_point(vec({2, 3}), vec({0, 0}), Vector(),
                                     Vector(), vec({0.5, 1.0 / 3.0}));
  point.sigma = vec({0, 0});
  CHECK(residual_spolin(problem, point).norm() ==
        doctest::Approx(0.0).epsilon(1e-14));

  // sigma perturbation feeds two rows
  PrimalDualPoint perturbed = point;
  (*perturbed.sigma)[0] += 0.1;
  CHECK(residual_spolin(problem, perturbed, ncp::NcpKind::Minimum).norm() ==
        doctest::Approx(0.1 * std::sqrt(2.0)));

  PrimalDualPoint no_sigma = point;
  no_sigma.sigma.reset();
  CHECK_THROWS_AS(residual_spolin(problem, no_sigma), std::invalid_argument);
}

TEST_CASE("spolin and quadratic-form KKT points coincide") {
  Rng rng(51);
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const SpoProblem problem = testing::random_nlp(4, 0, 0, seed);
    // build a KKT point from an arbitrary support by solving for the
    // stationary multipliers on it
    Vector x = testing::random_vector(rng, 4);
    x[1] = 0.0;
    // zero the support gradient by shifting: the quadratic-form residual is
    // not zero for arbitrary x, so instead confirm the equivalence of the
    // two residuals' zero sets via recover_multipliers on both sides
    const MultiplierSet set =
        recover_multipliers(problem, x, Vector(), Vector(), 0.0);
    PrimalDualPoint z = make_point(x, set.y_star, Vector(), Vector(),
                                   set.gamma_star);
    z.sigma = set.sigma_star;
    const double full_norm =
        residual(problem, z, OperatorKind::Full).norm();
    const double lin_norm = residual_spolin(problem, z).norm();
    // both systems see exactly the same defect: the support gradient
    CHECK(full_norm == doctest::Approx(lin_norm).epsilon(1e-10));
  }
}

TEST_CASE("complementary element maps into the full subdifferential") {
  // at complementarity points with empty bi-active set,
  // diag-scaling the last block of H_C reproduces the full operator element
  Rng rng(61);
  SpoProblem problem = testing::random_nlp(4, 2, 1, 99);
  problem.nonneg = true;
  for (int trial = 0; trial < 10; ++trial) {
    PrimalDualPoint z = make_point(
        testing::random_vector(rng, 4).cwiseAbs(), Vector::Zero(4),
        testing::random_vector(rng, 2), testing::random_vector(rng, 1),
        testing::random_vector(rng, 4));
    // complementary pair: x off the support carries y > 0
    for (Index i = 0; i < 4; ++i) {
      if (i % 2 == 0) {
        z.x[i] = 0.0;
        z.y[i] = 0.5 + z.x.cwiseAbs().maxCoeff() * 0.0 +
                 std::abs(testing::random_vector(rng, 1)[0]) + 0.2;
      } else {
        z.x[i] += 0.3;
        z.y[i] = 0.0;
      }
    }

    const Matrix h_c =
        jacobian(problem, z, OperatorKind::Complementary,
                 ncp::NcpKind::FischerBurmeister);
    const Matrix h_full = jacobian(problem, z, OperatorKind::Full);
    const BlockLayout layout = block_layout(problem, OperatorKind::Full);

    Vector c_x(4), c_y(4);
    for (Index i = 0; i < 4; ++i) {
      const ncp::BsubRow row = ncp::phi_fb_bsub(z.x[i], z.y[i]);
      c_x[i] = row.d_a;
      c_y[i] = row.d_b;
    }
    Matrix scale = Matrix::Identity(layout.size, layout.size);
    scale.bottomRightCorner(4, 4) =
        Matrix(((c_x + c_y).cwiseProduct(z.x + z.y)).asDiagonal());
    CHECK((scale * h_c - h_full).norm() <= 1e-10 * h_full.norm());
  }
}
