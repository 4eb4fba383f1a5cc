#include "spo/ncp.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace spo;
using namespace spo::ncp;

TEST_CASE("phi values") {
  CHECK(phi(NcpKind::FischerBurmeister, 0, 0) == doctest::Approx(0.0));
  CHECK(phi(NcpKind::FischerBurmeister, 3, 4) == doctest::Approx(-2.0));
  CHECK(phi(NcpKind::Minimum, 1, 0) == doctest::Approx(0.0));
}

TEST_CASE("phi sign property on a grid") {
  for (double a = -2.0; a <= 2.0; a += 0.125) {
    for (double b = -2.0; b <= 2.0; b += 0.125) {
      const bool complementary = a >= 0.0 && b >= 0.0 && a * b == 0.0;
      for (const NcpKind kind : {NcpKind::FischerBurmeister, NcpKind::Minimum}) {
        const double value = phi(kind, a, b);
        if (complementary)
          CHECK(value == doctest::Approx(0.0).epsilon(1e-12));
        else
          CHECK(std::abs(value) > 1e-12);
      }
    }
  }
}

TEST_CASE("phi_fb_bsub branches") {
  const BsubRow origin = phi_fb_bsub(0, 0);
  CHECK(origin.d_a == doctest::Approx(-1.0 / std::sqrt(2.0) - 1.0));
  CHECK(origin.d_b == doctest::Approx(-1.0 / std::sqrt(2.0) - 1.0));

  const BsubRow regular = phi_fb_bsub(3, 4);
  CHECK(regular.d_a == doctest::Approx(-0.4));
  CHECK(regular.d_b == doctest::Approx(-0.2));

  const BsubRow boundary = phi_fb_bsub(0.7, 0);
  CHECK(boundary.d_a == doctest::Approx(0.0));
  CHECK(boundary.d_b == doctest::Approx(-1.0));

  const BsubRow other_axis = phi_fb_bsub(0, 1.3);
  CHECK(other_axis.d_a == doctest::Approx(-1.0));
  CHECK(other_axis.d_b == doctest::Approx(0.0));
}

TEST_CASE("phi_fb_bsub matches finite differences away from the origin") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    double a = rng.uniform(-2.0, 2.0);
    double b = rng.uniform(-2.0, 2.0);
    if (std::hypot(a, b) < 0.05)
      continue;
    const BsubRow row = phi_fb_bsub(a, b);
    const double h = 1e-6;
    const double fd_a = (phi(NcpKind::FischerBurmeister, a + h, b) -
                         phi(NcpKind::FischerBurmeister, a - h, b)) /
                        (2 * h);
    const double fd_b = (phi(NcpKind::FischerBurmeister, a, b + h) -
                         phi(NcpKind::FischerBurmeister, a, b - h)) /
                        (2 * h);
    CHECK(row.d_a == doctest::Approx(fd_a).epsilon(1e-6));
    CHECK(row.d_b == doctest::Approx(fd_b).epsilon(1e-6));
  }
}

TEST_CASE("phi_fb_bsub stays on the unit circle around (-1, -1)") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = rng.uniform(-3.0, 3.0);
    const double b = rng.uniform(-3.0, 3.0);
    const BsubRow row = phi_fb_bsub(a, b);
    const double radius =
        (row.d_a + 1.0) * (row.d_a + 1.0) + (row.d_b + 1.0) * (row.d_b + 1.0);
    CHECK(radius <= 2.0 + 1e-12);
    CHECK(radius == doctest::Approx(1.0));
  }
  const BsubRow origin = phi_fb_bsub(0, 0);
  const double radius = (origin.d_a + 1.0) * (origin.d_a + 1.0) +
                        (origin.d_b + 1.0) * (origin.d_b + 1.0);
  CHECK(radius == doctest::Approx(1.0));
}

TEST_CASE("phi_fb_bsub_constraint branches") {
  Vector grad(2);

  // inactive constraint with strict complementarity
  grad << 1, 0;
  ConstraintBsubRow row = phi_fb_bsub_constraint(-1.0, grad, 0.0);
  CHECK(row.row_x.isApprox(Vector::Zero(2)));
  CHECK(row.d_lambda == doctest::Approx(-1.0));

  // active constraint with positive multiplier
  grad << 1, 1;
  row = phi_fb_bsub_constraint(0.0, grad, 2.0);
  CHECK(row.row_x.isApprox(grad));
  CHECK(row.d_lambda == doctest::Approx(0.0));

  // degenerate pair: the -e perturbation limit
  grad << 1, 0;
  row = phi_fb_bsub_constraint(0.0, grad, 0.0);
  CHECK(row.row_x[0] == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)));
  CHECK(row.row_x[1] == doctest::Approx(0.0));
  CHECK(row.d_lambda == doctest::Approx(-1.0 / std::sqrt(2.0) - 1.0));
}

TEST_CASE("phi_min_bsub selection and tie-break") {
  CHECK(phi_min_bsub(0, 1).d_a == doctest::Approx(1.0));
  CHECK(phi_min_bsub(0, 1).d_b == doctest::Approx(0.0));
  CHECK(phi_min_bsub(2, 0).d_a == doctest::Approx(0.0));
  CHECK(phi_min_bsub(2, 0).d_b == doctest::Approx(1.0));
  CHECK(phi_min_bsub(1, 1).d_a == doctest::Approx(1.0));
  CHECK(phi_min_bsub(1, 1).d_b == doctest::Approx(0.0));
}
