#pragma once

#include "spo/types.hpp"

namespace spo::ncp {

enum class NcpKind { FischerBurmeister, Minimum };

const char *to_string(NcpKind kind);

// One generalized-derivative row of an NCP function: partials with respect
// to the first and second argument.
struct BsubRow {
  double d_a = 0.0;
  double d_b = 0.0;
};

inline constexpr double kDegenerateTol = 1e-12;

// phi(a, b) = 0  iff  a >= 0, b >= 0, ab = 0.
double phi(NcpKind kind, double a, double b);

// B-subdifferential element of the Fischer-Burmeister function. Away from
// the origin this is the gradient; at the origin (within degenerate_tol on
// sqrt(a^2 + b^2)) the element obtained by perturbing both arguments along
// -e is selected:  (-1/sqrt(2) - 1, -1/sqrt(2) - 1).
BsubRow phi_fb_bsub(double a, double b, double degenerate_tol = kDegenerateTol);

// Row of the composed component phi_FB(-g_j(x), lambda_j): the x-row and
// the lambda-partial. The degenerate case uses the same -e perturbation,
// which turns the first argument into t * grad(g_j)^T e by the mean-value
// theorem.
struct ConstraintBsubRow {
  Vector row_x;
  double d_lambda = 0.0;
};

ConstraintBsubRow phi_fb_bsub_constraint(double g_val, const Vector &g_grad,
                                         double lambda_j,
                                         double degenerate_tol = kDegenerateTol);

// Generalized gradient of min{a, b}; ties resolve to the first argument.
BsubRow phi_min_bsub(double a, double b);

// Selection for a generic NCP component by kind; used by the operator
// Jacobians for the x/y complementarity rows.
BsubRow phi_bsub(NcpKind kind, double a, double b,
                 double degenerate_tol = kDegenerateTol);

// Same dispatch for the constraint rows phi(-g_j(x), lambda_j).
ConstraintBsubRow phi_bsub_constraint(NcpKind kind, double g_val,
                                      const Vector &g_grad, double lambda_j,
                                      double degenerate_tol = kDegenerateTol);

} // namespace spo::ncp
