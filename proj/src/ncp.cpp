#include "spo/ncp.hpp"

#include <cmath>

namespace spo::ncp {

const char *to_string(NcpKind kind) {
  return kind == NcpKind::FischerBurmeister ? "fischer_burmeister" : "minimum";
}

double phi(NcpKind kind, double a, double b) {
  if (kind == NcpKind::FischerBurmeister)
    return std::hypot(a, b) - a - b;
  return std::min(a, b);
}

BsubRow phi_fb_bsub(double a, double b, double degenerate_tol) {
  const double r = std::hypot(a, b);
  if (r > degenerate_tol)
    return {a / r - 1.0, b / r - 1.0};
  const double v = -1.0 / std::sqrt(2.0) - 1.0;
  return {v, v};
}

ConstraintBsubRow phi_fb_bsub_constraint(double g_val, const Vector &g_grad,
                                         double lambda_j,
                                         double degenerate_tol) {
  ConstraintBsubRow out;
  const double r = std::hypot(g_val, lambda_j);
  if (r > degenerate_tol) {
    out.row_x = (g_val / r + 1.0) * g_grad;
    out.d_lambda = lambda_j / r - 1.0;
    return out;
  }
  const double t = g_grad.sum(); // grad(g_j)^T e
  const double s = std::sqrt(t * t + 1.0);
  out.row_x = (-t / s + 1.0) * g_grad;
  out.d_lambda = -1.0 / s - 1.0;
  return out;
}

BsubRow phi_min_bsub(double a, double b) {
  return a <= b ? BsubRow{1.0, 0.0} : BsubRow{0.0, 1.0};
}

BsubRow phi_bsub(NcpKind kind, double a, double b, double degenerate_tol) {
  if (kind == NcpKind::FischerBurmeister)
    return phi_fb_bsub(a, b, degenerate_tol);
  return phi_min_bsub(a, b);
}

ConstraintBsubRow phi_bsub_constraint(NcpKind kind, double g_val,
                                      const Vector &g_grad, double lambda_j,
                                      double degenerate_tol) {
  if (kind == NcpKind::FischerBurmeister)
    return phi_fb_bsub_constraint(g_val, g_grad, lambda_j, degenerate_tol);
  // Component is min{-g_j(x), lambda_j}; chain rule through a = -g_j.
  const BsubRow d = phi_min_bsub(-g_val, lambda_j);
  ConstraintBsubRow out;
  out.row_x = -d.d_a * g_grad;
  out.d_lambda = d.d_b;
  return out;
}

} // namespace spo::ncp
