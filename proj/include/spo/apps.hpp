#pragma once

#include "spo/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>

namespace spo::apps {

// Markowitz-style selection: min 1/2 x^T Q x s.t. e^T x = 1,
// alpha^T x >= beta, x >= 0, plus the sparsity penalty.
struct PortfolioInstance {
  Matrix q;     // covariance, symmetric positive definite
  Vector alpha; // expected payouts
  double beta = 0.0;
  double rho = 1.0;
  std::uint64_t seed = 0;
};

// Penalized recovery: min 1/2 ||A x - b||^2 + rho ||x||_0 s.t. C x = d.
struct SensingInstance {
  Matrix a;
  Vector b;
  Matrix c;
  Vector d;
  Vector xbar; // ground truth used at generation
  Index s = 0; // ||xbar||_0
  double rho = 1.0;
  std::uint64_t seed = 0;
};

// Penalized maximum log-likelihood with labels in {-1, +1}.
struct LogisticInstance {
  Matrix x; // m x n design matrix, one sample per row
  Vector y; // labels
  double rho = 1.0;
  std::uint64_t seed = 0;
};

// Generic quadratic family for hand-built tests and files:
// f = 1/2 x^T Q x + c^T x, a_in x <= b_in, a_eq x = b_eq.
struct QuadraticInstance {
  Matrix q;
  Vector c;
  Matrix a_in;
  Vector b_in;
  Matrix a_eq;
  Vector b_eq;
  bool nonneg = false;
  double rho = 1.0;
};

using Instance = std::variant<QuadraticInstance, PortfolioInstance,
                              SensingInstance, LogisticInstance>;

const char *family_name(const Instance &instance);

// Q = B^T B / n + 1e-4 I with standard-normal B, payouts uniform in
// [0.5, 1.5], beta = 0.9 * mean(alpha); x = e/n is always feasible.
PortfolioInstance gen_portfolio(Index n, std::uint64_t seed);

// Gaussian sensing matrix with per-column law N(0, I/(p+m)), an s-sparse
// normal ground truth and a random row split into (A, b) and (C, d).
// Draw order: SA column-major, support permutation, support values, row
// permutation.
SensingInstance gen_sensing(Index n, Index m, Index p, Index s,
                            std::uint64_t seed);

// Synthetic classification task: design entries uniform in [-1, 1], an
// s-sparse normal-amplified true weight vector, labels sampled from the
// logistic model.
LogisticInstance gen_logistic(Index n, Index m, Index s, std::uint64_t seed);

// Value/gradient/Hessian of sum_i log(1 + exp(-y_i w^T x_i)) with
// overflow-guarded evaluation.
ObjectiveOracle logistic_oracles(const LogisticInstance &instance);

// LIBSVM text format: "<label> <index>:<value> ..." with 1-based strictly
// ascending indices. Labels 0/-1 map to -1 and 1/+1 to +1. When
// scale_to_unit is set every column is divided by its maximum absolute
// value (zero columns untouched). Malformed input throws
// std::runtime_error carrying the line number.
LogisticInstance parse_libsvm(std::istream &stream, bool scale_to_unit);

std::string serialize_libsvm(const LogisticInstance &instance);

SpoProblem build_spo(const Instance &instance);

} // namespace spo::apps
