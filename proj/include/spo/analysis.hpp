#pragma once

#include "spo/kkt.hpp"

#include <cstdint>
#include <string>

namespace spo::analysis {

using kkt::OperatorKind;
using ncp::NcpKind;

inline constexpr double kRankCutoff = 1e-10;   // relative SVD cutoff
inline constexpr double kActiveTol = 1e-8;     // default activity tolerance

struct CqReport {
  bool holds = false;
  Index gradient_matrix_rank = 0;
  Index needed_rank = 0;
  double smallest_singular_value = 0.0;
};

struct LicqEquivalence {
  bool sp_licq = false;
  bool licq_sq = false;
  bool licq_lin = false;
};

struct SoscReport {
  bool holds = false;
  double min_eig = 0.0; // +inf when the critical subspace is trivial
  Index subspace_dim = 0;
};

struct BdRegularityReport {
  bool regular = false;
  double min_sigma = 0.0;
  bool complete = true; // false when the enumeration cap was hit
  int elements_checked = 0;
};

enum class OracleClassification { LocalMin, SStationaryOnly };

struct OraclePoint {
  Vector x;
  Vector lambda;
  Vector mu;
  double f_value = 0.0;
  double objective = 0.0; // F_rho with exact-zero support counting
  IndexList support;
  OracleClassification classification = OracleClassification::SStationaryOnly;
};

struct OracleFailure {
  IndexList support;
  std::string reason;
};

struct OracleResult {
  std::vector<OraclePoint> stationary_points;
  Index global_min_index = -1; // into stationary_points; -1 when empty
  std::vector<OracleFailure> failures;
};

// SP-LICQ: the rows grad g_i (active), grad h_i (all) and e_i (i in I_0)
// must have full row rank. Rank is decided by SVD with a relative cutoff.
CqReport check_sp_licq(const SpoProblem &problem, const Vector &x,
                       double delta, double active_tol = kActiveTol);

// Standard LICQ of both reformulations against SP-LICQ at a feasible pair
// (x, y) with empty bi-active set; throws std::domain_error otherwise.
LicqEquivalence check_licq_equivalence(const SpoProblem &problem,
                                       const PrimalDualPoint &point,
                                       double delta);

// Strong second-order sufficiency on the critical subspace: positive
// definiteness of the reduced Lagrangian Hessian B^T H B, with B an
// orthonormal null-space basis of the subspace constraint rows (QR).
SoscReport check_strong_sp_sosc(const SpoProblem &problem, const Vector &x,
                                const Vector &lambda, const Vector &mu,
                                double delta);

// Sampled second-order necessary check on the critical cone: false when
// some sampled cone direction d has d^T H d < -1e-10 * ||d||^2.
bool check_second_order_necessary(const SpoProblem &problem, const Vector &x,
                                  const Vector &lambda, const Vector &mu,
                                  double delta, int n_samples,
                                  std::uint64_t seed = 12345);

// Smallest singular value over the enumerated B-subdifferential elements at
// the point; degenerate NCP rows branch over their limit selections (three
// for Fischer-Burmeister, two for the minimum function).
BdRegularityReport check_bd_regularity(const SpoProblem &problem,
                                       const PrimalDualPoint &point,
                                       OperatorKind kind, NcpKind ncp_kind,
                                       int enumerate_cap,
                                       double degenerate_tol = kActiveTol);

// Support-enumeration oracle for tiny instances (n <= 12): every support
// pattern is solved as a smooth equality/active-set system by a damped
// Newton method with multiple starts; the collected S-stationary points are
// classified by comparison against nearby competitors.
OracleResult brute_force_oracle(const SpoProblem &problem, double delta);

} // namespace spo::analysis
