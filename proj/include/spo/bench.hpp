#pragma once

#include "spo/apps.hpp"
#include "spo/io.hpp"
#include "spo/newton.hpp"
#include "spo/presolve.hpp"

#include <functional>
#include <string>

namespace spo::bench {

using kkt::OperatorKind;
using newton::NewtonOptions;

OperatorKind op_from_name(const std::string &name);
std::string op_name(OperatorKind kind);

struct RunRecord {
  std::string instance_id;
  std::string family;
  Index n = 0;
  Index m = 0;
  Index p = 0;
  double rho = 0.0;
  std::string op;
  std::string status;
  int iters = 0;
  double f0_obj = 0.0;    // F_rho at the presolve point
  double final_obj = 0.0; // F_rho at the returned point
  Index l0_before = 0;
  Index l0_after = 0;
  double wall_ms = 0.0;
  bool split_applied = false;
};

struct SingleResult {
  RunRecord record;
  SolveReport report; // in lifted coordinates when the split was applied
  Vector x0;
  Vector x_final; // always in original coordinates
};

// Pre-process with the l1 surrogate, then run the Newton method. A
// complementary-operator request on a free-variable problem goes through
// the (x+, x-) split transparently; the record reports original
// coordinates.
SingleResult run_single(const apps::Instance &instance, OperatorKind kind,
                        const NewtonOptions &options);

// Deterministic instance construction for the benchmark families.
apps::Instance make_instance(const std::string &family, Index n, Index m,
                             Index p, Index s, double rho,
                             std::uint64_t seed);

struct BenchConfig {
  std::string family = "sensing";
  Index n = 64;
  Index m = 32;
  Index p = 4;
  Index s = 8;
  std::vector<double> rho_list{1.0};
  int runs = 10;
  std::uint64_t seed_base = 1;
  std::vector<OperatorKind> ops{OperatorKind::Full, OperatorKind::Reduced,
                                OperatorKind::Complementary};
  int jobs = 1;
  NewtonOptions options;
};

struct AggregateRow {
  double rho = 0.0;
  std::string op;
  int runs = 0;
  int failures = 0;
  double failure_rate = 0.0;
  double mean_final_obj = 0.0;       // successful runs only
  double mean_presolve_obj = 0.0;    // over the same successful runs
  double mean_presolve_obj_all = 0.0;
  double mean_iters = 0.0; // successful runs only
};

struct BenchResult {
  std::vector<RunRecord> records;     // canonical order
  std::vector<AggregateRow> aggregate;
};

BenchResult run_bench(const BenchConfig &config);

std::string records_csv(const std::vector<RunRecord> &records);
std::string aggregate_csv(const std::vector<AggregateRow> &rows);

// Self-contained line chart of mean target value against rho per operator,
// with the presolve baseline; stable output for fixed input.
std::string chart_svg(const std::vector<AggregateRow> &rows);

// Runs tasks 0..count-1 on up to `jobs` worker threads.
void parallel_for(int jobs, int count, const std::function<void(int)> &task);

} // namespace spo::bench
