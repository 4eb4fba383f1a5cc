#include "spo/bench.hpp"

#include <doctest.h>

#include <atomic>
#include <regex>

using namespace spo;
using namespace spo::bench;

namespace {

BenchConfig tiny_config(int jobs) {
  BenchConfig config;
  config.family = "sensing";
  config.n = 16;
  config.m = 8;
  config.p = 2;
  config.s = 3;
  config.rho_list = {0.5, 1.0};
  config.runs = 3;
  config.seed_base = 1;
  config.jobs = jobs;
  return config;
}

std::string strip_wall_ms(const std::string &csv) {
  // wall time is the only timing-dependent column
  std::string out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    const auto last_comma = line.rfind(',');
    out += line.substr(0, last_comma);
    out += '\n';
  }
  return out;
}

} // namespace

TEST_CASE("parallel_for runs every task exactly once") {
  std::vector<std::atomic<int>> counts(64);
  parallel_for(4, 64, [&](int i) { counts[static_cast<std::size_t>(i)]++; });
  for (const auto &count : counts)
    CHECK(count.load() == 1);
  parallel_for(3, 0, [](int) { FAIL("no tasks expected"); });
}

TEST_CASE("run_single records a consistent pipeline result") {
  apps::Instance instance = apps::gen_sensing(16, 8, 2, 3, 7);
  std::get<apps::SensingInstance>(instance).rho = 1.0;
  newton::NewtonOptions options;
  const SingleResult result =
      run_single(instance, OperatorKind::Reduced, options);

  CHECK(result.record.family == "sensing");
  CHECK(result.record.op == "red");
  CHECK(result.record.n == 16);
  CHECK(result.record.rho == 1.0);
  CHECK(result.record.instance_id == io::instance_id(instance));
  CHECK(result.record.l0_before == l0_norm(result.x0, options.delta));
  CHECK(result.record.iters == result.report.iterations);
  CHECK(result.record.wall_ms > 0.0);

  const SpoProblem problem = apps::build_spo(instance);
  CHECK(result.record.f0_obj ==
        doctest::Approx(eval_spo_objective(problem, result.x0, options.delta)));
  CHECK(result.record.final_obj ==
        doctest::Approx(
            eval_spo_objective(problem, result.x_final, options.delta)));

  // complementary on a free-variable problem goes through the split
  const SingleResult comp =
      run_single(instance, OperatorKind::Complementary, options);
  CHECK(comp.record.split_applied);
  CHECK(comp.report.final_point.x.size() == 32);
  CHECK(comp.x_final.size() == 16);
}

TEST_CASE("bench records are canonical and job-count independent") {
  const BenchResult serial = run_bench(tiny_config(1));
  const BenchResult parallel = run_bench(tiny_config(2));

  REQUIRE(serial.records.size() == 18); // 2 rhos x 3 runs x 3 ops
  CHECK(strip_wall_ms(records_csv(serial.records)) ==
        strip_wall_ms(records_csv(parallel.records)));
  CHECK(aggregate_csv(serial.aggregate) == aggregate_csv(parallel.aggregate));

  // aggregate means cover successful runs only and count failures
  for (const AggregateRow &row : serial.aggregate) {
    CHECK(row.runs == 3);
    CHECK(row.failures >= 0);
    CHECK(row.failure_rate ==
          doctest::Approx(static_cast<double>(row.failures) / row.runs));
    if (row.failures < row.runs)
      CHECK(std::isfinite(row.mean_final_obj));
  }
}

TEST_CASE("csv round trip carries every record field") {
  const BenchResult result = run_bench(tiny_config(1));
  const std::string csv = records_csv(result.records);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "instance_id,family,n,m,p,rho,op,status,iters,f0_obj,final_obj,"
        "l0_before,l0_after,wall_ms");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 13);
  }
  CHECK(rows == 18);
}

TEST_CASE("chart is deterministic and timestamp free") {
  const BenchResult result = run_bench(tiny_config(1));
  const std::string svg = chart_svg(result.aggregate);
  CHECK(svg == chart_svg(result.aggregate));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("presolve") != std::string::npos);
  // no clock or date strings sneak in
  CHECK(!std::regex_search(svg, std::regex("20\\d\\d-")));
}

TEST_CASE("operator names parse both ways") {
  CHECK(op_from_name("full") == OperatorKind::Full);
  CHECK(op_from_name("red") == OperatorKind::Reduced);
  CHECK(op_from_name("reduced") == OperatorKind::Reduced);
  CHECK(op_from_name("comp") == OperatorKind::Complementary);
  CHECK_THROWS_AS(op_from_name("bogus"), std::invalid_argument);
  CHECK(op_name(OperatorKind::Full) == "full");
}
