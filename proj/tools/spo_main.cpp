// Command-line driver: single solves, benchmark sweeps, stationarity and
// regularity checks, instance generation.

#include "spo/analysis.hpp"
#include "spo/bench.hpp"
#include "spo/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

using namespace spo;

// sysexits-style codes used across the subcommands
constexpr int kExitNotConverged = 2;
constexpr int kExitUsage = 64;
constexpr int kExitDataError = 65;
constexpr int kExitNoInput = 66;

struct FamilyParams {
  Index n = 0, m = 0, p = 0, s = 0;
};

FamilyParams parse_params(const std::string &text) {
  FamilyParams params;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty())
      continue;
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    const long long value = std::stoll(token.substr(eq + 1));
    if (key == "n")
      params.n = value;
    else if (key == "m")
      params.m = value;
    else if (key == "p")
      params.p = value;
    else if (key == "s")
      params.s = value;
    else
      throw std::invalid_argument("unknown parameter '" + key + "'");
  }
  return params;
}

// problem argument: either a JSON file path or "family:<name>" together
// with a "n=..,m=.." parameter string
apps::Instance load_problem(const std::string &problem,
                            const std::string &params_text, double rho,
                            std::uint64_t seed) {
  if (problem.rfind("family:", 0) == 0) {
    std::string family = problem.substr(7);
    std::string params = params_text;
    // also accept family:sensing:n=64,m=32 in one token
    const auto colon = family.find(':');
    if (colon != std::string::npos) {
      params = family.substr(colon + 1);
      family = family.substr(0, colon);
    }
    const FamilyParams fp = parse_params(params);
    return bench::make_instance(family, fp.n, fp.m, fp.p, fp.s,
                                rho > 0.0 ? rho : 1.0, seed);
  }
  if (!std::filesystem::exists(problem)) {
    throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                            problem);
  }
  apps::Instance instance = io::read_instance(problem);
  if (rho > 0.0)
    std::visit([rho](auto &inst) { inst.rho = rho; }, instance);
  return instance;
}

io::Json run_record_json(const bench::RunRecord &record) {
  io::Json out;
  out["instance_id"] = record.instance_id;
  out["family"] = record.family;
  out["n"] = record.n;
  out["m"] = record.m;
  out["p"] = record.p;
  out["rho"] = record.rho;
  out["op"] = record.op;
  out["status"] = record.status;
  out["iters"] = record.iters;
  out["f0_obj"] = record.f0_obj;
  out["final_obj"] = record.final_obj;
  out["l0_before"] = record.l0_before;
  out["l0_after"] = record.l0_after;
  out["wall_ms"] = record.wall_ms;
  out["split"] = record.split_applied;
  return out;
}

int cmd_solve(const std::string &problem, const std::string &params,
              double rho, const std::string &op, int max_iter, double eps,
              double delta, std::uint64_t seed, const std::string &out_dir) {
  const apps::Instance instance = load_problem(problem, params, rho, seed);

  newton::NewtonOptions options;
  options.max_iter = max_iter;
  options.eps = eps;
  options.delta = delta;
  const bench::SingleResult result =
      bench::run_single(instance, bench::op_from_name(op), options);

  io::Json report = io::report_to_json(result.report);
  report["run"] = run_record_json(result.record);
  report["x0"] = io::vector_to_json(result.x0);
  report["x_final"] = io::vector_to_json(result.x_final);
  if (!out_dir.empty())
    io::write_text_file(std::filesystem::path(out_dir) / "report.json",
                        report.dump(2) + "\n");

  std::cout << result.record.family << " n=" << result.record.n
            << " rho=" << result.record.rho << " op=" << result.record.op
            << " status=" << result.record.status
            << " iters=" << result.record.iters
            << " F(x0)=" << result.record.f0_obj
            << " F(x*)=" << result.record.final_obj
            << " l0=" << result.record.l0_before << "->"
            << result.record.l0_after
            << (result.record.split_applied ? " (split applied)" : "")
            << '\n';
  return result.report.status == SolveStatus::Converged ? 0
                                                        : kExitNotConverged;
}

int cmd_bench(const std::string &family, const std::string &params,
              const std::string &rho_list, int runs, std::uint64_t seed_base,
              const std::string &ops, int jobs, int max_iter, double eps,
              double delta, const std::string &out_dir) {
  bench::BenchConfig config;
  config.family = family;
  const FamilyParams fp = parse_params(params);
  config.n = fp.n;
  config.m = fp.m;
  config.p = fp.p;
  config.s = fp.s;
  config.rho_list.clear();
  {
    std::istringstream in(rho_list);
    std::string token;
    while (std::getline(in, token, ','))
      if (!token.empty())
        config.rho_list.push_back(std::stod(token));
  }
  if (config.rho_list.empty())
    throw std::invalid_argument("--rho-list must contain at least one value");
  config.runs = runs;
  config.seed_base = seed_base;
  config.ops.clear();
  {
    std::istringstream in(ops);
    std::string token;
    while (std::getline(in, token, ','))
      if (!token.empty())
        config.ops.push_back(bench::op_from_name(token));
  }
  if (config.ops.empty())
    throw std::invalid_argument("--ops must contain at least one operator");
  config.jobs = jobs;
  config.options.max_iter = max_iter;
  config.options.eps = eps;
  config.options.delta = delta;

  const bench::BenchResult result = bench::run_bench(config);
  const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
  io::write_text_file(dir / "runs.csv", bench::records_csv(result.records));
  io::write_text_file(dir / "aggregate.csv",
                      bench::aggregate_csv(result.aggregate));
  io::write_text_file(dir / "chart.svg", bench::chart_svg(result.aggregate));

  for (const auto &row : result.aggregate)
    std::cout << "rho=" << row.rho << " op=" << row.op
              << " mean_F=" << row.mean_final_obj
              << " presolve_F=" << row.mean_presolve_obj_all
              << " failures=" << row.failures << "/" << row.runs
              << " mean_iters=" << row.mean_iters << '\n';
  return 0;
}

int cmd_check(const std::string &problem, const std::string &params,
              double rho, std::uint64_t seed, const std::string &point_file,
              const std::string &checks, const std::string &op, double delta) {
  const apps::Instance instance = load_problem(problem, params, rho, seed);
  const SpoProblem spo_problem = apps::build_spo(instance);

  if (!std::filesystem::exists(point_file))
    throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                            point_file);
  io::Json point_json = io::Json::parse(io::read_text_file(point_file));
  PrimalDualPoint point = io::point_from_json(point_json);
  if (point.lambda.size() == 0)
    point.lambda = Vector::Zero(spo_problem.m);
  if (point.mu.size() == 0)
    point.mu = Vector::Zero(spo_problem.p);
  if (point.x.size() != spo_problem.n ||
      point.lambda.size() != spo_problem.m ||
      point.mu.size() != spo_problem.p) {
    std::cerr << "point dimensions do not match the problem\n";
    return kExitDataError;
  }

  io::Json out;
  std::istringstream in(checks);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token == "licq") {
      const analysis::CqReport cq =
          analysis::check_sp_licq(spo_problem, point.x, delta);
      out["licq"] = {{"holds", cq.holds},
                     {"rank", cq.gradient_matrix_rank},
                     {"needed_rank", cq.needed_rank},
                     {"smallest_singular_value", cq.smallest_singular_value}};
    } else if (token == "sosc") {
      const analysis::SoscReport sosc = analysis::check_strong_sp_sosc(
          spo_problem, point.x, point.lambda, point.mu, delta);
      out["sosc"] = {{"holds", sosc.holds},
                     {"min_eig", sosc.min_eig},
                     {"subspace_dim", sosc.subspace_dim}};
    } else if (token == "bd") {
      const analysis::BdRegularityReport bd = analysis::check_bd_regularity(
          spo_problem, point, bench::op_from_name(op),
          ncp::NcpKind::FischerBurmeister, 64);
      out["bd"] = {{"regular", bd.regular},
                   {"min_sigma", bd.min_sigma},
                   {"complete", bd.complete},
                   {"elements_checked", bd.elements_checked}};
    } else if (token == "sstat") {
      out["sstat"] = {{"residual", kkt::s_stationarity_residual(
                                       spo_problem, point.x, point.lambda,
                                       point.mu, delta)}};
    } else if (!token.empty()) {
      throw std::invalid_argument("unknown check '" + token + "'");
    }
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_gen(const std::string &family, const std::string &params, double rho,
            std::uint64_t seed, const std::string &out_file, bool csv) {
  const FamilyParams fp = parse_params(params);
  const apps::Instance instance =
      bench::make_instance(family, fp.n, fp.m, fp.p, fp.s, rho, seed);
  if (!out_file.empty()) {
    io::write_instance(out_file, instance);
    if (csv)
      io::write_text_file(std::filesystem::path(out_file).replace_extension(
                              ".csv"),
                          apps::family_name(instance) +
                              std::string("\n") +
                              io::instance_to_csv(instance));
  }
  std::cout << io::instance_id(instance) << '\n';
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{
      "spo: sparsity-penalized nonlinear programs via complementarity "
      "reformulations and Lagrange-Newton methods.\n"
      "Note: the quadratic reformulation matches the penalized problem with "
      "weight rho/2; targets are reported with the rho supplied here."};
  app.require_subcommand(1);

  std::string problem, params, op = "full", ops = "full,red,comp";
  std::string out_path, point_file, checks = "licq,sosc,bd,sstat";
  std::string family = "sensing", rho_list = "1";
  double rho = 0.0, eps = 1e-6, delta = 1e-4;
  int max_iter = 100, runs = 10, jobs = 1;
  std::uint64_t seed = 1, seed_base = 1;
  bool csv = false;

  auto *solve = app.add_subcommand("solve", "presolve + Newton on one instance");
  solve->add_option("problem", problem, "instance file or family:<name>")
      ->required();
  solve->add_option("params", params, "family parameters n=..,m=..,p=..,s=..");
  solve->add_option("--rho", rho, "penalty weight");
  solve->add_option("--op", op, "operator: full|red|comp");
  solve->add_option("--max-iter", max_iter);
  solve->add_option("--eps", eps, "termination tolerance");
  solve->add_option("--delta", delta, "support threshold");
  solve->add_option("--seed", seed);
  solve->add_option("--out", out_path, "report directory");

  auto *bench_cmd = app.add_subcommand("bench", "benchmark sweep");
  bench_cmd->add_option("--family", family)->required();
  bench_cmd->add_option("--params", params, "n=..,m=..,p=..,s=..")->required();
  bench_cmd->add_option("--rho-list", rho_list);
  bench_cmd->add_option("--runs", runs);
  bench_cmd->add_option("--seed-base", seed_base);
  bench_cmd->add_option("--ops", ops);
  bench_cmd->add_option("--jobs", jobs);
  bench_cmd->add_option("--max-iter", max_iter);
  bench_cmd->add_option("--eps", eps);
  bench_cmd->add_option("--delta", delta);
  bench_cmd->add_option("--out", out_path, "output directory");

  auto *check = app.add_subcommand("check", "stationarity and CQ checks");
  check->add_option("--problem", problem)->required();
  check->add_option("--params", params);
  check->add_option("--rho", rho);
  check->add_option("--seed", seed);
  check->add_option("--point", point_file)->required();
  check->add_option("--checks", checks, "subset of licq,sosc,bd,sstat");
  check->add_option("--op", op, "operator for the bd check");
  check->add_option("--delta", delta);

  auto *gen = app.add_subcommand("gen", "generate an instance file");
  gen->add_option("--family", family)->required();
  gen->add_option("--params", params)->required();
  gen->add_option("--rho", rho);
  gen->add_option("--seed", seed);
  gen->add_option("--out", out_path);
  gen->add_flag("--csv", csv, "also write a CSV export");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &err) {
    return app.exit(err);
  } catch (const CLI::ParseError &err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (solve->parsed())
      return cmd_solve(problem, params, rho, op, max_iter, eps, delta, seed,
                       out_path);
    if (bench_cmd->parsed())
      return cmd_bench(family, params, rho_list, runs, seed_base, ops, jobs,
                       max_iter, eps, delta, out_path);
    if (check->parsed())
      return cmd_check(problem, params, rho, seed, point_file, checks, op,
                       delta);
    if (gen->parsed())
      return cmd_gen(family, params, rho == 0.0 ? 1.0 : rho, seed, out_path,
                     csv);
  } catch (const std::system_error &err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitNoInput;
  } catch (const std::invalid_argument &err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}
