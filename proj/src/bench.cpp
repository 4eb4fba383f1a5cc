#include "spo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

namespace spo::bench {

namespace {

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.10g", v);
  return buffer;
}

} // namespace

OperatorKind op_from_name(const std::string &name) {
  if (name == "full")
    return OperatorKind::Full;
  if (name == "red" || name == "reduced")
    return OperatorKind::Reduced;
  if (name == "comp" || name == "complementary")
    return OperatorKind::Complementary;
  throw std::invalid_argument("unknown operator '" + name + "'");
}

std::string op_name(OperatorKind kind) {
  switch (kind) {
  case OperatorKind::Full:
    return "full";
  case OperatorKind::Reduced:
    return "red";
  case OperatorKind::Complementary:
    return "comp";
  }
  return "?";
}

SingleResult run_single(const apps::Instance &instance, OperatorKind kind,
                        const NewtonOptions &options) {
  const auto start = std::chrono::steady_clock::now();

  SpoProblem problem = apps::build_spo(instance);
  std::optional<Vector> x0 = presolve::presolve_l1(problem);
  if (!x0)
    throw std::runtime_error("run_single: no presolve family recognized");

  // Entries below the support threshold are zero as far as the method is
  // concerned; making them exact zeros pins them in place for the Newton
  // iteration instead of letting each one crawl through its
  // complementarity kink.
  for (Index i = 0; i < x0->size(); ++i)
    if (std::abs((*x0)[i]) < options.delta)
      (*x0)[i] = 0.0;

  SingleResult result;
  result.x0 = *x0;
  result.record.instance_id = io::instance_id(instance);
  result.record.family = apps::family_name(instance);
  result.record.n = problem.n;
  result.record.m = problem.m;
  result.record.p = problem.p;
  result.record.rho = problem.rho;
  result.record.op = op_name(kind);
  result.record.f0_obj = eval_spo_objective(problem, *x0, options.delta);
  result.record.l0_before = l0_norm(*x0, options.delta);

  NewtonOptions run_options = options;
  run_options.kind = kind;
  // The absolute step bound suits unit-scale problems; the guard on the
  // cold first step, which clears every spurious presolve component at
  // once, is calibrated to the instance scale instead.
  if (!run_options.first_step_safety)
    run_options.first_step_safety =
        std::max(run_options.step_safety, 20.0 * (1.0 + x0->norm()));

  if (kind == OperatorKind::Complementary && !problem.nonneg) {
    const kkt::SplitProblem split = kkt::split_variables(problem);
    result.record.split_applied = true;
    result.report =
        newton::solve(split.lifted, kkt::SplitProblem::embed(*x0), run_options);
    result.x_final = kkt::SplitProblem::recover(result.report.final_point.x);
  } else {
    result.report = newton::solve(problem, *x0, run_options);
    result.x_final = result.report.final_point.x;
  }

  result.record.status = to_string(result.report.status);
  result.record.iters = result.report.iterations;
  result.record.final_obj =
      eval_spo_objective(problem, result.x_final, options.delta);
  result.record.l0_after = l0_norm(result.x_final, options.delta);

  const auto stop = std::chrono::steady_clock::now();
  result.record.wall_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  return result;
}

apps::Instance make_instance(const std::string &family, Index n, Index m,
                             Index p, Index s, double rho,
                             std::uint64_t seed) {
  if (family == "portfolio") {
    apps::PortfolioInstance inst = apps::gen_portfolio(n, seed);
    inst.rho = rho;
    return inst;
  }
  if (family == "sensing") {
    apps::SensingInstance inst = apps::gen_sensing(n, m, p, s, seed);
    inst.rho = rho;
    return inst;
  }
  if (family == "logistic") {
    apps::LogisticInstance inst = apps::gen_logistic(n, m, s, seed);
    inst.rho = rho;
    return inst;
  }
  throw std::invalid_argument("unknown family '" + family + "'");
}

void parallel_for(int jobs, int count, const std::function<void(int)> &task) {
  if (count <= 0)
    return;
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i)
      task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count)
          break;
        task(i);
      }
    });
  }
  for (auto &thread : pool)
    thread.join();
}

BenchResult run_bench(const BenchConfig &config) {
  struct Task {
    apps::Instance instance;
    OperatorKind kind;
  };

  // canonical task order: rho, then run (seed), then operator
  std::vector<Task> tasks;
  for (const double rho : config.rho_list) {
    for (int run = 0; run < config.runs; ++run) {
      const apps::Instance instance =
          make_instance(config.family, config.n, config.m, config.p, config.s,
                        rho, config.seed_base + static_cast<std::uint64_t>(run));
      for (const OperatorKind kind : config.ops)
        tasks.push_back({instance, kind});
    }
  }

  BenchResult result;
  result.records.resize(tasks.size());
  std::vector<std::string> errors(tasks.size());
  parallel_for(config.jobs, static_cast<int>(tasks.size()), [&](int i) {
    const Task &task = tasks[static_cast<std::size_t>(i)];
    try {
      result.records[static_cast<std::size_t>(i)] =
          run_single(task.instance, task.kind, config.options).record;
    } catch (const std::exception &err) {
      // partial failures are recorded, never abort the sweep
      RunRecord record;
      record.instance_id = io::instance_id(task.instance);
      record.family = config.family;
      record.rho = std::visit([](const auto &inst) { return inst.rho; },
                              task.instance);
      record.op = op_name(task.kind);
      record.status = std::string("error: ") + err.what();
      result.records[static_cast<std::size_t>(i)] = record;
    }
  });

  // aggregate per (rho, op), in rho-list then ops order
  for (const double rho : config.rho_list) {
    for (const OperatorKind kind : config.ops) {
      AggregateRow row;
      row.rho = rho;
      row.op = op_name(kind);
      double sum_final = 0.0, sum_pre = 0.0, sum_pre_all = 0.0;
      double sum_iters = 0.0;
      int successes = 0, with_presolve = 0;
      for (const RunRecord &record : result.records) {
        if (record.rho != rho || record.op != row.op)
          continue;
        ++row.runs;
        if (record.status.rfind("error", 0) != 0) {
          sum_pre_all += record.f0_obj;
          ++with_presolve;
        }
        if (record.status == "converged") {
          ++successes;
          sum_final += record.final_obj;
          sum_pre += record.f0_obj;
          sum_iters += record.iters;
        } else {
          ++row.failures;
        }
      }
      row.failure_rate =
          row.runs > 0 ? static_cast<double>(row.failures) / row.runs : 0.0;
      row.mean_final_obj = successes > 0 ? sum_final / successes : NAN;
      row.mean_presolve_obj = successes > 0 ? sum_pre / successes : NAN;
      row.mean_presolve_obj_all =
          with_presolve > 0 ? sum_pre_all / with_presolve : NAN;
      row.mean_iters = successes > 0 ? sum_iters / successes : NAN;
      result.aggregate.push_back(std::move(row));
    }
  }
  return result;
}

std::string records_csv(const std::vector<RunRecord> &records) {
  std::ostringstream out;
  out << "instance_id,family,n,m,p,rho,op,status,iters,f0_obj,final_obj,"
         "l0_before,l0_after,wall_ms\n";
  for (const RunRecord &r : records) {
    out << r.instance_id << ',' << r.family << ',' << r.n << ',' << r.m << ','
        << r.p << ',' << format_double(r.rho) << ',' << r.op << ',' << r.status
        << ',' << r.iters << ',' << format_double(r.f0_obj) << ','
        << format_double(r.final_obj) << ',' << r.l0_before << ','
        << r.l0_after << ',' << format_double(r.wall_ms) << '\n';
  }
  return out.str();
}

std::string aggregate_csv(const std::vector<AggregateRow> &rows) {
  std::ostringstream out;
  out << "rho,op,runs,failures,failure_rate,mean_final_obj,"
         "mean_presolve_obj,mean_presolve_obj_all,mean_iters\n";
  for (const AggregateRow &r : rows) {
    out << format_double(r.rho) << ',' << r.op << ',' << r.runs << ','
        << r.failures << ',' << format_double(r.failure_rate) << ','
        << format_double(r.mean_final_obj) << ','
        << format_double(r.mean_presolve_obj) << ','
        << format_double(r.mean_presolve_obj_all) << ','
        << format_double(r.mean_iters) << '\n';
  }
  return out.str();
}

std::string chart_svg(const std::vector<AggregateRow> &rows) {
  constexpr double kWidth = 640, kHeight = 420;
  constexpr double kLeft = 70, kRight = 600, kTop = 40, kBottom = 360;

  std::vector<double> rhos;
  std::vector<std::string> ops;
  double lo = INFINITY, hi = -INFINITY;
  for (const AggregateRow &row : rows) {
    if (std::find(rhos.begin(), rhos.end(), row.rho) == rhos.end())
      rhos.push_back(row.rho);
    if (std::find(ops.begin(), ops.end(), row.op) == ops.end())
      ops.push_back(row.op);
    for (const double v : {row.mean_final_obj, row.mean_presolve_obj_all}) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12)
    hi = lo + 1.0;
  const double rho_lo = rhos.empty() ? 0.0 : rhos.front();
  const double rho_hi = rhos.empty() ? 1.0 : rhos.back();

  auto sx = [&](double rho) {
    if (rho_hi == rho_lo)
      return (kLeft + kRight) / 2.0;
    return kLeft + (rho - rho_lo) / (rho_hi - rho_lo) * (kRight - kLeft);
  };
  auto sy = [&](double v) {
    return kBottom - (v - lo) / (hi - lo) * (kBottom - kTop);
  };

  const std::vector<std::string> palette{"#1f77b4", "#d62728", "#2ca02c",
                                         "#9467bd"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\""
      << kRight << "\" y2=\"" << kBottom
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kBottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << (kLeft + kRight) / 2
      << "\" y=\"395\" text-anchor=\"middle\" font-size=\"14\">penalty "
         "weight</text>\n";
  svg << "<text x=\"18\" y=\"" << (kTop + kBottom) / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 "
         "18 "
      << (kTop + kBottom) / 2 << ")\">mean target value</text>\n";
  for (const double rho : rhos) {
    svg << "<text x=\"" << format_double(sx(rho))
        << "\" y=\"378\" text-anchor=\"middle\" font-size=\"12\">"
        << format_double(rho) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << format_double(sy(lo) + 4)
      << "\" text-anchor=\"end\" font-size=\"12\">" << format_double(lo)
      << "</text>\n";
  svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << format_double(sy(hi) + 4)
      << "\" text-anchor=\"end\" font-size=\"12\">" << format_double(hi)
      << "</text>\n";

  auto polyline = [&](const std::vector<std::pair<double, double>> &pts,
                      const std::string &color, const std::string &dash) {
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"";
    if (!dash.empty())
      svg << " stroke-dasharray=\"" << dash << "\"";
    svg << " points=\"";
    for (const auto &[x, y] : pts)
      svg << format_double(x) << ',' << format_double(y) << ' ';
    svg << "\"/>\n";
  };

  // presolve baseline from the first operator's rows
  if (!ops.empty()) {
    std::vector<std::pair<double, double>> pts;
    for (const AggregateRow &row : rows)
      if (row.op == ops.front() && std::isfinite(row.mean_presolve_obj_all))
        pts.emplace_back(sx(row.rho), sy(row.mean_presolve_obj_all));
    polyline(pts, "#7f7f7f", "6,4");
    svg << "<text x=\"" << kRight - 160 << "\" y=\"" << kTop + 2
        << "\" font-size=\"12\" fill=\"#7f7f7f\">presolve</text>\n";
  }
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const std::string color = palette[k % palette.size()];
    std::vector<std::pair<double, double>> pts;
    for (const AggregateRow &row : rows)
      if (row.op == ops[k] && std::isfinite(row.mean_final_obj))
        pts.emplace_back(sx(row.rho), sy(row.mean_final_obj));
    polyline(pts, color, "");
    svg << "<text x=\"" << kRight - 160 << "\" y=\""
        << kTop + 16 * (k + 1) + 2 << "\" font-size=\"12\" fill=\"" << color
        << "\">" << ops[k] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

} // namespace spo::bench
