#include "spo/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace spo::io {

Json matrix_to_json(const Matrix &m) {
  Json values = Json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      values.push_back(m(i, j));
  return values;
}

Matrix matrix_from_json(const Json &json, Index rows, Index cols) {
  if (static_cast<Index>(json.size()) != rows * cols)
    throw std::runtime_error("matrix block has wrong number of entries");
  Matrix m(rows, cols);
  Index at = 0;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      m(i, j) = json[static_cast<std::size_t>(at++)].get<double>();
  return m;
}

Json vector_to_json(const Vector &v) {
  Json values = Json::array();
  for (Index i = 0; i < v.size(); ++i)
    values.push_back(v[i]);
  return values;
}

Vector vector_from_json(const Json &json) {
  Vector v(static_cast<Index>(json.size()));
  for (Index i = 0; i < v.size(); ++i)
    v[i] = json[static_cast<std::size_t>(i)].get<double>();
  return v;
}

Json instance_to_json(const apps::Instance &instance) {
  Json out;
  out["kind"] = apps::family_name(instance);

  if (const auto *quad = std::get_if<apps::QuadraticInstance>(&instance)) {
    out["rho"] = quad->rho;
    out["n"] = quad->q.rows();
    out["m"] = quad->a_in.rows();
    out["p"] = quad->a_eq.rows();
    out["nonneg"] = quad->nonneg;
    out["Q"] = matrix_to_json(quad->q);
    out["c"] = vector_to_json(quad->c);
    out["A_in"] = matrix_to_json(quad->a_in);
    out["b_in"] = vector_to_json(quad->b_in);
    out["A_eq"] = matrix_to_json(quad->a_eq);
    out["b_eq"] = vector_to_json(quad->b_eq);
  } else if (const auto *pf = std::get_if<apps::PortfolioInstance>(&instance)) {
    out["rho"] = pf->rho;
    out["seed"] = pf->seed;
    out["n"] = pf->q.rows();
    out["Q"] = matrix_to_json(pf->q);
    out["alpha"] = vector_to_json(pf->alpha);
    out["beta"] = pf->beta;
  } else if (const auto *cs = std::get_if<apps::SensingInstance>(&instance)) {
    out["rho"] = cs->rho;
    out["seed"] = cs->seed;
    out["n"] = cs->a.cols();
    out["m"] = cs->a.rows();
    out["p"] = cs->c.rows();
    out["s"] = cs->s;
    out["A"] = matrix_to_json(cs->a);
    out["b"] = vector_to_json(cs->b);
    out["C"] = matrix_to_json(cs->c);
    out["d"] = vector_to_json(cs->d);
    out["xbar"] = vector_to_json(cs->xbar);
  } else {
    const auto &logit = std::get<apps::LogisticInstance>(instance);
    out["rho"] = logit.rho;
    out["seed"] = logit.seed;
    out["n"] = logit.x.cols();
    out["m"] = logit.x.rows();
    out["X"] = matrix_to_json(logit.x);
    out["y"] = vector_to_json(logit.y);
  }
  return out;
}

apps::Instance instance_from_json(const Json &json) {
  const std::string kind = json.at("kind").get<std::string>();
  if (kind == "quadratic") {
    apps::QuadraticInstance inst;
    const Index n = json.at("n").get<Index>();
    const Index m = json.at("m").get<Index>();
    const Index p = json.at("p").get<Index>();
    inst.rho = json.at("rho").get<double>();
    inst.nonneg = json.value("nonneg", false);
    inst.q = matrix_from_json(json.at("Q"), n, n);
    inst.c = vector_from_json(json.at("c"));
    inst.a_in = matrix_from_json(json.at("A_in"), m, n);
    inst.b_in = vector_from_json(json.at("b_in"));
    inst.a_eq = matrix_from_json(json.at("A_eq"), p, n);
    inst.b_eq = vector_from_json(json.at("b_eq"));
    return inst;
  }
  if (kind == "portfolio") {
    apps::PortfolioInstance inst;
    const Index n = json.at("n").get<Index>();
    inst.rho = json.at("rho").get<double>();
    inst.seed = json.value("seed", std::uint64_t{0});
    inst.q = matrix_from_json(json.at("Q"), n, n);
    inst.alpha = vector_from_json(json.at("alpha"));
    inst.beta = json.at("beta").get<double>();
    return inst;
  }
  if (kind == "sensing") {
    apps::SensingInstance inst;
    const Index n = json.at("n").get<Index>();
    const Index m = json.at("m").get<Index>();
    const Index p = json.at("p").get<Index>();
    inst.rho = json.at("rho").get<double>();
    inst.seed = json.value("seed", std::uint64_t{0});
    inst.s = json.at("s").get<Index>();
    inst.a = matrix_from_json(json.at("A"), m, n);
    inst.b = vector_from_json(json.at("b"));
    inst.c = matrix_from_json(json.at("C"), p, n);
    inst.d = vector_from_json(json.at("d"));
    inst.xbar = vector_from_json(json.at("xbar"));
    return inst;
  }
  if (kind == "logistic") {
    apps::LogisticInstance inst;
    const Index n = json.at("n").get<Index>();
    const Index m = json.at("m").get<Index>();
    inst.rho = json.at("rho").get<double>();
    inst.seed = json.value("seed", std::uint64_t{0});
    inst.x = matrix_from_json(json.at("X"), m, n);
    inst.y = vector_from_json(json.at("y"));
    return inst;
  }
  throw std::runtime_error("unknown instance kind '" + kind + "'");
}

apps::Instance read_instance(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open instance file " + path.string());
  Json json;
  in >> json;
  return instance_from_json(json);
}

void write_instance(const std::filesystem::path &path,
                    const apps::Instance &instance) {
  write_text_file(path, instance_to_json(instance).dump(2) + "\n");
}

std::string instance_id(const apps::Instance &instance) {
  const std::string canonical = instance_to_json(instance).dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : canonical) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

std::string instance_to_csv(const apps::Instance &instance) {
  const Json json = instance_to_json(instance);
  std::ostringstream out;
  out.precision(17);
  for (const auto &[key, value] : json.items()) {
    out << key;
    if (value.is_array())
      for (const auto &entry : value)
        out << ',' << entry.get<double>();
    else if (value.is_string())
      out << ',' << value.get<std::string>();
    else
      out << ',' << value.dump();
    out << '\n';
  }
  return out.str();
}

Json point_to_json(const PrimalDualPoint &point) {
  Json out;
  out["x"] = vector_to_json(point.x);
  out["y"] = vector_to_json(point.y);
  out["lambda"] = vector_to_json(point.lambda);
  out["mu"] = vector_to_json(point.mu);
  out["gamma"] = vector_to_json(point.gamma);
  if (point.sigma)
    out["sigma"] = vector_to_json(*point.sigma);
  return out;
}

PrimalDualPoint point_from_json(const Json &json) {
  PrimalDualPoint point;
  point.x = vector_from_json(json.at("x"));
  const Index n = point.x.size();
  point.y = json.contains("y") ? vector_from_json(json.at("y"))
                               : Vector::Ones(n);
  point.lambda = json.contains("lambda") ? vector_from_json(json.at("lambda"))
                                         : Vector::Zero(0);
  point.mu = json.contains("mu") ? vector_from_json(json.at("mu"))
                                 : Vector::Zero(0);
  point.gamma = json.contains("gamma") ? vector_from_json(json.at("gamma"))
                                       : Vector::Zero(n);
  if (json.contains("sigma"))
    point.sigma = vector_from_json(json.at("sigma"));
  return point;
}

Json report_to_json(const SolveReport &report) {
  Json out;
  out["schema"] = "v1";
  out["status"] = to_string(report.status);
  out["iterations"] = report.iterations;
  out["residual_history"] = report.residual_history;
  out["op_residual_history"] = report.op_residual_history;
  out["objective"] = report.objective;
  out["l0_count"] = report.l0_count;
  out["point"] = point_to_json(report.final_point);
  return out;
}

Json oracle_to_json(const analysis::OracleResult &result) {
  Json points = Json::array();
  for (const auto &pt : result.stationary_points) {
    Json entry;
    entry["x"] = vector_to_json(pt.x);
    entry["lambda"] = vector_to_json(pt.lambda);
    entry["mu"] = vector_to_json(pt.mu);
    entry["f"] = pt.f_value;
    entry["objective"] = pt.objective;
    entry["support"] = pt.support;
    entry["classification"] =
        pt.classification == analysis::OracleClassification::LocalMin
            ? "local_min"
            : "s_stationary_only";
    points.push_back(std::move(entry));
  }
  Json failures = Json::array();
  for (const auto &failure : result.failures) {
    Json entry;
    entry["support"] = failure.support;
    entry["reason"] = failure.reason;
    failures.push_back(std::move(entry));
  }
  Json out;
  out["stationary_points"] = std::move(points);
  out["global_min_index"] = result.global_min_index;
  out["failures"] = std::move(failures);
  return out;
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open file " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::filesystem::path &path,
                     const std::string &content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write file " + path.string());
  out << content;
}

} // namespace spo::io
