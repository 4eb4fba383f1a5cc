#pragma once

#include "spo/analysis.hpp"
#include "spo/apps.hpp"
#include "spo/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace spo::io {

using Json = nlohmann::json;

// Instance schema: {"kind": "quadratic"|"portfolio"|"sensing"|"logistic",
// "rho": float, "seed": int, dimensions, and dense matrices as row-major
// arrays}.
Json instance_to_json(const apps::Instance &instance);
apps::Instance instance_from_json(const Json &json);

apps::Instance read_instance(const std::filesystem::path &path);
void write_instance(const std::filesystem::path &path,
                    const apps::Instance &instance);

// FNV-1a hash of the canonical serialization, as 16 hex digits.
std::string instance_id(const apps::Instance &instance);

// Flat CSV export for external tools: one "name,rows,cols,values..." line
// per block plus scalar lines.
std::string instance_to_csv(const apps::Instance &instance);

Json point_to_json(const PrimalDualPoint &point);
PrimalDualPoint point_from_json(const Json &json);

Json report_to_json(const SolveReport &report);

Json oracle_to_json(const analysis::OracleResult &result);

Json matrix_to_json(const Matrix &m); // row-major values
Matrix matrix_from_json(const Json &json, Index rows, Index cols);
Json vector_to_json(const Vector &v);
Vector vector_from_json(const Json &json);

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path,
                     const std::string &content);

} // namespace spo::io
