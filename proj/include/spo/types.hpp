#pragma once

#include <Eigen/Dense>

#include <vector>

namespace spo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

} // namespace spo
