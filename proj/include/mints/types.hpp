#ifndef MINTS_TYPES_HPP
#define MINTS_TYPES_HPP

#include <Eigen/Dense>

namespace mints {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Matrix2 = Eigen::Matrix2d;
using Vector2 = Eigen::Vector2d;
using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace mints

#endif
