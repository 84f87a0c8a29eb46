#pragma once

#include <Eigen/Dense>

namespace pdg {

using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using RowVecX = Eigen::RowVectorXd;

}  // namespace pdg
