// SPDX-License-Identifier: Apache-2.0

#ifndef DLSFEM_TYPES_HPP
#define DLSFEM_TYPES_HPP

#include <Eigen/Dense>

namespace dlsfem
{

// Small runtime-sized vectors and matrices (length 1..3) that never touch the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

// Number of components of the curl of a dim-vector field: 1 in 2D, 3 in 3D.
constexpr int curl_components(int dim) { return 2 * dim - 3; }

}  // namespace dlsfem

#endif  // DLSFEM_TYPES_HPP
