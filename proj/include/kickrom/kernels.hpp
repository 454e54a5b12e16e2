#pragma once

#include <Eigen/Dense>

namespace kickrom::kernels {

/// Parallel kernels run through OpenMP; `serial` holds plain-loop reference
/// versions used by tests and the benchmark.
enum class Exec { Serial, Parallel };

/// R = sum_j w_j X(:,j) X(:,j)^T / sum_j w_j
Eigen::MatrixXd weighted_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& weights,
                                    Exec exec = Exec::Parallel);

/// Columns of coeffs expanded in the shapes: out = shapes * coeffs.
Eigen::MatrixXd synthesize(const Eigen::MatrixXd& shapes, const Eigen::MatrixXd& coeffs,
                           Exec exec = Exec::Parallel);

/// Per-column quadratic forms c_j^T G c_j.
Eigen::VectorXd column_quadratic(const Eigen::MatrixXd& coeffs, const Eigen::MatrixXd& gram,
                                 Exec exec = Exec::Parallel);

}  // namespace kickrom::kernels
