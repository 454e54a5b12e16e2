#include "kickrom/kernels.hpp"

#include "kickrom/errors.hpp"

namespace kickrom::kernels {

namespace {

Eigen::MatrixXd covariance_serial(const Eigen::MatrixXd& X, const Eigen::VectorXd& w)
{
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        for (Eigen::Index b = 0; b < n; ++b) {
            const double xb = w[j] * X(b, j);
            for (Eigen::Index a = b; a < n; ++a) {
                R(a, b) += X(a, j) * xb;
            }
        }
    }
    return R;
}

Eigen::MatrixXd covariance_parallel(const Eigen::MatrixXd& X, const Eigen::VectorXd& w)
{
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    // Each thread owns whole columns of the lower triangle.
#pragma omp parallel for schedule(dynamic, 4)
    for (Eigen::Index b = 0; b < n; ++b) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double xb = w[j] * X(b, j);
            for (Eigen::Index a = b; a < n; ++a) {
                R(a, b) += X(a, j) * xb;
            }
        }
    }
    return R;
}

}  // namespace

Eigen::MatrixXd weighted_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& weights, Exec exec)
{
    if (weights.size() != X.cols()) {
        throw InputError("covariance weights do not match the number of samples");
    }
    const double total = weights.sum();
    if (!(total > 0.0)) {
        throw InputError("covariance weights must have a positive sum");
    }
    Eigen::MatrixXd R = exec == Exec::Serial ? covariance_serial(X, weights) : covariance_parallel(X, weights);
    R /= total;
    R.triangularView<Eigen::StrictlyUpper>() = R.transpose().triangularView<Eigen::StrictlyUpper>();
    return R;
}

Eigen::MatrixXd synthesize(const Eigen::MatrixXd& shapes, const Eigen::MatrixXd& coeffs, Exec exec)
{
    if (shapes.cols() != coeffs.rows()) {
        throw InputError("shape and coefficient dimensions do not match");
    }
    Eigen::MatrixXd out(shapes.rows(), coeffs.cols());
    if (exec == Exec::Serial) {
        for (Eigen::Index j = 0; j < coeffs.cols(); ++j) {
            for (Eigen::Index i = 0; i < shapes.rows(); ++i) {
                double s = 0.0;
                for (Eigen::Index k = 0; k < shapes.cols(); ++k) {
                    s += shapes(i, k) * coeffs(k, j);
                }
                out(i, j) = s;
            }
        }
        return out;
    }
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < coeffs.cols(); ++j) {
        out.col(j).noalias() = shapes * coeffs.col(j);
    }
    return out;
}

Eigen::VectorXd column_quadratic(const Eigen::MatrixXd& coeffs, const Eigen::MatrixXd& gram, Exec exec)
{
    if (gram.rows() != coeffs.rows() || gram.cols() != coeffs.rows()) {
        throw InputError("Gram matrix does not match the coefficient dimension");
    }
    Eigen::VectorXd out(coeffs.cols());
    if (exec == Exec::Serial) {
        for (Eigen::Index j = 0; j < coeffs.cols(); ++j) {
            double s = 0.0;
            for (Eigen::Index a = 0; a < coeffs.rows(); ++a) {
                for (Eigen::Index b = 0; b < coeffs.rows(); ++b) {
                    s += coeffs(a, j) * gram(a, b) * coeffs(b, j);
                }
            }
            out[j] = s;
        }
        return out;
    }
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < coeffs.cols(); ++j) {
        out[j] = coeffs.col(j).dot(gram * coeffs.col(j));
    }
    return out;
}

}  // namespace kickrom::kernels
