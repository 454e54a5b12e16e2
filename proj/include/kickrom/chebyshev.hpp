#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace kickrom {

/// Truncated Chebyshev series on an interval [a, b].
class ChebyshevSeries {
public:
    ChebyshevSeries() = default;
    ChebyshevSeries(std::vector<double> coefficients, double a = 0.0, double b = 1.0);

    double operator()(double x) const;
    ChebyshevSeries derivative(int order = 1) const;
    /// Definite integral over [a, b].
    double integral() const;

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    double lower() const { return a_; }
    double upper() const { return b_; }

private:
    std::vector<double> coeffs_;
    double a_ = 0.0;
    double b_ = 1.0;
};

/// Coefficients of d/dx of a series of the given degree on [a, b].
std::vector<double> chebyshev_derivative(std::span<const double> coeffs, double a, double b);

/// Row i holds T_0..T_degree evaluated at x_i mapped from [a, b].
Eigen::MatrixXd chebyshev_matrix(std::span<const double> x, int degree, double a = 0.0, double b = 1.0);

/// Linear map taking coefficients to coefficients of the `order`-th derivative.
Eigen::MatrixXd chebyshev_derivative_operator(int degree, int order, double a = 0.0, double b = 1.0);

/// Least-squares Chebyshev fitting at a fixed set of sample points.
///
/// The fit is linear in the data, so the pseudo-inverse is factored once and
/// every column of a snapshot matrix is fitted with a single product.
class ChebyshevFitter {
public:
    ChebyshevFitter(std::vector<double> samplePoints, int degree, double a = 0.0, double b = 1.0);

    Eigen::VectorXd coefficients(const Eigen::VectorXd& values) const;
    Eigen::MatrixXd coefficients(const Eigen::MatrixXd& columns) const;
    ChebyshevSeries fit(const Eigen::VectorXd& values) const;

    /// Values of the `order`-th derivative of the fitted series at `x`, as a
    /// linear operator on the sample values (rows = x, cols = samples).
    Eigen::MatrixXd evaluation_operator(std::span<const double> x, int order) const;

    int degree() const { return degree_; }
    const std::vector<double>& sample_points() const { return points_; }
    const Eigen::MatrixXd& pseudo_inverse() const { return pinv_; }
    double lower() const { return a_; }
    double upper() const { return b_; }

private:
    std::vector<double> points_;
    int degree_;
    double a_;
    double b_;
    Eigen::MatrixXd pinv_;
};

}  // namespace kickrom
