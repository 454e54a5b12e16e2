#include "kickrom/chebyshev.hpp"

#include "kickrom/errors.hpp"

namespace kickrom {

namespace {

double to_reference(double x, double a, double b)
{
    return (2.0 * x - a - b) / (b - a);
}

}  // namespace

ChebyshevSeries::ChebyshevSeries(std::vector<double> coefficients, double a, double b)
    : coeffs_(std::move(coefficients)), a_(a), b_(b)
{
    if (coeffs_.empty()) {
        coeffs_.push_back(0.0);
    }
    if (!(b_ > a_)) {
        throw InputError("Chebyshev interval must be non-empty");
    }
}

double ChebyshevSeries::operator()(double x) const
{
    // Clenshaw recurrence.
    const double t = to_reference(x, a_, b_);
    double b1 = 0.0;
    double b2 = 0.0;
    for (int j = degree(); j >= 1; --j) {
        const double b0 = 2.0 * t * b1 - b2 + coeffs_[j];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + coeffs_[0];
}

ChebyshevSeries ChebyshevSeries::derivative(int order) const
{
    std::vector<double> c = coeffs_;
    for (int i = 0; i < order; ++i) {
        c = chebyshev_derivative(c, a_, b_);
    }
    return ChebyshevSeries(std::move(c), a_, b_);
}

double ChebyshevSeries::integral() const
{
    // Integral of T_n over [-1, 1] is 2/(1-n^2) for even n, zero for odd n.
    double sum = 0.0;
    for (int n = 0; n <= degree(); n += 2) {
        sum += coeffs_[n] * 2.0 / (1.0 - static_cast<double>(n) * n);
    }
    return 0.5 * (b_ - a_) * sum;
}

std::vector<double> chebyshev_derivative(std::span<const double> coeffs, double a, double b)
{
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (n <= 0) {
        return {0.0};
    }
    std::vector<double> d(n, 0.0);
    // e_k = e_{k+2} + 2 (k+1) c_{k+1}, run from the top.
    std::vector<double> e(n + 2, 0.0);
    for (int k = n - 1; k >= 0; --k) {
        e[k] = e[k + 2] + 2.0 * (k + 1) * coeffs[k + 1];
    }
    e[0] *= 0.5;
    const double scale = 2.0 / (b - a);
    for (int k = 0; k < n; ++k) {
        d[k] = e[k] * scale;
    }
    return d;
}

Eigen::MatrixXd chebyshev_matrix(std::span<const double> x, int degree, double a, double b)
{
    Eigen::MatrixXd T(x.size(), degree + 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = to_reference(x[i], a, b);
        T(i, 0) = 1.0;
        if (degree >= 1) {
            T(i, 1) = t;
        }
        for (int j = 2; j <= degree; ++j) {
            T(i, j) = 2.0 * t * T(i, j - 1) - T(i, j - 2);
        }
    }
    return T;
}

Eigen::MatrixXd chebyshev_derivative_operator(int degree, int order, double a, double b)
{
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(degree + 1, degree + 1);
    for (int col = 0; col <= degree; ++col) {
        std::vector<double> c(degree + 1, 0.0);
        c[col] = 1.0;
        for (int i = 0; i < order; ++i) {
            c = chebyshev_derivative(c, a, b);
        }
        for (int row = 0; row <= degree; ++row) {
            D(row, col) = row < static_cast<int>(c.size()) ? c[row] : 0.0;
        }
    }
    return D;
}

ChebyshevFitter::ChebyshevFitter(std::vector<double> samplePoints, int degree, double a, double b)
    : points_(std::move(samplePoints)), degree_(degree), a_(a), b_(b)
{
    if (degree_ < 0 || static_cast<int>(points_.size()) < degree_ + 1) {
        throw InputError("Chebyshev fit needs at least degree+1 sample points");
    }
    const Eigen::MatrixXd V = chebyshev_matrix(points_, degree_, a_, b_);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
    pinv_ = qr.solve(Eigen::MatrixXd::Identity(V.rows(), V.rows()));
}

Eigen::VectorXd ChebyshevFitter::coefficients(const Eigen::VectorXd& values) const
{
    if (values.size() != static_cast<Eigen::Index>(points_.size())) {
        throw InputError("Chebyshev fit: value count does not match sample points");
    }
    return pinv_ * values;
}

Eigen::MatrixXd ChebyshevFitter::coefficients(const Eigen::MatrixXd& columns) const
{
    if (columns.rows() != static_cast<Eigen::Index>(points_.size())) {
        throw InputError("Chebyshev fit: row count does not match sample points");
    }
    return pinv_ * columns;
}

ChebyshevSeries ChebyshevFitter::fit(const Eigen::VectorXd& values) const
{
    const Eigen::VectorXd c = coefficients(values);
    return ChebyshevSeries(std::vector<double>(c.data(), c.data() + c.size()), a_, b_);
}

Eigen::MatrixXd ChebyshevFitter::evaluation_operator(std::span<const double> x, int order) const
{
    const Eigen::MatrixXd T = chebyshev_matrix(x, degree_, a_, b_);
    if (order == 0) {
        return T * pinv_;
    }
    return T * chebyshev_derivative_operator(degree_, order, a_, b_) * pinv_;
}

}  // namespace kickrom
