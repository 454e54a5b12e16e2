#include "doctest.h"

#include <random>

#include "kickrom/kernels.hpp"

using namespace kickrom;

namespace {

Eigen::MatrixXd random_matrix(int r, int c, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> n;
    Eigen::MatrixXd m(r, c);
    for (int j = 0; j < c; ++j) {
        for (int i = 0; i < r; ++i) {
            m(i, j) = n(rng);
        }
    }
    return m;
}

}  // namespace

TEST_CASE("kernels: weighted covariance matches serial and a direct product")
{
    const Eigen::MatrixXd X = random_matrix(100, 3001, 1);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(3001);
    w[0] = w[3000] = 0.5;
    const Eigen::MatrixXd par = kernels::weighted_covariance(X, w, kernels::Exec::Parallel);
    const Eigen::MatrixXd ser = kernels::weighted_covariance(X, w, kernels::Exec::Serial);
    const Eigen::MatrixXd ref = X * w.asDiagonal() * X.transpose() / w.sum();
    CHECK((par - ser).norm() <= 1e-13 * ser.norm());
    CHECK((ser - ref).norm() <= 1e-12 * ref.norm());
    CHECK((par - par.transpose()).norm() == 0.0);
}

TEST_CASE("kernels: synthesis and column quadratic forms")
{
    const Eigen::MatrixXd S = random_matrix(100, 8, 2);
    const Eigen::MatrixXd C = random_matrix(8, 2500, 3);
    const Eigen::MatrixXd par = kernels::synthesize(S, C, kernels::Exec::Parallel);
    const Eigen::MatrixXd ser = kernels::synthesize(S, C, kernels::Exec::Serial);
    CHECK((par - S * C).norm() <= 1e-13 * par.norm());
    CHECK((par - ser).norm() <= 1e-13 * par.norm());

    Eigen::MatrixXd G = random_matrix(8, 8, 4);
    G = G * G.transpose();
    const Eigen::VectorXd qp = kernels::column_quadratic(C, G, kernels::Exec::Parallel);
    const Eigen::VectorXd qs = kernels::column_quadratic(C, G, kernels::Exec::Serial);
    const Eigen::VectorXd ref = (C.transpose() * G * C).diagonal();
    CHECK((qp - qs).norm() <= 1e-13 * qs.norm());
    CHECK((qs - ref).norm() <= 1e-12 * ref.norm());
    CHECK(qs.minCoeff() >= 0.0);
}

TEST_CASE("kernels: mismatched shapes are rejected")
{
    const Eigen::MatrixXd X = random_matrix(4, 5, 5);
    CHECK_THROWS(kernels::weighted_covariance(X, Eigen::VectorXd::Ones(4)));
    CHECK_THROWS(kernels::synthesize(X, random_matrix(4, 2, 6)));
    CHECK_THROWS(kernels::column_quadratic(X, Eigen::MatrixXd::Identity(5, 5)));
}
