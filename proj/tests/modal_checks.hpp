#pragma once

// Orthonormality residuals of a modal basis, evaluated with the independent
// composite Gauss rule from the oracles.

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "kickrom/modal.hpp"
#include "oracles.hpp"

namespace modal_checks {

using kickrom::ModalBasis;

struct GramResult {
    double normErr = 0.0;
    double stiffErr = 0.0;
};

inline GramResult gram_errors(const ModalBasis& b, double k, double m)
{
    const oracle::CompositeRule rule(400, 10);
    const int n = b.size();
    const auto nq = rule.nodes.size();
    Eigen::MatrixXd V(nq, n);
    Eigen::MatrixXd V2(nq, n);
    for (std::size_t q = 0; q < nq; ++q) {
        for (int j = 0; j < n; ++j) {
            V(q, j) = b.modes[j].evaluate(rule.nodes[q], 0);
            V2(q, j) = b.modes[j].evaluate(rule.nodes[q], 2);
        }
    }
    const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), nq);
    Eigen::VectorXd tip(n);
    for (int j = 0; j < n; ++j) {
        tip[j] = b.modes[j].evaluate(1.0);
    }
    const Eigen::MatrixXd mass = V.transpose() * w.asDiagonal() * V + m * tip * tip.transpose();
    const Eigen::MatrixXd stiff = V2.transpose() * w.asDiagonal() * V2 + k * tip * tip.transpose();
    GramResult r;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            r.normErr = std::max(r.normErr, std::abs(mass(i, j) - (i == j ? 1.0 : 0.0)));
            const double target = i == j ? b.frequencies[i] * b.frequencies[i] : 0.0;
            const double scale = b.frequencies[i] * b.frequencies[j];
            r.stiffErr = std::max(r.stiffErr, std::abs(stiff(i, j) - target) / scale);
        }
    }
    return r;
}


}  // namespace modal_checks
