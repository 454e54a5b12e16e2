#include "kickrom/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "kickrom/errors.hpp"

namespace kickrom {

QuadratureRule clenshaw_curtis(int intervals, double a, double b)
{
    if (intervals < 1 || !(b > a)) {
        throw InputError("Clenshaw-Curtis rule needs at least one interval on a non-empty range");
    }
    const int n = intervals;
    QuadratureRule rule;
    rule.nodes.resize(n + 1);
    rule.weights.assign(n + 1, 0.0);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int j = 0; j <= n; ++j) {
        const double theta = std::numbers::pi * j / n;
        // Ascending order: x_j = -cos(theta_j).
        rule.nodes[j] = mid - half * std::cos(theta);
        double sum = 0.0;
        for (int kk = 1; kk <= n / 2; ++kk) {
            const double bk = (2 * kk == n) ? 1.0 : 2.0;
            sum += bk / (4.0 * kk * kk - 1.0) * std::cos(2.0 * kk * theta);
        }
        const double cj = (j == 0 || j == n) ? 1.0 : 2.0;
        rule.weights[j] = half * cj / n * (1.0 - sum);
    }
    return rule;
}

const QuadratureRule& spatial_rule()
{
    static const QuadratureRule rule = clenshaw_curtis(256, 0.0, 1.0);
    return rule;
}

std::vector<double> trapezoid_weights(const std::vector<double>& grid)
{
    const std::size_t n = grid.size();
    if (n < 2) {
        throw InputError("trapezoid rule needs at least two grid points");
    }
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = grid[i + 1] - grid[i];
        if (!(h > 0.0)) {
            throw InputError("time grid must be strictly increasing");
        }
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

}  // namespace kickrom
