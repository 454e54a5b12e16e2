#pragma once

#include <vector>

namespace kickrom {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// Clenshaw-Curtis rule with `intervals + 1` nodes on [a, b]; exact for
/// polynomials of degree `intervals`.
QuadratureRule clenshaw_curtis(int intervals, double a = 0.0, double b = 1.0);

/// Default spatial rule on [0, 1] (256 intervals).
const QuadratureRule& spatial_rule();

/// Composite trapezoid weights for a strictly increasing grid.
std::vector<double> trapezoid_weights(const std::vector<double>& grid);

}  // namespace kickrom
