#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Plain bisection on a bracketing interval.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14)
{
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// First clamped-free wavenumber: cos b cosh b + 1 = 0.
inline double clamped_free_root(int index = 1)
{
    // Roots sit near (2i - 1) pi / 2.
    const double centre = (2 * index - 1) * std::numbers::pi / 2;
    return bisect([](double b) { return std::cos(b) * std::cosh(b) + 1.0; }, centre - 0.4, centre + 0.4);
}

/// Textbook clamped-free shape cosh - cos - s (sinh - sin); unit L2 norm on [0, 1].
inline double clamped_free_shape(double beta, double x)
{
    const double s = (std::cosh(beta) + std::cos(beta)) / (std::sinh(beta) + std::sin(beta));
    return std::cosh(beta * x) - std::cos(beta * x) - s * (std::sinh(beta * x) - std::sin(beta * x));
}

/// Nodes and weights of n-point Gauss-Legendre on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

/// Composite Gauss-Legendre rule on [a, b].
struct CompositeRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    CompositeRule(int panels, int order, double a = 0.0, double b = 1.0)
    {
        std::vector<double> gx;
        std::vector<double> gw;
        gauss_legendre(order, gx, gw);
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            for (int i = 0; i < order; ++i) {
                nodes.push_back(a + h * (p + 0.5 * (gx[i] + 1.0)));
                weights.push_back(0.5 * h * gw[i]);
            }
        }
    }

    double integrate(const std::function<double(double)>& f) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            s += weights[i] * f(nodes[i]);
        }
        return s;
    }
};

}  // namespace oracle
