#include "kickrom/modal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kickrom/errors.hpp"
#include "kickrom/quadrature.hpp"

namespace kickrom {

namespace {

constexpr double kScanStart = 1e-3;
constexpr double kScanStep = 0.05;
constexpr double kBisectionTol = 1e-12;
constexpr double kBoundaryTol = 1e-8;

double bisect(double lo, double hi, double flo, double k, double m)
{
    while (hi - lo > kBisectionTol) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = characteristic_function(mid, k, m);
        if (fmid == 0.0) {
            return mid;
        }
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(BasisVariant v)
{
    return v == BasisVariant::FreeTip ? "free_tip" : "spring_tip";
}

double ModeShape::evaluate(double x, int derivative) const
{
    const double s = std::sin(beta * x);
    const double co = std::cos(beta * x);
    double trig = 0.0;
    switch (derivative % 4) {
    case 0: trig = a * s + b * co; break;
    case 1: trig = a * co - b * s; break;
    case 2: trig = -a * s - b * co; break;
    default: trig = -a * co + b * s; break;
    }
    const double grow = std::exp(beta * (x - 1.0));
    const double decay = std::exp(-beta * x);
    const double parity = (derivative % 2 == 0) ? 1.0 : -1.0;
    return std::pow(beta, derivative) * (trig + c * grow + parity * e * decay);
}

std::array<double, 4> ModeShape::classical_coefficients() const
{
    const double scaled = c * std::exp(-beta);
    return {a, b, scaled - e, scaled + e};
}

Eigen::MatrixXd ModalBasis::evaluate(std::span<const double> x, int derivative) const
{
    Eigen::MatrixXd out(x.size(), modes.size());
    for (std::size_t j = 0; j < modes.size(); ++j) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            out(i, j) = modes[j].evaluate(x[i], derivative);
        }
    }
    return out;
}

double characteristic_function(double beta, double k, double m)
{
    const double b3 = beta * beta * beta;
    const double b4 = b3 * beta;
    const double s = std::sin(beta);
    const double c = std::cos(beta);
    const double A = b3 * c + k * s - b4 * m * s;
    const double B = b4 * m * c - k * c;
    const double lhs = (A - B) * std::exp(-2.0 * beta) + (A + B) + 2.0 * b3 * std::exp(-beta);
    return lhs / (1.0 + b3 + m * b4 + k);
}

std::vector<double> characteristic_roots(double k, double m, int count)
{
    if (count < 1) {
        throw ParameterError("mode count must be at least 1");
    }
    if (!(k >= 0.0) || !(m >= 0.0)) {
        throw ParameterError("tip stiffness and mass must be non-negative");
    }
    std::vector<double> roots;
    roots.reserve(count);
    // Roots are spaced by roughly pi; the budget leaves ample room for the
    // low-order roots that spring and mass shift.
    const double betaLimit = (count + 8) * 3.5 + 50.0;
    double lo = kScanStart;
    double flo = characteristic_function(lo, k, m);
    while (static_cast<int>(roots.size()) < count) {
        const double hi = lo + kScanStep;
        if (hi > betaLimit) {
            std::ostringstream msg;
            msg << "characteristic root scan found only " << roots.size() << " of " << count
                << " roots below beta = " << betaLimit;
            if (!roots.empty()) {
                msg << " (last root " << roots.back() << ")";
            }
            throw RootSearchError(msg.str());
        }
        const double fhi = characteristic_function(hi, k, m);
        if (fhi == 0.0) {
            roots.push_back(hi);
            lo = hi + 1e-9;
            flo = characteristic_function(lo, k, m);
            continue;
        }
        if ((flo < 0.0) != (fhi < 0.0)) {
            roots.push_back(bisect(lo, hi, flo, k, m));
        }
        lo = hi;
        flo = fhi;
    }
    return roots;
}

double boundary_residual(const ModeShape& mode, double k, double m)
{
    const double beta = mode.beta;
    const double b3 = beta * beta * beta;
    const double tipCoef = k - m * b3 * beta;
    const double r0 = mode.evaluate(0.0, 0);
    const double r1 = mode.evaluate(0.0, 1) / beta;
    const double r2 = mode.evaluate(1.0, 2) / (beta * beta);
    const double r3 = (mode.evaluate(1.0, 3) - tipCoef * mode.evaluate(1.0, 0)) / (b3 + std::abs(tipCoef));
    const double scale = std::max({std::abs(mode.a), std::abs(mode.b), std::abs(mode.c), std::abs(mode.e)});
    return std::max({std::abs(r0), std::abs(r1), std::abs(r2), std::abs(r3)}) / scale;
}

ModalBasis build_modal_basis(const SystemParams& params, BasisVariant variant)
{
    params.validate();
    const double k = variant == BasisVariant::FreeTip ? 0.0 : params.k;
    return build_modal_basis(k, params.m, params.N, variant);
}

ModalBasis build_modal_basis(double k, double m, int count, BasisVariant variant)
{
    const std::vector<double> roots = characteristic_roots(k, m, count);
    const QuadratureRule& rule = spatial_rule();

    ModalBasis basis;
    basis.variant = variant;
    basis.k = k;
    basis.m = m;
    basis.modes.reserve(count);
    basis.betas.resize(count);
    basis.frequencies.resize(count);
    basis.tipValues.resize(count);

    for (int i = 0; i < count; ++i) {
        const double beta = roots[i];
        const double E = std::exp(-beta);
        const double s = std::sin(beta);
        const double c = std::cos(beta);
        // Unknowns (a, b, c, e); rows W(0), W'(0)/beta, W''(1)/beta^2.
        Eigen::MatrixXd bc(3, 4);
        bc << 0.0, 1.0, E, 1.0,
              1.0, 0.0, E, -1.0,
              -s, -c, 1.0, E;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(bc, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (!(sv(2) > 1e-12 * sv(0))) {
            std::ostringstream msg;
            msg << "boundary-condition system is rank deficient at mode " << (i + 1)
                << " (beta = " << beta << ")";
            throw ConditioningError(msg.str());
        }
        const Eigen::VectorXd v = svd.matrixV().col(3);
        ModeShape mode{beta, v(0), v(1), v(2), v(3)};

        double norm2 = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double w = mode.evaluate(rule.nodes[q]);
            norm2 += rule.weights[q] * w * w;
        }
        const double tip = mode.evaluate(1.0);
        norm2 += m * tip * tip;
        double scale = 1.0 / std::sqrt(norm2);

        const double tipScaled = tip * scale;
        const bool tipNegative = std::abs(tipScaled) > 1e-12 ? tipScaled < 0.0
                                                              : mode.evaluate(0.0, 2) * scale < 0.0;
        if (tipNegative) {
            scale = -scale;
        }
        mode.a *= scale;
        mode.b *= scale;
        mode.c *= scale;
        mode.e *= scale;

        const double residual = boundary_residual(mode, k, m);
        if (!(residual < kBoundaryTol)) {
            std::ostringstream msg;
            msg << "mode " << (i + 1) << " (beta = " << beta
                << ") violates the tip shear condition, residual " << residual;
            throw ConditioningError(msg.str());
        }

        basis.modes.push_back(mode);
        basis.betas(i) = beta;
        basis.frequencies(i) = beta * beta;
        basis.tipValues(i) = mode.evaluate(1.0);
    }
    return basis;
}

double weighted_inner(const ModeShape& f, const ModeShape& g, double m)
{
    const QuadratureRule& rule = spatial_rule();
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        sum += rule.weights[q] * f.evaluate(rule.nodes[q]) * g.evaluate(rule.nodes[q]);
    }
    return sum + m * f.evaluate(1.0) * g.evaluate(1.0);
}

double StaticDeflection::evaluate(double x, int derivative) const
{
    const double amp = sign * amplitude;
    switch (derivative) {
    case 0: return amp * (0.5 * x * x - x * x * x / 6.0);
    case 1: return amp * (x - 0.5 * x * x);
    case 2: return amp * (1.0 - x);
    case 3: return -amp;
    default: return 0.0;
    }
}

std::array<double, 4> StaticDeflection::polynomial() const
{
    const double amp = sign * amplitude;
    return {0.0, 0.0, 0.5 * amp, -amp / 6.0};
}

StaticDeflection static_deflection(const SystemParams& params, int sign)
{
    if (sign != 1 && sign != -1) {
        throw ParameterError("static deflection sign must be +1 or -1");
    }
    if (params.k + 3.0 == 0.0) {
        throw ParameterError("static deflection undefined for k = -3");
    }
    return StaticDeflection{3.0 * params.F / (3.0 + params.k), sign};
}

Eigen::VectorXd project_static(const ModalBasis& basis, const StaticDeflection& ws)
{
    const QuadratureRule& rule = spatial_rule();
    Eigen::VectorXd out(basis.size());
    for (int i = 0; i < basis.size(); ++i) {
        double sum = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            sum += rule.weights[q] * ws.evaluate(rule.nodes[q]) * basis.modes[i].evaluate(rule.nodes[q]);
        }
        out(i) = sum + basis.m * ws.tip() * basis.tipValues(i);
    }
    return out;
}

TransitionMatrix transition_matrix(const ModalBasis& freeTip, const ModalBasis& springTip,
                                   double m, TransitionDirection direction)
{
    if (freeTip.size() != springTip.size()) {
        throw InputError("transition matrix needs bases of equal size");
    }
    const QuadratureRule& rule = spatial_rule();
    const Eigen::MatrixXd gamma = freeTip.evaluate(rule.nodes);
    const Eigen::MatrixXd xi = springTip.evaluate(rule.nodes);
    const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), rule.weights.size());

    TransitionMatrix G;
    G.direction = direction;
    if (direction == TransitionDirection::AtoBC) {
        G.entries = xi.transpose() * w.asDiagonal() * gamma +
                    m * springTip.tipValues * freeTip.tipValues.transpose();
    } else {
        G.entries = gamma.transpose() * w.asDiagonal() * xi +
                    m * freeTip.tipValues * springTip.tipValues.transpose();
    }
    return G;
}

}  // namespace kickrom
