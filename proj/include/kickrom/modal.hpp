#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kickrom/params.hpp"

namespace kickrom {

/// FreeTip: tip mass only (model A). SpringTip: tip mass and spring (models B, C).
enum class BasisVariant { FreeTip, SpringTip };

const char* to_string(BasisVariant v);

/// One clamped beam mode with a tip mass and optional tip spring.
///
/// Stored in overflow-free form
///   W(x) = a sin(bx) + b cos(bx) + c exp(b(x-1)) + e exp(-bx),
/// where every term is bounded by one on [0, 1] regardless of the wavenumber.
struct ModeShape {
    double beta = 0.0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double e = 0.0;

    double evaluate(double x, int derivative = 0) const;
    /// Coefficients (C1..C4) of C1 sin + C2 cos + C3 sinh + C4 cosh.
    std::array<double, 4> classical_coefficients() const;
};

struct ModalBasis {
    BasisVariant variant = BasisVariant::SpringTip;
    double k = 0.0;  ///< tip stiffness used for this basis (0 for FreeTip)
    double m = 0.0;
    std::vector<ModeShape> modes;
    Eigen::VectorXd betas;
    Eigen::VectorXd frequencies;  ///< omega_i = beta_i^2
    Eigen::VectorXd tipValues;

    int size() const { return static_cast<int>(modes.size()); }
    /// Rows are points, columns are modes.
    Eigen::MatrixXd evaluate(std::span<const double> x, int derivative = 0) const;
};

/// Left-hand side of the characteristic equation, divided by
/// (1 + beta^3 + m beta^4 + k) so it stays O(1) for large wavenumbers.
double characteristic_function(double beta, double k, double m);

/// First `count` strictly positive roots (beta = 0 is always a root and is excluded).
std::vector<double> characteristic_roots(double k, double m, int count);

/// Residual of the four boundary conditions for a mode, relative to the
/// magnitude of the terms involved.
double boundary_residual(const ModeShape& mode, double k, double m);

ModalBasis build_modal_basis(const SystemParams& params, BasisVariant variant);
ModalBasis build_modal_basis(double k, double m, int count, BasisVariant variant);

/// <f, g> = int_0^1 f g dx + m f(1) g(1) for mode-sampled functions.
double weighted_inner(const ModeShape& f, const ModeShape& g, double m);

/// Static tip-loaded cantilever deflection with the tip spring,
/// w_s(x) = sign * 3F/(3+k) * (x^2/2 - x^3/6).
struct StaticDeflection {
    double amplitude = 0.0;  ///< 3F/(3+k)
    int sign = 1;

    double evaluate(double x, int derivative = 0) const;
    double tip() const { return evaluate(1.0); }
    /// Polynomial coefficients (ascending powers of x) including the sign.
    std::array<double, 4> polynomial() const;
};

StaticDeflection static_deflection(const SystemParams& params, int sign);

/// Coefficients of a static deflection in a modal basis (weighted inner product).
Eigen::VectorXd project_static(const ModalBasis& basis, const StaticDeflection& ws);

enum class TransitionDirection { AtoBC, BCtoA };

/// Maps modal coordinates of one basis to the other: q_to = entries * q_from.
///
/// AtoBC: entries(i, j) = <xi_i, gamma_j>; BCtoA: entries(i, j) = <gamma_i, xi_j>.
struct TransitionMatrix {
    Eigen::MatrixXd entries;
    TransitionDirection direction = TransitionDirection::AtoBC;
};

TransitionMatrix transition_matrix(const ModalBasis& freeTip, const ModalBasis& springTip,
                                   double m, TransitionDirection direction);

}  // namespace kickrom
