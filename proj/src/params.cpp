#include "kickrom/params.hpp"

#include <cmath>
#include <sstream>

#include "kickrom/errors.hpp"

namespace kickrom {

namespace {

void require(bool ok, const char* what)
{
    if (!ok) {
        throw ParameterError(what);
    }
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void DimensionedParams::validate() const
{
    require(finite_positive(density), "density must be positive");
    require(finite_positive(crossSectionArea), "cross-section area must be positive");
    require(finite_positive(youngsModulus), "Young's modulus must be positive");
    require(finite_positive(areaMomentInertia), "area moment of inertia must be positive");
    require(finite_positive(length), "beam length must be positive");
    require(finite_positive(tipMass), "tip mass must be positive");
    require(finite_positive(tipStiffness), "tip stiffness must be positive");
    require(finite_nonnegative(kickForce), "kick force must be non-negative");
    require(finite_nonnegative(materialDamping), "material damping must be non-negative");
    require(finite_nonnegative(viscousDamping), "viscous damping must be non-negative");
    require(finite_positive(kickerWidth), "kicker width must be positive");
    require(finite_positive(criticalVelocity), "critical velocity must be positive");
}

void SystemParams::validate() const
{
    require(finite_nonnegative(cv), "cv must be non-negative");
    require(finite_nonnegative(cm), "cm must be non-negative");
    require(finite_nonnegative(m), "m must be non-negative");
    require(finite_nonnegative(k), "k must be non-negative");
    require(finite_nonnegative(F), "F must be non-negative");
    require(finite_positive(d), "d must be positive");
    require(finite_positive(vcr), "vcr must be positive");
    require(N >= 1, "N must be at least 1");
}

double characteristic_time(const DimensionedParams& p)
{
    p.validate();
    const double l2 = p.length * p.length;
    return std::sqrt(p.density * p.crossSectionArea * l2 * l2 /
                     (p.youngsModulus * p.areaMomentInertia));
}

SystemParams nondimensionalize(const DimensionedParams& p, int modeCount)
{
    const double tc = characteristic_time(p);
    const double rhoA = p.density * p.crossSectionArea;
    const double EI = p.youngsModulus * p.areaMomentInertia;
    const double l = p.length;

    SystemParams s;
    s.cm = p.materialDamping / tc;
    s.cv = p.viscousDamping * tc / rhoA;
    s.m = p.tipMass / (rhoA * l);
    s.k = p.tipStiffness * l * l * l / EI;
    s.F = p.kickForce * l * l / EI;
    s.d = p.kickerWidth / l;
    s.vcr = p.criticalVelocity * tc / l;
    s.N = modeCount;
    s.validate();
    return s;
}

}  // namespace kickrom
