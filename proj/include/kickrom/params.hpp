#pragma once

#include <string>

namespace kickrom {

/// Physical parameters of the beam/magnet rig in consistent (SI) units.
struct DimensionedParams {
    double density = 7850.0;             // kg/m^3
    double crossSectionArea = 0.0;       // m^2
    double youngsModulus = 0.0;          // Pa
    double areaMomentInertia = 0.0;      // m^4
    double length = 0.0;                 // m
    double tipMass = 0.0;                // kg
    double tipStiffness = 0.0;           // N/m
    double kickForce = 0.0;              // N
    double materialDamping = 0.0;        // s
    double viscousDamping = 0.0;         // kg/(m s)
    double kickerWidth = 0.0;            // m
    double criticalVelocity = 0.0;       // m/s

    void validate() const;
};

/// Dimensionless parameters of the kicked oscillator.
///
/// Defaults are the values used throughout for the reference bifurcation
/// study (kick strength 12.95, 25 modes per linear model).
struct SystemParams {
    double cv = 4.5;     ///< viscous damping
    double cm = 3e-4;    ///< material (Kelvin-Voigt) damping
    double m = 1.0;      ///< tip mass
    double k = 1000.0;   ///< tip spring stiffness inside the kicker zone
    double F = 12.95;    ///< kick strength
    double d = 0.2;      ///< kicker-core width; the zone is |w(1)| <= d/2
    double vcr = 0.05;   ///< critical tip speed that triggers the kick
    int N = 25;          ///< modes per linear model in the full-order system

    void validate() const;
    double halfWidth() const { return 0.5 * d; }
};

/// Characteristic time sqrt(rho A l^4 / (E I)).
double characteristic_time(const DimensionedParams& p);

/// Rescales dimensioned rig parameters into the dimensionless model.
SystemParams nondimensionalize(const DimensionedParams& p, int modeCount = 25);

}  // namespace kickrom
