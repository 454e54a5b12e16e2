#include "doctest.h"

#include <chrono>
#include <cmath>
#include <vector>

#include "kickrom/errors.hpp"
#include "kickrom/modal.hpp"
#include "kickrom/params.hpp"
#include "modal_checks.hpp"
#include "oracles.hpp"

using namespace kickrom;

namespace {

// Boundary determinant of the clamped beam with tip mass and spring, from
// W = C1 (sin - sinh) + C2 (cos - cosh), W''(1) = 0 and
// W'''(1) = (k - m b^4) W(1). Expanding the 2x2 determinant gives
// b^3 (1 + cos cosh) - kappa (cos sinh - sin cosh); divided here by cosh.
double boundary_determinant(double b, double k, double m)
{
    const double kappa = k - m * std::pow(b, 4);
    const double b3 = b * b * b;
    const double value = b3 * (1.0 / std::cosh(b) + std::cos(b)) - kappa * (std::cos(b) * std::tanh(b) - std::sin(b));
    return value / (b3 + std::abs(kappa) + 1.0);
}

std::vector<double> scanned_roots(double k, double m, int count)
{
    std::vector<double> roots;
    double lo = 1e-3;
    double flo = boundary_determinant(lo, k, m);
    while (static_cast<int>(roots.size()) < count) {
        const double hi = lo + 0.01;
        const double fhi = boundary_determinant(hi, k, m);
        if ((flo < 0.0) != (fhi < 0.0)) {
            roots.push_back(oracle::bisect([&](double b) { return boundary_determinant(b, k, m); }, lo, hi));
        }
        lo = hi;
        flo = fhi;
    }
    return roots;
}

}  // namespace

TEST_CASE("nondimensionalize: unit rig maps onto itself")
{
    DimensionedParams d;
    d.density = d.crossSectionArea = d.youngsModulus = d.areaMomentInertia = d.length = 1.0;
    d.tipMass = 1.0;
    d.tipStiffness = 1000.0;
    d.kickForce = 12.95;
    d.materialDamping = 3e-4;
    d.viscousDamping = 4.5;
    d.kickerWidth = 0.2;
    d.criticalVelocity = 0.05;
    CHECK(characteristic_time(d) == doctest::Approx(1.0).epsilon(1e-15));
    const SystemParams s = nondimensionalize(d);
    CHECK(s.m == doctest::Approx(1.0));
    CHECK(s.k == doctest::Approx(1000.0));
    CHECK(s.F == doctest::Approx(12.95));
    CHECK(s.cv == doctest::Approx(4.5));
    CHECK(s.cm == doctest::Approx(3e-4));
    CHECK(s.d == doctest::Approx(0.2));
    CHECK(s.vcr == doctest::Approx(0.05));
}

TEST_CASE("nondimensionalize: re-dimensionalizing recovers the rig")
{
    DimensionedParams d;
    d.density = 7850.0;
    d.crossSectionArea = 2.4e-5;
    d.youngsModulus = 2.0e11;
    d.areaMomentInertia = 2.0e-12;
    d.length = 0.31;
    d.tipMass = 0.058;
    d.tipStiffness = 420.0;
    d.kickForce = 0.9;
    d.materialDamping = 1.1e-5;
    d.viscousDamping = 0.37;
    d.kickerWidth = 0.004;
    d.criticalVelocity = 0.02;
    const SystemParams s = nondimensionalize(d);
    const double rhoA = d.density * d.crossSectionArea;
    const double EI = d.youngsModulus * d.areaMomentInertia;
    const double l = d.length;
    const double tc = std::sqrt(rhoA * std::pow(l, 4) / EI);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    CHECK(rel(s.m * rhoA * l, d.tipMass) < 1e-12);
    CHECK(rel(s.k * EI / (l * l * l), d.tipStiffness) < 1e-12);
    CHECK(rel(s.F * EI / (l * l), d.kickForce) < 1e-12);
    CHECK(rel(s.cm * tc, d.materialDamping) < 1e-12);
    CHECK(rel(s.cv * rhoA / tc, d.viscousDamping) < 1e-12);
    CHECK(rel(s.d * l, d.kickerWidth) < 1e-12);
    CHECK(rel(s.vcr * l / tc, d.criticalVelocity) < 1e-12);
}

TEST_CASE("parameters: invalid values are rejected")
{
    SystemParams p;
    p.d = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = SystemParams{};
    p.F = -1.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = SystemParams{};
    p.N = 0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
}

TEST_CASE("characteristic roots: clamped-free limit against bisection")
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto roots = characteristic_roots(0.0, 0.0, 1);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(roots.size() == 1);
    const double ref = oracle::clamped_free_root(1);
    CHECK(ref == doctest::Approx(1.875104).epsilon(1e-6));
    CHECK(std::abs(roots[0] - ref) < 1e-10);
    CHECK(std::abs(roots[0] - 1.875104) < 1e-5);
    CHECK(elapsed < 1.0);
    for (int i = 2; i <= 4; ++i) {
        CHECK(std::abs(characteristic_roots(0.0, 0.0, i)[i - 1] - oracle::clamped_free_root(i)) < 1e-9);
    }
}

TEST_CASE("characteristic roots: beta = 0 is an excluded root")
{
    for (double k : {0.0, 3.0, 1000.0}) {
        CHECK(characteristic_function(0.0, k, 1.0) == doctest::Approx(0.0).scale(1.0));
        CHECK(characteristic_roots(k, 1.0, 3)[0] > 0.1);
    }
}

TEST_CASE("characteristic roots: 25 spring-tip roots match an independent scan")
{
    const auto roots = characteristic_roots(1000.0, 1.0, 25);
    REQUIRE(roots.size() == 25);
    const auto ref = scanned_roots(1000.0, 1.0, 25);
    for (int i = 0; i < 25; ++i) {
        CHECK(std::abs(roots[i] - ref[i]) < 1e-9 * ref[i]);
        CHECK(std::abs(characteristic_function(roots[i], 1000.0, 1.0)) < 1e-10);
        if (i > 0) {
            CHECK(roots[i] > roots[i - 1]);
        }
    }
    const auto free = characteristic_roots(0.0, 1.0, 25);
    const auto freeRef = scanned_roots(0.0, 1.0, 25);
    for (int i = 0; i < 25; ++i) {
        CHECK(std::abs(free[i] - freeRef[i]) < 1e-9 * freeRef[i]);
    }
}


TEST_CASE("modal basis: orthonormality relations for both variants at N = 25")
{
    SystemParams p;
    const auto t0 = std::chrono::steady_clock::now();
    const ModalBasis freeTip = build_modal_basis(p, BasisVariant::FreeTip);
    const ModalBasis springTip = build_modal_basis(p, BasisVariant::SpringTip);
    const auto a = modal_checks::gram_errors(freeTip, 0.0, p.m);
    const auto c = modal_checks::gram_errors(springTip, p.k, p.m);
    CHECK(a.normErr < 1e-8);
    CHECK(a.stiffErr < 1e-6);
    CHECK(c.normErr < 1e-8);
    CHECK(c.stiffErr < 1e-6);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 10.0);
}

TEST_CASE("modal basis: boundary conditions and tip sign convention")
{
    SystemParams p;
    for (auto v : {BasisVariant::FreeTip, BasisVariant::SpringTip}) {
        const ModalBasis b = build_modal_basis(p, v);
        for (int i = 0; i < b.size(); ++i) {
            CHECK(boundary_residual(b.modes[i], b.k, b.m) < 1e-8);
            CHECK(b.tipValues[i] >= 0.0);
        }
    }
}

TEST_CASE("modal basis: no tip mass or spring gives the textbook clamped-free shapes")
{
    const ModalBasis b = build_modal_basis(0.0, 0.0, 3, BasisVariant::FreeTip);
    for (int i = 0; i < 3; ++i) {
        const double beta = oracle::clamped_free_root(i + 1);
        const double tipRef = oracle::clamped_free_shape(beta, 1.0);
        const double sign = tipRef < 0.0 ? -1.0 : 1.0;
        CHECK(std::abs(b.tipValues[i] - sign * tipRef) < 1e-8);
        for (double x : {0.1, 0.37, 0.8}) {
            CHECK(std::abs(b.modes[i].evaluate(x) - sign * oracle::clamped_free_shape(beta, x)) < 1e-8);
        }
    }
}

TEST_CASE("modal basis: frequencies increase and stiffening never lowers them")
{
    SystemParams p;
    const ModalBasis a = build_modal_basis(p, BasisVariant::FreeTip);
    const ModalBasis c = build_modal_basis(p, BasisVariant::SpringTip);
    for (int i = 0; i < p.N; ++i) {
        if (i > 0) {
            CHECK(a.frequencies[i] > a.frequencies[i - 1]);
            CHECK(c.frequencies[i] > c.frequencies[i - 1]);
        }
        CHECK(c.frequencies[i] >= a.frequencies[i]);
    }
}

TEST_CASE("static deflection: tip value, zero force and boundary value problem")
{
    SystemParams p;
    const StaticDeflection ws = static_deflection(p, 1);
    CHECK(ws.tip() == doctest::Approx(3.0 * 12.95 / 1003.0 / 3.0).epsilon(1e-14));
    CHECK(std::abs(ws.tip() - 0.0129113) < 1e-7);
    const auto poly = ws.polynomial();
    const double A = 3.0 * p.F / (3.0 + p.k);
    CHECK(poly[0] == 0.0);
    CHECK(poly[1] == 0.0);
    CHECK(poly[2] == doctest::Approx(A / 2.0).epsilon(1e-15));
    CHECK(poly[3] == doctest::Approx(-A / 6.0).epsilon(1e-15));
    for (int sign : {1, -1}) {
        const StaticDeflection s = static_deflection(p, sign);
        CHECK(s.evaluate(0.0) == 0.0);
        CHECK(s.evaluate(0.0, 1) == 0.0);
        CHECK(std::abs(s.evaluate(1.0, 2)) < 1e-15);
        // Kick along +sign: w'''(1) = k w(1) - sign F.
        CHECK(std::abs(s.evaluate(1.0, 3) - p.k * s.tip() + sign * p.F) < 1e-12);
    }
    SystemParams zero = p;
    zero.F = 0.0;
    const StaticDeflection z = static_deflection(zero, 1);
    for (double x : {0.0, 0.5, 1.0}) {
        CHECK(z.evaluate(x) == 0.0);
    }
}

TEST_CASE("static deflection: modal shift satisfies omega^2 s = sign F xi(1)")
{
    SystemParams p;
    const ModalBasis c = build_modal_basis(p, BasisVariant::SpringTip);
    for (int sign : {1, -1}) {
        const Eigen::VectorXd s = project_static(c, static_deflection(p, sign));
        Eigen::VectorXd ref(c.size());
        for (int i = 0; i < c.size(); ++i) {
            ref[i] = sign * p.F * c.tipValues[i] / (c.frequencies[i] * c.frequencies[i]);
        }
        CHECK((s - ref).norm() < 1e-8 * ref.norm());
        CHECK((s - ref).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("transition matrix: closed-form entries and identity limit")
{
    SystemParams p;
    const ModalBasis a = build_modal_basis(p, BasisVariant::FreeTip);
    const ModalBasis c = build_modal_basis(p, BasisVariant::SpringTip);
    const TransitionMatrix G = transition_matrix(a, c, p.m, TransitionDirection::AtoBC);
    const TransitionMatrix H = transition_matrix(a, c, p.m, TransitionDirection::BCtoA);
    const double scale = G.entries.cwiseAbs().maxCoeff();
    double worst = 0.0;
    // Diagonal entries are left to the round-trip test: there omega_i^2 and
    // Omega_i^2 nearly cancel and the closed form loses ~1e-6.
    for (int i = 0; i < p.N; ++i) {
        for (int j = 0; j < p.N; ++j) {
            if (i == j) {
                continue;
            }
            const double wi = c.frequencies[i] * c.frequencies[i];
            const double Wj = a.frequencies[j] * a.frequencies[j];
            const double ref = p.k * c.tipValues[i] * a.tipValues[j] / (wi - Wj);
            worst = std::max(worst, std::abs(G.entries(i, j) - ref));
        }
    }
    CHECK(worst < 1e-8 * scale);
    CHECK((H.entries - G.entries.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 0; i < p.N; ++i) {
        CHECK(G.entries.row(i).squaredNorm() <= 1.0 + 1e-6);
        CHECK(H.entries.row(i).squaredNorm() <= 1.0 + 1e-6);
    }

    SystemParams soft = p;
    soft.k = 0.0;
    const ModalBasis a0 = build_modal_basis(soft, BasisVariant::FreeTip);
    const ModalBasis c0 = build_modal_basis(soft, BasisVariant::SpringTip);
    const TransitionMatrix I = transition_matrix(a0, c0, soft.m, TransitionDirection::AtoBC);
    CHECK((I.entries - Eigen::MatrixXd::Identity(p.N, p.N)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("transition matrix: round trip on the lower half of the modes")
{
    SystemParams p;
    const ModalBasis a = build_modal_basis(p, BasisVariant::FreeTip);
    const ModalBasis c = build_modal_basis(p, BasisVariant::SpringTip);
    const Eigen::MatrixXd G = transition_matrix(a, c, p.m, TransitionDirection::AtoBC).entries;
    const Eigen::MatrixXd H = transition_matrix(a, c, p.m, TransitionDirection::BCtoA).entries;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd q = Eigen::VectorXd::Zero(p.N);
        for (int i = 0; i < p.N / 2; ++i) {
            q[i] = std::sin(1.7 * (i + 1) + trial) / (1.0 + i);
        }
        const Eigen::VectorXd back = H * (G * q);
        CHECK((back - q).norm() < 1e-6 * q.norm());
    }
}
