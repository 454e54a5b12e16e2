#include "doctest.h"

#include <cmath>
#include <random>

#include "kickrom/errors.hpp"
#include "kickrom/hybrid.hpp"
#include "kickrom/simulate.hpp"
#include "oracles.hpp"

using namespace kickrom;

namespace {

const FullOrderModel& reference_plant()
{
    static const FullOrderModel fos{SystemParams{}};
    return fos;
}

// State in `model` coordinates with the given tip displacement and velocity,
// built from a smooth mix of the first few modes.
HybridState shaped_state(const FullOrderModel& fos, Model model, double tipW, double tipV)
{
    const int n = fos.dofs();
    Eigen::VectorXd shape = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < 4; ++i) {
        shape[i] = 1.0 / ((i + 1.0) * (i + 1.0));
    }
    const double tip = fos.tip_row(model).dot(shape);
    HybridState s;
    s.coords = shape * (tipW / tip);
    s.vels = shape * (tipV / tip);
    s.mode = DiscreteMode{model, false, 0};
    s.region = classify_region(tipW, tipV, fos.params());
    return s;
}

double field_l2(const FullOrderModel& fos, const HybridState& s, bool velocity)
{
    const oracle::CompositeRule rule(100, 8);
    const Eigen::VectorXd f = velocity ? fos.velocity_field(s, rule.nodes) : fos.displacement_field(s, rule.nodes);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        sum += rule.weights[q] * f[q] * f[q];
    }
    return std::sqrt(sum);
}

}  // namespace

TEST_CASE("regions: reference points")
{
    SystemParams p;
    CHECK(classify_region(0.15, 3.0, p) == Region::R2);
    CHECK(classify_region(0.15, -3.0, p) == Region::R2);
    CHECK(classify_region(-0.05, 0.2, p) == Region::R8);
    CHECK(classify_region(0.05, -0.02, p) == Region::R3);
    CHECK(classify_region(0.05, -0.2, p) == Region::R4);
    CHECK(classify_region(-0.15, 0.0, p) == Region::R6);
}

TEST_CASE("regions: classification is total and mirror-symmetric")
{
    SystemParams p;
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> W(-0.3, 0.3);
    std::uniform_real_distribution<double> V(-0.5, 0.5);
    int bad = 0;
    for (int i = 0; i < 1000000; ++i) {
        const double w = W(rng);
        const double v = V(rng);
        const Region r = classify_region(w, v, p);
        const int idx = region_index(r);
        bad += (idx < 1 || idx > 8) ? 1 : 0;
        bad += mirror(mirror(r)) != r ? 1 : 0;
        bad += classify_region(-w, -v, p) != mirror(r) ? 1 : 0;
        // An unarmed mode always exists for every region.
        const DiscreteMode unarmed{in_zone(r) ? Model::C : Model::A, false, 0};
        bad += mode_consistent(unarmed, r) ? 0 : 1;
    }
    CHECK(bad == 0);
}

TEST_CASE("automaton: kick arms only on a fast entry from outside")
{
    const DiscreteMode free{Model::A, false, 0};
    const DiscreteMode armed = next_mode(free, Region::R2, Region::R4);
    CHECK(armed.model == Model::B);
    CHECK(armed.kickArmed);
    CHECK(armed.kickSign == -1);
    const DiscreteMode armedUp = next_mode(DiscreteMode{Model::A, false, 0}, Region::R6, Region::R8);
    CHECK(armedUp.kickSign == 1);
    const DiscreteMode slow = next_mode(free, Region::R2, Region::R3);
    CHECK(slow.model == Model::C);
    CHECK_FALSE(slow.kickArmed);
    const DiscreteMode inside{Model::C, false, 0};
    const DiscreteMode stay = next_mode(inside, Region::R7, Region::R8);
    CHECK(stay.model == Model::C);
    CHECK_FALSE(stay.kickArmed);
    // Leaving the zone always returns to the free-tip model.
    CHECK(next_mode(armed, Region::R4, Region::R6).model == Model::A);
}

TEST_CASE("rhs: zero state is an equilibrium")
{
    const auto& fos = reference_plant();
    HybridState s;
    s.coords = Eigen::VectorXd::Zero(fos.dofs());
    s.vels = Eigen::VectorXd::Zero(fos.dofs());
    s.mode = DiscreteMode{Model::C, false, 0};
    s.region = Region::R1;
    CHECK(rhs(s, fos).norm() == 0.0);
    s.mode = DiscreteMode{Model::A, false, 0};
    CHECK_THROWS_AS(rhs(s, fos), HybridConsistencyError);
}

TEST_CASE("rhs: decoupled single mode is a damped oscillator")
{
    const auto& fos = reference_plant();
    OdeSystem sys = fos.system(DiscreteMode{Model::C, false, 0});
    sys.coupling = 0.0;
    const int n = fos.dofs();
    for (int i : {0, 3, 12}) {
        Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        q[i] = 0.3;
        v[i] = -0.7;
        Eigen::VectorXd a(n);
        sys.accelerations(q.data(), v.data(), a.data());
        const double w2 = fos.spring_tip().frequencies[i] * fos.spring_tip().frequencies[i];
        const double ref = -(4.5 + 3e-4 * w2) * v[i] - w2 * q[i];
        CHECK(a[i] == doctest::Approx(ref).epsilon(1e-13));
        a[i] = 0.0;
        CHECK(a.norm() == 0.0);
    }
}

TEST_CASE("energy: rate of change equals minus the dissipation without the kick")
{
    const auto& fos = reference_plant();
    const SystemParams& p = fos.params();
    const oracle::CompositeRule rule(100, 8);
    for (Model m : {Model::A, Model::C}) {
        const double tipW = m == Model::A ? 0.17 : 0.04;
        HybridState s = shaped_state(fos, m, tipW, 0.3);
        s.vels[5] += 0.01;
        const Eigen::VectorXd acc = rhs(s, fos);
        const double eps = 1e-6;
        const Eigen::VectorXd qp = s.coords + eps * s.vels;
        const Eigen::VectorXd qm = s.coords - eps * s.vels;
        const Eigen::VectorXd vp = s.vels + eps * acc;
        const Eigen::VectorXd vm = s.vels - eps * acc;
        const double dE = (fos.energy(s.mode, qp.data(), vp.data()) - fos.energy(s.mode, qm.data(), vm.data())) /
                          (2 * eps);
        const double diss = fos.dissipation_power(s.mode, s.coords.data(), s.vels.data());
        CHECK(diss > 0.0);
        CHECK(dE == doctest::Approx(-diss).epsilon(1e-6));

        // Independent form: cv int v^2 + cm int (v'')^2.
        const Eigen::VectorXd v0 = fos.shape_matrix(m, rule.nodes, 0) * s.vels;
        const Eigen::VectorXd v2 = fos.shape_matrix(m, rule.nodes, 2) * s.vels;
        double ref = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            ref += rule.weights[q] * (p.cv * v0[q] * v0[q] + p.cm * v2[q] * v2[q]);
        }
        CHECK(diss == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("transition: displacement and velocity fields are continuous across the edge")
{
    const auto& fos = reference_plant();
    const SystemParams& p = fos.params();
    const double h = p.halfWidth();
    // Slow entry (model A -> C) and fast entry (model A -> B).
    for (double tipV : {-0.02, -0.4}) {
        HybridState a = shaped_state(fos, Model::A, h, tipV);
        a.region = Region::R2;
        const Region inside = classify_region(h - 1e-9, tipV, p);
        const HybridState c = apply_transition(a, inside, fos);
        CHECK(c.mode.model == (std::abs(tipV) > p.vcr ? Model::B : Model::C));
        const oracle::CompositeRule rule(100, 8);
        const Eigen::VectorXd wa = fos.displacement_field(a, rule.nodes);
        const Eigen::VectorXd wc = fos.displacement_field(c, rule.nodes);
        const Eigen::VectorXd va = fos.velocity_field(a, rule.nodes);
        const Eigen::VectorXd vc = fos.velocity_field(c, rule.nodes);
        double ew = 0.0;
        double ev = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            ew += rule.weights[q] * (wa[q] - wc[q]) * (wa[q] - wc[q]);
            ev += rule.weights[q] * (va[q] - vc[q]) * (va[q] - vc[q]);
        }
        // Truncation of the 25-mode re-expansion, absolute L2.
        CHECK(std::sqrt(ew) < 1e-6);
        CHECK(std::sqrt(ev) < 1e-6);
        CHECK(std::sqrt(ew) < 1e-5 * field_l2(fos, a, false));
        // And back out again.
        HybridState back = c;
        back.region = inside;
        const HybridState out = apply_transition(back, Region::R2, fos);
        CHECK(out.mode.model == Model::A);
        CHECK((out.coords - a.coords).norm() < 1e-6 * a.coords.norm());
    }
}

TEST_CASE("transition: requests away from a boundary are rejected")
{
    const auto& fos = reference_plant();
    HybridState a = shaped_state(fos, Model::A, 0.17, -0.3);
    CHECK_THROWS_AS(apply_transition(a, Region::R4, fos), EventConsistencyError);
}

TEST_CASE("kick: input power is non-negative whenever the kick is active")
{
    const auto& fos = reference_plant();
    const SystemParams& p = fos.params();
    for (double tipV : {-0.5, -0.06, 0.06, 0.5}) {
        const int sign = tipV > 0 ? 1 : -1;
        HybridState s = shaped_state(fos, Model::C, 0.01 * -sign, tipV);
        s.mode = DiscreteMode{Model::B, true, sign};
        const double power = fos.input_power(s.mode, s.vels.data());
        CHECK(power == doctest::Approx(p.F * std::abs(tipV)).epsilon(1e-12));
    }
}

TEST_CASE("symmetry: mirrored start gives the mirrored trajectory")
{
    const auto& fos = reference_plant();
    const HybridState s0 = default_initial_state(fos);
    IntegratorConfig cfg;
    const Trajectory a = integrate(fos, s0, 30.0, cfg, 50.0);
    const Trajectory b = integrate(fos, mirrored(s0), 30.0, cfg, 50.0);
    REQUIRE(a.samples.size() == b.samples.size());
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const auto& sa = a.samples[i];
        const auto& sb = b.samples[i];
        REQUIRE(sa.mode.model == sb.mode.model);
        CHECK(sa.mode.kickSign == -sb.mode.kickSign);
        worst = std::max(worst, (sa.coords + sb.coords).cwiseAbs().maxCoeff());
        scale = std::max(scale, sa.coords.cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-8 * scale);
    CHECK(a.events.size() == b.events.size());
}

TEST_CASE("no kick: every trajectory decays to the static equilibrium")
{
    SystemParams p;
    p.vcr = 1e3;  // the kick can never trigger
    const FullOrderModel fos(p);
    const HybridState s0 = default_initial_state(fos);
    const double e0 = static_cast<const HybridPlant&>(fos).energy(s0);
    const Trajectory t = integrate(fos, s0, 60.0, IntegratorConfig{});
    CHECK(t.work.input == 0.0);
    CHECK(static_cast<const HybridPlant&>(fos).energy(t.final) < e0);
    const SteadyStateRun run = run_to_steady_state(fos, s0, IntegratorConfig{}, SteadyStateOptions{});
    CHECK(run.info.kind == SteadyKind::StaticEquilibrium);
}
