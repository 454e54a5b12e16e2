#include "doctest.h"

#include <cmath>
#include <limits>

#include "kickrom/bifurcation.hpp"
#include "kickrom/errors.hpp"

using namespace kickrom;

namespace {

SteadyStateRun steady_from(double F, const HybridState& (*pick)(const HybridState&), double scale = 1.0)
{
    SystemParams p;
    p.F = F;
    const FullOrderModel fos(p);
    HybridState s0 = default_initial_state(fos);
    s0.coords *= scale;
    return run_to_steady_state(fos, pick(s0), IntegratorConfig{}, SteadyStateOptions{});
}

const HybridState& as_is(const HybridState& s) { return s; }

BifurcationRecord record(double F, std::vector<double> values, SteadyKind kind, int n, bool symmetric)
{
    BifurcationRecord r;
    r.F = F;
    r.info.kind = kind;
    r.info.periodN = n;
    r.info.sectionValues = std::move(values);
    r.info.symmetric = symmetric;
    r.seed = "previous";
    return r;
}

}  // namespace

TEST_CASE("hausdorff: reference sets")
{
    CHECK(hausdorff_distance({1.0, 2.0}, {1.0, 2.0}) == 0.0);
    CHECK(hausdorff_distance({1.0}, {1.0, 1.5}) == doctest::Approx(0.5));
    CHECK(hausdorff_distance({0.0, 3.0}, {1.0}) == doctest::Approx(2.0));
    CHECK(hausdorff_distance({}, {}) == 0.0);
    CHECK(hausdorff_distance({1.0}, {}) == std::numeric_limits<double>::infinity());
}

TEST_CASE("sweep grid: endpoints, spacing and validation")
{
    SweepConfig cfg;
    CHECK(cfg.count() == 1141);
    CHECK(cfg.f_at(0) == 12.95);
    CHECK(cfg.f_at(cfg.count() - 1) == doctest::Approx(12.38).epsilon(1e-12));
    CHECK(cfg.direction() == -1);
    SweepConfig bad = cfg;
    bad.deltaF = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = cfg;
    bad.deltaF = std::nan("");
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = cfg;
    bad.fEnd = bad.fStart;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = cfg;
    bad.deltaF = 0.07;  // a step that does not divide the range stops short of the end
    CHECK(bad.f_at(bad.count() - 1) >= 12.38);
    bad = cfg;
    bad.maxPointsPerF = 0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    SweepConfig rom = cfg;
    rom.engine = SweepEngine::Rom;
    CHECK_THROWS(run_sweep(rom, SystemParams{}, nullptr));
}

TEST_CASE("dataset: csv round trip and comparison with itself")
{
    BifurcationDataset d;
    d.branch = "decreasing";
    d.records.push_back(record(12.95, {-0.2928412345678901}, SteadyKind::Periodic, 1, true));
    d.records.push_back(record(12.66, {-0.31, -0.27}, SteadyKind::Periodic, 2, false));
    d.records.push_back(record(12.6, {-0.3, -0.29, -0.25}, SteadyKind::Chaotic, 0, false));
    d.records.push_back(record(12.4, {}, SteadyKind::StaticEquilibrium, 0, false));
    const BifurcationDataset back = BifurcationDataset::from_csv(d.to_csv());
    REQUIRE(back.records.size() == d.records.size());
    for (std::size_t i = 0; i < d.records.size(); ++i) {
        CHECK(back.records[i].F == d.records[i].F);
        CHECK(back.records[i].info.sectionValues == d.records[i].info.sectionValues);
        CHECK(back.records[i].info.label() == d.records[i].info.label());
    }
    const DatasetComparison c = compare_datasets(d, back);
    CHECK(c.agreementFraction == 1.0);
    CHECK(c.flagged == 0);
    CHECK(c.maxFiniteHausdorff == 0.0);
    CHECK(d.at(12.66) != nullptr);
    CHECK(d.at(12.67) == nullptr);
}

TEST_CASE("dataset: summary events")
{
    BifurcationDataset d;
    d.records.push_back(record(12.95, {-0.29}, SteadyKind::Periodic, 1, true));
    d.records.push_back(record(12.85, {-0.28}, SteadyKind::Periodic, 1, false));
    d.records.push_back(record(12.80, {-0.27}, SteadyKind::Periodic, 1, false));
    d.records.push_back(record(12.66, {-0.31, -0.27}, SteadyKind::Periodic, 2, false));
    d.records.push_back(record(12.60, {-0.3, -0.29}, SteadyKind::Chaotic, 0, false));
    d.records.push_back(record(12.58, {-0.3, -0.29}, SteadyKind::Chaotic, 0, false));
    d.records.push_back(record(12.45, {-0.3}, SteadyKind::Periodic, 1, true));
    d.records.push_back(record(12.41, {}, SteadyKind::StaticEquilibrium, 0, false));
    d.records.push_back(record(12.40, {}, SteadyKind::StaticEquilibrium, 0, false));
    const BifurcationSummary s = summarize({&d});
    CHECK(*s.symmetryBreakingF == doctest::Approx(12.85));
    CHECK(*s.firstPeriodDoublingF == doctest::Approx(12.66));
    CHECK(*s.chaoticBandLow == doctest::Approx(12.58));
    CHECK(*s.chaoticBandHigh == doctest::Approx(12.60));
    CHECK(*s.staticThresholdF == doctest::Approx(12.41));
    CHECK(s.counts[static_cast<int>(SteadyKind::Chaotic)] == 2);
}

TEST_CASE("attractor: reference orbit is robust to the start")
{
    const SteadyStateRun base = steady_from(12.95, as_is);
    REQUIRE(base.info.kind == SteadyKind::Periodic);
    for (double scale : {0.8, 1.3}) {
        const SteadyStateRun other = steady_from(12.95, as_is, scale);
        REQUIRE(other.info.kind == SteadyKind::Periodic);
        CHECK(hausdorff_distance(base.info.sectionValues, other.info.sectionValues) < 1e-3);
    }
}

TEST_CASE("attractor: asymmetric orbits come in mirror pairs")
{
    const SteadyStateRun a = steady_from(12.8, as_is);
    const SteadyStateRun b = steady_from(12.8, [](const HybridState& s) -> const HybridState& {
        static thread_local HybridState m;
        m = mirrored(s);
        return m;
    });
    REQUIRE(a.info.kind == SteadyKind::Periodic);
    REQUIRE(b.info.kind == SteadyKind::Periodic);
    CHECK_FALSE(a.info.symmetric);
    CHECK_FALSE(b.info.symmetric);
    // Mirror-section velocities are stored as measured (positive).
    auto negated = [](std::vector<double> v) {
        for (double& x : v) {
            x = -x;
        }
        return v;
    };
    CHECK(hausdorff_distance(a.info.sectionValues, negated(b.info.mirrorValues)) < 1e-4);
    CHECK(hausdorff_distance(negated(a.info.mirrorValues), b.info.sectionValues) < 1e-4);

    // The partner branch is a distinct attractor and the comparison flags it.
    BifurcationDataset da;
    BifurcationDataset db;
    da.records.push_back(record(12.8, a.info.sectionValues, a.info.kind, a.info.periodN, false));
    db.records.push_back(record(12.8, b.info.sectionValues, b.info.kind, b.info.periodN, false));
    const DatasetComparison c = compare_datasets(da, db);
    CHECK(c.flagged == 1);
    CHECK(c.agreementFraction == 1.0);
}

TEST_CASE("sweep: deterministic and the two directions meet")
{
    SweepConfig down;
    down.fStart = 12.95;
    down.fEnd = 12.93;
    down.deltaF = 0.01;
    SweepConfig up = down;
    up.fStart = 12.93;
    up.fEnd = 12.95;
    const auto [d1, u1] = run_sweeps(down, up, SystemParams{});
    const BifurcationDataset d2 = run_sweep(down, SystemParams{});
    CHECK(d1.to_csv() == d2.to_csv());
    REQUIRE(d1.records.size() == 3);
    REQUIRE(u1.records.size() == 3);
    CHECK(d1.records[0].seed == "default");
    CHECK(d1.records[1].seed == "previous");
    const BifurcationRecord* a = d1.at(12.95);
    const BifurcationRecord* b = u1.at(12.95);
    REQUIRE(a != nullptr);
    REQUIRE(b != nullptr);
    CHECK(a->info.label() == b->info.label());
    CHECK(hausdorff_distance(a->info.sectionValues, b->info.sectionValues) < 1e-4);
}
