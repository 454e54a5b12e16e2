#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kickrom/rom.hpp"
#include "kickrom/simulate.hpp"

namespace kickrom {

enum class SweepEngine { FullOrder, Rom };

const char* to_string(SweepEngine e);

struct SweepConfig {
    double fStart = 12.95;
    double fEnd = 12.38;
    double deltaF = 5e-4;
    int maxPointsPerF = 16;
    SweepEngine engine = SweepEngine::FullOrder;
    IntegratorConfig integrator;
    SteadyStateOptions steady;

    void validate() const;
    int count() const;  ///< number of F values, both ends included
    double f_at(int i) const;
    int direction() const { return fEnd > fStart ? 1 : -1; }
};

struct BifurcationRecord {
    double F = 0.0;
    SteadyStateInfo info;
    std::string seed;  ///< "default" or "previous"
    double elapsed = 0.0;
};

struct BifurcationDataset {
    std::string branch;  ///< "decreasing" or "increasing"
    SweepEngine engine = SweepEngine::FullOrder;
    std::vector<BifurcationRecord> records;

    /// F, crossing_index, v_tip, classification, period_n; records without
    /// section values get one row with crossing_index -1 and an empty v_tip.
    std::string to_csv() const;
    static BifurcationDataset from_csv(const std::string& text);
    const BifurcationRecord* at(double F, double tol = 1e-9) const;
};

/// Continuation over F: each F starts from the previous F's final state, the
/// first from the default start (projected onto the ROM for the ROM engine).
/// `rom` is required for the ROM engine; its kick strength is replaced per F.
BifurcationDataset run_sweep(const SweepConfig& cfg, const SystemParams& params, const RomPackage* rom = nullptr);

/// Runs the two configurations concurrently.
std::pair<BifurcationDataset, BifurcationDataset> run_sweeps(const SweepConfig& a, const SweepConfig& b,
                                                             const SystemParams& params,
                                                             const RomPackage* rom = nullptr);

/// Event estimates on a dataset (or on two opposite branches merged).
struct BifurcationSummary {
    double fMin = 0.0;
    double fMax = 0.0;
    std::optional<double> symmetryBreakingF;  ///< highest F with an asymmetric period-1 orbit
    std::optional<double> lowestAsymmetricF;
    std::optional<double> firstPeriodDoublingF;  ///< highest F with period n = 2
    std::optional<double> chaoticBandLow;
    std::optional<double> chaoticBandHigh;
    std::optional<double> staticThresholdF;  ///< highest F of a static record with only static records below
    int counts[4] = {0, 0, 0, 0};            ///< per SteadyKind

    std::string to_json() const;
};

BifurcationSummary summarize(const std::vector<const BifurcationDataset*>& branches);

struct DatasetComparison {
    std::vector<double> F;
    std::vector<double> hausdorff;  ///< +inf when exactly one side has no section values
    std::vector<bool> agree;        ///< identical classification label
    double agreementFraction = 0.0;
    double maxFiniteHausdorff = 0.0;
    int flagged = 0;                ///< records whose distance exceeds tol

    std::string to_json() const;
};

/// Hausdorff distance between per-F section-value sets and label agreement.
DatasetComparison compare_datasets(const BifurcationDataset& a, const BifurcationDataset& b, double tol = 1e-3);

double hausdorff_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace kickrom
