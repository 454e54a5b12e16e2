#pragma once

#include <string>
#include <vector>

#include "kickrom/analysis.hpp"
#include "kickrom/bifurcation.hpp"
#include "kickrom/config.hpp"
#include "kickrom/pod.hpp"
#include "kickrom/rom.hpp"
#include "kickrom/simulate.hpp"

namespace kickrom {

struct DatasetOptions {
    int gridPoints = 100;
    double sampleRate = 1000.0;
    int cycles = 0;          ///< section cycles to record; 0: one period (periodic) or chaoticCycles
    int chaoticCycles = 16;
    IntegratorConfig integrator;
    SteadyStateOptions steady;
};

struct GeneratedDataset {
    SteadyStateRun steady;
    Trajectory window;
    SnapshotSet snapshots;
};

/// Steady state from `initial`, then a sampled window starting on the section.
/// Throws InputError when the plant settles on the static equilibrium.
GeneratedDataset generate_dataset(const HybridPlant& plant, const HybridState& initial, const DatasetOptions& opts);

/// Full-order data at the given parameters from the default start.
GeneratedDataset full_order_dataset(const SystemParams& params, const DatasetOptions& opts);

/// Reduced-order data started from the projection of a full-order state.
GeneratedDataset rom_dataset(const RomPlant& rom, const HybridState& fullState, const HybridPlant& fos,
                             const DatasetOptions& opts);

/// Tip displacement series of a snapshot set (last grid row must be x = 1).
std::vector<double> tip_series(const SnapshotSet& s);

// Option readers for the pipeline configuration. Each consumes its section.
IntegratorConfig read_integrator(const KeyValueConfig& cfg);
SteadyStateOptions read_steady(const KeyValueConfig& cfg);
DatasetOptions read_dataset(const KeyValueConfig& cfg);
PodOptions read_pod(const KeyValueConfig& cfg);
SweepConfig read_sweep(const KeyValueConfig& cfg);
std::vector<double> parse_list(const std::string& text);

}  // namespace kickrom
