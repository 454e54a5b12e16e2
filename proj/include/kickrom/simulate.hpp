#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kickrom/hybrid.hpp"
#include "kickrom/integrator.hpp"

namespace kickrom {

struct TrajectorySample {
    double time = 0.0;
    Eigen::VectorXd coords;
    Eigen::VectorXd vels;
    DiscreteMode mode;
};

/// Interval of kick activity [on, off) with the sign of the applied force.
struct KickInterval {
    double on = 0.0;
    double off = 0.0;
    int sign = 1;
};

struct SectionCrossings {
    std::vector<SectionCrossing> primary;
    std::vector<SectionCrossing> mirror;
    std::vector<HybridState> states;  ///< post-transition states at primary crossings, when kept
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<TransitionEvent> events;
    SectionCrossings crossings;
    HybridState final;
    EnergyLedger work;
    double energyStart = 0.0;
    double energyEnd = 0.0;

    std::vector<KickInterval> kick_intervals(const DiscreteMode& initialMode, double tStart, double tEnd) const;
};

/// Integrates over [initial.time, initial.time + duration]. With a positive
/// sampleRate the samples start at initial.time.
Trajectory integrate(const HybridPlant& plant, const HybridState& initial, double duration,
                     const IntegratorConfig& cfg, double sampleRate = 0.0, bool keepCrossingStates = false);

/// Sampled displacement and velocity fields: rows = spatial points, columns = time samples.
struct SnapshotSet {
    std::vector<double> xGrid;
    std::vector<double> tGrid;
    Eigen::MatrixXd W;
    Eigen::MatrixXd Wdot;
    SystemParams params;
    std::vector<KickInterval> kicks;
    double period = 0.0;  ///< window length when it spans whole periods, else 0
    std::map<std::string, std::string> provenance;

    void validate() const;
    /// Content hash over grids and matrices (hex).
    std::string fingerprint() const;
};

/// sample_fields plus the kick intervals of the trajectory's window.
SnapshotSet snapshots_from(const Trajectory& traj, const DiscreteMode& initialMode, const HybridPlant& plant,
                           const std::vector<double>& xGrid);

std::vector<double> uniform_grid(int count, double a = 0.0, double b = 1.0);

/// Absolute fields at every sample (model-B samples already carry the static
/// deflection through the absolute coordinates).
SnapshotSet sample_fields(const std::vector<TrajectorySample>& samples, const HybridPlant& plant,
                          const std::vector<double>& xGrid);

enum class SteadyKind { Periodic, Chaotic, StaticEquilibrium, Unresolved };

const char* to_string(SteadyKind k);

struct SteadyStateInfo {
    SteadyKind kind = SteadyKind::Unresolved;
    int periodN = 0;
    double period = 0.0;
    std::vector<double> sectionValues;  ///< cluster centers (periodic) or raw crossings (chaotic)
    std::vector<double> mirrorValues;   ///< same quantities on the mirror section
    bool symmetric = false;

    std::string label() const;
};

struct SteadyStateOptions {
    double clusterTol = 1e-4;
    int maxPoints = 16;
    int lockCycles = 3;
    double transientTime = 200.0;
    double measureTime = 100.0;
    bool earlyExit = true;
    double symmetryTol = 1e-3;
};

/// Smallest n <= maxPoints such that the trailing lockCycles * n values repeat
/// with period n to within tol; 0 if none.
int detect_lock(const std::vector<double>& values, double tol, int maxPoints, int lockCycles);

/// Greedy clustering (values within tol of an existing center join it).
std::vector<double> cluster_values(const std::vector<double>& values, double tol);

/// Classifies transient-free crossings. Static equilibria are decided by the
/// runner, which knows the energy; here an empty record is Unresolved.
SteadyStateInfo detect_steady_state(const SectionCrossings& crossings, const SteadyStateOptions& opts);

struct SteadyStateRun {
    SteadyStateInfo info;
    HybridState final;  ///< at a primary section crossing for periodic/chaotic results
    SectionCrossings crossings;
    double elapsed = 0.0;
};

/// Integrates until a period lock, a static trap (unarmed with too little energy
/// to leave the zone), or the transient + measurement budget is used up.
SteadyStateRun run_to_steady_state(const HybridPlant& plant, const HybridState& initial,
                                   const IntegratorConfig& cfg, const SteadyStateOptions& opts);

/// Records `crossingCount` section-to-section cycles starting from a state at
/// a primary crossing, sampled at `sampleRate`; the last sample is the closing
/// crossing itself, so the window covers whole cycles.
Trajectory record_cycles(const HybridPlant& plant, const HybridState& atCrossing, int crossingCount,
                         const IntegratorConfig& cfg, double sampleRate, double maxDuration = 1e4);

/// Builds a consistent state (mode, region, shift) from coordinates in the
/// basis of `model` and a trajectory-free start.
HybridState make_state(const HybridPlant& plant, Model model, const Eigen::VectorXd& coords,
                       const Eigen::VectorXd& vels, double time = 0.0);

/// Default start for fresh runs: the first free-tip mode at rest, displaced
/// so the tip sits at 2.5 d outside the zone.
HybridState default_initial_state(const FullOrderModel& fos);

void write_snapshots(const SnapshotSet& s, const std::string& dir);
SnapshotSet read_snapshots(const std::string& dir);
std::string crossings_to_csv(const SectionCrossings& c);
std::string mode_trace_to_csv(const std::vector<TransitionEvent>& events);

}  // namespace kickrom
