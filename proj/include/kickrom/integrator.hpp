#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "kickrom/hybrid.hpp"

namespace kickrom {

struct IntegratorConfig {
    double relTol = 1e-8;
    double absTol = 1e-10;
    double maxStep = 1e-2;
    double initialStep = 1e-4;
    double minStep = 1e-14;
    double eventTol = 1e-10;
    double boundaryTol = 1e-6;
    bool trackEnergy = false;

    void validate() const;
};

/// Boundary surfaces watched by the integrator.
enum class EventKind { UpperEdge, LowerEdge, Center, Speed };

const char* to_string(EventKind k);

struct TransitionEvent {
    double time = 0.0;
    EventKind kind = EventKind::UpperEdge;
    double tipW = 0.0;
    double tipV = 0.0;
    Region before = Region::R1;
    Region after = Region::R1;
    DiscreteMode modeBefore;
    DiscreteMode modeAfter;
};

/// Crossing of the Poincare section w(1) = d/2 with decreasing displacement
/// (mirror: w(1) = -d/2 with increasing displacement).
struct SectionCrossing {
    double time = 0.0;
    double tipW = 0.0;
    double tipV = 0.0;
    bool mirror = false;
    Region before = Region::R2;
    Region after = Region::R3;
};

/// Uniform sample times start + j * interval up to `end`, with `end` itself
/// always included when `includeEnd` is set.
struct SampleClock {
    double start = 0.0;
    double interval = 1e-3;
    double end = 0.0;
    bool includeEnd = true;

    std::size_t count() const;
    double time(std::size_t j) const;
};

class IntegrationObserver {
public:
    virtual ~IntegrationObserver() = default;
    virtual void on_sample(const HybridState&) {}
    virtual void on_event(const TransitionEvent&, const HybridState&) {}
    virtual void on_crossing(const SectionCrossing&, const HybridState&) {}
    /// Polled after every accepted step and event.
    virtual bool stop_requested() const { return false; }
};

/// Work integrals accumulated over accepted steps.
struct EnergyLedger {
    double input = 0.0;
    double dissipated = 0.0;
};

enum class StopReason { ReachedEnd, Observer };

/// Adaptive Dormand-Prince 5(4) integration of a hybrid plant with event
/// location by bisection on the crossing step.
class HybridIntegrator {
public:
    HybridIntegrator(const HybridPlant& plant, IntegratorConfig config);

    /// Advances `state` to `tEnd` or until the observer asks to stop. Samples are
    /// emitted at the clock times, which the step sequence hits exactly.
    StopReason advance(HybridState& state, double tEnd, IntegrationObserver* observer = nullptr,
                       const SampleClock* clock = nullptr);

    const EnergyLedger& energy() const { return ledger_; }
    void reset_energy() { ledger_ = {}; }
    std::size_t accepted_steps() const { return accepted_; }
    std::size_t rejected_steps() const { return rejected_; }
    const IntegratorConfig& config() const { return config_; }

private:
    struct Events {
        double g[4];
    };

    void derivative(const DiscreteMode& mode, const Eigen::VectorXd& y, Eigen::VectorXd& dy) const;
    /// One Dormand-Prince step. Returns the scaled error norm when requested.
    double step(const DiscreteMode& mode, double h, const Eigen::VectorXd& y, const Eigen::VectorXd& k1,
                Eigen::VectorXd& yOut, Eigen::VectorXd& k7, bool wantError, EnergyLedger* work);
    Events events(const DiscreteMode& mode, const Eigen::VectorXd& y) const;
    void pack(const HybridState& s, Eigen::VectorXd& y) const;
    void unpack(const Eigen::VectorXd& y, HybridState& s) const;

    const HybridPlant& plant_;
    IntegratorConfig config_;
    int n_;
    Eigen::VectorXd k_[7];
    Eigen::VectorXd stage_;
    Eigen::VectorXd err_;
    EnergyLedger ledger_;
    double hPrev_ = 0.0;
    double errPrev_ = 1e-4;
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
};

}  // namespace kickrom
