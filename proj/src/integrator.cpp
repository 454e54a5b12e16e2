#include "kickrom/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kickrom/errors.hpp"

namespace kickrom {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double C[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double A[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double B[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double E[7] = {71.0 / 57600,      0.0,         -71.0 / 16695, 71.0 / 1920,
                         -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kMaxGrow = 10.0;
constexpr double kMaxShrink = 5.0;

constexpr int kUpper = 0;
constexpr int kLower = 1;
constexpr int kCenter = 2;
constexpr int kSpeed = 3;

struct Sides {
    bool s[4] = {false, false, false, false};
};

}  // namespace

const char* to_string(EventKind k)
{
    switch (k) {
    case EventKind::UpperEdge: return "upper_edge";
    case EventKind::LowerEdge: return "lower_edge";
    case EventKind::Center: return "center";
    case EventKind::Speed: return "speed";
    }
    return "?";
}

void IntegratorConfig::validate() const
{
    if (!(relTol > 0.0) || !(absTol > 0.0)) {
        throw ParameterError("integrator tolerances must be positive");
    }
    if (!(maxStep > 0.0) || !(initialStep > 0.0) || !(minStep > 0.0) || minStep > maxStep) {
        throw ParameterError("integrator step bounds must satisfy 0 < minStep <= maxStep");
    }
    if (!(eventTol > 0.0) || !(boundaryTol > 0.0)) {
        throw ParameterError("event tolerances must be positive");
    }
}

std::size_t SampleClock::count() const
{
    if (!(interval > 0.0) || end < start) {
        return 0;
    }
    const double span = (end - start) / interval;
    std::size_t n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    if (includeEnd && std::abs(start + (n - 1) * interval - end) > 1e-9 * interval) {
        ++n;
    }
    return n;
}

double SampleClock::time(std::size_t j) const
{
    const double t = start + static_cast<double>(j) * interval;
    if (includeEnd && (t > end || j + 1 == count())) {
        return end;
    }
    return t;
}

HybridIntegrator::HybridIntegrator(const HybridPlant& plant, IntegratorConfig config)
    : plant_(plant), config_(config), n_(plant.dofs())
{
    config_.validate();
    for (auto& k : k_) {
        k.resize(2 * n_);
    }
    stage_.resize(2 * n_);
    err_.resize(2 * n_);
}

void HybridIntegrator::derivative(const DiscreteMode& mode, const Eigen::VectorXd& y, Eigen::VectorXd& dy) const
{
    dy.head(n_) = y.tail(n_);
    plant_.accelerations(mode, y.data(), y.data() + n_, dy.data() + n_);
}

double HybridIntegrator::step(const DiscreteMode& mode, double h, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& k1, Eigen::VectorXd& yOut, Eigen::VectorXd& k7,
                              bool wantError, EnergyLedger* work)
{
    k_[0] = k1;
    if (work) {
        work->input = B[0] * plant_.input_power(mode, y.data() + n_);
        work->dissipated = B[0] * plant_.dissipation_power(mode, y.data(), y.data() + n_);
    }
    const int m = 2 * n_;
    for (int s = 1; s < 7; ++s) {
        Eigen::VectorXd& ys = (s == 6) ? yOut : stage_;
        double* out = ys.data();
        const double* y0 = y.data();
        std::copy(y0, y0 + m, out);
        for (int j = 0; j < s; ++j) {
            if (A[s][j] == 0.0) {
                continue;
            }
            const double c = h * A[s][j];
            const double* kj = k_[j].data();
            for (int i = 0; i < m; ++i) {
                out[i] += c * kj[i];
            }
        }
        derivative(mode, ys, k_[s]);
        if (work && B[s] != 0.0) {
            work->input += B[s] * plant_.input_power(mode, ys.data() + n_);
            work->dissipated += B[s] * plant_.dissipation_power(mode, ys.data(), ys.data() + n_);
        }
    }
    if (work) {
        work->input *= h;
        work->dissipated *= h;
    }
    k7 = k_[6];
    if (!wantError) {
        return 0.0;
    }
    double* e = err_.data();
    std::fill(e, e + m, 0.0);
    for (int j = 0; j < 7; ++j) {
        if (E[j] == 0.0) {
            continue;
        }
        const double c = h * E[j];
        const double* kj = k_[j].data();
        for (int i = 0; i < m; ++i) {
            e[i] += c * kj[i];
        }
    }
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        const double sc = config_.absTol + config_.relTol * std::max(std::abs(y[i]), std::abs(yOut[i]));
        const double r = e[i] / sc;
        sum += r * r;
    }
    return std::sqrt(sum / (2 * n_));
}

void HybridIntegrator::pack(const HybridState& s, Eigen::VectorXd& y) const
{
    y.resize(2 * n_);
    y.head(n_) = s.coords;
    y.tail(n_) = s.vels;
}

void HybridIntegrator::unpack(const Eigen::VectorXd& y, HybridState& s) const
{
    s.coords = y.head(n_);
    s.vels = y.tail(n_);
}

StopReason HybridIntegrator::advance(HybridState& state, double tEnd, IntegrationObserver* observer,
                                     const SampleClock* clock)
{
    if (state.coords.size() != n_ || state.vels.size() != n_) {
        throw HybridConsistencyError("state dimension does not match the plant");
    }
    if (!mode_consistent(state.mode, state.region)) {
        std::ostringstream msg;
        msg << "model " << to_string(state.mode.model) << " is not admissible in region "
            << to_string(state.region) << " at t = " << state.time;
        throw HybridConsistencyError(msg.str());
    }

    const SystemParams& p = plant_.params();
    const double halfWidth = p.halfWidth();

    Eigen::VectorXd y;
    pack(state, y);
    double t = state.time;
    DiscreteMode mode = state.mode;

    auto tip = [&](const Eigen::VectorXd& yy, double& w, double& v) {
        const Eigen::VectorXd& row = plant_.tip_row(mode.model);
        w = row.dot(yy.head(n_));
        v = row.dot(yy.tail(n_));
    };
    auto sides = [&](const Eigen::VectorXd& yy) {
        double w, v;
        tip(yy, w, v);
        Sides s;
        s.s[kUpper] = w > halfWidth;
        s.s[kLower] = w < -halfWidth;
        if (mode.kickArmed) {
            s.s[kCenter] = w > 0.0;
            s.s[kSpeed] = mode.kickSign * v > p.vcr;
        }
        return s;
    };

    std::size_t sampleIndex = 0;
    std::size_t sampleCount = clock ? clock->count() : 0;
    auto nextSample = [&]() {
        return sampleIndex < sampleCount ? clock->time(sampleIndex) : std::numeric_limits<double>::infinity();
    };
    auto emitDueSamples = [&]() {
        while (sampleIndex < sampleCount && clock->time(sampleIndex) <= t + 1e-12) {
            if (observer && clock->time(sampleIndex) >= t - 1e-12) {
                HybridState s = state;
                unpack(y, s);
                s.time = t;
                s.mode = mode;
                observer->on_sample(s);
            }
            ++sampleIndex;
        }
    };

    Eigen::VectorXd k1(2 * n_), k7(2 * n_), yNew(2 * n_), yTrial(2 * n_), kTrial(2 * n_);
    derivative(mode, y, k1);
    Sides prev = sides(y);
    double h = hPrev_ > 0.0 ? hPrev_ : config_.initialStep;

    auto finish = [&](StopReason r) {
        hPrev_ = h;
        unpack(y, state);
        state.time = t;
        state.mode = mode;
        return r;
    };

    emitDueSamples();
    while (t < tEnd) {
        if (observer && observer->stop_requested()) {
            return finish(StopReason::Observer);
        }
        double hUse = std::min({h, config_.maxStep, tEnd - t, nextSample() - t});
        bool hitsSample = nextSample() - t <= hUse;
        bool hitsEnd = tEnd - t <= hUse;
        if (hUse < config_.minStep) {
            if (hitsSample || hitsEnd) {
                // Clock/end points closer than the step floor: take it as reached.
                t = hitsSample ? nextSample() : tEnd;
                emitDueSamples();
                continue;
            }
            std::ostringstream msg;
            double w, v;
            tip(y, w, v);
            msg << "step size fell below " << config_.minStep << " at t = " << t << " in model "
                << to_string(mode.model) << " (tip w = " << w << ", v = " << v << ")";
            throw IntegrationStallError(msg.str());
        }

        EnergyLedger work;
        const double err = step(mode, hUse, y, k1, yNew, k7, true, config_.trackEnergy ? &work : nullptr);
        if (!(err <= 1.0)) {
            ++rejected_;
            const double fac = std::isfinite(err) ? std::min(kMaxShrink, std::pow(err, kExpo) / kSafety) : kMaxShrink;
            h = hUse / fac;
            continue;
        }
        ++accepted_;
        {
            double fac = std::pow(std::max(err, 1e-10), kExpo) / std::pow(errPrev_, kBeta);
            fac = std::clamp(fac / kSafety, 1.0 / kMaxGrow, kMaxShrink);
            const double proposal = hUse / fac;
            h = (hitsSample || hitsEnd) ? std::max(h, proposal) : proposal;
            errPrev_ = std::max(err, 1e-4);
        }

        const Sides now = sides(yNew);
        int fired = -1;
        double thetaFired = 2.0;
        for (int kind = 0; kind < 4; ++kind) {
            if (now.s[kind] == prev.s[kind]) {
                continue;
            }
            double lo = 0.0;
            double hi = 1.0;
            while ((hi - lo) * hUse > config_.eventTol) {
                const double mid = 0.5 * (lo + hi);
                step(mode, mid * hUse, y, k1, yTrial, kTrial, false, nullptr);
                if (sides(yTrial).s[kind] == prev.s[kind]) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if (hi < thetaFired) {
                thetaFired = hi;
                fired = kind;
            }
        }

        if (fired < 0) {
            if (config_.trackEnergy) {
                ledger_.input += work.input;
                ledger_.dissipated += work.dissipated;
            }
            t = (hitsEnd && !hitsSample) ? tEnd : (hitsSample ? nextSample() : t + hUse);
            if (hitsEnd && t > tEnd) {
                t = tEnd;
            }
            y.swap(yNew);
            k1 = k7;
            prev = now;
            emitDueSamples();
            continue;
        }

        // Land just past the earliest boundary and switch models there.
        const double hEvent = thetaFired * hUse;
        EnergyLedger partial;
        step(mode, hEvent, y, k1, yNew, k7, false, config_.trackEnergy ? &partial : nullptr);
        if (config_.trackEnergy) {
            ledger_.input += partial.input;
            ledger_.dissipated += partial.dissipated;
        }
        double wLo, vLo, wHi, vHi;
        tip(y, wLo, vLo);
        tip(yNew, wHi, vHi);
        t += hEvent;
        y.swap(yNew);

        HybridState pre = state;
        unpack(y, pre);
        pre.time = t;
        pre.mode = mode;
        pre.region = classify_region(wLo, vLo, p);
        if (!mode_consistent(mode, pre.region) && mode.model != Model::C) {
            pre.region = state.region;
        }
        const Region after = classify_region(wHi, vHi, p);
        const Sides postOld = sides(y);
        HybridState post = apply_transition(pre, after, plant_, config_.boundaryTol);

        TransitionEvent ev;
        ev.time = t;
        ev.kind = static_cast<EventKind>(fired);
        ev.tipW = wHi;
        ev.tipV = vHi;
        ev.before = pre.region;
        ev.after = after;
        ev.modeBefore = mode;
        ev.modeAfter = post.mode;

        mode = post.mode;
        state.region = post.region;
        state.shiftApplied = post.shiftApplied;
        pack(post, y);
        derivative(mode, y, k1);
        prev = sides(y);
        // Keep the side flags of the boundary just crossed as seen before the
        // hand-off so projection round-off cannot re-trigger it.
        prev.s[kUpper] = postOld.s[kUpper];
        prev.s[kLower] = postOld.s[kLower];
        if (!mode.kickArmed) {
            prev.s[kCenter] = prev.s[kSpeed] = false;
        }

        if (observer) {
            post.time = t;
            observer->on_event(ev, post);
            if (ev.kind == EventKind::UpperEdge && ev.modeBefore.model == Model::A) {
                observer->on_crossing(SectionCrossing{t, wHi, vHi, false, ev.before, ev.after}, post);
            } else if (ev.kind == EventKind::LowerEdge && ev.modeBefore.model == Model::A) {
                observer->on_crossing(SectionCrossing{t, wHi, vHi, true, ev.before, ev.after}, post);
            }
        }
        state.time = t;
        emitDueSamples();
    }
    hPrev_ = h;
    return finish(StopReason::ReachedEnd);
}

}  // namespace kickrom
