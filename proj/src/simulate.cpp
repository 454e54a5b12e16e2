#include "kickrom/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>
#include <sstream>

#include "kickrom/config.hpp"
#include "kickrom/errors.hpp"
#include "kickrom/io.hpp"

namespace kickrom {

namespace {

class Recorder : public IntegrationObserver {
public:
    Trajectory* traj = nullptr;
    bool keepStates = false;
    int stopAfterPrimary = -1;  ///< stop once this many primary crossings were seen
    bool stopOnPrimary = false;
    bool sawPrimary = false;

    void on_sample(const HybridState& s) override
    {
        traj->samples.push_back(TrajectorySample{s.time, s.coords, s.vels, s.mode});
    }
    void on_event(const TransitionEvent& ev, const HybridState&) override { traj->events.push_back(ev); }
    void on_crossing(const SectionCrossing& c, const HybridState& s) override
    {
        if (c.mirror) {
            traj->crossings.mirror.push_back(c);
            return;
        }
        traj->crossings.primary.push_back(c);
        if (keepStates) {
            traj->crossings.states.push_back(s);
        }
        sawPrimary = true;
    }
    bool stop_requested() const override
    {
        if (stopOnPrimary && sawPrimary) {
            return true;
        }
        return stopAfterPrimary >= 0 &&
               static_cast<int>(traj->crossings.primary.size()) >= stopAfterPrimary;
    }
};

std::string join_doubles(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += format_double(v[i]);
    }
    return out;
}

std::vector<double> split_doubles(const std::string& text)
{
    std::vector<double> out;
    if (text.empty()) {
        return out;
    }
    for (const auto& item : split_csv_line(text)) {
        out.push_back(parse_double(item));
    }
    return out;
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n)
{
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
}

}  // namespace

std::vector<KickInterval> Trajectory::kick_intervals(const DiscreteMode& initialMode, double tStart,
                                                     double tEnd) const
{
    std::vector<KickInterval> out;
    bool active = initialMode.model == Model::B;
    KickInterval current{tStart, tEnd, initialMode.kickSign};
    for (const auto& ev : events) {
        if (ev.time < tStart || ev.time > tEnd) {
            continue;
        }
        if (active && ev.modeAfter.model != Model::B) {
            current.off = ev.time;
            out.push_back(current);
            active = false;
        }
        if (!active && ev.modeAfter.model == Model::B) {
            current = KickInterval{ev.time, tEnd, ev.modeAfter.kickSign};
            active = true;
        }
    }
    if (active) {
        current.off = tEnd;
        out.push_back(current);
    }
    return out;
}

Trajectory integrate(const HybridPlant& plant, const HybridState& initial, double duration,
                     const IntegratorConfig& cfg, double sampleRate, bool keepCrossingStates)
{
    if (!(duration >= 0.0)) {
        throw ParameterError("integration duration must be non-negative");
    }
    Trajectory traj;
    Recorder rec;
    rec.traj = &traj;
    rec.keepStates = keepCrossingStates;
    HybridIntegrator integ(plant, cfg);
    HybridState state = initial;
    traj.energyStart = plant.energy(state);
    SampleClock clock{initial.time, sampleRate > 0.0 ? 1.0 / sampleRate : 1.0, initial.time + duration, true};
    integ.advance(state, initial.time + duration, &rec, sampleRate > 0.0 ? &clock : nullptr);
    traj.final = state;
    traj.work = integ.energy();
    traj.energyEnd = plant.energy(state);
    return traj;
}

void SnapshotSet::validate() const
{
    auto increasing = [](const std::vector<double>& g) {
        for (std::size_t i = 1; i < g.size(); ++i) {
            if (!(g[i] > g[i - 1])) {
                return false;
            }
        }
        return true;
    };
    if (!increasing(xGrid) || !increasing(tGrid)) {
        throw InputError("snapshot grids must be strictly increasing");
    }
    const auto nx = static_cast<Eigen::Index>(xGrid.size());
    const auto nt = static_cast<Eigen::Index>(tGrid.size());
    if (W.rows() != nx || W.cols() != nt || Wdot.rows() != nx || Wdot.cols() != nt) {
        throw InputError("snapshot matrices do not match the grids");
    }
}

std::string SnapshotSet::fingerprint() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    hash_bytes(h, xGrid.data(), xGrid.size() * sizeof(double));
    hash_bytes(h, tGrid.data(), tGrid.size() * sizeof(double));
    hash_bytes(h, W.data(), static_cast<std::size_t>(W.size()) * sizeof(double));
    hash_bytes(h, Wdot.data(), static_cast<std::size_t>(Wdot.size()) * sizeof(double));
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

std::vector<double> uniform_grid(int count, double a, double b)
{
    if (count < 2) {
        throw ParameterError("a uniform grid needs at least two points");
    }
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) {
        g[i] = a + (b - a) * i / (count - 1);
    }
    g.back() = b;
    return g;
}

SnapshotSet sample_fields(const std::vector<TrajectorySample>& samples, const HybridPlant& plant,
                          const std::vector<double>& xGrid)
{
    SnapshotSet out;
    out.xGrid = xGrid;
    out.params = plant.params();
    const auto nx = static_cast<Eigen::Index>(xGrid.size());
    const auto nt = static_cast<Eigen::Index>(samples.size());
    out.W.resize(nx, nt);
    out.Wdot.resize(nx, nt);
    out.tGrid.resize(samples.size());
    const Eigen::MatrixXd phiA = plant.shape_matrix(Model::A, xGrid, 0);
    const Eigen::MatrixXd phiBC = plant.shape_matrix(Model::C, xGrid, 0);
    for (Eigen::Index j = 0; j < nt; ++j) {
        const TrajectorySample& s = samples[j];
        const Eigen::MatrixXd& phi = s.mode.model == Model::A ? phiA : phiBC;
        out.W.col(j).noalias() = phi * s.coords;
        out.Wdot.col(j).noalias() = phi * s.vels;
        out.tGrid[j] = s.time;
    }
    return out;
}

SnapshotSet snapshots_from(const Trajectory& traj, const DiscreteMode& initialMode, const HybridPlant& plant,
                           const std::vector<double>& xGrid)
{
    SnapshotSet s = sample_fields(traj.samples, plant, xGrid);
    if (!s.tGrid.empty()) {
        s.kicks = traj.kick_intervals(initialMode, s.tGrid.front(), s.tGrid.back());
    }
    return s;
}

const char* to_string(SteadyKind k)
{
    switch (k) {
    case SteadyKind::Periodic: return "periodic";
    case SteadyKind::Chaotic: return "chaotic";
    case SteadyKind::StaticEquilibrium: return "static";
    case SteadyKind::Unresolved: return "unresolved";
    }
    return "?";
}

std::string SteadyStateInfo::label() const
{
    if (kind == SteadyKind::Periodic) {
        return "period-" + std::to_string(periodN) + (symmetric ? "" : "-asym");
    }
    return to_string(kind);
}

int detect_lock(const std::vector<double>& values, double tol, int maxPoints, int lockCycles)
{
    const auto L = static_cast<int>(values.size());
    for (int n = 1; n <= maxPoints; ++n) {
        if (L < lockCycles * n) {
            break;
        }
        bool ok = true;
        for (int i = L - lockCycles * n; i < L - n && ok; ++i) {
            ok = std::abs(values[i] - values[i + n]) < tol;
        }
        if (ok) {
            return n;
        }
    }
    return 0;
}

std::vector<double> cluster_values(const std::vector<double>& values, double tol)
{
    std::vector<double> centers;
    std::vector<int> counts;
    for (double v : values) {
        bool joined = false;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if (std::abs(v - centers[c]) < tol) {
                centers[c] = (centers[c] * counts[c] + v) / (counts[c] + 1);
                ++counts[c];
                joined = true;
                break;
            }
        }
        if (!joined) {
            centers.push_back(v);
            counts.push_back(1);
        }
    }
    return centers;
}

SteadyStateInfo detect_steady_state(const SectionCrossings& crossings, const SteadyStateOptions& opts)
{
    SteadyStateInfo info;
    const auto& prim = crossings.primary;
    std::vector<double> values;
    values.reserve(prim.size());
    for (const auto& c : prim) {
        values.push_back(c.tipV);
    }
    const int n = detect_lock(values, opts.clusterTol, opts.maxPoints, opts.lockCycles);
    const auto L = static_cast<int>(values.size());
    if (n > 0) {
        info.kind = SteadyKind::Periodic;
        info.periodN = n;
        const int reps = opts.lockCycles;
        info.period = (prim[L - 1].time - prim[L - 1 - (reps - 1) * n].time) / (reps - 1);
        for (int phase = 0; phase < n; ++phase) {
            double sum = 0.0;
            for (int r = 0; r < reps; ++r) {
                sum += values[L - n + phase - r * n];
            }
            info.sectionValues.push_back(sum / reps);
        }
        const double tLo = prim[L - 1 - n].time;
        const double tHi = prim[L - 1].time;
        for (const auto& c : crossings.mirror) {
            if (c.time > tLo && c.time <= tHi) {
                info.mirrorValues.push_back(c.tipV);
            }
        }
        if (info.mirrorValues.size() == info.sectionValues.size()) {
            std::vector<double> a = info.sectionValues;
            std::vector<double> b;
            for (double v : info.mirrorValues) {
                b.push_back(-v);
            }
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            info.symmetric = true;
            for (std::size_t i = 0; i < a.size(); ++i) {
                info.symmetric = info.symmetric && std::abs(a[i] - b[i]) < opts.symmetryTol;
            }
        }
        return info;
    }
    const std::vector<double> centers = cluster_values(values, opts.clusterTol);
    if (static_cast<int>(centers.size()) > opts.maxPoints) {
        info.kind = SteadyKind::Chaotic;
        info.sectionValues.assign(values.begin(), values.begin() + opts.maxPoints);
        for (const auto& c : crossings.mirror) {
            if (static_cast<int>(info.mirrorValues.size()) >= opts.maxPoints) {
                break;
            }
            info.mirrorValues.push_back(c.tipV);
        }
        return info;
    }
    info.kind = SteadyKind::Unresolved;
    info.sectionValues = centers;
    return info;
}

SteadyStateRun run_to_steady_state(const HybridPlant& plant, const HybridState& initial,
                                   const IntegratorConfig& cfg, const SteadyStateOptions& opts)
{
    const SystemParams& p = plant.params();
    const double h = p.halfWidth();
    const double trapEnergy = 0.5 * p.k * h * h;

    Trajectory traj;
    Recorder rec;
    rec.traj = &traj;
    rec.keepStates = true;
    rec.stopOnPrimary = opts.earlyExit;

    HybridIntegrator integ(plant, cfg);
    HybridState state = initial;
    const double t0 = state.time;
    const double tTransient = t0 + opts.transientTime;
    const double tEnd = t0 + opts.transientTime + opts.measureTime;
    constexpr double kChunk = 2.0;

    SteadyStateRun run;
    std::vector<double> values;
    while (true) {
        rec.sawPrimary = false;
        integ.advance(state, std::min(state.time + kChunk, tEnd), &rec);

        if (rec.sawPrimary) {
            values.push_back(traj.crossings.primary.back().tipV);
            if (detect_lock(values, opts.clusterTol, opts.maxPoints, opts.lockCycles) > 0) {
                run.info = detect_steady_state(traj.crossings, opts);
                run.final = traj.crossings.states.back();
                break;
            }
        }
        if (!state.mode.kickArmed && in_zone(classify_region(plant.tip_displacement(state),
                                                             plant.tip_velocity(state), p)) &&
            plant.energy(state) < trapEnergy) {
            run.info.kind = SteadyKind::StaticEquilibrium;
            run.final = state;
            break;
        }
        if (state.time >= tEnd) {
            SectionCrossings measured;
            for (std::size_t i = 0; i < traj.crossings.primary.size(); ++i) {
                if (traj.crossings.primary[i].time >= tTransient) {
                    measured.primary.push_back(traj.crossings.primary[i]);
                }
            }
            for (const auto& c : traj.crossings.mirror) {
                if (c.time >= tTransient) {
                    measured.mirror.push_back(c);
                }
            }
            run.info = detect_steady_state(measured, opts);
            run.final = traj.crossings.states.empty() ? state : traj.crossings.states.back();
            break;
        }
    }
    run.final.region = classify_region(plant.tip_displacement(run.final), plant.tip_velocity(run.final), p);
    if (!mode_consistent(run.final.mode, run.final.region)) {
        // A crossing state sits on the boundary; keep the automaton's view.
        run.final.region = run.final.mode.model == Model::B ? (run.final.mode.kickSign < 0 ? Region::R4 : Region::R8)
                                                             : run.final.region;
    }
    run.crossings = std::move(traj.crossings);
    run.crossings.states.clear();
    run.elapsed = state.time - t0;
    return run;
}

Trajectory record_cycles(const HybridPlant& plant, const HybridState& atCrossing, int crossingCount,
                         const IntegratorConfig& cfg, double sampleRate, double maxDuration)
{
    if (crossingCount < 1 || !(sampleRate > 0.0)) {
        throw ParameterError("record_cycles needs a positive crossing count and sample rate");
    }
    Trajectory traj;
    Recorder rec;
    rec.traj = &traj;
    rec.keepStates = true;
    rec.stopAfterPrimary = crossingCount;
    HybridIntegrator integ(plant, cfg);
    HybridState state = atCrossing;
    traj.energyStart = plant.energy(state);
    SampleClock clock{state.time, 1.0 / sampleRate, state.time + maxDuration, false};
    integ.advance(state, state.time + maxDuration, &rec, &clock);
    if (static_cast<int>(traj.crossings.primary.size()) < crossingCount) {
        throw InputError("trajectory did not return to the section within the recording budget");
    }
    const HybridState& closing = traj.crossings.states.back();
    if (!traj.samples.empty() && std::abs(traj.samples.back().time - closing.time) < 1e-9) {
        traj.samples.pop_back();
    }
    traj.samples.push_back(TrajectorySample{closing.time, closing.coords, closing.vels, closing.mode});
    traj.final = closing;
    traj.work = integ.energy();
    traj.energyEnd = plant.energy(closing);
    return traj;
}

HybridState make_state(const HybridPlant& plant, Model model, const Eigen::VectorXd& coords,
                       const Eigen::VectorXd& vels, double time)
{
    if (model == Model::B) {
        throw ParameterError("fresh states cannot start with the kick armed");
    }
    HybridState s;
    s.time = time;
    s.coords = coords;
    s.vels = vels;
    s.mode = DiscreteMode{model, false, 0};
    const SystemParams& p = plant.params();
    const Region r = classify_region(plant.tip_displacement(s), plant.tip_velocity(s), p);
    const DiscreteMode target{in_zone(r) ? Model::C : Model::A, false, 0};
    plant.hand_off(s, target);
    s.mode = target;
    s.region = classify_region(plant.tip_displacement(s), plant.tip_velocity(s), p);
    if (!mode_consistent(s.mode, s.region)) {
        throw HybridConsistencyError("initial state lies on a zone boundary");
    }
    return s;
}

HybridState default_initial_state(const FullOrderModel& fos)
{
    const SystemParams& p = fos.params();
    Eigen::VectorXd q = Eigen::VectorXd::Zero(p.N);
    const Eigen::VectorXd v = Eigen::VectorXd::Zero(p.N);
    q(0) = 2.5 * p.d / fos.free_tip().tipValues(0);
    return make_state(fos, Model::A, q, v);
}

void write_snapshots(const SnapshotSet& s, const std::string& dir)
{
    s.validate();
    std::filesystem::create_directories(dir);
    KeyValueConfig header;
    write_system_params(header, s.params);
    header.set("snapshot.x", join_doubles(s.xGrid));
    header.set("snapshot.t", join_doubles(s.tGrid));
    header.set("snapshot.period", format_double(s.period));
    header.set("snapshot.fingerprint", s.fingerprint());
    for (const auto& [k, v] : s.provenance) {
        header.set("provenance." + k, v);
    }
    Eigen::MatrixXd kicks(static_cast<Eigen::Index>(s.kicks.size()), 3);
    for (std::size_t i = 0; i < s.kicks.size(); ++i) {
        kicks.row(static_cast<Eigen::Index>(i)) << s.kicks[i].on, s.kicks[i].off, s.kicks[i].sign;
    }
    const std::filesystem::path base(dir);
    write_text_atomic((base / "W.csv").string(), matrix_to_csv(s.W));
    write_text_atomic((base / "Wdot.csv").string(), matrix_to_csv(s.Wdot));
    write_text_atomic((base / "kicks.csv").string(), matrix_to_csv(kicks, {"t_on", "t_off", "sign"}));
    write_text_atomic((base / "header.txt").string(), header.to_text());
}

SnapshotSet read_snapshots(const std::string& dir)
{
    const std::filesystem::path base(dir);
    const KeyValueConfig header = KeyValueConfig::parse(read_text((base / "header.txt").string()));
    SnapshotSet s;
    s.params = read_system_params(header);
    s.xGrid = split_doubles(header.get_string("snapshot.x", ""));
    s.tGrid = split_doubles(header.get_string("snapshot.t", ""));
    s.period = header.get_double("snapshot.period", 0.0);
    for (const auto& [k, v] : header.entries()) {
        if (k.rfind("provenance.", 0) == 0) {
            s.provenance[k.substr(11)] = v;
        }
    }
    s.W = matrix_from_csv(read_text((base / "W.csv").string()), false);
    s.Wdot = matrix_from_csv(read_text((base / "Wdot.csv").string()), false);
    const Eigen::MatrixXd kicks = matrix_from_csv(read_text((base / "kicks.csv").string()), true);
    for (Eigen::Index i = 0; i < kicks.rows(); ++i) {
        s.kicks.push_back(KickInterval{kicks(i, 0), kicks(i, 1), static_cast<int>(kicks(i, 2))});
    }
    s.validate();
    const std::string stored = header.get_string("snapshot.fingerprint", "");
    if (!stored.empty() && stored != s.fingerprint()) {
        throw InputError("snapshot data in " + dir + " does not match its recorded fingerprint");
    }
    return s;
}

std::string crossings_to_csv(const SectionCrossings& c)
{
    std::ostringstream out;
    out << "t,w_tip,v_tip,region_before,region_after,section\n";
    auto emit = [&](const SectionCrossing& x) {
        out << format_double(x.time) << ',' << format_double(x.tipW) << ',' << format_double(x.tipV) << ','
            << to_string(x.before) << ',' << to_string(x.after) << ',' << (x.mirror ? "mirror" : "primary") << '\n';
    };
    for (const auto& x : c.primary) {
        emit(x);
    }
    for (const auto& x : c.mirror) {
        emit(x);
    }
    return out.str();
}

std::string mode_trace_to_csv(const std::vector<TransitionEvent>& events)
{
    std::ostringstream out;
    out << "time,event,region_before,region_after,model,kick_armed,kick_sign\n";
    for (const auto& ev : events) {
        out << format_double(ev.time) << ',' << to_string(ev.kind) << ',' << to_string(ev.before) << ','
            << to_string(ev.after) << ',' << to_string(ev.modeAfter.model) << ',' << (ev.modeAfter.kickArmed ? 1 : 0)
            << ',' << ev.modeAfter.kickSign << '\n';
    }
    return out.str();
}

}  // namespace kickrom
