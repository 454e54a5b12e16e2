#include "kickrom/pipeline.hpp"

#include <sstream>

#include "kickrom/errors.hpp"
#include "kickrom/io.hpp"

namespace kickrom {

GeneratedDataset generate_dataset(const HybridPlant& plant, const HybridState& initial, const DatasetOptions& opts)
{
    if (opts.gridPoints < 2 || !(opts.sampleRate > 0.0)) {
        throw ParameterError("dataset needs at least two grid points and a positive sample rate");
    }
    GeneratedDataset out;
    out.steady = run_to_steady_state(plant, initial, opts.integrator, opts.steady);
    const SteadyStateInfo& info = out.steady.info;
    if (info.kind == SteadyKind::StaticEquilibrium) {
        throw InputError("the system settles on the static equilibrium; no oscillation to sample");
    }
    int cycles = opts.cycles;
    if (cycles <= 0) {
        cycles = info.kind == SteadyKind::Periodic ? info.periodN : opts.chaoticCycles;
    }
    HybridState start = out.steady.final;
    out.window = record_cycles(plant, start, cycles, opts.integrator, opts.sampleRate);
    out.snapshots = snapshots_from(out.window, start.mode, plant, uniform_grid(opts.gridPoints));
    if (info.kind == SteadyKind::Periodic && cycles % info.periodN == 0) {
        out.snapshots.period = out.snapshots.tGrid.back() - out.snapshots.tGrid.front();
        out.snapshots.period /= cycles / info.periodN;
    }
    auto& prov = out.snapshots.provenance;
    prov["classification"] = info.label();
    prov["cycles"] = std::to_string(cycles);
    prov["sample_rate"] = format_double(opts.sampleRate);
    prov["grid_points"] = std::to_string(opts.gridPoints);
    prov["rel_tol"] = format_double(opts.integrator.relTol);
    prov["abs_tol"] = format_double(opts.integrator.absTol);
    prov["settle_time"] = format_double(out.steady.elapsed);
    return out;
}

GeneratedDataset full_order_dataset(const SystemParams& params, const DatasetOptions& opts)
{
    FullOrderModel fos(params);
    GeneratedDataset d = generate_dataset(fos, default_initial_state(fos), opts);
    d.snapshots.provenance["engine"] = "full-order";
    return d;
}

GeneratedDataset rom_dataset(const RomPlant& rom, const HybridState& fullState, const HybridPlant& fos,
                             const DatasetOptions& opts)
{
    const RomInitial init = project_initial(fullState, fos, rom);
    GeneratedDataset d = generate_dataset(rom, init.state, opts);
    d.snapshots.provenance["engine"] = "rom";
    d.snapshots.provenance["rom_P"] = std::to_string(rom.dofs());
    d.snapshots.provenance["projection_residual"] = format_double(init.residual);
    return d;
}

std::vector<double> tip_series(const SnapshotSet& s)
{
    if (s.xGrid.empty() || s.xGrid.back() != 1.0) {
        throw InputError("snapshot grid does not end at the tip");
    }
    const Eigen::VectorXd row = s.W.row(s.W.rows() - 1).transpose();
    return {row.data(), row.data() + row.size()};
}

IntegratorConfig read_integrator(const KeyValueConfig& cfg)
{
    IntegratorConfig c;
    c.relTol = cfg.get_double("integrator.rel_tol", c.relTol);
    c.absTol = cfg.get_double("integrator.abs_tol", c.absTol);
    c.maxStep = cfg.get_double("integrator.max_step", c.maxStep);
    c.initialStep = cfg.get_double("integrator.initial_step", c.initialStep);
    c.minStep = cfg.get_double("integrator.min_step", c.minStep);
    c.eventTol = cfg.get_double("integrator.event_tol", c.eventTol);
    c.boundaryTol = cfg.get_double("integrator.boundary_tol", c.boundaryTol);
    c.validate();
    return c;
}

SteadyStateOptions read_steady(const KeyValueConfig& cfg)
{
    SteadyStateOptions o;
    o.clusterTol = cfg.get_double("steady.cluster_tol", o.clusterTol);
    o.maxPoints = cfg.get_int("steady.max_points", o.maxPoints);
    o.lockCycles = cfg.get_int("steady.lock_cycles", o.lockCycles);
    o.transientTime = cfg.get_double("steady.transient_time", o.transientTime);
    o.measureTime = cfg.get_double("steady.measure_time", o.measureTime);
    o.earlyExit = cfg.get_bool("steady.early_exit", o.earlyExit);
    o.symmetryTol = cfg.get_double("steady.symmetry_tol", o.symmetryTol);
    if (o.maxPoints < 1 || o.lockCycles < 2 || !(o.clusterTol > 0.0)) {
        throw ParameterError("steady-state options out of range");
    }
    return o;
}

DatasetOptions read_dataset(const KeyValueConfig& cfg)
{
    DatasetOptions o;
    o.gridPoints = cfg.get_int("snapshot.grid_points", o.gridPoints);
    o.sampleRate = cfg.get_double("snapshot.sample_rate", o.sampleRate);
    o.cycles = cfg.get_int("snapshot.cycles", o.cycles);
    o.chaoticCycles = cfg.get_int("snapshot.chaotic_cycles", o.chaoticCycles);
    o.integrator = read_integrator(cfg);
    o.steady = read_steady(cfg);
    return o;
}

PodOptions read_pod(const KeyValueConfig& cfg)
{
    PodOptions o;
    const std::string method = cfg.get_string("pod.method", "svd");
    if (method == "svd") {
        o.method = PodMethod::Svd;
    } else if (method == "covariance") {
        o.method = PodMethod::Covariance;
    } else {
        throw ParameterError("pod.method must be svd or covariance");
    }
    o.rankThreshold = cfg.get_double("pod.rank_threshold", o.rankThreshold);
    o.chebyshevDegree = cfg.get_int("pod.chebyshev_degree", o.chebyshevDegree);
    o.trapezoidWeights = cfg.get_bool("pod.trapezoid_weights", o.trapezoidWeights);
    o.exec = cfg.get_bool("pod.parallel", true) ? kernels::Exec::Parallel : kernels::Exec::Serial;
    return o;
}

SweepConfig read_sweep(const KeyValueConfig& cfg)
{
    SweepConfig s;
    s.fStart = cfg.get_double("sweep.f_start", s.fStart);
    s.fEnd = cfg.get_double("sweep.f_end", s.fEnd);
    s.deltaF = cfg.get_double("sweep.delta_f", s.deltaF);
    s.maxPointsPerF = cfg.get_int("sweep.max_points", s.maxPointsPerF);
    const std::string engine = cfg.get_string("sweep.engine", "full-order");
    if (engine == "full-order") {
        s.engine = SweepEngine::FullOrder;
    } else if (engine == "rom") {
        s.engine = SweepEngine::Rom;
    } else {
        throw ParameterError("sweep.engine must be full-order or rom");
    }
    s.integrator = read_integrator(cfg);
    s.steady = read_steady(cfg);
    s.validate();
    return s;
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        if (a == std::string::npos) {
            continue;
        }
        const auto b = item.find_last_not_of(" \t");
        out.push_back(parse_double(item.substr(a, b - a + 1)));
    }
    return out;
}

}  // namespace kickrom
