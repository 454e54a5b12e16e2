#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kickrom/errors.hpp"
#include "kickrom/io.hpp"
#include "kickrom/modal.hpp"
#include "kickrom/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kickrom;

#ifndef KICKROM_VERSION
#define KICKROM_VERSION "unknown"
#endif

namespace {

struct RunContext {
    KeyValueConfig cfg;
    fs::path staging;
    std::vector<std::string> artifacts;

    void write(const std::string& name, const std::string& content)
    {
        write_text_atomic((staging / name).string(), content);
        artifacts.push_back(name);
    }
    void write_snapshot_dir(const std::string& name, const SnapshotSet& s)
    {
        write_snapshots(s, (staging / name).string());
        artifacts.push_back(name + "/");
    }
};

// Keys read only by the command layer.
const std::vector<std::string> kCommandKeys = {
    "inputs.snapshots", "inputs.pod",     "inputs.rom",      "inputs.reference", "inputs.candidate",
    "inputs.pods",      "rom.P",          "closure.tolerance", "closure.variance_fraction",
    "angles.f_values",  "angles.P",       "sweep.reverse_start", "spectrum.prominence",
    "modes.grid_points", "compare.period_tol",
};

/// Reads every known key once so anything left over is a typo.
void reject_unknown_keys(const KeyValueConfig& cfg)
{
    read_system_params(cfg);
    read_dataset(cfg);
    read_pod(cfg);
    read_sweep(cfg);
    for (const auto& k : kCommandKeys) {
        cfg.get_string(k, "");
    }
    const auto unknown = cfg.unconsumed();
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) {
            msg += " " + k;
        }
        throw InputError(msg);
    }
}

std::string require_input(const KeyValueConfig& cfg, const std::string& key)
{
    const std::string v = cfg.get_string(key, "");
    if (v.empty()) {
        throw InputError("missing input: set " + key);
    }
    if (!fs::exists(v)) {
        throw InputError("input " + key + " does not exist: " + v);
    }
    return v;
}

json steady_json(const SteadyStateInfo& info, double elapsed)
{
    json j;
    j["classification"] = info.label();
    j["period_n"] = info.periodN;
    j["period"] = info.period;
    j["section_values"] = info.sectionValues;
    j["mirror_values"] = info.mirrorValues;
    j["symmetric"] = info.symmetric;
    j["settle_time"] = elapsed;
    return j;
}

PodBasis load_or_compute_pod(const KeyValueConfig& cfg, const SnapshotSet& snap)
{
    const std::string podPath = cfg.get_string("inputs.pod", "");
    if (!podPath.empty()) {
        return pod_from_json(read_text(podPath));
    }
    return pod_decompose(snap, read_pod(cfg));
}

ClosureReport closure_for(const KeyValueConfig& cfg, const SnapshotSet& snap, const PodBasis& basis)
{
    const PodOptions po = read_pod(cfg);
    ClosureReport r = closure_select(snap, basis, cfg.get_double("closure.tolerance", 1e-4), po.exec);
    const double fraction = cfg.get_double("closure.variance_fraction", 0.999);
    r.varianceFraction = fraction;
    r.varianceP = variance_dimension(basis, fraction);
    return r;
}

std::string spectrum_of(const SnapshotSet& s, double prominence, SpectrumResult* out = nullptr)
{
    std::vector<double> tip = tip_series(s);
    // The closing sample repeats the opening phase of the window.
    tip.pop_back();
    const double rate = 1.0 / (s.tGrid[1] - s.tGrid[0]);
    const double lowest = s.period > 0.0 ? 1.0 / s.period : 0.0;
    SpectrumResult r = power_spectrum(tip, rate, Taper::Hann, prominence, lowest);
    if (r.resolutionWarning) {
        std::cerr << "warning: window shorter than four periods of the fundamental\n";
    }
    if (out) {
        *out = r;
    }
    return r.to_csv();
}

void cmd_modes(RunContext& ctx)
{
    const SystemParams p = read_system_params(ctx.cfg);
    const auto grid = uniform_grid(ctx.cfg.get_int("modes.grid_points", 101));
    for (BasisVariant v : {BasisVariant::FreeTip, BasisVariant::SpringTip}) {
        const ModalBasis b = build_modal_basis(p, v);
        Eigen::MatrixXd table(b.size(), 9);
        for (int i = 0; i < b.size(); ++i) {
            const auto c = b.modes[i].classical_coefficients();
            table.row(i) << i + 1, b.betas[i], b.frequencies[i], b.tipValues[i],
                boundary_residual(b.modes[i], b.k, b.m), c[0], c[1], c[2], c[3];
        }
        const std::string name = to_string(v);
        ctx.write("modes_" + name + ".csv",
                  matrix_to_csv(table, {"index", "beta", "omega", "tip_value", "bc_residual", "C1", "C2", "C3", "C4"}));
        Eigen::MatrixXd shapes(grid.size(), b.size() + 1);
        shapes.col(0) = Eigen::Map<const Eigen::VectorXd>(grid.data(), grid.size());
        shapes.rightCols(b.size()) = b.evaluate(grid);
        ctx.write("shapes_" + name + ".csv", matrix_to_csv(shapes));
    }
}

void cmd_simulate(RunContext& ctx)
{
    const SystemParams p = read_system_params(ctx.cfg);
    const GeneratedDataset d = full_order_dataset(p, read_dataset(ctx.cfg));
    ctx.write_snapshot_dir("snapshots", d.snapshots);
    ctx.write("crossings.csv", crossings_to_csv(d.steady.crossings));
    ctx.write("mode_trace.csv", mode_trace_to_csv(d.window.events));
    json j = steady_json(d.steady.info, d.steady.elapsed);
    j["window_input_work"] = d.window.work.input;
    j["window_dissipated_work"] = d.window.work.dissipated;
    ctx.write("steady.json", j.dump(2));
}

void cmd_pod(RunContext& ctx)
{
    const SnapshotSet snap = read_snapshots(require_input(ctx.cfg, "inputs.snapshots"));
    const PodBasis basis = pod_decompose(snap, read_pod(ctx.cfg));
    ctx.write("pod.json", pod_to_json(basis));
    ctx.write("pom.csv", pom_csv(basis, basis.pmax()));
    Eigen::MatrixXd table(basis.spectrum.size(), 2);
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        table(i, 0) = static_cast<double>(i + 1);
        table(i, 1) = basis.spectrum[i];
    }
    ctx.write("eigenvalues.csv", matrix_to_csv(table, {"index", "lambda"}));
}

void cmd_closure(RunContext& ctx)
{
    const SnapshotSet snap = read_snapshots(require_input(ctx.cfg, "inputs.snapshots"));
    const PodBasis basis = load_or_compute_pod(ctx.cfg, snap);
    const ClosureReport r = closure_for(ctx.cfg, snap, basis);
    ctx.write("closure.json", r.to_json());
}

void cmd_rom_build(RunContext& ctx)
{
    const SnapshotSet snap = read_snapshots(require_input(ctx.cfg, "inputs.snapshots"));
    const PodBasis basis = load_or_compute_pod(ctx.cfg, snap);
    const ClosureReport r = closure_for(ctx.cfg, snap, basis);
    int P = ctx.cfg.get_int("rom.P", 0);
    if (P <= 0) {
        P = r.selectedP;
    }
    RomPackage rom = assemble_rom(basis, P, read_system_params(ctx.cfg), snap.fingerprint());
    rom.selectedP = r.selectedP;
    rom.closureTolerance = r.tolerance;
    ctx.write("rom.json", rom.to_json());
    ctx.write("closure.json", r.to_json());
}

void cmd_rom_sim(RunContext& ctx)
{
    RomPackage pkg = RomPackage::from_json(read_text(require_input(ctx.cfg, "inputs.rom")));
    const SystemParams p = read_system_params(ctx.cfg);
    pkg.params = p;
    const RomPlant rom(pkg);
    const DatasetOptions opts = read_dataset(ctx.cfg);
    // The reduced run starts from the projected full-order steady state at the same F.
    FullOrderModel fos(p);
    const SteadyStateRun full = run_to_steady_state(fos, default_initial_state(fos), opts.integrator, opts.steady);
    const GeneratedDataset d = rom_dataset(rom, full.final, fos, opts);
    ctx.write_snapshot_dir("snapshots", d.snapshots);
    ctx.write("crossings.csv", crossings_to_csv(d.steady.crossings));
    ctx.write("steady.json", steady_json(d.steady.info, d.steady.elapsed).dump(2));
}

void cmd_bifurcate(RunContext& ctx)
{
    const SystemParams p = read_system_params(ctx.cfg);
    const SweepConfig sweep = read_sweep(ctx.cfg);
    RomPackage rom;
    const RomPackage* romPtr = nullptr;
    if (sweep.engine == SweepEngine::Rom) {
        rom = RomPackage::from_json(read_text(require_input(ctx.cfg, "inputs.rom")));
        romPtr = &rom;
    }
    std::vector<BifurcationDataset> sets;
    if (ctx.cfg.contains("sweep.reverse_start")) {
        SweepConfig back = sweep;
        back.fStart = ctx.cfg.get_double("sweep.reverse_start", 0.0);
        back.fEnd = sweep.fStart;
        back.validate();
        auto [a, b] = run_sweeps(sweep, back, p, romPtr);
        sets.push_back(std::move(a));
        sets.push_back(std::move(b));
    } else {
        sets.push_back(run_sweep(sweep, p, romPtr));
    }
    std::vector<const BifurcationDataset*> ptrs;
    for (const auto& s : sets) {
        ctx.write("bifurcation_" + s.branch + ".csv", s.to_csv());
        ptrs.push_back(&s);
    }
    ctx.write("summary.json", summarize(ptrs).to_json());
}

void cmd_compare(RunContext& ctx)
{
    const SnapshotSet ref = read_snapshots(require_input(ctx.cfg, "inputs.reference"));
    const SnapshotSet cand = read_snapshots(require_input(ctx.cfg, "inputs.candidate"));
    const ErrorMetrics m = rms_errors(ref, cand, ctx.cfg.get_double("compare.period_tol", 0.02));
    ctx.write("errors.json", m.to_json());
    const std::vector<std::string> cols = {"t", "w_reference", "v_reference", "w_candidate", "v_candidate"};
    ctx.write("trace_mid.csv", matrix_to_csv(m.traceMid, cols));
    ctx.write("trace_tip.csv", matrix_to_csv(m.traceTip, cols));
    const double prominence = ctx.cfg.get_double("spectrum.prominence", 1e-6);
    ctx.write("spectrum_reference.csv", spectrum_of(ref, prominence));
    ctx.write("spectrum_candidate.csv", spectrum_of(cand, prominence));
}

void cmd_angles(RunContext& ctx)
{
    const int P = ctx.cfg.get_int("angles.P", 8);
    std::vector<PodBasis> bases;
    std::vector<double> labels;
    json closures = json::array();
    const std::string pods = ctx.cfg.get_string("inputs.pods", "");
    if (!pods.empty()) {
        std::istringstream in(pods);
        std::string path;
        while (std::getline(in, path, ',')) {
            bases.push_back(pod_from_json(read_text(path)));
            labels.push_back(static_cast<double>(labels.size()));
        }
    } else {
        SystemParams p = read_system_params(ctx.cfg);
        const DatasetOptions opts = read_dataset(ctx.cfg);
        const PodOptions po = read_pod(ctx.cfg);
        const auto fs = parse_list(ctx.cfg.get_string("angles.f_values", "12.95,12.75,12.66,12.621,12.605"));
        for (double F : fs) {
            p.F = F;
            const GeneratedDataset d = full_order_dataset(p, opts);
            bases.push_back(pod_decompose(d.snapshots, po));
            labels.push_back(F);
            const ClosureReport r = closure_for(ctx.cfg, d.snapshots, bases.back());
            closures.push_back({{"F", F},
                                {"classification", d.steady.info.label()},
                                {"selected_P", r.selectedP},
                                {"Pmax", bases.back().pmax()}});
        }
    }
    json j = json::parse(angle_report(bases, labels, P).to_json());
    j["closure"] = closures;
    ctx.write("angles.json", j.dump(2));
}

void finish(RunContext& ctx, const fs::path& out, const std::string& command, double seconds)
{
    json m;
    m["command"] = command;
    m["version"] = KICKROM_VERSION;
    m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    m["config"] = ctx.cfg.entries();
    m["artifacts"] = ctx.artifacts;
    m["wall_seconds"] = seconds;
    ctx.write("config.echo", ctx.cfg.to_text());
    ctx.write("manifest.json", m.dump(2));
    for (const auto& entry : fs::directory_iterator(ctx.staging)) {
        const fs::path target = out / entry.path().filename();
        fs::remove_all(target);
        fs::rename(entry.path(), target);
    }
    fs::remove(ctx.staging);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kicked-beam simulation and reduced-order modelling"};
    app.require_subcommand(1);
    std::string configPath;
    std::vector<std::string> overrides;
    std::string outDir;

    const std::map<std::string, std::function<void(RunContext&)>> commands = {
        {"modes", cmd_modes},         {"simulate", cmd_simulate}, {"bifurcate", cmd_bifurcate},
        {"pod", cmd_pod},             {"closure", cmd_closure},   {"rom-build", cmd_rom_build},
        {"rom-sim", cmd_rom_sim},     {"compare", cmd_compare},   {"angles", cmd_angles},
    };
    for (const auto& [name, fn] : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", configPath, "key-value configuration file")->required();
        sub->add_option("--set", overrides, "key=value override (repeatable)");
        sub->add_option("--out", outDir, "output directory")->required();
    }
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    const fs::path out(outDir);
    const bool created = !fs::exists(out);
    RunContext ctx;
    try {
        ctx.cfg = KeyValueConfig::load(configPath);
        for (const auto& o : overrides) {
            ctx.cfg.apply_override(o);
        }
        reject_unknown_keys(ctx.cfg);
        fs::create_directories(out);
        ctx.staging = out / ".staging";
        fs::remove_all(ctx.staging);
        fs::create_directories(ctx.staging);
        const auto t0 = std::chrono::steady_clock::now();
        commands.at(command)(ctx);
        finish(ctx, out, command,
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    } catch (const std::exception& e) {
        std::error_code ec;
        if (!ctx.staging.empty()) {
            fs::remove_all(ctx.staging, ec);
        }
        if (created) {
            fs::remove_all(out, ec);
        }
        std::cerr << "kickrom " << command << ": " << e.what() << '\n';
        return 2;
    }
    return 0;
}
