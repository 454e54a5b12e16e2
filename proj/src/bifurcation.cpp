#include "kickrom/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "json.hpp"

#include "kickrom/errors.hpp"
#include "kickrom/io.hpp"

namespace kickrom {

using nlohmann::json;

const char* to_string(SweepEngine e)
{
    return e == SweepEngine::Rom ? "rom" : "full-order";
}

void SweepConfig::validate() const
{
    if (!(deltaF > 0.0)) {
        throw ParameterError("sweep step must be positive");
    }
    if (fStart == fEnd) {
        throw ParameterError("sweep start and end coincide");
    }
    if (maxPointsPerF < 1) {
        throw ParameterError("sweep needs at least one point per F");
    }
    integrator.validate();
}

int SweepConfig::count() const
{
    return static_cast<int>(std::floor(std::abs(fEnd - fStart) / deltaF + 1e-9)) + 1;
}

double SweepConfig::f_at(int i) const
{
    return fStart + direction() * i * deltaF;
}

const BifurcationRecord* BifurcationDataset::at(double F, double tol) const
{
    for (const auto& r : records) {
        if (std::abs(r.F - F) <= tol) {
            return &r;
        }
    }
    return nullptr;
}

std::string BifurcationDataset::to_csv() const
{
    std::ostringstream out;
    out << "F,crossing_index,v_tip,classification,period_n\n";
    for (const auto& r : records) {
        const std::string label = r.info.label();
        if (r.info.sectionValues.empty()) {
            out << format_double(r.F) << ",-1,," << label << ',' << r.info.periodN << '\n';
            continue;
        }
        for (std::size_t i = 0; i < r.info.sectionValues.size(); ++i) {
            out << format_double(r.F) << ',' << i << ',' << format_double(r.info.sectionValues[i]) << ',' << label
                << ',' << r.info.periodN << '\n';
        }
    }
    return out.str();
}

namespace {

SteadyStateInfo info_from_label(const std::string& label, int periodN)
{
    SteadyStateInfo info;
    info.periodN = periodN;
    if (label.rfind("period-", 0) == 0) {
        info.kind = SteadyKind::Periodic;
        info.symmetric = label.find("-asym") == std::string::npos;
    } else if (label == to_string(SteadyKind::Chaotic)) {
        info.kind = SteadyKind::Chaotic;
    } else if (label == to_string(SteadyKind::StaticEquilibrium)) {
        info.kind = SteadyKind::StaticEquilibrium;
    } else if (label == to_string(SteadyKind::Unresolved)) {
        info.kind = SteadyKind::Unresolved;
    } else {
        throw InputError("unknown classification " + label);
    }
    return info;
}

}  // namespace

BifurcationDataset BifurcationDataset::from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    if (line.rfind("F,crossing_index", 0) != 0) {
        throw InputError("bifurcation CSV header missing");
    }
    BifurcationDataset ds;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != 5) {
            throw InputError("bifurcation CSV row needs 5 cells: " + line);
        }
        const double F = parse_double(cells[0]);
        const int index = std::stoi(cells[1]);
        if (ds.records.empty() || ds.records.back().F != F || index <= 0) {
            BifurcationRecord r;
            r.F = F;
            r.info = info_from_label(cells[3], std::stoi(cells[4]));
            ds.records.push_back(std::move(r));
        }
        if (index >= 0) {
            ds.records.back().info.sectionValues.push_back(parse_double(cells[2]));
        }
    }
    return ds;
}

namespace {

struct PlantFactory {
    SystemParams params;
    const RomPackage* rom = nullptr;

    std::unique_ptr<HybridPlant> make(double F) const
    {
        if (rom) {
            RomPackage pkg = *rom;
            pkg.params.F = F;
            return std::make_unique<RomPlant>(std::move(pkg));
        }
        SystemParams p = params;
        p.F = F;
        return std::make_unique<FullOrderModel>(p);
    }

    HybridState default_state(const HybridPlant& plant) const
    {
        FullOrderModel fos(plant.params());
        HybridState s = default_initial_state(fos);
        if (rom) {
            return project_initial(s, fos, static_cast<const RomPlant&>(plant)).state;
        }
        return s;
    }
};

}  // namespace

BifurcationDataset run_sweep(const SweepConfig& cfg, const SystemParams& params, const RomPackage* rom)
{
    cfg.validate();
    if (cfg.engine == SweepEngine::Rom && rom == nullptr) {
        throw InputError("ROM sweep needs a ROM package");
    }
    PlantFactory factory{params, cfg.engine == SweepEngine::Rom ? rom : nullptr};
    SteadyStateOptions opts = cfg.steady;
    opts.maxPoints = cfg.maxPointsPerF;

    BifurcationDataset ds;
    ds.branch = cfg.direction() > 0 ? "increasing" : "decreasing";
    ds.engine = cfg.engine;
    HybridState seed;
    const int n = cfg.count();
    for (int i = 0; i < n; ++i) {
        const double F = cfg.f_at(i);
        const auto plant = factory.make(F);
        BifurcationRecord rec;
        rec.F = F;
        if (i == 0) {
            seed = factory.default_state(*plant);
            rec.seed = "default";
        } else {
            rec.seed = "previous";
        }
        seed.time = 0.0;
        const SteadyStateRun run = run_to_steady_state(*plant, seed, cfg.integrator, opts);
        rec.info = run.info;
        rec.elapsed = run.elapsed;
        seed = run.final;
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

std::pair<BifurcationDataset, BifurcationDataset> run_sweeps(const SweepConfig& a, const SweepConfig& b,
                                                             const SystemParams& params, const RomPackage* rom)
{
    auto other = std::async(std::launch::async, [&] { return run_sweep(b, params, rom); });
    BifurcationDataset first = run_sweep(a, params, rom);
    return {std::move(first), other.get()};
}

namespace {

json optional_json(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string BifurcationSummary::to_json() const
{
    json j;
    j["F_min"] = fMin;
    j["F_max"] = fMax;
    j["symmetry_breaking_F"] = optional_json(symmetryBreakingF);
    j["lowest_asymmetric_F"] = optional_json(lowestAsymmetricF);
    j["first_period_doubling_F"] = optional_json(firstPeriodDoublingF);
    j["chaotic_band"] = {optional_json(chaoticBandLow), optional_json(chaoticBandHigh)};
    j["static_threshold_F"] = optional_json(staticThresholdF);
    j["counts"] = {{"periodic", counts[0]}, {"chaotic", counts[1]}, {"static", counts[2]}, {"unresolved", counts[3]}};
    return j.dump(2);
}

BifurcationSummary summarize(const std::vector<const BifurcationDataset*>& branches)
{
    std::vector<const BifurcationRecord*> all;
    for (const auto* b : branches) {
        for (const auto& r : b->records) {
            all.push_back(&r);
        }
    }
    BifurcationSummary s;
    if (all.empty()) {
        return s;
    }
    std::stable_sort(all.begin(), all.end(), [](const auto* a, const auto* b) { return a->F < b->F; });
    s.fMin = all.front()->F;
    s.fMax = all.back()->F;
    auto widen_max = [](std::optional<double>& o, double v) { o = o ? std::max(*o, v) : v; };
    auto widen_min = [](std::optional<double>& o, double v) { o = o ? std::min(*o, v) : v; };
    for (const auto* r : all) {
        ++s.counts[static_cast<int>(r->info.kind)];
        const auto& info = r->info;
        if (info.kind == SteadyKind::Periodic && info.periodN == 1 && !info.symmetric) {
            widen_max(s.symmetryBreakingF, r->F);
            widen_min(s.lowestAsymmetricF, r->F);
        }
        if (info.kind == SteadyKind::Periodic && info.periodN == 2) {
            widen_max(s.firstPeriodDoublingF, r->F);
        }
        if (info.kind == SteadyKind::Chaotic) {
            widen_min(s.chaoticBandLow, r->F);
            widen_max(s.chaoticBandHigh, r->F);
        }
    }
    for (const auto* r : all) {
        if (r->info.kind != SteadyKind::StaticEquilibrium) {
            break;
        }
        s.staticThresholdF = r->F;
    }
    return s;
}

double hausdorff_distance(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.empty() && b.empty()) {
        return 0.0;
    }
    if (a.empty() || b.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    auto directed = [](const std::vector<double>& x, const std::vector<double>& y) {
        double worst = 0.0;
        for (double u : x) {
            double best = std::numeric_limits<double>::infinity();
            for (double v : y) {
                best = std::min(best, std::abs(u - v));
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

std::string DatasetComparison::to_json() const
{
    json j;
    j["agreement_fraction"] = agreementFraction;
    j["max_finite_hausdorff"] = maxFiniteHausdorff;
    j["flagged"] = flagged;
    json rows = json::array();
    for (std::size_t i = 0; i < F.size(); ++i) {
        rows.push_back({{"F", F[i]},
                        {"hausdorff", std::isfinite(hausdorff[i]) ? json(hausdorff[i]) : json(nullptr)},
                        {"agree", static_cast<bool>(agree[i])}});
    }
    j["records"] = std::move(rows);
    return j.dump(2);
}

DatasetComparison compare_datasets(const BifurcationDataset& a, const BifurcationDataset& b, double tol)
{
    if (a.records.size() != b.records.size()) {
        throw AlignmentError("bifurcation datasets have different F grids");
    }
    DatasetComparison c;
    int agreeCount = 0;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const auto& ra = a.records[i];
        const auto& rb = b.records[i];
        if (std::abs(ra.F - rb.F) > 1e-9 * std::max(1.0, std::abs(ra.F))) {
            throw AlignmentError("bifurcation datasets have different F grids");
        }
        const double h = hausdorff_distance(ra.info.sectionValues, rb.info.sectionValues);
        const bool same = ra.info.label() == rb.info.label();
        c.F.push_back(ra.F);
        c.hausdorff.push_back(h);
        c.agree.push_back(same);
        agreeCount += same ? 1 : 0;
        if (std::isfinite(h)) {
            c.maxFiniteHausdorff = std::max(c.maxFiniteHausdorff, h);
        }
        if (!(h <= tol)) {
            ++c.flagged;
        }
    }
    c.agreementFraction = a.records.empty() ? 1.0 : static_cast<double>(agreeCount) / a.records.size();
    return c;
}

}  // namespace kickrom
