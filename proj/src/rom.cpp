#include "kickrom/rom.hpp"

#include <cmath>

#include "json.hpp"

#include "kickrom/chebyshev.hpp"
#include "kickrom/config.hpp"
#include "kickrom/errors.hpp"
#include "kickrom/quadrature.hpp"

namespace kickrom {

using nlohmann::json;

namespace {

json matrix_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from(const json& rows)
{
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = r ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = rows[i].at(j).get<double>();
        }
    }
    return m;
}

json params_json(const SystemParams& p)
{
    return json{{"cv", p.cv}, {"cm", p.cm}, {"m", p.m}, {"k", p.k}, {"F", p.F},
                {"d", p.d},   {"vcr", p.vcr}, {"N", p.N}};
}

SystemParams params_from(const json& j)
{
    SystemParams p;
    p.cv = j.at("cv").get<double>();
    p.cm = j.at("cm").get<double>();
    p.m = j.at("m").get<double>();
    p.k = j.at("k").get<double>();
    p.F = j.at("F").get<double>();
    p.d = j.at("d").get<double>();
    p.vcr = j.at("vcr").get<double>();
    p.N = j.at("N").get<int>();
    p.validate();
    return p;
}

}  // namespace

RomPackage assemble_rom(const Eigen::MatrixXd& chebCoeffs, const SystemParams& params)
{
    params.validate();
    const int P = static_cast<int>(chebCoeffs.cols());
    if (P < 1) {
        throw ParameterError("a reduced model needs at least one shape function");
    }
    const int degree = static_cast<int>(chebCoeffs.rows()) - 1;
    const QuadratureRule& rule = spatial_rule();
    const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.size()));
    const Eigen::MatrixXd T = chebyshev_matrix(rule.nodes, degree, 0.0, 1.0);
    const Eigen::MatrixXd values = T * chebCoeffs;
    const Eigen::MatrixXd second = T * (chebyshev_derivative_operator(degree, 2, 0.0, 1.0) * chebCoeffs);

    RomPackage rom;
    rom.P = P;
    rom.params = params;
    rom.chebCoeffs = chebCoeffs;
    rom.M = values.transpose() * w.asDiagonal() * values;
    rom.K = second.transpose() * w.asDiagonal() * second;
    rom.M = 0.5 * (rom.M + rom.M.transpose()).eval();
    rom.K = 0.5 * (rom.K + rom.K.transpose()).eval();
    rom.tip = chebCoeffs.colwise().sum().transpose();
    rom.E = rom.tip * rom.tip.transpose();

    Eigen::LLT<Eigen::MatrixXd> llt(rom.M + params.m * rom.E);
    if (llt.info() != Eigen::Success) {
        throw AssemblyError("effective mass of the reduced model is not positive definite");
    }
    return rom;
}

RomPackage assemble_rom(const PodBasis& basis, int P, const SystemParams& params, const std::string& sourceFingerprint)
{
    if (P < 1 || P > basis.pmax()) {
        throw ParameterError("reduced dimension outside 1..Pmax");
    }
    RomPackage rom = assemble_rom(basis.chebCoeffs.leftCols(P), params);
    rom.xGrid = basis.xGrid;
    rom.modes = basis.modes.leftCols(P);
    rom.sourceFingerprint = sourceFingerprint;
    return rom;
}

std::string RomPackage::to_json() const
{
    json j;
    j["P"] = P;
    j["params"] = params_json(params);
    j["x"] = xGrid;
    j["modes"] = matrix_json(modes);
    j["chebyshev"] = matrix_json(chebCoeffs);
    j["M"] = matrix_json(M);
    j["K"] = matrix_json(K);
    j["E"] = matrix_json(E);
    j["tip"] = std::vector<double>(tip.data(), tip.data() + tip.size());
    j["source_fingerprint"] = sourceFingerprint;
    j["selected_p"] = selectedP;
    j["closure_tolerance"] = closureTolerance;
    return j.dump();
}

RomPackage RomPackage::from_json(const std::string& text)
{
    const json j = json::parse(text);
    RomPackage r;
    r.P = j.at("P").get<int>();
    r.params = params_from(j.at("params"));
    r.xGrid = j.at("x").get<std::vector<double>>();
    r.modes = matrix_from(j.at("modes"));
    r.chebCoeffs = matrix_from(j.at("chebyshev"));
    r.M = matrix_from(j.at("M"));
    r.K = matrix_from(j.at("K"));
    r.E = matrix_from(j.at("E"));
    const auto tip = j.at("tip").get<std::vector<double>>();
    r.tip = Eigen::Map<const Eigen::VectorXd>(tip.data(), static_cast<Eigen::Index>(tip.size()));
    r.sourceFingerprint = j.at("source_fingerprint").get<std::string>();
    r.selectedP = j.at("selected_p").get<int>();
    r.closureTolerance = j.at("closure_tolerance").get<double>();
    if (r.M.rows() != r.P || r.K.rows() != r.P || r.E.rows() != r.P || r.tip.size() != r.P ||
        r.chebCoeffs.cols() != r.P) {
        throw InputError("inconsistent reduced model in JSON input");
    }
    return r;
}

RomPlant::RomPlant(RomPackage rom) : rom_(std::move(rom))
{
    const SystemParams& p = rom_.params;
    massEff_ = rom_.M + p.m * rom_.E;
    damping_ = p.cv * rom_.M + p.cm * rom_.K;
    Eigen::LLT<Eigen::MatrixXd> llt(massEff_);
    if (llt.info() != Eigen::Success) {
        throw AssemblyError("effective mass of the reduced model is not positive definite");
    }
    invDamping_ = llt.solve(damping_);
    invStiffFree_ = llt.solve(rom_.K);
    invStiffZone_ = llt.solve(rom_.K + p.k * rom_.E);
    invLoad_ = llt.solve(p.F * rom_.tip);
    rowsFree_.resize(rom_.P, 2 * rom_.P);
    rowsFree_ << invStiffFree_, invDamping_;
    rowsZone_.resize(rom_.P, 2 * rom_.P);
    rowsZone_ << invStiffZone_, invDamping_;
}

Eigen::MatrixXd RomPlant::stiffness(Model model) const
{
    return model == Model::A ? rom_.K : Eigen::MatrixXd(rom_.K + rom_.params.k * rom_.E);
}

void RomPlant::accelerations(const DiscreteMode& mode, const double* q, const double* v, double* out) const
{
    // Row-major [stiffness | damping] operators: one contiguous sweep per row.
    const Eigen::Index P = rom_.P;
    const double* row = (mode.model == Model::A ? rowsFree_ : rowsZone_).data();
    for (Eigen::Index i = 0; i < P; ++i, row += 2 * P) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < P; ++j) {
            s += row[j] * q[j] + row[P + j] * v[j];
        }
        out[i] = -s;
    }
    if (mode.model == Model::B) {
        for (Eigen::Index i = 0; i < P; ++i) {
            out[i] += mode.kickSign * invLoad_[i];
        }
    }
}

void RomPlant::hand_off(HybridState& state, const DiscreteMode& to) const
{
    if (to.model == Model::B) {
        state.shiftApplied = static_deflection(rom_.params, to.kickSign);
    } else {
        state.shiftApplied.reset();
    }
}

Eigen::MatrixXd RomPlant::shape_matrix(Model, std::span<const double> x, int derivative) const
{
    const int degree = static_cast<int>(rom_.chebCoeffs.rows()) - 1;
    Eigen::MatrixXd coeffs = rom_.chebCoeffs;
    if (derivative > 0) {
        coeffs = chebyshev_derivative_operator(degree, derivative, 0.0, 1.0) * coeffs;
    }
    return chebyshev_matrix(x, degree, 0.0, 1.0) * coeffs;
}

double RomPlant::energy(const DiscreteMode& mode, const double* q, const double* v) const
{
    const Eigen::Map<const Eigen::VectorXd> b(q, rom_.P);
    const Eigen::Map<const Eigen::VectorXd> bd(v, rom_.P);
    const SystemParams& p = rom_.params;
    double e = 0.5 * bd.dot(massEff_ * bd) + 0.5 * b.dot(rom_.K * b);
    const double tipW = rom_.tip.dot(b);
    if (mode.model == Model::A) {
        const double h = p.halfWidth();
        e += 0.5 * p.k * h * h;
    } else {
        e += 0.5 * p.k * tipW * tipW;
    }
    return e;
}

double RomPlant::dissipation_power(const DiscreteMode&, const double*, const double* v) const
{
    const Eigen::Map<const Eigen::VectorXd> bd(v, rom_.P);
    return bd.dot(damping_ * bd);
}

RomInitial project_initial(const HybridState& state, const HybridPlant& fos, const RomPlant& rom)
{
    const RomPackage& pkg = rom.package();
    if (pkg.modes.rows() != static_cast<Eigen::Index>(pkg.xGrid.size()) || pkg.modes.cols() != pkg.P) {
        throw InputError("reduced model carries no discrete modes to project onto");
    }
    const Eigen::MatrixXd phi = fos.shape_matrix(state.mode.model, pkg.xGrid, 0);
    const Eigen::VectorXd w = phi * state.coords;
    const Eigen::VectorXd wd = phi * state.vels;
    RomInitial out;
    HybridState& s = out.state;
    s.time = state.time;
    s.coords = pkg.modes.transpose() * w;
    s.vels = pkg.modes.transpose() * wd;
    const double rw = (w - pkg.modes * s.coords).norm() / std::max(w.norm(), 1e-300);
    const double rv = (wd - pkg.modes * s.vels).norm() / std::max(wd.norm(), 1e-300);
    out.residual = std::max(rw, rv);

    const SystemParams& p = pkg.params;
    const Region region = classify_region(rom.tip_row(Model::C).dot(s.coords), rom.tip_row(Model::C).dot(s.vels), p);
    if (state.mode.model == Model::B && mode_consistent(state.mode, region)) {
        s.mode = state.mode;
    } else {
        s.mode = DiscreteMode{in_zone(region) ? Model::C : Model::A, false, 0};
    }
    s.region = region;
    rom.hand_off(s, s.mode);
    return out;
}

}  // namespace kickrom
