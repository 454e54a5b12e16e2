#include "kickrom/pod.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "kickrom/errors.hpp"
#include "kickrom/io.hpp"
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
        if (static_cast<Eigen::Index>(rows[i].size()) != c) {
            throw InputError("ragged matrix in JSON input");
        }
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = rows[i][j].get<double>();
        }
    }
    return m;
}

Eigen::VectorXd vector_from(const json& v)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

std::vector<double> to_std(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

double trapezoid(const std::vector<double>& t, const Eigen::VectorXd& f)
{
    double s = 0.0;
    for (std::size_t j = 1; j < t.size(); ++j) {
        s += 0.5 * (t[j] - t[j - 1]) * (f[j] + f[j - 1]);
    }
    return s;
}

/// Values and second derivatives of the series in `coeffs` at the spatial quadrature nodes.
void series_at_nodes(const Eigen::MatrixXd& coeffs, Eigen::MatrixXd& values, Eigen::MatrixXd& second)
{
    const QuadratureRule& rule = spatial_rule();
    const int degree = static_cast<int>(coeffs.rows()) - 1;
    const Eigen::MatrixXd T = chebyshev_matrix(rule.nodes, degree, 0.0, 1.0);
    values = T * coeffs;
    second = T * (chebyshev_derivative_operator(degree, 2, 0.0, 1.0) * coeffs);
}

}  // namespace

ChebyshevSeries PodBasis::series(int i) const
{
    const Eigen::VectorXd c = chebCoeffs.col(i);
    return ChebyshevSeries(std::vector<double>(c.data(), c.data() + c.size()), 0.0, 1.0);
}

int numerical_rank(const Eigen::VectorXd& descending, double threshold)
{
    if (descending.size() == 0 || !(descending[0] > 0.0)) {
        return 0;
    }
    int r = 0;
    while (r < descending.size() && descending[r] / descending[0] >= threshold) {
        ++r;
    }
    return r;
}

PodBasis pod_decompose(const SnapshotSet& snapshots, const PodOptions& opts)
{
    snapshots.validate();
    if (snapshots.tGrid.size() < 2) {
        throw InputError("POD needs at least two time samples");
    }
    const auto nt = static_cast<Eigen::Index>(snapshots.tGrid.size());
    Eigen::VectorXd w(nt);
    if (opts.trapezoidWeights) {
        const std::vector<double> tw = trapezoid_weights(snapshots.tGrid);
        w = Eigen::Map<const Eigen::VectorXd>(tw.data(), nt);
    } else {
        w.setOnes();
    }
    const Eigen::Index n = snapshots.W.rows();
    PodBasis basis;
    basis.xGrid = snapshots.xGrid;
    basis.rankThreshold = opts.rankThreshold;
    basis.spectrum.resize(n);
    Eigen::MatrixXd vectors(n, n);
    if (opts.method == PodMethod::Covariance) {
        const Eigen::MatrixXd R = kernels::weighted_covariance(snapshots.W, w, opts.exec);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R);
        if (eig.info() != Eigen::Success) {
            throw ConditioningError("covariance eigendecomposition failed");
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            basis.spectrum[i] = std::max(0.0, eig.eigenvalues()[n - 1 - i]);
            vectors.col(i) = eig.eigenvectors().col(n - 1 - i);
        }
    } else {
        // R = X X^T with X = W diag(sqrt(w / sum w)). Factor X^T = QU first so
        // the SVD runs on a small triangular matrix; small eigenvalues then keep
        // their relative accuracy instead of drowning at eps * lambda_1.
        const Eigen::VectorXd scale = (w / w.sum()).cwiseSqrt();
        const Eigen::MatrixXd Xt = (snapshots.W * scale.asDiagonal()).transpose();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Xt);
        const Eigen::Index r = std::min(Xt.rows(), Xt.cols());
        const Eigen::MatrixXd U = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(U.transpose(), Eigen::ComputeFullU);
        vectors.setZero();
        basis.spectrum.setZero();
        for (Eigen::Index i = 0; i < r; ++i) {
            basis.spectrum[i] = svd.singularValues()[i] * svd.singularValues()[i];
        }
        vectors = svd.matrixU();
    }
    const int pmax = numerical_rank(basis.spectrum, opts.rankThreshold);
    basis.eigenvalues = basis.spectrum.head(pmax);
    basis.modes = vectors.leftCols(pmax);
    // Deterministic signs: largest-magnitude entry positive.
    for (int i = 0; i < pmax; ++i) {
        Eigen::Index arg;
        basis.modes.col(i).cwiseAbs().maxCoeff(&arg);
        if (basis.modes(arg, i) < 0.0) {
            basis.modes.col(i) *= -1.0;
        }
    }

    const int degree = std::min<int>(opts.chebyshevDegree, static_cast<int>(snapshots.xGrid.size()) - 1);
    const ChebyshevFitter fitter(snapshots.xGrid, degree, 0.0, 1.0);
    basis.chebCoeffs = fitter.coefficients(basis.modes);
    const Eigen::MatrixXd back = chebyshev_matrix(snapshots.xGrid, degree, 0.0, 1.0) * basis.chebCoeffs;
    for (int i = 0; i < pmax; ++i) {
        const double rel = (back.col(i) - basis.modes.col(i)).norm() / basis.modes.col(i).norm();
        basis.fitResidual = std::max(basis.fitResidual, rel);
    }
    return basis;
}

int variance_dimension(const PodBasis& basis, double fraction)
{
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ParameterError("variance fraction must lie in (0, 1]");
    }
    const double total = basis.spectrum.sum();
    if (!(total > 0.0)) {
        throw InputError("variance criterion on an all-zero spectrum");
    }
    double acc = 0.0;
    for (int i = 0; i < basis.pmax(); ++i) {
        acc += basis.eigenvalues[i];
        if (acc / total >= fraction * (1.0 - 1e-15)) {
            return i + 1;
        }
    }
    return basis.pmax();
}

Eigen::MatrixXd project_velocity(const SnapshotSet& snapshots, const PodBasis& basis, int P)
{
    if (P < 0 || P > basis.pmax()) {
        throw ParameterError("projection dimension exceeds the POD rank");
    }
    const Eigen::MatrixXd psi = basis.modes.leftCols(P);
    return psi * (psi.transpose() * snapshots.Wdot);
}

ModeGram mode_gram(const PodBasis& basis, int P)
{
    if (P < 1 || P > basis.pmax()) {
        throw ParameterError("Gram dimension outside 1..Pmax");
    }
    Eigen::MatrixXd values, second;
    series_at_nodes(basis.chebCoeffs.leftCols(P), values, second);
    const QuadratureRule& rule = spatial_rule();
    const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.size()));
    ModeGram g;
    g.mass = values.transpose() * w.asDiagonal() * values;
    g.strain = second.transpose() * w.asDiagonal() * second;
    g.mass = 0.5 * (g.mass + g.mass.transpose()).eval();
    g.strain = 0.5 * (g.strain + g.strain.transpose()).eval();
    // T_k(1) = 1, so the tip value is the coefficient sum.
    g.tip = basis.chebCoeffs.leftCols(P).colwise().sum().transpose();
    return g;
}

double kick_work(const std::vector<double>& t, const Eigen::VectorXd& v, const std::vector<KickInterval>& kicks,
                 double F)
{
    if (static_cast<Eigen::Index>(t.size()) != v.size()) {
        throw InputError("tip velocity does not match the time grid");
    }
    double work = 0.0;
    for (const KickInterval& k : kicks) {
        auto first = std::upper_bound(t.begin(), t.end(), k.on);
        std::size_t j = first == t.begin() ? 0 : static_cast<std::size_t>(first - t.begin()) - 1;
        for (; j + 1 < t.size() && t[j] < k.off; ++j) {
            const double a = std::max(t[j], k.on);
            const double b = std::min(t[j + 1], k.off);
            if (!(b > a)) {
                continue;
            }
            const double dt = t[j + 1] - t[j];
            const double va = v[j] + (v[j + 1] - v[j]) * (a - t[j]) / dt;
            const double vb = v[j] + (v[j + 1] - v[j]) * (b - t[j]) / dt;
            work += k.sign * F * 0.5 * (b - a) * (va + vb);
        }
    }
    return work;
}

WorkEstimate energy_estimates(const SnapshotSet& snapshots, const PodBasis& basis, int P, kernels::Exec exec)
{
    if (snapshots.kicks.empty() && snapshots.params.F > 0.0) {
        throw InputError("energy estimates need the kick trace of the snapshot window");
    }
    const ModeGram g = mode_gram(basis, P);
    const Eigen::MatrixXd c = basis.modes.leftCols(P).transpose() * snapshots.Wdot;
    const Eigen::VectorXd kinetic = kernels::column_quadratic(c, g.mass, exec);
    const Eigen::VectorXd strain = kernels::column_quadratic(c, g.strain, exec);
    const SystemParams& p = snapshots.params;
    WorkEstimate e;
    e.dissipated = p.cv * trapezoid(snapshots.tGrid, kinetic) + p.cm * trapezoid(snapshots.tGrid, strain);
    e.input = kick_work(snapshots.tGrid, c.transpose() * g.tip, snapshots.kicks, p.F);
    return e;
}

WorkEstimate full_state_work(const SnapshotSet& snapshots, int chebyshevDegree)
{
    snapshots.validate();
    const int degree = std::min<int>(chebyshevDegree, static_cast<int>(snapshots.xGrid.size()) - 1);
    const ChebyshevFitter fitter(snapshots.xGrid, degree, 0.0, 1.0);
    const Eigen::MatrixXd coeffs = fitter.coefficients(snapshots.Wdot);
    const QuadratureRule& rule = spatial_rule();
    const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.size()));
    const Eigen::MatrixXd T = chebyshev_matrix(rule.nodes, degree, 0.0, 1.0);
    const Eigen::MatrixXd T2 = T * chebyshev_derivative_operator(degree, 2, 0.0, 1.0);
    const Eigen::MatrixXd g0 = T.transpose() * w.asDiagonal() * T;
    const Eigen::MatrixXd g2 = T2.transpose() * w.asDiagonal() * T2;
    const SystemParams& p = snapshots.params;
    WorkEstimate e;
    e.dissipated = p.cv * trapezoid(snapshots.tGrid, kernels::column_quadratic(coeffs, g0)) +
                   p.cm * trapezoid(snapshots.tGrid, kernels::column_quadratic(coeffs, g2));
    e.input = kick_work(snapshots.tGrid, coeffs.colwise().sum().transpose(), snapshots.kicks, p.F);
    return e;
}

ClosureReport closure_select(const SnapshotSet& snapshots, const PodBasis& basis, double tolerance,
                             kernels::Exec exec)
{
    if (!(tolerance > 0.0)) {
        throw ParameterError("closure tolerance must be positive");
    }
    const int pmax = basis.pmax();
    if (pmax < 1) {
        throw InputError("closure selection on an empty POD basis");
    }
    ClosureReport r;
    r.tolerance = tolerance;
    r.referenceP = pmax;
    for (int P = 1; P <= pmax; ++P) {
        const WorkEstimate e = energy_estimates(snapshots, basis, P, exec);
        r.inputWork.push_back(e.input);
        r.dissipatedWork.push_back(e.dissipated);
    }
    const double fRef = r.inputWork.back();
    const double dRef = r.dissipatedWork.back();
    for (int i = 0; i < pmax; ++i) {
        r.inputError.push_back(fRef != 0.0 ? std::abs(1.0 - r.inputWork[i] / fRef) : 0.0);
        r.dissipationError.push_back(dRef != 0.0 ? std::abs(1.0 - r.dissipatedWork[i] / dRef) : 0.0);
    }
    r.selectedP = pmax;
    for (int i = 0; i < pmax; ++i) {
        if (r.inputError[i] < tolerance && r.dissipationError[i] < tolerance) {
            r.selectedP = i + 1;
            break;
        }
    }
    // Meeting the tolerance only at the reference dimension is no reduction.
    r.converged = r.selectedP < pmax || pmax == 1;
    r.varianceP = variance_dimension(basis, r.varianceFraction);
    return r;
}

std::string ClosureReport::to_json() const
{
    json j;
    j["tolerance"] = tolerance;
    j["selected_p"] = selectedP;
    j["reference_p"] = referenceP;
    j["converged"] = converged;
    j["variance_fraction"] = varianceFraction;
    j["variance_p"] = varianceP;
    j["input_work"] = inputWork;
    j["dissipated_work"] = dissipatedWork;
    j["e_f"] = inputError;
    j["e_d"] = dissipationError;
    if (!inputWork.empty() && inputWork.back() != 0.0) {
        j["balance_at_reference"] = dissipatedWork.back() / inputWork.back();
    }
    return j.dump(2);
}

ClosureReport ClosureReport::from_json(const std::string& text)
{
    const json j = json::parse(text);
    ClosureReport r;
    r.tolerance = j.at("tolerance").get<double>();
    r.selectedP = j.at("selected_p").get<int>();
    r.referenceP = j.at("reference_p").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.varianceFraction = j.at("variance_fraction").get<double>();
    r.varianceP = j.at("variance_p").get<int>();
    r.inputWork = j.at("input_work").get<std::vector<double>>();
    r.dissipatedWork = j.at("dissipated_work").get<std::vector<double>>();
    r.inputError = j.at("e_f").get<std::vector<double>>();
    r.dissipationError = j.at("e_d").get<std::vector<double>>();
    return r;
}

std::string pom_csv(const PodBasis& basis, int P)
{
    if (P < 1 || P > basis.pmax()) {
        throw ParameterError("POM export dimension outside 1..Pmax");
    }
    std::vector<std::string> header{"x"};
    for (int i = 1; i <= P; ++i) {
        header.push_back("psi_" + std::to_string(i));
    }
    Eigen::MatrixXd table(basis.modes.rows(), P + 1);
    table.col(0) = Eigen::Map<const Eigen::VectorXd>(basis.xGrid.data(), static_cast<Eigen::Index>(basis.xGrid.size()));
    table.rightCols(P) = basis.modes.leftCols(P);
    return matrix_to_csv(table, header);
}

std::string pod_to_json(const PodBasis& basis)
{
    json j;
    j["x"] = basis.xGrid;
    j["spectrum"] = to_std(basis.spectrum);
    j["eigenvalues"] = to_std(basis.eigenvalues);
    j["rank_threshold"] = basis.rankThreshold;
    j["fit_residual"] = basis.fitResidual;
    j["modes"] = matrix_json(basis.modes);
    j["chebyshev"] = matrix_json(basis.chebCoeffs);
    return j.dump();
}

PodBasis pod_from_json(const std::string& text)
{
    const json j = json::parse(text);
    PodBasis b;
    b.xGrid = j.at("x").get<std::vector<double>>();
    b.spectrum = vector_from(j.at("spectrum"));
    b.eigenvalues = vector_from(j.at("eigenvalues"));
    b.rankThreshold = j.at("rank_threshold").get<double>();
    b.fitResidual = j.at("fit_residual").get<double>();
    b.modes = matrix_from(j.at("modes"));
    b.chebCoeffs = matrix_from(j.at("chebyshev"));
    if (b.modes.cols() != b.eigenvalues.size() || b.chebCoeffs.cols() != b.modes.cols()) {
        throw InputError("inconsistent POD basis in JSON input");
    }
    return b;
}

}  // namespace kickrom
