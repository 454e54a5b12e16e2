#include "kickrom/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <fftw3.h>
#include "json.hpp"

#include "kickrom/errors.hpp"
#include "kickrom/io.hpp"

namespace kickrom {

using nlohmann::json;

namespace {

Eigen::Index nearest_index(const std::vector<double>& grid, double x)
{
    const auto it = std::min_element(grid.begin(), grid.end(),
                                      [x](double a, double b) { return std::abs(a - x) < std::abs(b - x); });
    return static_cast<Eigen::Index>(it - grid.begin());
}

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

}  // namespace

std::string ErrorMetrics::to_json() const
{
    json j;
    j["displacement_rms_pct"] = displacementPct;
    j["velocity_rms_pct"] = velocityPct;
    j["samples_compared"] = samplesCompared;
    return j.dump(2);
}

ErrorMetrics rms_errors(const SnapshotSet& a, const SnapshotSet& b, double periodTol)
{
    a.validate();
    b.validate();
    if (a.xGrid != b.xGrid) {
        throw AlignmentError("snapshot sets use different spatial grids");
    }
    if (a.tGrid.size() < 2 || b.tGrid.size() < 2) {
        throw AlignmentError("snapshot sets need at least two samples");
    }
    const double dtA = a.tGrid[1] - a.tGrid[0];
    const double dtB = b.tGrid[1] - b.tGrid[0];
    if (std::abs(dtA - dtB) > 1e-9 * dtA) {
        throw AlignmentError("snapshot sets use different sample rates");
    }
    if (a.period > 0.0 && b.period > 0.0 && std::abs(a.period - b.period) > periodTol * a.period) {
        std::ostringstream msg;
        msg << "periods differ beyond tolerance: " << a.period << " vs " << b.period;
        throw AlignmentError(msg.str());
    }
    const Eigen::Index n = std::min(a.W.cols(), b.W.cols());
    ErrorMetrics m;
    m.samplesCompared = static_cast<int>(n);
    const double nw = a.W.leftCols(n).norm();
    const double nv = a.Wdot.leftCols(n).norm();
    m.displacementPct = 100.0 * (b.W.leftCols(n) - a.W.leftCols(n)).norm() / nw;
    m.velocityPct = 100.0 * (b.Wdot.leftCols(n) - a.Wdot.leftCols(n)).norm() / nv;

    auto trace = [&](double x) {
        const Eigen::Index i = nearest_index(a.xGrid, x);
        Eigen::MatrixXd t(n, 5);
        for (Eigen::Index j = 0; j < n; ++j) {
            t.row(j) << a.tGrid[j] - a.tGrid[0], a.W(i, j), a.Wdot(i, j), b.W(i, j), b.Wdot(i, j);
        }
        return t;
    };
    m.traceMid = trace(0.5);
    m.traceTip = trace(1.0);
    return m;
}

std::string SpectrumResult::to_csv() const
{
    std::ostringstream out;
    out << "frequency,power\n";
    for (std::size_t i = 0; i < frequency.size(); ++i) {
        out << format_double(frequency[i]) << ',' << format_double(power[i]) << '\n';
    }
    return out.str();
}

SpectrumResult power_spectrum(const std::vector<double>& series, double rate, Taper taper, double prominence,
                              double lowestFrequency)
{
    if (!(rate > 0.0)) {
        throw ParameterError("sample rate must be positive");
    }
    const int n = static_cast<int>(series.size());
    if (n < 4) {
        throw InputError("spectrum needs at least four samples");
    }
    double mean = 0.0;
    for (double v : series) {
        mean += v;
    }
    mean /= n;

    std::vector<double> in(n);
    double wsum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        // Periodic Hann: its samples sum to exactly n / 2 with no end-point zero pair.
        const double w = taper == Taper::Hann ? 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n)) : 1.0;
        in[i] = (series[i] - mean) * w;
        wsum2 += w * w;
    }
    const int nf = n / 2 + 1;
    std::vector<std::complex<double>> out(nf);
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    SpectrumResult r;
    r.frequency.resize(nf);
    r.power.resize(nf);
    // sum_k |X_k|^2 over all n bins = n sum (x w)^2; fold to one side.
    const double norm = 1.0 / (static_cast<double>(n) * wsum2);
    for (int k = 0; k < nf; ++k) {
        const bool paired = k != 0 && !(n % 2 == 0 && k == n / 2);
        r.frequency[k] = k * rate / n;
        r.power[k] = std::norm(out[k]) * norm * (paired ? 2.0 : 1.0);
    }
    const double pmax = *std::max_element(r.power.begin(), r.power.end());
    for (int k = 1; k + 1 < nf; ++k) {
        if (r.power[k] > r.power[k - 1] && r.power[k] >= r.power[k + 1] && r.power[k] > prominence * pmax) {
            r.peaks.push_back(r.frequency[k]);
        }
    }
    const double length = n / rate;
    r.resolutionWarning = lowestFrequency > 0.0 && length < 4.0 / lowestFrequency;
    return r;
}

Eigen::VectorXd principal_angles(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    if (a.rows() != b.rows()) {
        throw InputError("subspaces live in different spaces");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b);
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::VectorXd theta(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        theta[i] = std::acos(std::clamp(s[i], 0.0, 1.0));
    }
    return theta;
}

Eigen::VectorXd principal_angles(const PodBasis& a, const PodBasis& b, int P)
{
    if (a.xGrid != b.xGrid) {
        throw InputError("POD bases use different spatial grids");
    }
    if (P < 1 || P > a.pmax() || P > b.pmax()) {
        throw ParameterError("angle dimension exceeds a basis rank");
    }
    return principal_angles(a.modes.leftCols(P), b.modes.leftCols(P));
}

double AngleReport::overall_max() const
{
    return maxAngle.size() ? maxAngle.maxCoeff() : 0.0;
}

std::string AngleReport::to_json() const
{
    json j;
    j["P"] = P;
    j["F"] = labels;
    j["max_angle"] = matrix_json(maxAngle);
    j["overall_max"] = overall_max();
    return j.dump(2);
}

AngleReport angle_report(const std::vector<PodBasis>& bases, const std::vector<double>& labels, int P)
{
    if (bases.size() != labels.size()) {
        throw InputError("one label per basis required");
    }
    AngleReport r;
    r.P = P;
    r.labels = labels;
    const auto n = static_cast<Eigen::Index>(bases.size());
    r.maxAngle = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double m = principal_angles(bases[i], bases[j], P).maxCoeff();
            r.maxAngle(i, j) = r.maxAngle(j, i) = m;
        }
    }
    return r;
}

}  // namespace kickrom
