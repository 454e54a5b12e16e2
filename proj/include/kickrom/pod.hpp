#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kickrom/chebyshev.hpp"
#include "kickrom/kernels.hpp"
#include "kickrom/simulate.hpp"

namespace kickrom {

/// Covariance: symmetric eigensolver on R. Svd: singular values of the
/// weighted snapshot matrix (same subspaces, small eigenvalues resolved to
/// relative rather than absolute precision).
enum class PodMethod { Covariance, Svd };

struct PodOptions {
    PodMethod method = PodMethod::Svd;
    double rankThreshold = 1e-12;  ///< lambda_i / lambda_1 below this is treated as zero
    int chebyshevDegree = 54;
    bool trapezoidWeights = true;  ///< false: plain (1/N_t) W W^T
    kernels::Exec exec = kernels::Exec::Parallel;
};

struct PodBasis {
    std::vector<double> xGrid;
    Eigen::VectorXd spectrum;     ///< every eigenvalue of R, descending (negatives clipped to 0)
    Eigen::VectorXd eigenvalues;  ///< the retained Pmax values
    Eigen::MatrixXd modes;        ///< N_x x Pmax, orthonormal columns
    Eigen::MatrixXd chebCoeffs;   ///< (degree+1) x Pmax, series of each mode on [0, 1]
    double fitResidual = 0.0;     ///< max relative residual of the mode fits at the grid
    double rankThreshold = 1e-12;

    int pmax() const { return static_cast<int>(modes.cols()); }
    int degree() const { return static_cast<int>(chebCoeffs.rows()) - 1; }
    ChebyshevSeries series(int i) const;
};

/// Index count of eigenvalues with lambda_i / lambda_1 >= threshold.
int numerical_rank(const Eigen::VectorXd& descending, double threshold);

PodBasis pod_decompose(const SnapshotSet& snapshots, const PodOptions& opts = {});

/// Smallest P with cumulative variance fraction >= fraction.
int variance_dimension(const PodBasis& basis, double fraction);

/// Psi_P Psi_P^T Wdot
Eigen::MatrixXd project_velocity(const SnapshotSet& snapshots, const PodBasis& basis, int P);

/// Gram matrices of the first P fitted modes: mass = int psi psi, strain = int psi'' psi''.
struct ModeGram {
    Eigen::MatrixXd mass;
    Eigen::MatrixXd strain;
    Eigen::VectorXd tip;   ///< fitted psi(1)
};
ModeGram mode_gram(const PodBasis& basis, int P);

struct WorkEstimate {
    double input = 0.0;
    double dissipated = 0.0;
};

/// int F(t) v(1,t) dt with the kick taken from the recorded intervals; the tip
/// velocity is linear between samples, so partially covered intervals are
/// integrated exactly for that interpolant.
double kick_work(const std::vector<double>& t, const Eigen::VectorXd& tipVelocity,
                 const std::vector<KickInterval>& kicks, double F);

/// Work estimates on the P-dimensional POD subspace.
WorkEstimate energy_estimates(const SnapshotSet& snapshots, const PodBasis& basis, int P,
                              kernels::Exec exec = kernels::Exec::Parallel);

/// The same integrals on the unprojected data: every velocity column is fitted
/// by its own Chebyshev series.
WorkEstimate full_state_work(const SnapshotSet& snapshots, int chebyshevDegree = 54);

struct ClosureReport {
    std::vector<double> inputWork;       ///< index P-1
    std::vector<double> dissipatedWork;
    std::vector<double> inputError;
    std::vector<double> dissipationError;
    double tolerance = 1e-4;
    int selectedP = 0;
    int referenceP = 0;
    bool converged = false;
    int varianceP = 0;
    double varianceFraction = 0.999;

    std::string to_json() const;
    static ClosureReport from_json(const std::string& text);
};

ClosureReport closure_select(const SnapshotSet& snapshots, const PodBasis& basis, double tolerance,
                             kernels::Exec exec = kernels::Exec::Parallel);

std::string pom_csv(const PodBasis& basis, int P);
std::string pod_to_json(const PodBasis& basis);
PodBasis pod_from_json(const std::string& text);

}  // namespace kickrom
