#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kickrom/pod.hpp"
#include "kickrom/simulate.hpp"

namespace kickrom {

struct ErrorMetrics {
    double displacementPct = 0.0;
    double velocityPct = 0.0;
    int samplesCompared = 0;
    /// Phase-plane traces: columns t, w_a, v_a, w_b, v_b at x = 0.5 and x = 1.
    Eigen::MatrixXd traceMid;
    Eigen::MatrixXd traceTip;

    std::string to_json() const;
};

/// 100 ||W_b - W_a||_F / ||W_a||_F (and the same for velocities) over the
/// common part of two windows that both start on the section. Windows must
/// share the spatial grid and sample interval, and their periods must agree to
/// within periodTol (relative) when both are set.
ErrorMetrics rms_errors(const SnapshotSet& reference, const SnapshotSet& other, double periodTol = 0.02);

enum class Taper { Hann, None };

struct SpectrumResult {
    std::vector<double> frequency;  ///< cycles per unit time
    std::vector<double> power;      ///< one-sided; sums to the (window-compensated) mean square
    std::vector<double> peaks;      ///< ascending frequencies of local maxima above the prominence cut
    bool resolutionWarning = false;

    std::string to_csv() const;
};

/// Single-window periodogram with mean removal.
SpectrumResult power_spectrum(const std::vector<double>& series, double rate, Taper taper = Taper::Hann,
                              double prominence = 1e-6, double lowestFrequency = 0.0);

/// Principal angles between the column spans of two orthonormal matrices, ascending.
Eigen::VectorXd principal_angles(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
Eigen::VectorXd principal_angles(const PodBasis& a, const PodBasis& b, int P);

struct AngleReport {
    std::vector<double> labels;  ///< kick strength of each basis
    Eigen::MatrixXd maxAngle;    ///< pairwise largest principal angle
    int P = 0;

    double overall_max() const;
    std::string to_json() const;
};

AngleReport angle_report(const std::vector<PodBasis>& bases, const std::vector<double>& labels, int P);

}  // namespace kickrom
