#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kickrom/hybrid.hpp"
#include "kickrom/pod.hpp"

namespace kickrom {

/// Galerkin reduced model on a set of Chebyshev-represented shape functions.
struct RomPackage {
    int P = 0;
    SystemParams params;
    std::vector<double> xGrid;
    Eigen::MatrixXd modes;       ///< discrete POMs on xGrid (N_x x P), used for projections
    Eigen::MatrixXd chebCoeffs;  ///< (degree+1) x P
    Eigen::MatrixXd M;           ///< int psi_i psi_j
    Eigen::MatrixXd K;           ///< int psi_i'' psi_j''
    Eigen::MatrixXd E;           ///< psi_i(1) psi_j(1)
    Eigen::VectorXd tip;         ///< psi(1)
    std::string sourceFingerprint;
    int selectedP = 0;           ///< closure choice of the source data, if known
    double closureTolerance = 0.0;

    std::string to_json() const;
    static RomPackage from_json(const std::string& text);
};

/// Mass, stiffness and tip coupling of the series in `chebCoeffs` (one per column).
RomPackage assemble_rom(const Eigen::MatrixXd& chebCoeffs, const SystemParams& params);
RomPackage assemble_rom(const PodBasis& basis, int P, const SystemParams& params,
                        const std::string& sourceFingerprint = "");

/// (M + mE) b'' + (cv M + cm K) b' + (K + k E [zone]) b = sign F psi(1) [kick]
class RomPlant final : public HybridPlant {
public:
    explicit RomPlant(RomPackage rom);

    int dofs() const override { return rom_.P; }
    const SystemParams& params() const override { return rom_.params; }
    void accelerations(const DiscreteMode& mode, const double* q, const double* v, double* out) const override;
    const Eigen::VectorXd& tip_row(Model) const override { return rom_.tip; }
    void hand_off(HybridState& state, const DiscreteMode& to) const override;
    Eigen::MatrixXd shape_matrix(Model model, std::span<const double> x, int derivative) const override;
    double energy(const DiscreteMode& mode, const double* q, const double* v) const override;
    double dissipation_power(const DiscreteMode& mode, const double* q, const double* v) const override;

    const RomPackage& package() const { return rom_; }
    const Eigen::MatrixXd& effective_mass() const { return massEff_; }
    const Eigen::MatrixXd& damping() const { return damping_; }
    Eigen::MatrixXd stiffness(Model model) const;

private:
    RomPackage rom_;
    Eigen::MatrixXd massEff_;
    Eigen::MatrixXd damping_;
    // Effective-mass solves applied once to every constant operator.
    Eigen::MatrixXd invDamping_;
    Eigen::MatrixXd invStiffFree_;
    Eigen::MatrixXd invStiffZone_;
    Eigen::VectorXd invLoad_;
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor rowsFree_;
    RowMajor rowsZone_;
};

struct RomInitial {
    HybridState state;
    double residual = 0.0;  ///< relative L2 residual of displacement and velocity on the grid
};

/// Projects a full-order state onto the POMs (fields sampled on the ROM grid).
/// The discrete mode follows the reduced tip state; an armed kick carries over
/// when the reduced tip is still in the armed region.
RomInitial project_initial(const HybridState& state, const HybridPlant& fos, const RomPlant& rom);

}  // namespace kickrom
