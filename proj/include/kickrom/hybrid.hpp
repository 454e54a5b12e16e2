#pragma once

#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "kickrom/modal.hpp"
#include "kickrom/params.hpp"

namespace kickrom {

/// Regions of the tip phase plane (w(1), w'(1)).
///
/// R2 / R6: outside the kicker zone (w > d/2 / w < -d/2).
/// Inside |w| <= d/2, right half (w > 0): R1 (v >= 0), R3 (-vcr <= v < 0), R4 (v < -vcr).
/// Left half (w <= 0): R5 (v <= 0), R7 (0 < v <= vcr), R8 (v > vcr).
enum class Region : int { R1 = 1, R2, R3, R4, R5, R6, R7, R8 };

/// A: free tip, B: spring plus kick, C: spring only.
enum class Model { A, B, C };

struct DiscreteMode {
    Model model = Model::C;
    bool kickArmed = false;
    int kickSign = 0;  ///< +1 / -1 while model B is active, otherwise 0

    bool operator==(const DiscreteMode&) const = default;
};

const char* to_string(Model m);
std::string to_string(Region r);
int region_index(Region r);

Region classify_region(double tipW, double tipV, double d, double vcr);
inline Region classify_region(double tipW, double tipV, const SystemParams& p)
{
    return classify_region(tipW, tipV, p.d, p.vcr);
}

/// True for every region over the kicker core (all but R2 and R6).
bool in_zone(Region r);
/// Image under w -> -w, v -> -v.
Region mirror(Region r);
bool mode_consistent(const DiscreteMode& mode, Region region);

/// The automaton. Entering R4 from R2 (or R8 from R6) arms the kick with the
/// sign of the tip velocity; any other change out of an armed region, or out
/// of the zone, disarms it.
DiscreteMode next_mode(const DiscreteMode& current, Region from, Region to);

struct HybridState {
    double time = 0.0;
    Eigen::VectorXd coords;
    Eigen::VectorXd vels;
    DiscreteMode mode;
    Region region = Region::R1;
    /// Static deflection the model-B coordinates are measured about. Coordinates
    /// stay absolute; the shift only enters the restoring force.
    std::optional<StaticDeflection> shiftApplied;
};

/// Continuous dynamics shared by the full-order system and reduced models.
/// Implementations are immutable after construction and thread-safe.
class HybridPlant {
public:
    virtual ~HybridPlant() = default;

    virtual int dofs() const = 0;
    virtual const SystemParams& params() const = 0;
    virtual void accelerations(const DiscreteMode& mode, const double* q, const double* v,
                               double* out) const = 0;
    /// Tip displacement is tip_row(model) . q
    virtual const Eigen::VectorXd& tip_row(Model model) const = 0;
    /// Re-expresses the state in the coordinates of `to` and records any shift.
    virtual void hand_off(HybridState& state, const DiscreteMode& to) const = 0;
    /// Values (or x-derivatives) of the coordinate shape functions; rows = x.
    virtual Eigen::MatrixXd shape_matrix(Model model, std::span<const double> x, int derivative) const = 0;
    /// Mechanical energy with the zone potential continued as k (d/2)^2 / 2 outside.
    virtual double energy(const DiscreteMode& mode, const double* q, const double* v) const = 0;
    virtual double dissipation_power(const DiscreteMode& mode, const double* q, const double* v) const = 0;

    double input_power(const DiscreteMode& mode, const double* v) const;
    double tip_displacement(const HybridState& s) const;
    double tip_velocity(const HybridState& s) const;
    double energy(const HybridState& s) const;
};

/// Modal ODE coefficients of one linear model:
/// a'' = -damping .* a' - D a' - stiffness .* (a - shift),  D = -coupling * tip tip^T.
struct OdeSystem {
    Model model = Model::C;
    Eigen::VectorXd stiffness;
    Eigen::VectorXd damping;
    Eigen::VectorXd tip;
    double coupling = 0.0;
    Eigen::VectorXd shift;

    Eigen::MatrixXd coupling_matrix() const;
    void accelerations(const double* q, const double* v, double* out) const;
};

/// Full-order system: N free-tip modes for model A, N spring-tip modes for B and C.
class FullOrderModel final : public HybridPlant {
public:
    explicit FullOrderModel(const SystemParams& params);

    int dofs() const override { return params_.N; }
    const SystemParams& params() const override { return params_; }
    void accelerations(const DiscreteMode& mode, const double* q, const double* v, double* out) const override;
    const Eigen::VectorXd& tip_row(Model model) const override;
    void hand_off(HybridState& state, const DiscreteMode& to) const override;
    Eigen::MatrixXd shape_matrix(Model model, std::span<const double> x, int derivative) const override;
    double energy(const DiscreteMode& mode, const double* q, const double* v) const override;
    double dissipation_power(const DiscreteMode& mode, const double* q, const double* v) const override;

    const ModalBasis& free_tip() const { return freeTip_; }
    const ModalBasis& spring_tip() const { return springTip_; }
    const TransitionMatrix& to_spring() const { return toSpring_; }
    const TransitionMatrix& to_free() const { return toFree_; }
    const OdeSystem& system(const DiscreteMode& mode) const;
    const Eigen::VectorXd& shift_coefficients(int sign) const;

    /// Absolute displacement and velocity fields of a state on a grid.
    Eigen::VectorXd displacement_field(const HybridState& s, std::span<const double> x) const;
    Eigen::VectorXd velocity_field(const HybridState& s, std::span<const double> x) const;

private:
    SystemParams params_;
    ModalBasis freeTip_;
    ModalBasis springTip_;
    TransitionMatrix toSpring_;
    TransitionMatrix toFree_;
    OdeSystem systemA_;
    OdeSystem systemC_;
    OdeSystem systemBPlus_;
    OdeSystem systemBMinus_;
};

/// Accelerations of a state; checks that its discrete mode matches its region.
Eigen::VectorXd rhs(const HybridState& state, const HybridPlant& plant);

/// Moves a state sitting on a region boundary into `newRegion`: updates the
/// automaton and hands the coordinates over to the new model.
HybridState apply_transition(const HybridState& state, Region newRegion, const HybridPlant& plant,
                             double boundaryTol = 1e-6);

/// Mirror image w -> -w (all coordinates and velocities negated, regions mirrored).
HybridState mirrored(const HybridState& s);

}  // namespace kickrom
