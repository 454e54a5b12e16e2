#include "kickrom/hybrid.hpp"

#include <cmath>
#include <sstream>

#include "kickrom/errors.hpp"

namespace kickrom {

const char* to_string(Model m)
{
    switch (m) {
    case Model::A: return "A";
    case Model::B: return "B";
    case Model::C: return "C";
    }
    return "?";
}

std::string to_string(Region r)
{
    return "R" + std::to_string(region_index(r));
}

int region_index(Region r)
{
    return static_cast<int>(r);
}

Region classify_region(double tipW, double tipV, double d, double vcr)
{
    const double h = 0.5 * d;
    if (tipW > h) {
        return Region::R2;
    }
    if (tipW < -h) {
        return Region::R6;
    }
    if (tipW > 0.0) {
        if (tipV >= 0.0) {
            return Region::R1;
        }
        return tipV >= -vcr ? Region::R3 : Region::R4;
    }
    if (tipV <= 0.0) {
        return Region::R5;
    }
    return tipV <= vcr ? Region::R7 : Region::R8;
}

bool in_zone(Region r)
{
    return r != Region::R2 && r != Region::R6;
}

Region mirror(Region r)
{
    switch (r) {
    case Region::R1: return Region::R5;
    case Region::R2: return Region::R6;
    case Region::R3: return Region::R7;
    case Region::R4: return Region::R8;
    case Region::R5: return Region::R1;
    case Region::R6: return Region::R2;
    case Region::R7: return Region::R3;
    case Region::R8: return Region::R4;
    }
    return r;
}

bool mode_consistent(const DiscreteMode& mode, Region region)
{
    switch (mode.model) {
    case Model::A:
        return !in_zone(region) && !mode.kickArmed && mode.kickSign == 0;
    case Model::B:
        return mode.kickArmed && ((region == Region::R4 && mode.kickSign == -1) ||
                                  (region == Region::R8 && mode.kickSign == 1));
    case Model::C:
        return in_zone(region) && !mode.kickArmed && mode.kickSign == 0;
    }
    return false;
}

DiscreteMode next_mode(const DiscreteMode& current, Region from, Region to)
{
    if (!in_zone(to)) {
        return DiscreteMode{Model::A, false, 0};
    }
    if (current.model == Model::A) {
        if (from == Region::R2 && to == Region::R4) {
            return DiscreteMode{Model::B, true, -1};
        }
        if (from == Region::R6 && to == Region::R8) {
            return DiscreteMode{Model::B, true, 1};
        }
    }
    return DiscreteMode{Model::C, false, 0};
}

double HybridPlant::input_power(const DiscreteMode& mode, const double* v) const
{
    if (mode.model != Model::B) {
        return 0.0;
    }
    const Eigen::VectorXd& tip = tip_row(Model::B);
    const Eigen::Map<const Eigen::VectorXd> vel(v, dofs());
    return mode.kickSign * params().F * tip.dot(vel);
}

double HybridPlant::tip_displacement(const HybridState& s) const
{
    return tip_row(s.mode.model).dot(s.coords);
}

double HybridPlant::tip_velocity(const HybridState& s) const
{
    return tip_row(s.mode.model).dot(s.vels);
}

double HybridPlant::energy(const HybridState& s) const
{
    return energy(s.mode, s.coords.data(), s.vels.data());
}

Eigen::MatrixXd OdeSystem::coupling_matrix() const
{
    return -coupling * tip * tip.transpose();
}

void OdeSystem::accelerations(const double* q, const double* v, double* out) const
{
    const Eigen::Index n = stiffness.size();
    double tipV = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        tipV += tip[i] * v[i];
    }
    const double c = coupling * tipV;
    const double* s = shift.data();
    for (Eigen::Index i = 0; i < n; ++i) {
        out[i] = -damping[i] * v[i] + c * tip[i] - stiffness[i] * (q[i] - s[i]);
    }
}

namespace {

OdeSystem make_system(Model model, const ModalBasis& basis, const SystemParams& p, double k)
{
    OdeSystem sys;
    sys.model = model;
    sys.stiffness = basis.frequencies.array().square();
    sys.damping = p.cv + p.cm * sys.stiffness.array();
    sys.tip = basis.tipValues;
    sys.coupling = p.m * p.cv + k * p.cm;
    sys.shift = Eigen::VectorXd::Zero(basis.size());
    return sys;
}

}  // namespace

FullOrderModel::FullOrderModel(const SystemParams& params)
    : params_(params),
      freeTip_(build_modal_basis(params, BasisVariant::FreeTip)),
      springTip_(build_modal_basis(params, BasisVariant::SpringTip)),
      toSpring_(transition_matrix(freeTip_, springTip_, params.m, TransitionDirection::AtoBC)),
      toFree_(transition_matrix(freeTip_, springTip_, params.m, TransitionDirection::BCtoA))
{
    systemA_ = make_system(Model::A, freeTip_, params_, 0.0);
    systemC_ = make_system(Model::C, springTip_, params_, params_.k);
    systemBPlus_ = systemC_;
    systemBPlus_.model = Model::B;
    systemBPlus_.shift = project_static(springTip_, static_deflection(params_, 1));
    systemBMinus_ = systemBPlus_;
    systemBMinus_.shift = -systemBPlus_.shift;
}

const OdeSystem& FullOrderModel::system(const DiscreteMode& mode) const
{
    switch (mode.model) {
    case Model::A: return systemA_;
    case Model::C: return systemC_;
    case Model::B: return mode.kickSign > 0 ? systemBPlus_ : systemBMinus_;
    }
    return systemC_;
}

const Eigen::VectorXd& FullOrderModel::shift_coefficients(int sign) const
{
    return sign > 0 ? systemBPlus_.shift : systemBMinus_.shift;
}

void FullOrderModel::accelerations(const DiscreteMode& mode, const double* q, const double* v, double* out) const
{
    system(mode).accelerations(q, v, out);
}

const Eigen::VectorXd& FullOrderModel::tip_row(Model model) const
{
    return model == Model::A ? freeTip_.tipValues : springTip_.tipValues;
}

void FullOrderModel::hand_off(HybridState& state, const DiscreteMode& to) const
{
    const bool fromFree = state.mode.model == Model::A;
    const bool toFree = to.model == Model::A;
    if (fromFree && !toFree) {
        state.coords = toSpring_.entries * state.coords;
        state.vels = toSpring_.entries * state.vels;
    } else if (!fromFree && toFree) {
        state.coords = toFree_.entries * state.coords;
        state.vels = toFree_.entries * state.vels;
    }
    if (to.model == Model::B) {
        state.shiftApplied = static_deflection(params_, to.kickSign);
    } else {
        state.shiftApplied.reset();
    }
}

Eigen::MatrixXd FullOrderModel::shape_matrix(Model model, std::span<const double> x, int derivative) const
{
    return model == Model::A ? freeTip_.evaluate(x, derivative) : springTip_.evaluate(x, derivative);
}

double FullOrderModel::energy(const DiscreteMode& mode, const double* q, const double* v) const
{
    const OdeSystem& sys = system(mode);
    double e = 0.0;
    for (int i = 0; i < params_.N; ++i) {
        e += v[i] * v[i] + sys.stiffness[i] * q[i] * q[i];
    }
    e *= 0.5;
    if (mode.model == Model::A) {
        const double h = params_.halfWidth();
        e += 0.5 * params_.k * h * h;
    }
    return e;
}

double FullOrderModel::dissipation_power(const DiscreteMode& mode, const double* q, const double* v) const
{
    (void)q;
    const OdeSystem& sys = system(mode);
    double p = 0.0;
    double tipV = 0.0;
    for (int i = 0; i < params_.N; ++i) {
        p += sys.damping[i] * v[i] * v[i];
        tipV += sys.tip[i] * v[i];
    }
    return p - sys.coupling * tipV * tipV;
}

Eigen::VectorXd FullOrderModel::displacement_field(const HybridState& s, std::span<const double> x) const
{
    return shape_matrix(s.mode.model, x, 0) * s.coords;
}

Eigen::VectorXd FullOrderModel::velocity_field(const HybridState& s, std::span<const double> x) const
{
    return shape_matrix(s.mode.model, x, 0) * s.vels;
}

Eigen::VectorXd rhs(const HybridState& state, const HybridPlant& plant)
{
    if (!mode_consistent(state.mode, state.region)) {
        std::ostringstream msg;
        msg << "model " << to_string(state.mode.model) << (state.mode.kickArmed ? " (armed)" : "")
            << " is not admissible in region " << to_string(state.region);
        throw HybridConsistencyError(msg.str());
    }
    if (state.coords.size() != plant.dofs() || state.vels.size() != plant.dofs()) {
        throw HybridConsistencyError("state dimension does not match the plant");
    }
    Eigen::VectorXd out(plant.dofs());
    plant.accelerations(state.mode, state.coords.data(), state.vels.data(), out.data());
    return out;
}

HybridState apply_transition(const HybridState& state, Region newRegion, const HybridPlant& plant,
                             double boundaryTol)
{
    const SystemParams& p = plant.params();
    const double w = plant.tip_displacement(state);
    const double v = plant.tip_velocity(state);
    const double h = p.halfWidth();
    const double gap = std::min({std::abs(std::abs(w) - h), std::abs(w), std::abs(std::abs(v) - p.vcr)});
    if (!(gap <= boundaryTol)) {
        std::ostringstream msg;
        msg << "transition requested away from any region boundary at t = " << state.time
            << " (tip w = " << w << ", v = " << v << ")";
        throw EventConsistencyError(msg.str());
    }
    HybridState next = state;
    const DiscreteMode mode = next_mode(state.mode, state.region, newRegion);
    plant.hand_off(next, mode);
    next.mode = mode;
    next.region = newRegion;
    return next;
}

HybridState mirrored(const HybridState& s)
{
    HybridState out = s;
    out.coords = -s.coords;
    out.vels = -s.vels;
    out.mode.kickSign = -s.mode.kickSign;
    out.region = mirror(s.region);
    if (s.shiftApplied) {
        out.shiftApplied->sign = -s.shiftApplied->sign;
    }
    return out;
}

}  // namespace kickrom
