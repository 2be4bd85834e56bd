#include "exo/plant.hpp"

#include <cmath>

#include "exo/error.hpp"

namespace exo {

void PlantParams::validate() const {
    auto finite_nonneg = [](double v, const char* field) {
        if (!std::isfinite(v) || v < 0.0) throw ConfigError(field, "must be finite and >= 0");
    };
    if (!std::isfinite(inertia) || inertia <= 0.0)
        throw ConfigError("plant.inertia", "must be finite and > 0");
    finite_nonneg(gravity_torque, "plant.gravity_torque");
    finite_nonneg(solid_friction, "plant.solid_friction");
    finite_nonneg(viscous_friction, "plant.viscous_friction");
    finite_nonneg(human_torque_bound, "plant.human_torque_bound");
}

std::uint32_t envelope_flags(const JointState& state) {
    std::uint32_t flags = 0;
    if (state.theta < Envelope::theta_min || state.theta > Envelope::theta_max)
        flags |= kThetaOutOfEnvelope;
    if (std::abs(state.theta_dot) > Envelope::velocity_max) flags |= kVelocityOutOfEnvelope;
    return flags;
}

int sign_db(double v, double eps) {
    if (std::abs(v) <= eps) return 0;
    return v > 0.0 ? 1 : -1;
}

double friction_torque(double theta_dot, const PlantParams& params, double eps) {
    return -params.solid_friction * sign_db(theta_dot, eps) - params.viscous_friction * theta_dot;
}

double plant_accel(const JointState& state, double torque, double human_torque,
                   const PlantParams& params, double eps) {
    if (!std::isfinite(state.theta) || !std::isfinite(state.theta_dot) || !std::isfinite(torque) ||
        !std::isfinite(human_torque))
        throw DomainError("plant_accel: non-finite input");
    if (std::abs(human_torque) > params.human_torque_bound)
        throw DomainError("plant_accel: human torque exceeds its bound");
    const double gravity = -params.gravity_torque * std::cos(state.theta);
    return (gravity + torque + human_torque + friction_torque(state.theta_dot, params, eps)) /
           params.inertia;
}

}  // namespace exo
