#include "exo/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "exo/error.hpp"

namespace exo {

ControllerGains ControllerGains::from_span(std::span<const double> q) {
    if (q.size() != size)
        throw DomainError("gain vector must have 6 entries, got " + std::to_string(q.size()));
    return {q[0], q[1], q[2], q[3], q[4], q[5]};
}

void ControllerGains::validate(const char* prefix) const {
    const auto values = to_array();
    for (std::size_t i = 0; i < size; ++i) {
        if (!std::isfinite(values[i]) || values[i] <= 0.0)
            throw ConfigError(std::string(prefix) + "." + names[i], "must be finite and > 0");
    }
}

double sliding_variable(double theta_err, double theta_err_dot, double gamma) {
    return theta_err_dot + gamma * theta_err;
}

TorqueCommand control_torque(const JointState& state, const ReferencePoint& ref,
                             const Estimates& est, const ControllerGains& gains,
                             double torque_limit, double eps) {
    if (!std::isfinite(state.theta) || !std::isfinite(state.theta_dot) ||
        !std::isfinite(ref.theta) || !std::isfinite(ref.theta_dot) ||
        !std::isfinite(ref.theta_ddot) || !std::isfinite(est.inertia) ||
        !std::isfinite(est.solid_friction) || !std::isfinite(est.viscous_friction) ||
        !std::isfinite(est.gravity_torque))
        throw DomainError("control_torque: non-finite input");
    if (!(torque_limit > 0.0)) throw DomainError("control_torque: torque limit must be > 0");

    const double err = state.theta - ref.theta;
    const double err_dot = state.theta_dot - ref.theta_dot;
    const double s = sliding_variable(err, err_dot, gains.gamma);
    const double regressor = ref.theta_ddot - gains.gamma * err_dot;

    TorqueCommand cmd;
    cmd.unsaturated = est.inertia * regressor + est.solid_friction * sign_db(state.theta_dot, eps) +
                      est.viscous_friction * state.theta_dot - gains.kappa * s +
                      est.gravity_torque * std::cos(state.theta);
    cmd.applied = std::clamp(cmd.unsaturated, -torque_limit, torque_limit);
    return cmd;
}

Estimates adaptation_rates(const JointState& state, const ReferencePoint& ref, double s,
                           const ControllerGains& gains, double eps) {
    const double err_dot = state.theta_dot - ref.theta_dot;
    const double regressor = ref.theta_ddot - gains.gamma * err_dot;
    return {
        -gains.eta1 * regressor * s,
        -gains.eta2 * sign_db(state.theta_dot, eps) * s,
        -gains.eta3 * state.theta_dot * s,
        -gains.eta4 * std::cos(state.theta) * s,
    };
}

Estimates parameter_errors(const PlantParams& plant, const Estimates& est) {
    return {
        plant.inertia - est.inertia,
        plant.solid_friction - est.solid_friction,
        plant.viscous_friction - est.viscous_friction,
        plant.gravity_torque - est.gravity_torque,
    };
}

double lyapunov_value(double s, const Estimates& param_errors, double theta_err,
                      double true_inertia, const ControllerGains& gains) {
    const auto& e = param_errors;
    return 0.5 * true_inertia * s * s + e.inertia * e.inertia / (2.0 * gains.eta1) +
           e.solid_friction * e.solid_friction / (2.0 * gains.eta2) +
           e.viscous_friction * e.viscous_friction / (2.0 * gains.eta3) +
           e.gravity_torque * e.gravity_torque / (2.0 * gains.eta4) +
           gains.kappa * gains.gamma * theta_err * theta_err;
}

ClosedLoopSides closed_loop_sides(const JointState& state, const ReferencePoint& ref,
                                  const Estimates& est, const ControllerGains& gains,
                                  const PlantParams& plant, double eps) {
    const double err = state.theta - ref.theta;
    const double err_dot = state.theta_dot - ref.theta_dot;
    const double s = sliding_variable(err, err_dot, gains.gamma);
    const double regressor = ref.theta_ddot - gains.gamma * err_dot;

    // Unsaturated torque so the substitution is exact.
    const double torque =
        control_torque(state, ref, est, gains, std::numeric_limits<double>::infinity(), eps)
            .unsaturated;
    const double accel = plant_accel(state, torque, 0.0, plant, eps);

    // s' = th'' - th_d'' + gamma e'
    ClosedLoopSides sides;
    sides.plant_side = plant.inertia * (accel - regressor);

    const Estimates err_p = parameter_errors(plant, est);
    sides.error_side = -gains.kappa * s - err_p.inertia * regressor -
                       err_p.solid_friction * sign_db(state.theta_dot, eps) -
                       err_p.viscous_friction * state.theta_dot -
                       err_p.gravity_torque * std::cos(state.theta);
    return sides;
}

}  // namespace exo
