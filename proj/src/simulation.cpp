#include "exo/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "exo/error.hpp"

namespace exo {

namespace {

using StateVector = std::array<double, 6>;

StateVector pack(const SimState& s) {
    return {s.joint.theta,          s.joint.theta_dot,           s.estimates.inertia,
            s.estimates.solid_friction, s.estimates.viscous_friction, s.estimates.gravity_torque};
}

SimState unpack(const StateVector& x) {
    return {{x[0], x[1]}, {x[2], x[3], x[4], x[5]}};
}

StateVector axpy(const StateVector& x, double a, const StateVector& k) {
    StateVector out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + a * k[i];
    return out;
}

bool all_finite(const StateVector& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

class ClosedLoop {
public:
    ClosedLoop(const PlantParams& plant, const ControllerGains& gains,
               const ReferenceSpec& reference, const SimConfig& sim)
        : plant_(plant), gains_(gains), reference_(reference), sim_(sim) {}

    /// Right-hand side of the augmented ODE; `saturated` is or-ed with the stage's clamp state.
    StateVector derivative(double t, const StateVector& x, bool& saturated) const {
        const SimState state = unpack(x);
        const ReferencePoint ref = reference_at(reference_, t);
        const TorqueCommand cmd = control_torque(state.joint, ref, state.estimates, gains_,
                                                 sim_.torque_limit, sim_.sign_deadband);
        saturated = saturated || cmd.saturated();
        const double accel = plant_accel(state.joint, cmd.applied, 0.0, plant_, sim_.sign_deadband);
        const double s = sliding_variable(state.joint.theta - ref.theta,
                                          state.joint.theta_dot - ref.theta_dot, gains_.gamma);
        const Estimates rates =
            adaptation_rates(state.joint, ref, s, gains_, sim_.sign_deadband);
        return {state.joint.theta_dot, accel,           rates.inertia,
                rates.solid_friction,  rates.viscous_friction, rates.gravity_torque};
    }

    LogRow row(double t, const StateVector& x, bool step_saturated) const {
        const SimState state = unpack(x);
        const ReferencePoint ref = reference_at(reference_, t);
        const TorqueCommand cmd = control_torque(state.joint, ref, state.estimates, gains_,
                                                 sim_.torque_limit, sim_.sign_deadband);
        const double err = state.joint.theta - ref.theta;
        const double s = sliding_variable(err, state.joint.theta_dot - ref.theta_dot, gains_.gamma);

        LogRow r;
        r.t = t;
        r.theta = state.joint.theta;
        r.theta_dot = state.joint.theta_dot;
        r.theta_d = ref.theta;
        r.theta_d_dot = ref.theta_dot;
        r.torque = cmd.applied;
        r.s = s;
        r.lyapunov = lyapunov_value(s, parameter_errors(plant_, state.estimates), err,
                                    plant_.inertia, gains_);
        r.estimates = state.estimates;
        r.violations = envelope_flags(state.joint);
        if (cmd.saturated()) r.violations |= kTorqueSaturated;
        if (step_saturated) r.violations |= kStepSaturated;
        return r;
    }

private:
    const PlantParams& plant_;
    const ControllerGains& gains_;
    const ReferenceSpec& reference_;
    const SimConfig& sim_;
};

}  // namespace

void SimConfig::validate() const {
    if (!std::isfinite(dt) || dt <= 0.0) throw ConfigError("sim.dt", "must be finite and > 0");
    if (!std::isfinite(t_final) || t_final < dt)
        throw ConfigError("sim.t_final", "must be finite and >= dt");
    const double steps = t_final / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
        throw ConfigError("sim.t_final", "must be an integer multiple of sim.dt");
    if (!(torque_limit > 0.0)) throw ConfigError("sim.torque_limit", "must be > 0");
    if (!std::isfinite(sign_deadband) || sign_deadband < 0.0)
        throw ConfigError("sim.sign_deadband", "must be finite and >= 0");
    if (!all_finite(pack(initial_state)))
        throw ConfigError("sim.initial_state", "must be finite");
}

std::size_t SimConfig::step_count() const {
    return static_cast<std::size_t>(std::llround(t_final / dt));
}

TrajectoryLog simulate(const PlantParams& plant, const ControllerGains& gains,
                       const ReferenceSpec& reference, const SimConfig& sim) {
    plant.validate();
    gains.validate();
    reference.validate();
    sim.validate();

    const ClosedLoop loop(plant, gains, reference, sim);
    const std::size_t steps = sim.step_count();
    const double dt = sim.dt;

    TrajectoryLog log;
    log.rows.reserve(steps + 1);

    StateVector x = pack(sim.initial_state);
    log.rows.push_back(loop.row(0.0, x, false));

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        bool saturated = false;
        StateVector next{};
        try {
            const StateVector k1 = loop.derivative(t, x, saturated);
            const StateVector k2 = loop.derivative(t + 0.5 * dt, axpy(x, 0.5 * dt, k1), saturated);
            const StateVector k3 = loop.derivative(t + 0.5 * dt, axpy(x, 0.5 * dt, k2), saturated);
            const StateVector k4 = loop.derivative(t + dt, axpy(x, dt, k3), saturated);
            for (std::size_t i = 0; i < next.size(); ++i)
                next[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        } catch (const DomainError&) {
            // A stage state went non-finite.
            next[0] = std::numeric_limits<double>::quiet_NaN();
        }

        if (!all_finite(next))
            throw NonFiniteState(t, "state diverged after t = " + std::to_string(t) + " s");
        x = next;
        log.rows.push_back(loop.row(static_cast<double>(k + 1) * dt, x, saturated));
    }
    return log;
}

}  // namespace exo
