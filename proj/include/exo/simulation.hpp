#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "exo/controller.hpp"
#include "exo/evaluation.hpp"
#include "exo/plant.hpp"

namespace exo {

/// Augmented continuous state: joint state plus the four adaptive estimates.
struct SimState {
    JointState joint;
    Estimates estimates;
};

struct SimConfig {
    double dt = 1e-3;
    double t_final = 3.0;
    SimState initial_state{{-0.78539816339744830962, 0.0}, {}};
    double torque_limit = 20.0;
    double sign_deadband = 1e-3;

    void validate() const;
    /// t_final / dt, which validate() guarantees is an integer.
    std::size_t step_count() const;
};

struct LogRow {
    double t = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;
    double theta_d = 0.0;
    double theta_d_dot = 0.0;
    double torque = 0.0;
    double s = 0.0;
    double lyapunov = 0.0;
    Estimates estimates;
    std::uint32_t violations = 0;
};

/// Uniformly sampled closed-loop trajectory, one row per integrator step plus t = 0.
struct TrajectoryLog {
    std::vector<LogRow> rows;

    bool empty() const { return rows.empty(); }
    std::size_t size() const { return rows.size(); }
};

/// Integrates plant + adaptive controller with classic RK4 at fixed step dt,
/// evaluating the controller at every stage. Passive wearer: no human torque.
/// Throws ConfigError for invalid inputs and NonFiniteState on divergence.
TrajectoryLog simulate(const PlantParams& plant, const ControllerGains& gains,
                       const ReferenceSpec& reference, const SimConfig& sim);

}  // namespace exo
