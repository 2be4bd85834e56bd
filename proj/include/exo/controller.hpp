#pragma once

#include <array>
#include <span>

#include "exo/plant.hpp"

namespace exo {

/// The six tuned controller parameters, in optimizer order
/// (kappa, gamma, eta1, eta2, eta3, eta4).
struct ControllerGains {
    double kappa = 1.0;  // sliding-variable feedback gain
    double gamma = 1.0;  // sliding surface slope, 1/s
    double eta1 = 1.0;   // inertia adaptation rate
    double eta2 = 1.0;   // solid friction adaptation rate
    double eta3 = 1.0;   // viscous friction adaptation rate
    double eta4 = 1.0;   // gravity torque adaptation rate

    static constexpr std::size_t size = 6;
    static constexpr std::array<const char*, size> names = {"kappa", "gamma", "eta1",
                                                            "eta2",  "eta3",  "eta4"};

    std::array<double, size> to_array() const { return {kappa, gamma, eta1, eta2, eta3, eta4}; }
    static ControllerGains from_span(std::span<const double> q);

    /// All six strictly positive and finite; throws ConfigError otherwise.
    void validate(const char* prefix = "gains") const;
};

/// Online estimates of the plant parameters. Also used for their rates and
/// for the parameter errors (true - estimate); no sign restriction.
struct Estimates {
    double inertia = 0.0;
    double solid_friction = 0.0;
    double viscous_friction = 0.0;
    double gravity_torque = 0.0;
};

/// Desired angle and its first two derivatives at one instant.
struct ReferencePoint {
    double theta = 0.0;
    double theta_dot = 0.0;
    double theta_ddot = 0.0;
};

struct TorqueCommand {
    double unsaturated = 0.0;
    double applied = 0.0;

    bool saturated() const { return applied != unsaturated; }
};

/// s = theta_err_dot + gamma * theta_err
double sliding_variable(double theta_err, double theta_err_dot, double gamma);

/// Control torque before and after clamping to +/- torque_limit:
///   G = I^ (th_d'' - gamma e') + Cs^ sign(th') + Cv^ th' - kappa s + G^ cos(th)
/// Throws DomainError on non-finite input.
TorqueCommand control_torque(const JointState& state, const ReferencePoint& ref,
                             const Estimates& est, const ControllerGains& gains,
                             double torque_limit, double eps);

/// Time derivatives of the four estimates for a given sliding variable.
Estimates adaptation_rates(const JointState& state, const ReferencePoint& ref, double s,
                           const ControllerGains& gains, double eps);

/// true - estimate, component-wise.
Estimates parameter_errors(const PlantParams& plant, const Estimates& est);

/// Lyapunov candidate
///   V = I s^2 / 2 + sum_j err_j^2 / (2 eta_j) + kappa gamma theta_err^2
/// Needs the true inertia, so it is a monitoring quantity only.
double lyapunov_value(double s, const Estimates& param_errors, double theta_err,
                      double true_inertia, const ControllerGains& gains);

/// The two sides of the closed-loop sliding dynamics under an unsaturated torque:
/// `plant_side` is I s' obtained by substituting the control law into the plant,
/// `error_side` the error-form expression
///   -kappa s - I~ (th_d'' - gamma e') - Cs~ sign(th') - Cv~ th' - G~ cos(th).
struct ClosedLoopSides {
    double plant_side = 0.0;
    double error_side = 0.0;

    double residual() const { return plant_side - error_side; }
};

ClosedLoopSides closed_loop_sides(const JointState& state, const ReferencePoint& ref,
                                  const Estimates& est, const ControllerGains& gains,
                                  const PlantParams& plant, double eps);

}  // namespace exo
