#pragma once

#include <cstdint>

namespace exo {

/// True physical parameters of the shank + orthosis assembly.
struct PlantParams {
    double inertia = 0.4;             // kg m^2
    double gravity_torque = 4.0;      // N m
    double solid_friction = 0.6;      // N m
    double viscous_friction = 0.2;    // N m s / rad
    double human_torque_bound = 5.0;  // N m

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

struct JointState {
    double theta = 0.0;      // rad, shank angle relative to the thigh
    double theta_dot = 0.0;  // rad/s
};

/// Operational envelope. Leaving it is recorded, never clamped.
struct Envelope {
    static constexpr double theta_min = -1.57079632679489661923;
    static constexpr double theta_max = 0.0;
    static constexpr double velocity_max = 3.1;
};

/// Bit flags stored in the `violations` column of a trajectory.
enum ViolationFlag : std::uint32_t {
    kThetaOutOfEnvelope = 1u << 0,
    kVelocityOutOfEnvelope = 1u << 1,
    kTorqueSaturated = 1u << 2,      // torque evaluated at this row hit the limit
    kStepSaturated = 1u << 3,        // some integrator stage reaching this row hit the limit
};

std::uint32_t envelope_flags(const JointState& state);

/// Sign with a dead band: 0 when |v| <= eps. eps = 0 gives the classical sign.
int sign_db(double v, double eps);

/// Solid plus viscous friction torque, opposing motion.
double friction_torque(double theta_dot, const PlantParams& params, double eps);

/// Joint acceleration of the passive-wearer dynamics
///   I th'' = -G cos(th) + torque + human_torque - Cs sign(th') - Cv th'
/// Throws DomainError on non-finite input or |human_torque| above its bound.
double plant_accel(const JointState& state, double torque, double human_torque,
                   const PlantParams& params, double eps);

}  // namespace exo
