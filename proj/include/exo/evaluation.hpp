#pragma once

#include <array>
#include <string_view>

#include "exo/controller.hpp"

namespace exo {

struct TrajectoryLog;

enum class ReferenceKind { step, constant };

std::string_view to_string(ReferenceKind kind);

/// Desired joint trajectory. A step holds `theta_start` before `step_time`
/// and `theta_target` from `step_time` on; derivatives are zero everywhere.
/// A constant reference sits at `theta_target`.
struct ReferenceSpec {
    ReferenceKind kind = ReferenceKind::step;
    double theta_start = -0.78539816339744830962;  // -pi/4
    double theta_target = -1.57079632679489661923;  // -pi/2
    double step_time = 0.0;

    void validate() const;
    double magnitude() const { return theta_target - theta_start; }
};

/// Throws DomainError for t < 0.
ReferencePoint reference_at(const ReferenceSpec& spec, double t);

/// Step-response bands. The band widths are fractions of the step magnitude.
struct ConstraintParams {
    double overshoot = 0.02;     // allowed overshoot above the target
    double rise_band = 0.01;     // minimum normalized response on [rise_time, response_time)
    double start_band = 0.01;    // allowed initial undershoot on [0, rise_time)
    double static_error = 0.01;  // settling band half-width after response_time
    double response_time = 1.0;  // s
    double rise_time = 0.8;      // s
    double final_time = 3.0;     // s, end of the settling window

    void validate() const;
};

/// c[i] <= 0 for every i means feasible.
struct ConstraintVector {
    std::array<double, 5> c{};

    double operator[](std::size_t i) const { return c[i]; }
};

bool is_feasible(const ConstraintVector& c);

/// Sum of positive parts; zero exactly when feasible.
double total_violation(const ConstraintVector& c);

/// Mean over all rows of (theta - theta_d)^2 + (theta_dot - theta_d_dot)^2.
/// Throws EmptyLog.
double fitness_se(const TrajectoryLog& log);

/// The five step-response constraints evaluated on the normalized response
/// y = (theta - theta_start) / (theta_target - theta_start) over half-open windows:
///   c1 = -min_[0, tm) y - d0
///   c2 =  max_[0, tr) y - (1 + Ot)
///   c3 = -min_[tm, tr) y + dm
///   c4 =  max_[tr, tf) y - (1 + es)
///   c5 = -min_[tr, tf) y + (1 - es)
/// Throws WindowError when the log does not cover [0, tf] and DomainError for a
/// zero-magnitude reference.
ConstraintVector step_constraints(const TrajectoryLog& log, const ConstraintParams& params,
                                  const ReferenceSpec& spec);

/// Fitness and constraints of one closed-loop run.
struct StepEvaluation {
    double fitness = 0.0;
    ConstraintVector constraints;

    bool feasible() const { return is_feasible(constraints); }
    double violation() const { return total_violation(constraints); }
};

StepEvaluation evaluate_log(const TrajectoryLog& log, const ConstraintParams& params,
                            const ReferenceSpec& spec);

}  // namespace exo
