#include "exo/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "exo/error.hpp"
#include "exo/plant.hpp"
#include "exo/simulation.hpp"

namespace exo {

namespace {

// Window edges are compared against logged sample times with this slack so that
// k * dt landing one ulp off a boundary does not move a sample between windows.
constexpr double kTimeSlack = 1e-9;

struct Extrema {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    std::size_t count = 0;
};

Extrema window_extrema(const TrajectoryLog& log, double begin, double end, double start,
                       double magnitude, const char* name) {
    Extrema e;
    for (const LogRow& r : log.rows) {
        if (r.t < begin - kTimeSlack || r.t >= end - kTimeSlack) continue;
        const double y = (r.theta - start) / magnitude;
        e.min = std::min(e.min, y);
        e.max = std::max(e.max, y);
        ++e.count;
    }
    if (e.count == 0)
        throw WindowError(std::string("no samples in constraint window ") + name);
    return e;
}

bool in_envelope(double theta) {
    return theta >= Envelope::theta_min && theta <= Envelope::theta_max;
}

}  // namespace

std::string_view to_string(ReferenceKind kind) {
    return kind == ReferenceKind::step ? "step" : "constant";
}

void ReferenceSpec::validate() const {
    if (!std::isfinite(theta_start) || !in_envelope(theta_start))
        throw ConfigError("reference.theta_start", "must lie in [-pi/2, 0]");
    if (!std::isfinite(theta_target) || !in_envelope(theta_target))
        throw ConfigError("reference.theta_target", "must lie in [-pi/2, 0]");
    if (!std::isfinite(step_time) || step_time < 0.0)
        throw ConfigError("reference.step_time", "must be finite and >= 0");
    if (kind == ReferenceKind::step && theta_target == theta_start)
        throw ConfigError("reference.theta_target", "must differ from theta_start for a step");
}

ReferencePoint reference_at(const ReferenceSpec& spec, double t) {
    if (!(t >= 0.0)) throw DomainError("reference_at: t must be >= 0");
    if (spec.kind == ReferenceKind::constant) return {spec.theta_target, 0.0, 0.0};
    return {t < spec.step_time ? spec.theta_start : spec.theta_target, 0.0, 0.0};
}

void ConstraintParams::validate() const {
    auto fraction = [](double v, const char* field) {
        if (!std::isfinite(v) || v < 0.0) throw ConfigError(field, "must be finite and >= 0");
    };
    fraction(overshoot, "constraints.overshoot");
    fraction(rise_band, "constraints.rise_band");
    fraction(start_band, "constraints.start_band");
    fraction(static_error, "constraints.static_error");
    if (!std::isfinite(rise_time) || rise_time <= 0.0)
        throw ConfigError("constraints.rise_time", "must be finite and > 0");
    if (!std::isfinite(response_time) || response_time <= rise_time)
        throw ConfigError("constraints.response_time", "must exceed rise_time");
    if (!std::isfinite(final_time) || final_time <= response_time)
        throw ConfigError("constraints.final_time", "must exceed response_time");
}

bool is_feasible(const ConstraintVector& c) {
    return std::all_of(c.c.begin(), c.c.end(), [](double v) { return v <= 0.0; });
}

double total_violation(const ConstraintVector& c) {
    double sum = 0.0;
    for (double v : c.c) sum += std::max(v, 0.0);
    return sum;
}

double fitness_se(const TrajectoryLog& log) {
    if (log.empty()) throw EmptyLog();
    double sum = 0.0;
    for (const LogRow& r : log.rows) {
        const double e = r.theta - r.theta_d;
        const double e_dot = r.theta_dot - r.theta_d_dot;
        sum += e * e + e_dot * e_dot;
    }
    return sum / static_cast<double>(log.size());
}

ConstraintVector step_constraints(const TrajectoryLog& log, const ConstraintParams& params,
                                  const ReferenceSpec& spec) {
    if (log.empty()) throw EmptyLog();
    const double magnitude = spec.magnitude();
    if (magnitude == 0.0 || !std::isfinite(magnitude))
        throw DomainError("step_constraints: reference has zero magnitude");
    if (log.rows.front().t > kTimeSlack)
        throw WindowError("trajectory starts after t = 0");
    if (log.rows.back().t < params.final_time - kTimeSlack)
        throw WindowError("trajectory ends at t = " + std::to_string(log.rows.back().t) +
                          " s, before final_time = " + std::to_string(params.final_time) + " s");

    const double start = spec.theta_start;
    const Extrema early = window_extrema(log, 0.0, params.rise_time, start, magnitude, "[0, tm)");
    const Extrema rise = window_extrema(log, 0.0, params.response_time, start, magnitude, "[0, tr)");
    const Extrema late =
        window_extrema(log, params.rise_time, params.response_time, start, magnitude, "[tm, tr)");
    const Extrema settle =
        window_extrema(log, params.response_time, params.final_time, start, magnitude, "[tr, tf)");

    ConstraintVector c;
    c.c[0] = -early.min - params.start_band;
    c.c[1] = rise.max - (1.0 + params.overshoot);
    c.c[2] = -late.min + params.rise_band;
    c.c[3] = settle.max - (1.0 + params.static_error);
    c.c[4] = -settle.min + (1.0 - params.static_error);
    return c;
}

StepEvaluation evaluate_log(const TrajectoryLog& log, const ConstraintParams& params,
                            const ReferenceSpec& spec) {
    return {fitness_se(log), step_constraints(log, params, spec)};
}

}  // namespace exo
