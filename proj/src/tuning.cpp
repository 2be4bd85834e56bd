#include "exo/tuning.hpp"

#include <limits>

#include "exo/error.hpp"

namespace exo {

void StepResponseProblem::validate() const {
    plant.validate();
    reference.validate();
    sim.validate();
    constraints.validate();
    if (reference.kind != ReferenceKind::step)
        throw ConfigError("reference.kind", "tuning needs a step reference");
    if (sim.t_final < constraints.final_time)
        throw ConfigError("constraints.final_time", "must not exceed sim.t_final");
}

StepEvaluation StepResponseProblem::evaluate(const ControllerGains& gains) const {
    return evaluate_log(simulate(plant, gains, reference, sim), constraints, reference);
}

Evaluation StepResponseProblem::operator()(std::span<const double> q) const {
    const ControllerGains gains = ControllerGains::from_span(q);
    try {
        return to_evaluation(evaluate(gains));
    } catch (const NonFiniteState&) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return {inf, std::vector<double>(5, inf)};
    }
}

Evaluation to_evaluation(const StepEvaluation& e) {
    return {e.fitness, std::vector<double>(e.constraints.c.begin(), e.constraints.c.end())};
}

}  // namespace exo
