#pragma once

#include <span>

#include "exo/evaluation.hpp"
#include "exo/plant.hpp"
#include "exo/pso.hpp"
#include "exo/simulation.hpp"

namespace exo {

/// Controller tuning as an optimization problem: a gain vector maps to the
/// squared-error fitness and the five step-response constraints of one
/// closed-loop simulation.
struct StepResponseProblem {
    PlantParams plant;
    ReferenceSpec reference;
    SimConfig sim;
    ConstraintParams constraints;

    void validate() const;

    /// Throws on divergence; see `operator()` for the optimizer-facing variant.
    StepEvaluation evaluate(const ControllerGains& gains) const;

    /// A diverging simulation scores +inf fitness and +inf on every constraint,
    /// so the swarm ranks it last instead of aborting.
    Evaluation operator()(std::span<const double> q) const;
};

Evaluation to_evaluation(const StepEvaluation& e);

}  // namespace exo
