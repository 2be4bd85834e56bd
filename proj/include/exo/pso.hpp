#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace exo {

/// One search dimension with its box bounds.
struct Dimension {
    std::string name;
    double min = 0.0;
    double max = 1.0;

    double range() const { return max - min; }
};

/// Box bounds for the six controller gains (kappa, gamma, eta1..eta4).
std::vector<Dimension> gain_bounds();

enum class Execution { serial, parallel };

struct PsoConfig {
    std::size_t swarm_size = 30;
    std::size_t max_generations = 30;
    double cognitive = 2.0;       // pull towards the personal best
    double social = 2.0;          // pull towards the global best
    double inertia_start = 0.9;
    double inertia_end = 0.4;
    double velocity_clamp = 0.5;  // |v_d| <= velocity_clamp * range_d
    std::uint64_t seed = 1;
    std::vector<Dimension> bounds = gain_bounds();
    Execution execution = Execution::parallel;

    /// Throws ConfigError with paths such as "pso.bounds.kappa".
    void validate() const;
    std::size_t dimension() const { return bounds.size(); }
};

/// Objective value plus inequality constraints, feasible when every entry is <= 0.
struct Evaluation {
    double fitness = 0.0;
    std::vector<double> constraints;

    double violation() const;
    bool feasible() const { return violation() == 0.0; }
};

using Objective = std::function<Evaluation(std::span<const double>)>;

/// What the feasibility rules compare.
struct Score {
    double fitness = 0.0;
    double violation = 0.0;

    static Score of(const Evaluation& e) { return {e.fitness, e.violation()}; }
    bool feasible() const { return violation == 0.0; }
};

/// Feasibility rules: a feasible score beats an infeasible one, two feasible
/// scores compare by fitness and two infeasible ones by total violation.
/// Strict, so ties keep the incumbent.
bool better(const Score& candidate, const Score& incumbent);

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> best_position;
    Evaluation current;
    Evaluation best;
};

struct Swarm {
    std::vector<Particle> particles;
    std::vector<double> global_best_position;
    Evaluation global_best;
};

/// Random coefficients of one particle's velocity update.
struct Coefficients {
    std::vector<double> cognitive;
    std::vector<double> social;
};

/// Uniform [0, 1) draws keyed on (seed, generation, particle) so that results
/// never depend on evaluation order or thread count.
Coefficients draw_coefficients(std::uint64_t seed, std::size_t generation, std::size_t particle,
                               std::size_t dimension);

/// Linear inertia schedule from inertia_start at k = 0 to inertia_end at k = max_generations.
double inertia_at(const PsoConfig& config, std::size_t generation);

/// Velocity and position update of a single particle:
///   v <- w v + c1 b1 (P - x) + c2 b2 (G - x), clamped per dimension,
///   x <- x + v, clamped to the box with the velocity zeroed on clamped dimensions.
void update_particle(Particle& particle, std::span<const double> global_best, double inertia,
                     const PsoConfig& config, const Coefficients& coefficients);

/// Evaluates every position. The serial loop is the reference the OpenMP kernel
/// is tested against; both wrap objective exceptions in EvaluatorFailure and
/// report the lowest failing index.
std::vector<Evaluation> evaluate_serial(std::span<const std::vector<double>> positions,
                                        const Objective& objective);
std::vector<Evaluation> evaluate_parallel(std::span<const std::vector<double>> positions,
                                          const Objective& objective);
std::vector<Evaluation> evaluate(std::span<const std::vector<double>> positions,
                                 const Objective& objective, Execution execution);

/// Uniform random positions inside the bounds, zero velocities, evaluated.
Swarm initialize_swarm(const PsoConfig& config, const Objective& objective);

/// One generation: update every particle with inertia w^k, re-evaluate, then
/// refresh personal and global bests in particle order.
void pso_step(Swarm& swarm, const PsoConfig& config, std::size_t generation,
              const Objective& objective);

struct HistoryEntry {
    std::size_t generation = 0;  // 1-based
    double fitness = 0.0;        // global best after this generation
    double violation = 0.0;
    bool feasible() const { return violation == 0.0; }
};

struct OptimizationResult {
    std::vector<double> best_position;
    Evaluation best;
    std::vector<HistoryEntry> history;
    std::size_t generations_run = 0;
    std::uint64_t seed = 0;

    bool found_feasible() const { return best.feasible(); }
};

OptimizationResult optimize(const PsoConfig& config, const Objective& objective);

}  // namespace exo
