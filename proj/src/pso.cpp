#include "exo/pso.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

#include "exo/error.hpp"

namespace exo {

namespace {

// Stream tags separating initialization draws from update draws.
constexpr std::uint64_t kInitStream = 0x1;
constexpr std::uint64_t kUpdateStream = 0x2;

std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t generation,
                             std::uint64_t particle) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed),       hi(seed),       lo(stream),   hi(stream),
                      lo(generation), hi(generation), lo(particle), hi(particle)};
    return std::mt19937_64(seq);
}

std::string bound_field(const Dimension& d, std::size_t i) {
    return "pso.bounds." + (d.name.empty() ? std::to_string(i) : d.name);
}

std::vector<std::vector<double>> positions_of(const Swarm& swarm) {
    std::vector<std::vector<double>> out;
    out.reserve(swarm.particles.size());
    for (const Particle& p : swarm.particles) out.push_back(p.position);
    return out;
}

void refresh_bests(Swarm& swarm) {
    for (Particle& p : swarm.particles) {
        if (better(Score::of(p.current), Score::of(p.best))) {
            p.best = p.current;
            p.best_position = p.position;
        }
        if (better(Score::of(p.best), Score::of(swarm.global_best))) {
            swarm.global_best = p.best;
            swarm.global_best_position = p.best_position;
        }
    }
}

}  // namespace

std::vector<Dimension> gain_bounds() {
    return {{"kappa", 1.0, 10.0}, {"gamma", 1.0, 5.0},  {"eta1", 1.0, 15.0},
            {"eta2", 1.0, 15.0},  {"eta3", 1.0, 15.0}, {"eta4", 1.0, 15.0}};
}

void PsoConfig::validate() const {
    if (swarm_size < 2) throw ConfigError("pso.swarm_size", "must be >= 2");
    if (max_generations < 1) throw ConfigError("pso.max_generations", "must be >= 1");
    if (!std::isfinite(cognitive) || cognitive < 0.0)
        throw ConfigError("pso.cognitive", "must be finite and >= 0");
    if (!std::isfinite(social) || social < 0.0)
        throw ConfigError("pso.social", "must be finite and >= 0");
    if (!std::isfinite(inertia_start)) throw ConfigError("pso.inertia_start", "must be finite");
    if (!std::isfinite(inertia_end)) throw ConfigError("pso.inertia_end", "must be finite");
    if (!std::isfinite(velocity_clamp) || velocity_clamp <= 0.0)
        throw ConfigError("pso.velocity_clamp", "must be finite and > 0");
    if (bounds.empty()) throw ConfigError("pso.bounds", "must not be empty");
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const Dimension& d = bounds[i];
        if (!std::isfinite(d.min) || !std::isfinite(d.max))
            throw ConfigError(bound_field(d, i), "bounds must be finite");
        if (!(d.min < d.max)) throw ConfigError(bound_field(d, i), "min must be < max");
    }
}

double Evaluation::violation() const {
    double sum = 0.0;
    for (double c : constraints) {
        if (std::isnan(c)) return std::numeric_limits<double>::infinity();
        sum += std::max(c, 0.0);
    }
    return sum;
}

bool better(const Score& candidate, const Score& incumbent) {
    const bool cf = candidate.feasible();
    const bool inf = incumbent.feasible();
    if (cf && inf) return candidate.fitness < incumbent.fitness;
    if (cf != inf) return cf;
    return candidate.violation < incumbent.violation;
}

Coefficients draw_coefficients(std::uint64_t seed, std::size_t generation, std::size_t particle,
                               std::size_t dimension) {
    auto engine = keyed_engine(seed, kUpdateStream, generation, particle);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Coefficients c;
    c.cognitive.resize(dimension);
    c.social.resize(dimension);
    for (std::size_t d = 0; d < dimension; ++d) {
        c.cognitive[d] = unit(engine);
        c.social[d] = unit(engine);
    }
    return c;
}

double inertia_at(const PsoConfig& config, std::size_t generation) {
    const double frac =
        static_cast<double>(generation) / static_cast<double>(config.max_generations);
    return config.inertia_start + (config.inertia_end - config.inertia_start) * frac;
}

void update_particle(Particle& particle, std::span<const double> global_best, double inertia,
                     const PsoConfig& config, const Coefficients& coefficients) {
    auto& x = particle.position;
    auto& v = particle.velocity;
    const auto& p = particle.best_position;
    for (std::size_t d = 0; d < x.size(); ++d) {
        const Dimension& box = config.bounds[d];
        const double vmax = config.velocity_clamp * box.range();
        v[d] = inertia * v[d] + config.cognitive * coefficients.cognitive[d] * (p[d] - x[d]) +
               config.social * coefficients.social[d] * (global_best[d] - x[d]);
        v[d] = std::clamp(v[d], -vmax, vmax);
        x[d] += v[d];
        if (x[d] < box.min || x[d] > box.max) {
            x[d] = std::clamp(x[d], box.min, box.max);
            v[d] = 0.0;
        }
    }
}

std::vector<Evaluation> evaluate_serial(std::span<const std::vector<double>> positions,
                                        const Objective& objective) {
    std::vector<Evaluation> out(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        try {
            out[i] = objective(positions[i]);
        } catch (const std::exception& e) {
            throw EvaluatorFailure(i, e.what());
        }
    }
    return out;
}

std::vector<Evaluation> evaluate_parallel(std::span<const std::vector<double>> positions,
                                          const Objective& objective) {
    const auto n = static_cast<std::ptrdiff_t>(positions.size());
    std::vector<Evaluation> out(positions.size());
    std::vector<std::string> errors(positions.size());
    std::vector<char> failed(positions.size(), 0);

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = objective(positions[i]);
        } catch (const std::exception& e) {
            errors[i] = e.what();
            failed[i] = 1;
        } catch (...) {
            errors[i] = "unknown exception";
            failed[i] = 1;
        }
    }

    for (std::size_t i = 0; i < failed.size(); ++i)
        if (failed[i]) throw EvaluatorFailure(i, errors[i]);
    return out;
}

std::vector<Evaluation> evaluate(std::span<const std::vector<double>> positions,
                                 const Objective& objective, Execution execution) {
    return execution == Execution::parallel ? evaluate_parallel(positions, objective)
                                            : evaluate_serial(positions, objective);
}

Swarm initialize_swarm(const PsoConfig& config, const Objective& objective) {
    config.validate();
    const std::size_t dim = config.dimension();
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Swarm swarm;
    swarm.particles.resize(config.swarm_size);
    for (std::size_t i = 0; i < config.swarm_size; ++i) {
        auto engine = keyed_engine(config.seed, kInitStream, 0, i);
        Particle& p = swarm.particles[i];
        p.position.resize(dim);
        for (std::size_t d = 0; d < dim; ++d)
            p.position[d] = config.bounds[d].min + unit(engine) * config.bounds[d].range();
        p.velocity.assign(dim, 0.0);
    }

    const auto evals = evaluate(positions_of(swarm), objective, config.execution);
    for (std::size_t i = 0; i < config.swarm_size; ++i) {
        Particle& p = swarm.particles[i];
        p.current = evals[i];
        p.best = evals[i];
        p.best_position = p.position;
    }
    swarm.global_best = swarm.particles.front().best;
    swarm.global_best_position = swarm.particles.front().best_position;
    refresh_bests(swarm);
    return swarm;
}

void pso_step(Swarm& swarm, const PsoConfig& config, std::size_t generation,
              const Objective& objective) {
    const double w = inertia_at(config, generation);
    const std::size_t dim = config.dimension();
    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
        const Coefficients c = draw_coefficients(config.seed, generation, i, dim);
        update_particle(swarm.particles[i], swarm.global_best_position, w, config, c);
    }

    const auto evals = evaluate(positions_of(swarm), objective, config.execution);
    for (std::size_t i = 0; i < swarm.particles.size(); ++i) swarm.particles[i].current = evals[i];
    refresh_bests(swarm);
}

OptimizationResult optimize(const PsoConfig& config, const Objective& objective) {
    Swarm swarm = initialize_swarm(config, objective);

    OptimizationResult result;
    result.seed = config.seed;
    result.history.reserve(config.max_generations);
    for (std::size_t k = 0; k < config.max_generations; ++k) {
        pso_step(swarm, config, k, objective);
        result.history.push_back({k + 1, swarm.global_best.fitness, swarm.global_best.violation()});
    }
    result.generations_run = config.max_generations;
    result.best_position = swarm.global_best_position;
    result.best = swarm.global_best;
    return result;
}

}  // namespace exo
