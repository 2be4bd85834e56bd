#include <atomic>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "doctest.h"

#include "exo/error.hpp"
#include "exo/pso.hpp"

using namespace exo;

namespace {

PsoConfig sphere_config(std::uint64_t seed) {
    PsoConfig c;
    c.swarm_size = 30;
    c.max_generations = 100;
    c.seed = seed;
    c.bounds.clear();
    for (int d = 0; d < 6; ++d) c.bounds.push_back({"x" + std::to_string(d), -5.0, 5.0});
    return c;
}

Evaluation sphere(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return {s, {}};
}

Particle one_d(double x, double v, double p) {
    Particle particle;
    particle.position = {x};
    particle.velocity = {v};
    particle.best_position = {p};
    return particle;
}

PsoConfig one_d_config() {
    PsoConfig c;
    c.bounds = {{"x", -100.0, 100.0}};
    c.velocity_clamp = 1.0;
    return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("inertia schedule") {
    PsoConfig c;
    c.max_generations = 30;
    CHECK(inertia_at(c, 0) == 0.9);
    CHECK(inertia_at(c, 30) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(inertia_at(c, 15) == doctest::Approx(0.65).epsilon(1e-15));
}

TEST_CASE("particle update examples") {
    SUBCASE("no attraction keeps the velocity") {
        PsoConfig c = one_d_config();
        c.cognitive = c.social = 0.0;
        Particle p = one_d(1.0, 0.5, 3.0);
        const std::vector<double> g{7.0};
        update_particle(p, g, 1.0, c, {{0.3}, {0.8}});
        CHECK(p.velocity[0] == 0.5);
        CHECK(p.position[0] == 1.5);
    }
    SUBCASE("fixed point") {
        PsoConfig c = one_d_config();
        Particle p = one_d(2.0, 0.0, 2.0);
        const std::vector<double> g{2.0};
        for (double w : {0.0, 0.7, 1.3}) {
            update_particle(p, g, w, c, {{0.9}, {0.1}});
            CHECK(p.position[0] == 2.0);
            CHECK(p.velocity[0] == 0.0);
        }
    }
    SUBCASE("deterministic coefficients") {
        PsoConfig c = one_d_config();
        c.cognitive = c.social = 1.0;
        Particle p = one_d(0.0, 0.0, 1.0);
        const std::vector<double> g{2.0};
        update_particle(p, g, 0.0, c, {{1.0}, {1.0}});
        CHECK(p.velocity[0] == 3.0);
        CHECK(p.position[0] == 3.0);
    }
    SUBCASE("box clamp zeroes the velocity") {
        PsoConfig c;
        c.bounds = {{"x", 0.0, 1.0}};
        c.velocity_clamp = 0.5;
        Particle p = one_d(0.9, 0.4, 0.9);
        const std::vector<double> g{0.9};
        update_particle(p, g, 1.0, c, {{0.0}, {0.0}});
        CHECK(p.position[0] == 1.0);
        CHECK(p.velocity[0] == 0.0);
    }
    SUBCASE("velocity clamp") {
        PsoConfig c;
        c.bounds = {{"x", 0.0, 10.0}};
        c.velocity_clamp = 0.1;
        Particle p = one_d(5.0, 3.0, 5.0);
        const std::vector<double> g{5.0};
        update_particle(p, g, 1.0, c, {{0.0}, {0.0}});
        CHECK(p.velocity[0] == 1.0);
        CHECK(p.position[0] == 6.0);
    }
}

TEST_CASE("feasibility rules") {
    const Score feasible_bad{100.0, 0.0};
    const Score feasible_good{1.0, 0.0};
    const Score infeasible_small{0.001, 0.1};
    const Score infeasible_large{0.0, 2.0};

    CHECK(better(feasible_bad, infeasible_small));
    CHECK_FALSE(better(infeasible_small, feasible_bad));
    CHECK(better(feasible_good, feasible_bad));
    CHECK_FALSE(better(feasible_bad, feasible_good));
    CHECK(better(infeasible_small, infeasible_large));
    CHECK_FALSE(better(infeasible_large, infeasible_small));
    CHECK_FALSE(better(feasible_good, feasible_good));  // ties keep the incumbent

    CHECK(Evaluation{1.0, {-1.0, 0.0}}.feasible());
    CHECK(Evaluation{1.0, {0.5, 0.25, -3.0}}.violation() == 0.75);
    CHECK(std::isinf(Evaluation{1.0, {NAN}}.violation()));
}

TEST_CASE("keyed random draws") {
    const auto a = draw_coefficients(42, 3, 7, 6);
    const auto b = draw_coefficients(42, 3, 7, 6);
    const auto c = draw_coefficients(42, 3, 8, 6);
    const auto d = draw_coefficients(43, 3, 7, 6);
    REQUIRE(a.cognitive.size() == 6);
    CHECK(a.cognitive == b.cognitive);
    CHECK(a.social == b.social);
    CHECK(a.cognitive != c.cognitive);
    CHECK(a.cognitive != d.cognitive);
    for (double v : a.cognitive) CHECK((v >= 0.0 && v < 1.0));
}

TEST_CASE("sphere optimum") {
    const auto result = optimize(sphere_config(1), sphere);
    CHECK(result.best.fitness <= 1e-3);
    CHECK(result.history.size() == result.generations_run);
    CHECK(result.generations_run == 100);
}

TEST_CASE("positions stay inside the box") {
    PsoConfig c = sphere_config(5);
    c.max_generations = 40;
    // Optimum outside the box drives particles into the walls.
    std::atomic<bool> outside{false};
    auto shifted = [&](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) {
            if (v < -5.0 || v > 5.0) outside = true;
            s += (v - 9.0) * (v - 9.0);
        }
        return Evaluation{s, {}};
    };
    const auto result = optimize(c, shifted);
    CHECK_FALSE(outside.load());
    for (double v : result.best_position) CHECK(v == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("seed determinism across execution modes") {
    auto constrained = [](std::span<const double> x) {
        return Evaluation{sphere(x).fitness, {1.0 - x[0], x[1] - 2.0}};
    };
    PsoConfig c = sphere_config(77);
    c.max_generations = 25;
    c.execution = Execution::serial;
    const auto serial = optimize(c, constrained);
    c.execution = Execution::parallel;
    const auto parallel = optimize(c, constrained);
    const auto again = optimize(c, constrained);

    REQUIRE(serial.best_position.size() == parallel.best_position.size());
    for (std::size_t d = 0; d < serial.best_position.size(); ++d) {
        CHECK(same_bits(serial.best_position[d], parallel.best_position[d]));
        CHECK(same_bits(again.best_position[d], parallel.best_position[d]));
    }
    REQUIRE(serial.history.size() == parallel.history.size());
    for (std::size_t k = 0; k < serial.history.size(); ++k)
        CHECK(same_bits(serial.history[k].fitness, parallel.history[k].fitness));

    PsoConfig tiny = sphere_config(3);
    tiny.swarm_size = 2;
    tiny.max_generations = 1;
    const auto t1 = optimize(tiny, sphere);
    const auto t2 = optimize(tiny, sphere);
    CHECK(t1.best_position == t2.best_position);
    CHECK(same_bits(t1.best.fitness, t2.best.fitness));
}

TEST_CASE("feasible incumbent never gets worse") {
    auto constrained = [](std::span<const double> x) {
        // feasible region: x0 >= 1 and x1 <= -2
        return Evaluation{sphere(x).fitness, {1.0 - x[0], x[1] + 2.0}};
    };
    const auto result = optimize(sphere_config(9), constrained);
    CHECK(result.found_feasible());
    for (std::size_t k = 1; k < result.history.size(); ++k) {
        if (result.history[k - 1].feasible()) {
            CHECK(result.history[k].feasible());
            CHECK(result.history[k].fitness <= result.history[k - 1].fitness);
        }
    }
    CHECK(result.best.fitness == doctest::Approx(5.0).epsilon(0.01));
}

TEST_CASE("serial and OpenMP evaluation kernels agree") {
    std::vector<std::vector<double>> positions;
    for (int i = 0; i < 50; ++i) positions.push_back({0.1 * i, -0.2 * i, std::sin(i)});
    const auto a = evaluate_serial(positions, sphere);
    const auto b = evaluate_parallel(positions, sphere);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_bits(a[i].fitness, b[i].fitness));

    auto failing = [](std::span<const double> x) -> Evaluation {
        if (x[0] > 1.45) throw std::runtime_error("boom");
        return sphere(x);
    };
    for (auto exec : {Execution::serial, Execution::parallel}) {
        try {
            evaluate(positions, failing, exec);
            FAIL("expected EvaluatorFailure");
        } catch (const EvaluatorFailure& e) {
            CHECK(e.particle() == 15);
        }
    }
}

TEST_CASE("configuration validation") {
    PsoConfig c;
    CHECK_NOTHROW(c.validate());
    c.bounds[0].min = 12.0;
    try {
        c.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "pso.bounds.kappa");
    }
    c = {};
    c.swarm_size = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.max_generations = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.social = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}
