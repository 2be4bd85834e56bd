// exotune: tune, simulate and audit the adaptive knee-joint controller.
//
//   exotune tune     --config <path> --out <report.json> [--seed <u64>]
//   exotune simulate --config <path> --out <trajectory.csv>
//   exotune evaluate --traj <trajectory.csv> --constraints <path>
//
// Exit codes: 0 success, 1 config/parse error, 2 no feasible solution,
// 3 simulation divergence.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "exo/error.hpp"
#include "exo/io.hpp"
#include "exo/pso.hpp"
#include "exo/simulation.hpp"
#include "exo/tuning.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int { kOk = 0, kError = 1, kInfeasible = 2, kDiverged = 3 };

fs::path trajectory_path_for(const fs::path& report) {
    fs::path p = report;
    p.replace_extension(".trajectory.csv");
    return p;
}

int run_tune(const fs::path& config_path, const fs::path& out, std::optional<std::uint64_t> seed) {
    exo::RunConfig config = exo::load_run_config(config_path);
    if (seed) config.pso.seed = *seed;

    const exo::StepResponseProblem problem = config.problem();
    problem.validate();

    const exo::OptimizationResult result = exo::optimize(config.pso, problem);
    exo::write_text_file(out, exo::make_report(result, config).dump(2) + "\n");

    const auto best = exo::ControllerGains::from_span(result.best_position);
    try {
        const exo::TrajectoryLog log = exo::simulate(config.plant, best, config.reference, config.sim);
        exo::write_trajectory_csv(trajectory_path_for(out), log);
    } catch (const exo::NonFiniteState& e) {
        std::cerr << "best gains diverge, no trajectory written: " << e.what() << '\n';
    }

    if (!result.found_feasible()) {
        std::cerr << "no feasible gains found; best total violation " << result.best.violation()
                  << '\n';
        return kInfeasible;
    }
    return kOk;
}

int run_simulate(const fs::path& config_path, const fs::path& out) {
    const exo::RunConfig config = exo::load_run_config(config_path);
    if (!config.gains) throw exo::ConfigError("gains", "missing required field");
    const exo::TrajectoryLog log =
        exo::simulate(config.plant, *config.gains, config.reference, config.sim);
    exo::write_trajectory_csv(out, log);
    return kOk;
}

bool looks_like_run_config(const nlohmann::json& j) {
    for (const char* key : {"plant", "sim", "reference", "constraints", "pso", "gains"})
        if (j.contains(key)) return true;
    return false;
}

int run_evaluate(const fs::path& traj, const fs::path& constraints_path) {
    const exo::TrajectoryLog log = exo::read_trajectory_csv(traj);
    if (log.empty()) throw exo::EmptyLog();

    const nlohmann::json j = exo::read_json_file(constraints_path);
    exo::ConstraintParams params;
    exo::ReferenceSpec reference;
    if (j.is_object() && looks_like_run_config(j)) {
        const exo::RunConfig config = exo::parse_run_config(j);
        params = config.constraints;
        reference = config.reference;
    } else {
        params = exo::parse_constraint_params(j, "constraints");
        params.validate();
        // Bare constraint file: the step runs from the first sample to the final target.
        reference.theta_start = log.rows.front().theta;
        reference.theta_target = log.rows.back().theta_d;
    }

    const exo::StepEvaluation evaluation = exo::evaluate_log(log, params, reference);
    std::cout << exo::make_evaluation_json(evaluation).dump(2) << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive knee-joint controller tuning with constrained PSO"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    auto* tune = app.add_subcommand("tune", "Search the gain box for the best feasible gains");
    tune->add_option("--config", config_path, "Run configuration (JSON)")->required();
    tune->add_option("--out", out_path, "Report path (JSON)")->required();
    tune->add_option("--seed", seed, "Override pso.seed");

    auto* sim = app.add_subcommand("simulate", "Simulate the closed loop with explicit gains");
    sim->add_option("--config", config_path, "Run configuration with a gains block")->required();
    sim->add_option("--out", out_path, "Trajectory path (CSV)")->required();

    std::string traj_path;
    std::string constraints_path;
    auto* eval = app.add_subcommand("evaluate", "Fitness and constraints of a trajectory CSV");
    eval->add_option("--traj", traj_path, "Trajectory (CSV)")->required();
    eval->add_option("--constraints", constraints_path,
                     "Constraint parameters or a full run configuration (JSON)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kError;
    }

    try {
        if (*tune) return run_tune(config_path, out_path, seed);
        if (*sim) return run_simulate(config_path, out_path);
        if (*eval) return run_evaluate(traj_path, constraints_path);
    } catch (const exo::NonFiniteState& e) {
        std::cerr << "error: simulation diverged: " << e.what()
                  << " (last good t = " << e.last_good_time() << " s)\n";
        return kDiverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
