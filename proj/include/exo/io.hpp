#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "exo/controller.hpp"
#include "exo/evaluation.hpp"
#include "exo/plant.hpp"
#include "exo/pso.hpp"
#include "exo/simulation.hpp"
#include "exo/tuning.hpp"

namespace exo {

/// Everything one run needs. Every section and field is optional in the JSON
/// file and falls back to the built-in defaults; unknown keys are rejected.
struct RunConfig {
    PlantParams plant;
    SimConfig sim;
    ReferenceSpec reference;
    ConstraintParams constraints;
    PsoConfig pso;
    std::optional<ControllerGains> gains;

    void validate() const;
    StepResponseProblem problem() const { return {plant, reference, sim, constraints}; }
};

/// Strict parse. Throws ConfigError naming the offending field path.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const ControllerGains& gains);
ConstraintParams parse_constraint_params(const nlohmann::json& j, const std::string& path);

/// CSV column contract of a trajectory, in order.
inline constexpr const char* kTrajectoryHeader =
    "t,theta,theta_dot,theta_d,theta_d_dot,torque,s,V,I_hat,C_s_hat,C_v_hat,Gamma_g_hat,violations";

/// Writes every double with 17 significant digits so that reading it back is exact.
void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);
void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryLog& log);

/// Throws ParseError with the 1-based line number of the first bad line.
TrajectoryLog read_trajectory_csv(std::istream& in);
TrajectoryLog read_trajectory_csv(const std::filesystem::path& path);

/// Tuning report: best gains, fitness, constraint vector, per-generation
/// history, seed and the resolved configuration. Contains no timestamps.
nlohmann::json make_report(const OptimizationResult& result, const RunConfig& config);

/// {fitness, constraints: [c1..c5], feasible}
nlohmann::json make_evaluation_json(const StepEvaluation& evaluation);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace exo
