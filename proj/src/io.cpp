#include "exo/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "exo/error.hpp"

namespace exo {

using nlohmann::json;

namespace {

/// Reads fields out of a JSON object and rejects anything left unread.
class StrictObject {
public:
    StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    std::string field(const char* key) const {
        return path_.empty() ? std::string(key) : path_ + "." + key;
    }

    const json* child(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const char* key, double& out) {
        if (const json* v = child(key)) {
            if (!v->is_number()) throw ConfigError(field(key), "expected a number");
            out = v->get<double>();
        }
    }

    template <class Unsigned>
    void count(const char* key, Unsigned& out) {
        if (const json* v = child(key)) {
            if (!v->is_number_unsigned())
                throw ConfigError(field(key), "expected a non-negative integer");
            out = v->get<Unsigned>();
        }
    }

    void string(const char* key, std::string& out) {
        if (const json* v = child(key)) {
            if (!v->is_string()) throw ConfigError(field(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void require(const char* key) const {
        if (!j_.contains(key)) throw ConfigError(field(key), "missing required field");
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(field(it.key().c_str()), "unknown field");
    }

    const std::string& path() const { return path_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

PlantParams parse_plant(const json& j) {
    StrictObject o(j, "plant");
    PlantParams p;
    o.number("inertia", p.inertia);
    o.number("gravity_torque", p.gravity_torque);
    o.number("solid_friction", p.solid_friction);
    o.number("viscous_friction", p.viscous_friction);
    o.number("human_torque_bound", p.human_torque_bound);
    o.finish();
    return p;
}

ReferenceSpec parse_reference(const json& j) {
    StrictObject o(j, "reference");
    ReferenceSpec r;
    std::string kind(to_string(r.kind));
    o.string("kind", kind);
    if (kind == "step")
        r.kind = ReferenceKind::step;
    else if (kind == "constant")
        r.kind = ReferenceKind::constant;
    else
        throw ConfigError("reference.kind", "expected \"step\" or \"constant\"");
    o.number("theta_start", r.theta_start);
    o.number("theta_target", r.theta_target);
    o.number("step_time", r.step_time);
    o.finish();
    return r;
}

// Initial theta is resolved by the caller when absent.
SimConfig parse_sim(const json& j, bool& has_initial_theta) {
    StrictObject o(j, "sim");
    SimConfig s;
    o.number("dt", s.dt);
    o.number("t_final", s.t_final);
    o.number("torque_limit", s.torque_limit);
    o.number("sign_deadband", s.sign_deadband);
    if (const json* init = o.child("initial_state")) {
        StrictObject io(*init, "sim.initial_state");
        has_initial_theta = io.has("theta");
        io.number("theta", s.initial_state.joint.theta);
        io.number("theta_dot", s.initial_state.joint.theta_dot);
        io.number("I_hat", s.initial_state.estimates.inertia);
        io.number("C_s_hat", s.initial_state.estimates.solid_friction);
        io.number("C_v_hat", s.initial_state.estimates.viscous_friction);
        io.number("Gamma_g_hat", s.initial_state.estimates.gravity_torque);
        io.finish();
    }
    o.finish();
    return s;
}

PsoConfig parse_pso(const json& j) {
    StrictObject o(j, "pso");
    PsoConfig p;
    o.count("swarm_size", p.swarm_size);
    o.count("max_generations", p.max_generations);
    o.number("cognitive", p.cognitive);
    o.number("social", p.social);
    o.number("inertia_start", p.inertia_start);
    o.number("inertia_end", p.inertia_end);
    o.number("velocity_clamp", p.velocity_clamp);
    o.count("seed", p.seed);
    std::string execution = "parallel";
    o.string("execution", execution);
    if (execution == "parallel")
        p.execution = Execution::parallel;
    else if (execution == "serial")
        p.execution = Execution::serial;
    else
        throw ConfigError("pso.execution", "expected \"parallel\" or \"serial\"");
    if (const json* b = o.child("bounds")) {
        StrictObject bo(*b, "pso.bounds");
        for (Dimension& d : p.bounds) {
            if (const json* entry = bo.child(d.name.c_str())) {
                StrictObject eo(*entry, "pso.bounds." + d.name);
                eo.require("min");
                eo.require("max");
                eo.number("min", d.min);
                eo.number("max", d.max);
                eo.finish();
            }
        }
        bo.finish();
    }
    o.finish();
    return p;
}

ControllerGains parse_gains(const json& j) {
    StrictObject o(j, "gains");
    ControllerGains g;
    double* fields[] = {&g.kappa, &g.gamma, &g.eta1, &g.eta2, &g.eta3, &g.eta4};
    for (std::size_t i = 0; i < ControllerGains::size; ++i) {
        o.require(ControllerGains::names[i]);
        o.number(ControllerGains::names[i], *fields[i]);
    }
    o.finish();
    return g;
}

std::string_view to_string(Execution e) { return e == Execution::parallel ? "parallel" : "serial"; }

json to_json(const ConstraintParams& c) {
    return {{"overshoot", c.overshoot},         {"rise_band", c.rise_band},
            {"start_band", c.start_band},       {"static_error", c.static_error},
            {"response_time", c.response_time}, {"rise_time", c.rise_time},
            {"final_time", c.final_time}};
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

double parse_double(std::string_view cell, std::size_t line, std::size_t column) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw ParseError(line, "column " + std::to_string(column + 1) + ": invalid number '" +
                                   std::string(cell) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        cells.push_back(line.substr(begin, comma - begin));
        if (comma == std::string_view::npos) break;
        begin = comma + 1;
    }
    return cells;
}

}  // namespace

void RunConfig::validate() const {
    plant.validate();
    sim.validate();
    reference.validate();
    constraints.validate();
    pso.validate();
    if (gains) gains->validate();
}

ConstraintParams parse_constraint_params(const json& j, const std::string& path) {
    StrictObject o(j, path);
    ConstraintParams c;
    o.number("overshoot", c.overshoot);
    o.number("rise_band", c.rise_band);
    o.number("start_band", c.start_band);
    o.number("static_error", c.static_error);
    o.number("response_time", c.response_time);
    o.number("rise_time", c.rise_time);
    o.number("final_time", c.final_time);
    o.finish();
    return c;
}

RunConfig parse_run_config(const json& j) {
    StrictObject o(j, "");
    RunConfig config;
    bool has_initial_theta = false;
    if (const json* v = o.child("plant")) config.plant = parse_plant(*v);
    if (const json* v = o.child("reference")) config.reference = parse_reference(*v);
    if (const json* v = o.child("sim")) config.sim = parse_sim(*v, has_initial_theta);
    if (!has_initial_theta) config.sim.initial_state.joint.theta = config.reference.theta_start;

    config.constraints.final_time = config.sim.t_final;
    if (const json* v = o.child("constraints")) {
        const bool has_final = v->is_object() && v->contains("final_time");
        config.constraints = parse_constraint_params(*v, "constraints");
        if (!has_final) config.constraints.final_time = config.sim.t_final;
    }
    if (const json* v = o.child("pso")) config.pso = parse_pso(*v);
    if (const json* v = o.child("gains")) config.gains = parse_gains(*v);
    o.finish();
    config.validate();
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_json_file(path));
}

json to_json(const ControllerGains& gains) {
    json j = json::object();
    const auto values = gains.to_array();
    for (std::size_t i = 0; i < ControllerGains::size; ++i) j[ControllerGains::names[i]] = values[i];
    return j;
}

json to_json(const RunConfig& c) {
    json bounds = json::object();
    for (const Dimension& d : c.pso.bounds) bounds[d.name] = {{"min", d.min}, {"max", d.max}};

    const auto& init = c.sim.initial_state;
    json j = {
        {"plant",
         {{"inertia", c.plant.inertia},
          {"gravity_torque", c.plant.gravity_torque},
          {"solid_friction", c.plant.solid_friction},
          {"viscous_friction", c.plant.viscous_friction},
          {"human_torque_bound", c.plant.human_torque_bound}}},
        {"sim",
         {{"dt", c.sim.dt},
          {"t_final", c.sim.t_final},
          {"torque_limit", c.sim.torque_limit},
          {"sign_deadband", c.sim.sign_deadband},
          {"initial_state",
           {{"theta", init.joint.theta},
            {"theta_dot", init.joint.theta_dot},
            {"I_hat", init.estimates.inertia},
            {"C_s_hat", init.estimates.solid_friction},
            {"C_v_hat", init.estimates.viscous_friction},
            {"Gamma_g_hat", init.estimates.gravity_torque}}}}},
        {"reference",
         {{"kind", std::string(to_string(c.reference.kind))},
          {"theta_start", c.reference.theta_start},
          {"theta_target", c.reference.theta_target},
          {"step_time", c.reference.step_time}}},
        {"constraints", to_json(c.constraints)},
        {"pso",
         {{"swarm_size", c.pso.swarm_size},
          {"max_generations", c.pso.max_generations},
          {"cognitive", c.pso.cognitive},
          {"social", c.pso.social},
          {"inertia_start", c.pso.inertia_start},
          {"inertia_end", c.pso.inertia_end},
          {"velocity_clamp", c.pso.velocity_clamp},
          {"seed", c.pso.seed},
          {"execution", std::string(to_string(c.pso.execution))},
          {"bounds", bounds}}},
    };
    if (c.gains) j["gains"] = to_json(*c.gains);
    return j;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
    out << kTrajectoryHeader << '\n';
    for (const LogRow& r : log.rows) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", format_double(r.t),
                           format_double(r.theta), format_double(r.theta_dot),
                           format_double(r.theta_d), format_double(r.theta_d_dot),
                           format_double(r.torque), format_double(r.s),
                           format_double(r.lyapunov), format_double(r.estimates.inertia),
                           format_double(r.estimates.solid_friction),
                           format_double(r.estimates.viscous_friction),
                           format_double(r.estimates.gravity_torque), r.violations);
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryLog& log) {
    std::ostringstream buffer;
    write_trajectory_csv(buffer, log);
    write_text_file(path, buffer.str());
}

TrajectoryLog read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajectoryHeader) throw ParseError(1, "unexpected header '" + line + "'");

    TrajectoryLog log;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != 13)
            throw ParseError(line_no, "expected 13 columns, got " + std::to_string(cells.size()));
        double v[12];
        for (std::size_t c = 0; c < 12; ++c) v[c] = parse_double(cells[c], line_no, c);

        std::uint32_t flags = 0;
        const auto [ptr, ec] =
            std::from_chars(cells[12].data(), cells[12].data() + cells[12].size(), flags);
        if (ec != std::errc() || ptr != cells[12].data() + cells[12].size())
            throw ParseError(line_no, "column 13: invalid violation flags");

        LogRow r;
        r.t = v[0];
        r.theta = v[1];
        r.theta_dot = v[2];
        r.theta_d = v[3];
        r.theta_d_dot = v[4];
        r.torque = v[5];
        r.s = v[6];
        r.lyapunov = v[7];
        r.estimates = {v[8], v[9], v[10], v[11]};
        r.violations = flags;
        if (!log.rows.empty() && !(r.t > log.rows.back().t))
            throw ParseError(line_no, "time column must be strictly increasing");
        log.rows.push_back(r);
    }
    return log;
}

TrajectoryLog read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_trajectory_csv(in);
}

json make_report(const OptimizationResult& result, const RunConfig& config) {
    json history = json::array();
    for (const HistoryEntry& h : result.history)
        history.push_back({{"generation", h.generation},
                           {"fitness", h.fitness},
                           {"violation", h.violation},
                           {"feasible", h.feasible()}});

    const ControllerGains best = ControllerGains::from_span(result.best_position);
    return {
        {"status", result.found_feasible() ? "feasible" : "no_feasible_found"},
        {"seed", result.seed},
        {"generations_run", result.generations_run},
        {"best",
         {{"gains", to_json(best)},
          {"fitness", result.best.fitness},
          {"constraints", result.best.constraints},
          {"violation", result.best.violation()},
          {"feasible", result.found_feasible()}}},
        {"history", history},
        {"config", to_json(config)},
    };
}

json make_evaluation_json(const StepEvaluation& evaluation) {
    return {{"fitness", evaluation.fitness},
            {"constraints", evaluation.constraints.c},
            {"feasible", evaluation.feasible()}};
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(0, path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace exo
