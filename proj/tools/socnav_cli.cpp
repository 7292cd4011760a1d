#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "socnav/behaviors.hpp"
#include "socnav/bridge.hpp"
#include "socnav/bt_xml.hpp"
#include "socnav/evaluator.hpp"
#include "socnav/harness.hpp"
#include "socnav/parse_util.hpp"
#include "socnav/scenario.hpp"

namespace {

using namespace socnav;

io::RobotPolicySpec parse_policy_flag(const std::string& text) {
    io::RobotPolicySpec spec;
    const auto parts = split(text, ':');
    const std::string& kind = parts[0];
    if (kind == "static") {
        spec.kind = io::RobotPolicySpec::Kind::Static;
    } else if (kind == "straight") {
        if (parts.size() != 2) throw std::invalid_argument("expected straight:vx,vy");
        spec.kind = io::RobotPolicySpec::Kind::Straight;
        spec.velocity = parse_point(parts[1], "--robot-policy velocity");
    } else if (kind == "waypoints") {
        if (parts.size() < 2 || parts.size() > 3)
            throw std::invalid_argument("expected waypoints:x,y;x,y[:speed]");
        spec.kind = io::RobotPolicySpec::Kind::Waypoints;
        for (const auto& p : split(parts[1], ';'))
            spec.waypoints.push_back(parse_point(p, "--robot-policy waypoint"));
        if (parts.size() == 3) spec.speed = parse_double(parts[2], "--robot-policy speed");
    } else if (kind == "replay") {
        if (parts.size() != 2) throw std::invalid_argument("expected replay:file.csv");
        spec.kind = io::RobotPolicySpec::Kind::Replay;
        spec.file = parts[1];
    } else {
        throw std::invalid_argument("unknown robot policy '" + kind + "'");
    }
    return spec;
}

std::string default_out_dir() {
    if (const char* env = std::getenv("SOCNAV_OUT_DIR")) return env;
    return "socnav_out";
}

int cmd_run(const std::string& scenario_path, const sim::RunOverrides& overrides) {
    const io::Scenario scenario = io::parse_scenario_file(scenario_path);
    const std::string base_dir = std::filesystem::path(scenario_path).parent_path().string();
    const sim::RunResult result = sim::run(scenario, overrides, base_dir.empty() ? "." : base_dir);
    std::cout << "ran " << result.log.steps.size() - 1 << " steps ("
              << result.log.steps.back().t << " s), " << scenario.agents.size() << " agents\n";
    if (overrides.out_dir) {
        std::cout << "report written to " << *overrides.out_dir << "\n";
    } else {
        std::cout << eval::report_to_yaml(result.report);
    }
    return 0;
}

int cmd_validate(const std::string& scenario_path) {
    const io::Scenario s = io::parse_scenario_file(scenario_path);
    std::cout << "OK: " << s.agents.size() << " agents, " << s.groups.size() << " groups, dt="
              << s.dt << ", duration=" << s.duration << "\n";
    return 0;
}

int cmd_eval(const std::string& log_path, const std::string& events_path,
             const std::string& scenario_path, const std::vector<std::string>& metrics,
             const std::string& out_dir) {
    GridPtr grid;
    double robot_radius = 0.3;
    std::map<int, double> radii;
    std::string hash;
    std::uint64_t seed = 0;
    std::vector<std::string> selection = metrics;
    if (!scenario_path.empty()) {
        const io::Scenario s = io::parse_scenario_file(scenario_path);
        const std::string base = std::filesystem::path(scenario_path).parent_path().string();
        grid = io::load_map(s.map, base.empty() ? "." : base);
        robot_radius = s.robot.radius;
        for (const auto& a : s.agents) radii[a.id] = a.radius;
        hash = fnv1a_hex(io::serialize_scenario(s));
        seed = s.seed;
        if (selection.empty() && !s.metrics_all) selection = s.metrics;
    }

    eval::TrajectoryLog log = eval::read_log_csv(log_path, events_path, grid);
    for (auto& step : log.steps) {
        step.robot.radius = robot_radius;
        for (auto& a : step.agents)
            if (auto it = radii.find(a.id); it != radii.end()) a.radius = it->second;
    }

    const auto report = eval::compute_metrics(log, selection, hash, seed);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(std::filesystem::path(out_dir) / "metrics.yaml", std::ios::binary);
        out << eval::report_to_yaml(report);
        std::cout << "metrics written to " << out_dir << "/metrics.yaml\n";
    } else {
        std::cout << eval::report_to_yaml(report);
    }
    return 0;
}

int cmd_list_nodes() {
    for (const auto* leaf : behaviors::NodeRegistry::instance().list()) {
        std::cout << (leaf->condition ? "condition " : "action    ") << leaf->name;
        for (const auto& p : leaf->params) {
            std::cout << " " << p.name << ":" << behaviors::to_string(p.type);
            if (p.required) std::cout << "!";
            else if (!p.default_value.empty()) std::cout << "=" << p.default_value;
        }
        if (leaf->condition) std::cout << " [wait:bool=false]";
        std::cout << "\n    " << leaf->summary << "\n";
    }
    return 0;
}

int cmd_list_metrics() {
    const auto& registry = eval::MetricsRegistry::instance();
    for (const auto& name : registry.names()) {
        const auto* def = registry.find(name);
        std::cout << name << " [" << def->unit << "] (" << def->definition_id << ")\n";
    }
    std::cout << registry.size() << " metrics\n";
    return 0;
}

int cmd_show_preset(const std::string& kind, const std::string& goals_text) {
    const auto preset = behaviors::reaction_preset_from_string(kind);
    if (!preset) throw std::invalid_argument("unknown preset '" + kind + "'");
    std::vector<Vec2> goals;
    if (!goals_text.empty())
        for (const auto& p : split(goals_text, ';')) goals.push_back(parse_point(p, "--goals"));
    const auto build = behaviors::build_reaction_preset(*preset, goals);
    std::cout << "robot_mode: " << sfm::to_string(build.robot_mode) << "\n";
    if (build.tree) std::cout << io::bt_to_xml(*build.tree);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"headless 2-D human navigation simulator"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "simulate a scenario and compute metrics");
    std::string scenario_path;
    run_cmd->add_option("--scenario", scenario_path, "scenario YAML file")->required();
    std::optional<double> dt, duration;
    std::optional<std::uint64_t> seed;
    std::string policy_text, out_dir, metrics_text;
    std::vector<std::string> record_texts;
    run_cmd->add_option("--dt", dt, "timestep override (s)");
    run_cmd->add_option("--duration", duration, "duration override (s)");
    run_cmd->add_option("--seed", seed, "seed override");
    run_cmd->add_option("--robot-policy", policy_text,
                        "static | straight:vx,vy | waypoints:x,y;x,y[:speed] | replay:file");
    run_cmd->add_option("--out", out_dir, "output directory (default $SOCNAV_OUT_DIR or socnav_out)");
    run_cmd->add_option("--metrics", metrics_text, "comma-separated metric names (default: scenario)");
    run_cmd->add_option("--record", record_texts, "recording window start:stop (repeatable)");
    bool no_out = false;
    run_cmd->add_flag("--print-only", no_out, "print the report instead of writing files");

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "check a scenario file");
    std::string validate_path;
    validate_cmd->add_option("--scenario", validate_path, "scenario YAML file")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "recompute metrics from saved trajectories");
    std::string eval_log, eval_events, eval_scenario, eval_out, eval_metrics;
    eval_cmd->add_option("--log", eval_log, "trajectories.csv")->required();
    eval_cmd->add_option("--events", eval_events, "events.csv")->required();
    eval_cmd->add_option("--scenario", eval_scenario, "scenario file (radii, map, metadata)");
    eval_cmd->add_option("--metrics", eval_metrics, "comma-separated metric names");
    eval_cmd->add_option("--out", eval_out, "directory for metrics.yaml (default: stdout)");

    app.add_subcommand("list-nodes", "print the behavior-tree node catalog");
    app.add_subcommand("list-metrics", "print the metric registry");

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "run the wrapper bridge (NDJSON)");
    int tcp_port = 0;
    bool use_stdio = false;
    std::string serve_out = default_out_dir();
    serve_cmd->add_option("--tcp", tcp_port, "listen on 127.0.0.1:PORT");
    serve_cmd->add_flag("--stdio", use_stdio, "speak the protocol on stdin/stdout");
    serve_cmd->add_option("--out", serve_out, "default report directory");

    // show-preset
    auto* preset_cmd = app.add_subcommand("show-preset", "print a generated reaction-preset tree");
    std::string preset_kind, preset_goals;
    preset_cmd->add_option("--kind", preset_kind, "regular|impassive|surprised|curious|scared|threatening")
        ->required();
    preset_cmd->add_option("--goals", preset_goals, "goal list x,y;x,y");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            sim::RunOverrides overrides;
            overrides.dt = dt;
            overrides.duration = duration;
            overrides.seed = seed;
            if (!policy_text.empty()) overrides.robot_policy = parse_policy_flag(policy_text);
            if (!metrics_text.empty()) overrides.metrics = split(metrics_text, ',');
            for (const auto& r : record_texts) {
                const auto parts = split(r, ':');
                if (parts.size() != 2) throw std::invalid_argument("--record expects start:stop");
                overrides.record_markers.emplace_back(parse_double(parts[0], "--record start"),
                                                      parse_double(parts[1], "--record stop"));
            }
            if (!no_out) overrides.out_dir = out_dir.empty() ? default_out_dir() : out_dir;
            return cmd_run(scenario_path, overrides);
        }
        if (validate_cmd->parsed()) return cmd_validate(validate_path);
        if (eval_cmd->parsed()) {
            std::vector<std::string> metrics;
            if (!eval_metrics.empty()) metrics = split(eval_metrics, ',');
            return cmd_eval(eval_log, eval_events, eval_scenario, metrics, eval_out);
        }
        if (app.get_subcommand("list-nodes")->parsed()) return cmd_list_nodes();
        if (app.get_subcommand("list-metrics")->parsed()) return cmd_list_metrics();
        if (serve_cmd->parsed()) {
            if (use_stdio == (tcp_port != 0)) {
                std::cerr << "serve: pass exactly one of --stdio or --tcp PORT\n";
                return 2;
            }
            if (use_stdio) {
                bridge::serve_stream(std::cin, std::cout, ".", serve_out);
                return 0;
            }
            return bridge::serve_tcp(tcp_port, ".", serve_out);
        }
        if (preset_cmd->parsed()) return cmd_show_preset(preset_kind, preset_goals);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
