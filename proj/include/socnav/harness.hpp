#pragma once

#include <optional>
#include <string>
#include <vector>

#include "socnav/engine.hpp"
#include "socnav/evaluator.hpp"
#include "socnav/scenario.hpp"

namespace socnav::sim {

/// Scripted robot motion standing in for an external navigation stack.
/// A pure function of time, so the bridge equivalence client can reproduce
/// it bit for bit.
class RobotPolicy {
public:
    RobotPolicy(const io::RobotPolicySpec& spec, Pose2D initial, double radius,
                const std::string& base_dir = ".");

    RobotState state_at(double t) const;
    const io::RobotPolicySpec& spec() const { return spec_; }

private:
    io::RobotPolicySpec spec_;
    Pose2D initial_;
    double radius_;
    // waypoint path
    std::vector<Vec2> path_;
    std::vector<double> cumulative_;
    // replay rows: t, x, y, yaw, vx, vy
    struct ReplayRow {
        double t, x, y, yaw, vx, vy;
    };
    std::vector<ReplayRow> replay_;
};

struct RunOverrides {
    std::optional<double> dt;
    std::optional<double> duration;
    std::optional<std::uint64_t> seed;
    std::optional<io::RobotPolicySpec> robot_policy;
    std::optional<std::vector<std::string>> metrics;  // empty vector = all
    std::vector<std::pair<double, double>> record_markers;
    std::optional<std::string> out_dir;
};

struct RunResult {
    eval::TrajectoryLog log;
    eval::MetricsReport report;
    std::string scenario_hash;
};

io::Scenario apply_overrides(io::Scenario scenario, const RunOverrides& o);

/// Fixed-timestep in-process loop: robot policy, BT ticks, SFM steps,
/// recording, metrics. Deterministic in (scenario, overrides).
RunResult run(const io::Scenario& scenario, const RunOverrides& overrides = {},
              const std::string& base_dir = ".");

/// Metric selection for a scenario (validated against the registry).
std::vector<std::string> metric_selection(const io::Scenario& scenario);

}  // namespace socnav::sim
