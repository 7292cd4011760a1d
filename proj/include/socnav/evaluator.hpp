#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "socnav/events.hpp"
#include "socnav/sfm.hpp"
#include "socnav/world.hpp"

namespace socnav::eval {

/// One recorded simulation step: the world snapshot plus, when available,
/// the force breakdown that produced each agent's state.
struct StepRecord {
    double t = 0.0;
    RobotState robot;
    std::vector<AgentState> agents;
    std::vector<sfm::ForceBreakdown> forces;  // parallel to agents; may be empty
};

struct Window {
    double start = 0.0;
    double end = 0.0;
    bool operator==(const Window&) const = default;
};

struct TrajectoryLog {
    GridPtr grid;  // null when evaluating from CSV without a map
    double dt = 0.05;
    std::vector<StepRecord> steps;
    std::vector<SimEvent> events;
    std::vector<Window> windows;  // recording windows; empty = whole run

    /// Indices of the snapshots whose timestamps fall inside the window.
    std::vector<std::size_t> window_indices(const Window& w) const;
    /// The recording windows, defaulting to the whole run.
    std::vector<Window> effective_windows() const;
};

struct MetricValue {
    double value = 0.0;
    bool applicable = true;
    std::string reason;

    static MetricValue inapplicable(std::string why) { return {0.0, false, std::move(why)}; }
};

struct MetricDef {
    std::string name;
    std::string unit;
    std::string definition_id;
    std::function<MetricValue(const TrajectoryLog&, const Window&)> compute;
};

/// The pluggable metric suite; users extend it by registering more entries.
class MetricsRegistry {
public:
    static MetricsRegistry& instance();

    void add(MetricDef def);
    const MetricDef* find(const std::string& name) const;
    std::vector<std::string> names() const;  // sorted
    std::size_t size() const { return defs_.size(); }

private:
    MetricsRegistry();
    std::vector<MetricDef> defs_;
};

struct MetricResult {
    double value = 0.0;
    std::string unit;
    std::string definition_id;
    bool applicable = true;
    std::string reason;
};

struct WindowReport {
    Window window;
    std::size_t step_count = 0;  // intervals inside the window
    std::map<std::string, MetricResult> entries;
};

struct MetricsReport {
    std::string scenario_hash;
    std::uint64_t seed = 0;
    double dt = 0.05;
    std::vector<WindowReport> windows;
};

/// Start/stop recording markers. Multiple disjoint windows are allowed;
/// stop without a matching start throws.
class Recorder {
public:
    void start(double t);
    void stop(double t);
    bool open() const { return open_.has_value(); }
    /// Windows for metric computation; an open window closes at `duration`,
    /// and no markers at all means one window over the whole run.
    std::vector<Window> windows(double duration) const;

private:
    std::vector<Window> closed_;
    std::optional<double> open_;
};

/// Compute the selected metrics (all registered ones when `selection` is
/// empty) over each effective window. Unknown names throw.
MetricsReport compute_metrics(const TrajectoryLog& log, const std::vector<std::string>& selection,
                              const std::string& scenario_hash = {}, std::uint64_t seed = 0);

/// Report + trajectory + event files (metrics.yaml, trajectories.csv, events.csv).
void write_report_files(const MetricsReport& report, const TrajectoryLog& log,
                        const std::string& dir);
std::string report_to_yaml(const MetricsReport& report);

void write_trajectories_csv(const TrajectoryLog& log, const std::string& path);
void write_events_csv(const TrajectoryLog& log, const std::string& path);

/// Rebuild a log from report files; events drive the recording windows.
/// The grid may be supplied for obstacle-based metrics.
TrajectoryLog read_log_csv(const std::string& trajectories_path, const std::string& events_path,
                           GridPtr grid = nullptr);

}  // namespace socnav::eval
