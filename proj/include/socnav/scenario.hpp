#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "socnav/behaviors.hpp"
#include "socnav/sfm.hpp"
#include "socnav/world.hpp"

namespace socnav::io {

/// Inline ASCII map ('#' occupied, '.' free); the grid text round-trips verbatim.
struct InlineMap {
    std::string grid;
    double resolution = 0.1;
    Pose2D origin;
    bool operator==(const InlineMap&) const = default;
};

/// Either a path to a PGM+YAML map or an inline grid.
using MapRef = std::variant<std::string, InlineMap>;

struct RobotPolicySpec {
    enum class Kind { Static, Straight, Waypoints, Replay };
    Kind kind = Kind::Static;
    Vec2 velocity;                // straight
    std::vector<Vec2> waypoints;  // waypoints
    double speed = 1.0;           // waypoints
    std::string file;             // replay
    bool operator==(const RobotPolicySpec&) const = default;
};

struct RobotSpec {
    Pose2D pose;
    double radius = 0.3;
    RobotPolicySpec policy;
    std::optional<Vec2> goal;  // metrics success target; defaults to the last waypoint
    bool operator==(const RobotSpec&) const = default;
};

struct BehaviorSpec {
    enum class Kind { Preset, BtFile, BtInline };
    Kind kind = Kind::Preset;
    behaviors::ReactionPreset preset = behaviors::ReactionPreset::Regular;
    std::string bt_file;
    std::string bt_inline;
    bool operator==(const BehaviorSpec&) const = default;
};

struct SfmSpec {
    sfm::ParamMode mode = sfm::ParamMode::Default;
    std::map<std::string, double> overrides;  // field name -> value
    std::optional<std::uint64_t> seed;        // random mode; default derives from run seed
    bool operator==(const SfmSpec&) const = default;
};

struct AgentSpec {
    int id = 0;
    Pose2D pose;
    double radius = 0.3;
    double desired_speed = 1.0;
    double max_speed = 1.5;
    std::vector<Vec2> goals;
    BehaviorSpec behavior;
    SfmSpec sfm;
    bool operator==(const AgentSpec&) const = default;
};

struct GroupSpec {
    int id = 0;
    std::vector<int> members;
    bool operator==(const GroupSpec&) const = default;
};

struct Scenario {
    MapRef map = InlineMap{};
    double dt = 0.05;
    double duration = 120.0;
    std::uint64_t seed = 0;
    RobotSpec robot;
    std::vector<AgentSpec> agents;
    std::vector<GroupSpec> groups;
    bool metrics_all = true;
    std::vector<std::string> metrics;  // used when !metrics_all
    bool operator==(const Scenario&) const = default;
};

/// Parse and fully validate a scenario document. Referenced BT files are
/// resolved against `base_dir`, parsed, and their leaf names checked against
/// the node registry; the map is loaded to bounds-check poses and goals.
/// Throws std::runtime_error with location context on any problem.
Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".");
Scenario parse_scenario_file(const std::string& path);

/// Inverse of parse_scenario up to formatting: fields equal to their defaults
/// are omitted and re-filled on read.
std::string serialize_scenario(const Scenario& s);

/// Load the scenario's occupancy grid (inline grid or PGM+YAML file).
GridPtr load_map(const MapRef& map, const std::string& base_dir = ".");

/// Load a map-server style YAML (image/resolution/origin/occupied_thresh/negate)
/// plus its PGM image (P2 or P5, maxval <= 255).
GridPtr load_map_file(const std::string& yaml_path);

/// Apply named overrides onto a parameter set; unknown field names throw.
sfm::SfmParams apply_overrides(const sfm::SfmParams& base,
                               const std::map<std::string, double>& overrides);

/// Resolved per-agent SFM parameters for this run (mode + overrides + seed).
sfm::SfmParams resolve_params(const AgentSpec& agent, std::uint64_t run_seed);

}  // namespace socnav::io
