#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "socnav/geometry.hpp"

namespace socnav {

enum class BehaviorStatus { Idle, Navigating, Waiting, Interacting };

const char* to_string(BehaviorStatus s);
std::optional<BehaviorStatus> behavior_status_from_string(const std::string& s);

/// Full state of one simulated human.
struct AgentState {
    int id = 0;
    Pose2D pose;
    Vec2 velocity;
    double desired_speed = 1.0;  // v0, m/s
    double max_speed = 1.5;      // >= desired_speed
    double radius = 0.3;         // in [0.2, 0.6]
    std::optional<int> group_id;
    std::optional<Vec2> gaze_target;
    std::vector<Vec2> goals;
    std::size_t current_goal_index = 0;
    BehaviorStatus behavior_status = BehaviorStatus::Idle;

    Vec2 position() const { return pose.position(); }
};

struct RobotState {
    Pose2D pose;
    Vec2 velocity;
    double radius = 0.3;

    Vec2 position() const { return pose.position(); }
};

struct Group {
    int group_id = 0;
    std::vector<int> member_ids;  // >= 2 entries
};

/// What the behavior layer asks of locomotion this tick.
struct ControlIntent {
    std::optional<Vec2> goal;   // desired-force target; none = brake to rest
    double speed_factor = 1.0;  // scales desired_speed
    bool stop = false;          // overrides goal speed to zero
};

/// Binary occupancy grid with a precomputed exact distance field.
/// Row 0 is the bottom of the map (lowest y); maps load axis-aligned only.
class OccupancyGrid {
public:
    OccupancyGrid(int width, int height, double resolution, Pose2D origin,
                  std::vector<std::uint8_t> occupied);

    /// Build from inline ASCII art: '#' occupied, '.' free. The first text
    /// line is the top row of the map.
    static std::shared_ptr<OccupancyGrid> from_ascii(const std::string& art, double resolution,
                                                     Pose2D origin = {});

    int width() const { return width_; }
    int height() const { return height_; }
    double resolution() const { return resolution_; }
    const Pose2D& origin() const { return origin_; }

    bool in_bounds(const Vec2& p) const;
    bool cell_in_bounds(int cx, int cy) const { return cx >= 0 && cx < width_ && cy >= 0 && cy < height_; }
    bool occupied(int cx, int cy) const { return occupied_[index(cx, cy)] != 0; }
    bool any_occupied() const { return any_occupied_; }

    /// Cell containing p. Caller guarantees in_bounds(p).
    void cell_of(const Vec2& p, int& cx, int& cy) const;
    Vec2 cell_center(int cx, int cy) const;

    /// Distance (m) from the center of cell (cx, cy) to the nearest occupied
    /// cell center; +inf when the map has no occupied cell.
    double distance_field(int cx, int cy) const;

    /// Index of the nearest occupied cell for (cx, cy), or -1 when none.
    int nearest_occupied_index(int cx, int cy) const { return nearest_[index(cx, cy)]; }

    std::size_t index(int cx, int cy) const { return static_cast<std::size_t>(cy) * width_ + cx; }

private:
    void build_distance_field();

    int width_;
    int height_;
    double resolution_;
    Pose2D origin_;
    std::vector<std::uint8_t> occupied_;
    std::vector<std::int32_t> nearest_;  // index of nearest occupied cell, -1 if none
    bool any_occupied_ = false;
};

using GridPtr = std::shared_ptr<const OccupancyGrid>;

/// Time-stamped world state; the unit of recording and of the bridge protocol.
struct WorldSnapshot {
    double t = 0.0;
    RobotState robot;
    std::vector<AgentState> agents;  // sorted by ascending id
    GridPtr grid;

    const AgentState* find_agent(int id) const;
};

struct ObstacleQuery {
    double distance = std::numeric_limits<double>::infinity();
    Vec2 direction_away;  // unit vector from nearest obstacle cell toward p; zero if distance 0 or no obstacle
};

/// Nearest-obstacle query. Throws std::out_of_range("... outside map") for out-of-bounds p.
ObstacleQuery distance_to_nearest_obstacle(const OccupancyGrid& grid, const Vec2& p);

/// True iff the segment a-b crosses no occupied cell. Symmetric in a and b.
bool line_of_sight(const OccupancyGrid& grid, const Vec2& a, const Vec2& b);

/// True iff target lies within the observer's field of view of total width `fov`.
/// A target coincident with the observer counts as visible.
bool in_fov(const Pose2D& observer, const Vec2& target, double fov);

}  // namespace socnav
