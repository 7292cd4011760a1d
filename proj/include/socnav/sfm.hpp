#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "socnav/world.hpp"

namespace socnav::sfm {

enum class ParamMode { Default, Custom, Random };

const char* to_string(ParamMode m);

/// Force-factor and interaction parameters for one agent.
struct SfmParams {
    double k_desired = 1.0;
    double relaxation_time = 0.5;  // tau, s
    double k_obstacle = 10.0;
    double b_obstacle = 0.2;  // decay length, m
    double k_social = 2.1;
    double lambda = 2.0;   // velocity-interaction weight
    double gamma = 0.35;   // interaction-range scale
    double n = 2.0;        // angular decay, tangential term
    double n_prime = 3.0;  // angular decay, velocity term
    double k_group_gaze = 3.0;
    double k_group_coherence = 2.0;
    double k_group_repulsion = 1.0;
    double perception_radius = 10.0;  // m
    ParamMode mode = ParamMode::Default;

    bool operator==(const SfmParams&) const = default;
};

/// The documented default parameter set (mode = Default).
SfmParams default_params();

/// Force factors resampled from Normal(f, 0.10 f) truncated to [0.75 f, 1.25 f].
/// Interaction shape parameters (tau, lambda, gamma, n, n') stay at base.
/// Deterministic in `seed`; resulting mode is Random.
SfmParams sample_params(const SfmParams& base, std::uint64_t seed);

/// Per-step force components, mass normalized to 1. total is the exact sum.
struct ForceBreakdown {
    Vec2 desired;
    Vec2 obstacle;
    Vec2 social;
    Vec2 group;
    Vec2 total;
};

struct Neighbor {
    Vec2 position;
    Vec2 velocity;
};

/// How the robot enters an agent's social force.
struct RobotMode {
    enum class Kind { AsPedestrian, Ignored, CustomFactor };
    Kind kind = Kind::AsPedestrian;
    double factor = 1.0;  // used by CustomFactor

    static RobotMode as_pedestrian() { return {Kind::AsPedestrian, 1.0}; }
    static RobotMode ignored() { return {Kind::Ignored, 0.0}; }
    static RobotMode custom_factor(double k) { return {Kind::CustomFactor, k}; }

    double weight() const {
        switch (kind) {
            case Kind::AsPedestrian: return 1.0;
            case Kind::Ignored: return 0.0;
            case Kind::CustomFactor: return factor;
        }
        return 1.0;
    }
    bool operator==(const RobotMode&) const = default;
};

std::string to_string(const RobotMode& m);

/// Goal attraction: k * (v0 * e_goal - v) / tau. Zero direction when the goal
/// coincides with the agent position.
Vec2 desired_force(const AgentState& agent, const Vec2& goal, const SfmParams& params);

/// Variant with an explicit speed target (behaviors scale or zero v0).
Vec2 desired_force_with_speed(const AgentState& agent, const Vec2& goal, double target_speed,
                              const SfmParams& params);

/// Deliberate stops (StopAndWaitTimer etc.) brake with tau divided by this,
/// so an agent comes to rest in well under a second instead of coasting on
/// the goal-relaxation time.
inline constexpr double kBrakeRelaxationDivisor = 3.0;

/// Exponential wall repulsion off the nearest occupied cell; zero on an empty map.
Vec2 obstacle_force(const AgentState& agent, const OccupancyGrid& grid, const SfmParams& params);

/// Pairwise pedestrian interaction summed over neighbors within
/// perception_radius. Degenerate pairs (coincident positions, |D| = 0)
/// contribute zero and are tallied in `degenerate_pairs` when given.
Vec2 social_force(const AgentState& agent, const std::vector<Neighbor>& others,
                  const SfmParams& params, int* degenerate_pairs = nullptr);

/// Group gaze + coherence + repulsion terms relative to the centroid of the
/// other members. Throws std::invalid_argument for groups of fewer than 2.
Vec2 group_forces(const AgentState& agent, const Group& group,
                  const std::vector<AgentState>& members, const SfmParams& params);

struct StepInputs {
    Vec2 goal;                 // desired-force target
    double target_speed;       // usually v0; 0 brakes
    const WorldSnapshot* snapshot = nullptr;
    RobotMode robot_mode;
    const Group* group = nullptr;  // null when the agent is ungrouped
    bool hard_stop = false;        // brake with the shortened relaxation time
};

/// One semi-implicit Euler step: v' = clamp_norm(v + F dt, max_speed),
/// p' = p + v' dt, yaw turns toward heading(v') at <= pi rad/s when moving
/// faster than 0.05 m/s. dt must lie in (0, 0.2].
std::pair<AgentState, ForceBreakdown> step_agent(const AgentState& agent, const StepInputs& in,
                                                 const SfmParams& params, double dt);

}  // namespace socnav::sfm
