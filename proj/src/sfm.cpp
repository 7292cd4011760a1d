#include "socnav/sfm.hpp"

#include <cmath>
#include <stdexcept>

#include "socnav/rng.hpp"

namespace socnav::sfm {

const char* to_string(ParamMode m) {
    switch (m) {
        case ParamMode::Default: return "default";
        case ParamMode::Custom: return "custom";
        case ParamMode::Random: return "random";
    }
    return "default";
}

std::string to_string(const RobotMode& m) {
    switch (m.kind) {
        case RobotMode::Kind::AsPedestrian: return "as_pedestrian";
        case RobotMode::Kind::Ignored: return "ignored";
        case RobotMode::Kind::CustomFactor: return "custom_factor(" + std::to_string(m.factor) + ")";
    }
    return "as_pedestrian";
}

SfmParams default_params() { return SfmParams{}; }

SfmParams sample_params(const SfmParams& base, std::uint64_t seed) {
    Rng rng(seed);
    // z in [-2.5, 2.5] maps to f * (1 + 0.10 z), i.e. truncation at +-25%.
    auto draw = [&rng](double f) { return f * (1.0 + 0.10 * rng.truncated_gaussian(-2.5, 2.5)); };
    SfmParams out = base;
    out.k_desired = draw(base.k_desired);
    out.k_obstacle = draw(base.k_obstacle);
    out.k_social = draw(base.k_social);
    out.k_group_gaze = draw(base.k_group_gaze);
    out.k_group_coherence = draw(base.k_group_coherence);
    out.k_group_repulsion = draw(base.k_group_repulsion);
    out.mode = ParamMode::Random;
    return out;
}

Vec2 desired_force(const AgentState& agent, const Vec2& goal, const SfmParams& params) {
    return desired_force_with_speed(agent, goal, agent.desired_speed, params);
}

Vec2 desired_force_with_speed(const AgentState& agent, const Vec2& goal, double target_speed,
                              const SfmParams& params) {
    const Vec2 e_goal = (goal - agent.position()).normalized();
    return params.k_desired * (e_goal * target_speed - agent.velocity) / params.relaxation_time;
}

Vec2 obstacle_force(const AgentState& agent, const OccupancyGrid& grid, const SfmParams& params) {
    const ObstacleQuery q = distance_to_nearest_obstacle(grid, agent.position());
    if (std::isinf(q.distance)) return {};
    const double magnitude = params.k_obstacle * std::exp((agent.radius - q.distance) / params.b_obstacle);
    return q.direction_away * magnitude;
}

Vec2 social_force(const AgentState& agent, const std::vector<Neighbor>& others,
                  const SfmParams& params, int* degenerate_pairs) {
    Vec2 sum;
    for (const Neighbor& other : others) {
        const Vec2 d = other.position - agent.position();
        const double dist = d.norm();
        if (dist > params.perception_radius) continue;
        if (dist == 0.0) {
            if (degenerate_pairs) ++*degenerate_pairs;
            continue;
        }
        const Vec2 e = d / dist;
        const Vec2 interaction = params.lambda * (agent.velocity - other.velocity) + e;
        const double interaction_norm = interaction.norm();
        if (interaction_norm == 0.0) {
            if (degenerate_pairs) ++*degenerate_pairs;
            continue;
        }
        const double range = params.gamma * interaction_norm;  // B
        const Vec2 t_hat = interaction / interaction_norm;
        const double theta = std::atan2(t_hat.cross(e), t_hat.dot(e));
        const double f_v = -std::exp(-dist / range - std::pow(params.n_prime * range * theta, 2));
        const double sign_theta = theta > 0.0 ? 1.0 : (theta < 0.0 ? -1.0 : 0.0);
        const double f_theta = -sign_theta * std::exp(-dist / range - std::pow(params.n * range * theta, 2));
        sum += params.k_social * (f_v * t_hat + f_theta * t_hat.left_normal());
    }
    return sum;
}

Vec2 group_forces(const AgentState& agent, const Group& group,
                  const std::vector<AgentState>& members, const SfmParams& params) {
    if (group.member_ids.size() < 2) throw std::invalid_argument("group requires >=2 members");

    Vec2 centroid_others;
    int others = 0;
    for (const AgentState& m : members) {
        if (m.id == agent.id) continue;
        centroid_others += m.position();
        ++others;
    }
    if (others == 0) throw std::invalid_argument("group requires >=2 members");
    centroid_others = centroid_others / static_cast<double>(others);

    const Vec2 to_centroid = centroid_others - agent.position();
    const Vec2 e_centroid = to_centroid.normalized();
    Vec2 force;

    // Gaze: active only when the centroid is more than 90 deg off the heading.
    const double beta = std::abs(wrap_angle(bearing(agent.position(), centroid_others) - agent.pose.yaw));
    force += params.k_group_gaze * std::max(0.0, beta - kPi / 2.0) * e_centroid;

    // Coherence: pull back when straying beyond (N-1)/2 meters from the others.
    const double group_size = static_cast<double>(group.member_ids.size());
    if (to_centroid.norm() > (group_size - 1.0) / 2.0)
        force += params.k_group_coherence * e_centroid;

    // Repulsion from members closer than touching distance plus 0.2 m.
    for (const AgentState& m : members) {
        if (m.id == agent.id) continue;
        const Vec2 d = m.position() - agent.position();
        const double dist = d.norm();
        if (dist > 0.0 && dist < agent.radius + m.radius + 0.2)
            force -= params.k_group_repulsion * (d / dist);
    }
    return force;
}

std::pair<AgentState, ForceBreakdown> step_agent(const AgentState& agent, const StepInputs& in,
                                                 const SfmParams& params, double dt) {
    if (!(dt > 0.0 && dt <= 0.2)) throw std::invalid_argument("step_agent: dt out of range (0, 0.2]");

    ForceBreakdown forces;
    if (in.hard_stop) {
        SfmParams braking = params;
        braking.relaxation_time = params.relaxation_time / kBrakeRelaxationDivisor;
        forces.desired = desired_force_with_speed(agent, in.goal, 0.0, braking);
    } else {
        forces.desired = desired_force_with_speed(agent, in.goal, in.target_speed, params);
    }

    const WorldSnapshot* snap = in.snapshot;
    if (snap && snap->grid && snap->grid->any_occupied())
        forces.obstacle = obstacle_force(agent, *snap->grid, params);

    if (snap) {
        std::vector<Neighbor> humans;
        humans.reserve(snap->agents.size());
        for (const AgentState& a : snap->agents) {
            if (a.id == agent.id) continue;
            humans.push_back({a.position(), a.velocity});
        }
        forces.social = social_force(agent, humans, params);
        const double w = in.robot_mode.weight();
        if (w != 0.0) {
            const std::vector<Neighbor> robot{{snap->robot.position(), snap->robot.velocity}};
            forces.social += w * social_force(agent, robot, params);
        }
        if (in.group && in.group->member_ids.size() >= 2)
            forces.group = group_forces(agent, *in.group, snap->agents, params);
    }

    forces.total = forces.desired + forces.obstacle + forces.social + forces.group;

    AgentState next = agent;
    next.velocity = clamp_norm(agent.velocity + forces.total * dt, agent.max_speed);
    next.pose.set_position(agent.position() + next.velocity * dt);
    if (next.velocity.norm() > 0.05)
        next.pose.set_yaw(turn_toward(agent.pose.yaw, std::atan2(next.velocity.y, next.velocity.x), kPi * dt));
    return {next, forces};
}

}  // namespace socnav::sfm
