#include "socnav/engine.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "socnav/behaviors.hpp"
#include "socnav/bt_xml.hpp"
#include "socnav/parse_util.hpp"

namespace socnav::sim {

namespace {

/// Goal-seeking slows to a stop inside this radius so agents can hold a
/// point (conversation slots, follow targets) without orbiting it.
constexpr double kArrivalSlowRadius = 0.5;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

Engine::Engine(const io::Scenario& scenario, std::string base_dir)
    : scenario_(scenario), grid_(io::load_map(scenario.map, base_dir)), dt_(scenario.dt) {
    robot_.pose = scenario.robot.pose;
    robot_.radius = scenario.robot.radius;

    for (const io::GroupSpec& g : scenario.groups) groups_.push_back({g.id, g.members});

    for (const io::AgentSpec& spec : scenario.agents) {
        EngineAgent agent;
        agent.state.id = spec.id;
        agent.state.pose = spec.pose;
        agent.state.desired_speed = spec.desired_speed;
        agent.state.max_speed = spec.max_speed;
        agent.state.radius = spec.radius;
        agent.state.goals = spec.goals;
        agent.params = io::resolve_params(spec, scenario.seed);
        agent.robot_mode = sfm::RobotMode::as_pedestrian();

        switch (spec.behavior.kind) {
            case io::BehaviorSpec::Kind::Preset: {
                auto preset = behaviors::build_reaction_preset(spec.behavior.preset, spec.goals);
                agent.tree = std::move(preset.tree);
                agent.robot_mode = preset.robot_mode;
                break;
            }
            case io::BehaviorSpec::Kind::BtFile: {
                std::filesystem::path path = spec.behavior.bt_file;
                if (!path.is_absolute()) path = std::filesystem::path(base_dir) / path;
                agent.tree = io::parse_bt(read_file(path));
                break;
            }
            case io::BehaviorSpec::Kind::BtInline:
                agent.tree = io::parse_bt(spec.behavior.bt_inline);
                break;
        }

        for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
            const auto& members = groups_[gi].member_ids;
            if (std::find(members.begin(), members.end(), spec.id) != members.end()) {
                agent.group_index = static_cast<int>(gi);
                agent.state.group_id = groups_[gi].group_id;
            }
        }
        agents_.push_back(std::move(agent));
    }
    std::sort(agents_.begin(), agents_.end(),
              [](const EngineAgent& a, const EngineAgent& b) { return a.state.id < b.state.id; });

    log_.grid = grid_;
    log_.dt = dt_;
    sink_ = [this](const SimEvent& e) { log_.events.push_back(e); };
}

std::vector<AgentState> Engine::agent_states() const {
    std::vector<AgentState> out;
    out.reserve(agents_.size());
    for (const EngineAgent& a : agents_) out.push_back(a.state);
    return out;
}

WorldSnapshot Engine::snapshot() const {
    WorldSnapshot snap;
    snap.t = t_;
    snap.robot = robot_;
    snap.agents = agent_states();
    snap.grid = grid_;
    return snap;
}

void Engine::compute_next() {
    const WorldSnapshot view = snapshot();
    last_forces_.clear();

    for (EngineAgent& agent : agents_) {
        ControlIntent intent;
        agent.state.behavior_status = BehaviorStatus::Idle;

        if (agent.tree && !agent.tree_done) {
            bt::TickContext ctx{view,   agent.state, intent, agent.blackboard,
                                speech_, agent.last_intent, &sink_};
            const bt::Status status = agent.tree->tick(ctx);
            if (status == bt::Status::Success) agent.tree_done = true;  // behavior script complete
            else if (status == bt::Status::Failure) bt::reset(*agent.tree);  // restart next tick
        }

        sfm::StepInputs inputs;
        inputs.snapshot = &view;
        inputs.robot_mode = agent.robot_mode;
        inputs.hard_stop = intent.stop;
        if (agent.group_index >= 0) inputs.group = &groups_[static_cast<std::size_t>(agent.group_index)];
        if (intent.goal && !intent.stop) {
            inputs.goal = *intent.goal;
            const double dist = (*intent.goal - agent.state.position()).norm();
            inputs.target_speed = agent.state.desired_speed * intent.speed_factor *
                                  std::min(1.0, dist / kArrivalSlowRadius);
        } else {
            inputs.goal = agent.state.position();
            inputs.target_speed = 0.0;
        }

        auto [next, forces] = sfm::step_agent(agent.state, inputs, agent.params, dt_);
        if (!std::isfinite(forces.total.x) || !std::isfinite(forces.total.y)) {
            std::ostringstream dump;
            dump << "non-finite force for agent " << agent.state.id << " at t=" << t_
                 << ": desired=(" << forces.desired.x << "," << forces.desired.y << ")"
                 << " obstacle=(" << forces.obstacle.x << "," << forces.obstacle.y << ")"
                 << " social=(" << forces.social.x << "," << forces.social.y << ")"
                 << " group=(" << forces.group.x << "," << forces.group.y << ")";
            throw std::runtime_error(dump.str());
        }

        // Near-stationary agents align their yaw with the gaze target (same
        // pi rad/s limit as the locomotion turn).
        if (next.velocity.norm() <= 0.05 && next.gaze_target) {
            const Vec2 to_gaze = *next.gaze_target - next.position();
            if (to_gaze.norm() > 1e-6)
                next.pose.set_yaw(
                    turn_toward(next.pose.yaw, std::atan2(to_gaze.y, to_gaze.x), kPi * dt_));
        }

        agent.state = next;
        agent.last_intent = intent;
        last_forces_.push_back(forces);
    }
}

void Engine::set_time_robot(double t, const RobotState& robot) {
    t_ = t;
    robot_ = robot;
}

void Engine::adopt_agent_poses(const std::vector<AdoptedAgent>& poses) {
    for (const AdoptedAgent& p : poses) {
        auto it = std::find_if(agents_.begin(), agents_.end(),
                               [&](const EngineAgent& a) { return a.state.id == p.id; });
        if (it == agents_.end())
            throw std::runtime_error("unknown agent id " + std::to_string(p.id) + " in step");
        it->state.pose = p.pose;
        it->state.velocity = p.velocity;
    }
}

void Engine::record_current() {
    eval::StepRecord rec;
    rec.t = t_;
    rec.robot = robot_;
    rec.agents = agent_states();
    rec.forces = last_forces_;  // the breakdowns that produced these states; empty on row 0
    log_.steps.push_back(std::move(rec));
}

void Engine::record_start() {
    recorder_.start(t_);
    log_.events.push_back({t_, -1, "record_start", "", ""});
}

void Engine::record_stop() {
    recorder_.stop(t_);
    log_.events.push_back({t_, -1, "record_stop", "", ""});
}

const char* Engine::animation_hint(BehaviorStatus s) {
    switch (s) {
        case BehaviorStatus::Navigating: return "walk";
        case BehaviorStatus::Waiting: return "wait";
        case BehaviorStatus::Interacting: return "talk";
        case BehaviorStatus::Idle: return "idle";
    }
    return "idle";
}

const eval::TrajectoryLog& Engine::finish() {
    if (!finished_) {
        log_.windows = recorder_.windows(t_);
        finished_ = true;
    }
    return log_;
}

}  // namespace socnav::sim
