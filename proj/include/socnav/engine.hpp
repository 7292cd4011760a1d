#pragma once

#include <memory>
#include <string>
#include <vector>

#include "socnav/bt.hpp"
#include "socnav/evaluator.hpp"
#include "socnav/scenario.hpp"
#include "socnav/sfm.hpp"
#include "socnav/world.hpp"

namespace socnav::sim {

/// Pose/velocity adopted from an external simulator for one agent.
struct AdoptedAgent {
    int id = 0;
    Pose2D pose;
    Vec2 velocity;
};

/// The manager core: owns the agents, their trees and parameters, the speech
/// channel and the run log. The harness and the bridge drive it with the same
/// primitive operations so both paths produce identical logs.
///
/// Step protocol (one simulation step from t_prev to t):
///   compute_next()            agents advance off the snapshot at t_prev
///   set_time_robot(t, robot)  clock and externally-driven robot move to t
///   record_current()          the snapshot at t becomes a log row
/// The bridge instead adopts client states, records, then computes the reply.
class Engine {
public:
    Engine(const io::Scenario& scenario, std::string base_dir = ".");

    double t() const { return t_; }
    double dt() const { return dt_; }
    GridPtr grid() const { return grid_; }
    const RobotState& robot() const { return robot_; }
    std::size_t agent_count() const { return agents_.size(); }
    std::vector<AgentState> agent_states() const;
    WorldSnapshot snapshot() const;
    const io::Scenario& scenario() const { return scenario_; }

    /// Tick every agent's tree and integrate its motion off the current
    /// snapshot. Throws on non-finite forces with a diagnostic dump.
    void compute_next();
    void set_time_robot(double t, const RobotState& robot);
    /// Adopt externally simulated agent kinematics (merged by id; unknown ids throw).
    void adopt_agent_poses(const std::vector<AdoptedAgent>& poses);
    void record_current();

    /// Convenience for the in-process loop: advance one full step.
    void advance(double t_next, const RobotState& robot_next) {
        compute_next();
        set_time_robot(t_next, robot_next);
        record_current();
    }

    void record_start();
    void record_stop();
    void push_event(const SimEvent& e) { log_.events.push_back(e); }

    /// Animation hint for the wrapper protocol ("walk", "wait", "talk", "idle").
    static const char* animation_hint(BehaviorStatus s);

    /// Finalize recording windows and hand out the log.
    const eval::TrajectoryLog& finish();
    const eval::TrajectoryLog& log() const { return log_; }

private:
    struct EngineAgent {
        AgentState state;
        sfm::SfmParams params;
        sfm::RobotMode robot_mode;
        bt::NodePtr tree;  // null = no scripted behavior
        bool tree_done = false;
        bt::Blackboard blackboard;
        ControlIntent last_intent;
        int group_index = -1;  // into groups_
    };

    io::Scenario scenario_;
    GridPtr grid_;
    double dt_;
    double t_ = 0.0;
    RobotState robot_;
    std::vector<EngineAgent> agents_;  // ascending id
    std::vector<Group> groups_;
    bt::SpeechChannel speech_;
    eval::Recorder recorder_;
    eval::TrajectoryLog log_;
    std::vector<sfm::ForceBreakdown> last_forces_;
    EventSink sink_;
    bool finished_ = false;
};

}  // namespace socnav::sim
