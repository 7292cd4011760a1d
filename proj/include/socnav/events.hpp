#pragma once

#include <functional>
#include <string>
#include <vector>

namespace socnav {

/// One row of the run event log (events.csv).
struct SimEvent {
    double t = 0.0;
    int agent_id = 0;  // -1 for robot/system events
    std::string kind;  // action_start, action_end, condition_success, speech, record_start, record_stop, robot_goal_reached
    std::string name;
    std::string detail;
};

using EventSink = std::function<void(const SimEvent&)>;

}  // namespace socnav
