#pragma once

#include <memory>
#include <string>
#include <vector>

#include "socnav/bt.hpp"
#include "socnav/world.hpp"

namespace socnav::test {

inline GridPtr empty_grid(double size_m = 20.0, double resolution = 0.5) {
    const int cells = static_cast<int>(size_m / resolution);
    std::vector<std::uint8_t> data(static_cast<std::size_t>(cells) * cells, 0);
    return std::make_shared<OccupancyGrid>(cells, cells, resolution, Pose2D{}, std::move(data));
}

inline AgentState make_agent(int id, Vec2 pos, Vec2 vel = {}, double yaw = 0.0) {
    AgentState a;
    a.id = id;
    a.pose = {pos.x, pos.y, yaw};
    a.velocity = vel;
    return a;
}

/// Owns everything a TickContext points at; `snap` is mutated between ticks
/// to advance time or move other agents.
struct TickWorld {
    WorldSnapshot snap;
    AgentState self;
    ControlIntent intent;
    ControlIntent last_intent;
    bt::Blackboard blackboard;
    bt::SpeechChannel speech;
    std::vector<SimEvent> events;
    EventSink sink = [this](const SimEvent& e) { events.push_back(e); };

    explicit TickWorld(AgentState me = make_agent(1, {0, 0})) : self(std::move(me)) {
        snap.t = 0.0;
        snap.agents.push_back(self);
    }

    bt::TickContext ctx() {
        intent = ControlIntent{};  // fresh every tick, like the engine
        return bt::TickContext{snap, self, intent, blackboard, speech, last_intent, &sink};
    }

    /// Tick a node once and roll the clock forward by dt.
    bt::Status tick(bt::Node& node, double dt = 0.05) {
        auto context = ctx();
        const bt::Status s = node.tick(context);
        last_intent = intent;
        snap.t += dt;
        return s;
    }
};

inline std::string fixtures_dir() { return SOCNAV_FIXTURES_DIR; }

}  // namespace socnav::test
