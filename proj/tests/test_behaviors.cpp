#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "socnav/behaviors.hpp"
#include "socnav/parse_util.hpp"
#include "support/helpers.hpp"

using namespace socnav;
using namespace socnav::behaviors;
using bt::Status;

namespace {

const NodeRegistry& registry() { return NodeRegistry::instance(); }

/// Minimal plausible value for a required parameter of the given type.
std::string synth_value(ParamType type) {
    switch (type) {
        case ParamType::Number: return "1";
        case ParamType::Point: return "1,1";
        case ParamType::String: return "text";
        case ParamType::Id: return "2";
        case ParamType::IdList: return "2";
        case ParamType::Bool: return "true";
    }
    return "1";
}

test::TickWorld two_agent_world() {
    test::TickWorld world(test::make_agent(1, {2, 2}));
    world.snap.agents.push_back(test::make_agent(2, {4, 2}));
    world.snap.robot.pose = {8, 2, kPi};  // facing the agents
    world.snap.grid = test::empty_grid(20.0, 0.5);
    return world;
}

}  // namespace

TEST_SUITE_BEGIN("behaviors");

TEST_CASE("the registry carries the full catalog") {
    for (const char* name :
         {"GoTo", "LookAtPoint", "LookAtAgent", "LookAtRobot", "StopAndWaitTimer", "ApproachRobot",
          "ConversationFormation", "FollowAgent", "SaySomething", "BlockRobot", "FleeFromRobot"})
        CHECK_MESSAGE(registry().find(name) != nullptr, name);
    for (const char* name : {"IsAtPosition", "IsAgentNearby", "IsRobotNearby", "IsRobotVisible",
                             "IsSpeaking", "IsLookingAtMe", "TimeExpired"}) {
        const LeafDesc* desc = registry().find(name);
        REQUIRE_MESSAGE(desc != nullptr, name);
        CHECK(desc->condition);
    }
}

TEST_CASE("alias spellings resolve to canonical names") {
    CHECK(registry().resolve("LookingAtPoint") == "LookAtPoint");
    CHECK(registry().resolve("LookingAtAgent") == "LookAtAgent");
    CHECK(registry().resolve("LookingAtRobot") == "LookAtRobot");
    CHECK(registry().resolve("isSpeaking") == "IsSpeaking");
    CHECK(registry().resolve("isAtPosition") == "IsAtPosition");
    CHECK(registry().resolve("NoSuchNode").empty());
}

TEST_CASE("every registry node is constructible and ticks on a minimal snapshot") {
    for (const LeafDesc* desc : registry().list()) {
        bt::ParamMap params;
        for (const auto& p : desc->params)
            if (p.required) params[p.name] = synth_value(p.type);
        auto world = two_agent_world();
        auto node = registry().make_leaf(desc->name, params, 0);
        CHECK_NOTHROW(world.tick(*node));
    }
}

TEST_CASE("leaf construction errors are explicit") {
    CHECK_THROWS_WITH_AS(registry().make_leaf("Bogus", {}, 0), doctest::Contains("unknown BT node"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(registry().make_leaf("GoTo", {}, 0),
                         doctest::Contains("missing required parameter"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(registry().make_leaf("GoTo", {{"goal", "1,1"}, {"typo", "3"}}, 0),
                         doctest::Contains("unknown parameter"), std::invalid_argument);
    CHECK_THROWS_AS(registry().make_leaf("GoTo", {{"goal", "not-a-point"}}, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(registry().make_leaf("StopAndWaitTimer", {{"duration", "0"}}, 0),
                    std::invalid_argument);
    // wait is only valid on conditions
    CHECK_THROWS_AS(registry().make_leaf("GoTo", {{"goal", "1,1"}, {"wait", "true"}}, 0),
                    std::invalid_argument);
}

TEST_CASE("GoTo succeeds inside tolerance and navigates otherwise") {
    auto world = two_agent_world();
    SUBCASE("already within tolerance") {
        auto node = registry().make_leaf("GoTo", {{"goal", "2.2,2"}}, 0);
        CHECK(world.tick(*node) == Status::Success);  // 0.2 m away, tol 0.3
    }
    SUBCASE("far goals set the intent and run") {
        auto node = registry().make_leaf("GoTo", {{"goal", "7,2"}}, 0);
        auto ctx = world.ctx();
        CHECK(node->tick(ctx) == Status::Running);
        CHECK(world.intent.goal == Vec2{7, 2});
        CHECK(world.self.behavior_status == BehaviorStatus::Navigating);
    }
    SUBCASE("advances the agent goal-list index on arrival") {
        world.self.goals = {{2.2, 2.0}, {9, 9}};
        auto node = registry().make_leaf("GoTo", {{"goal", "2.2,2"}}, 0);
        CHECK(world.tick(*node) == Status::Success);
        CHECK(world.self.current_goal_index == 1);
    }
}

TEST_CASE("GoTo stalls out after 10 s without progress") {
    auto world = two_agent_world();
    auto node = registry().make_leaf("GoTo", {{"goal", "7,2"}}, 0);
    Status s = Status::Running;
    int ticks = 0;
    // the agent never moves (the test never integrates), so progress stays 0
    while (s == Status::Running && ticks < 1000) {
        s = world.tick(*node);
        ++ticks;
    }
    CHECK(s == Status::Failure);
    CHECK(ticks * 0.05 == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("StopAndWaitTimer fires on the exact tick and brakes meanwhile") {
    auto world = two_agent_world();
    auto node = registry().make_leaf("StopAndWaitTimer", {{"duration", "2"}}, 0);
    int tick_count = 0;
    Status s = Status::Running;
    while (s == Status::Running) {
        auto ctx = world.ctx();
        s = node->tick(ctx);
        ++tick_count;
        CHECK(world.intent.stop);
        CHECK(world.self.behavior_status == BehaviorStatus::Waiting);
        world.snap.t += 0.05;
        REQUIRE(tick_count < 100);
    }
    CHECK(s == Status::Success);
    CHECK(tick_count == 41);  // duration 2 s at dt 0.05, timer starts on the first tick

    SUBCASE("re-entry after halt restarts the full duration") {
        node->halt();
        auto ctx = world.ctx();
        CHECK(node->tick(ctx) == Status::Running);
    }
}

TEST_CASE("Look* actions set the gaze target on the tick they run") {
    auto world = two_agent_world();
    {
        auto node = registry().make_leaf("LookAtPoint", {{"point", "5,6"}}, 0);
        CHECK(world.tick(*node) == Status::Success);
        CHECK(world.self.gaze_target == Vec2{5, 6});
    }
    {
        auto node = registry().make_leaf("LookAtAgent", {{"agent", "2"}}, 1);
        CHECK(world.tick(*node) == Status::Success);
        CHECK(world.self.gaze_target == Vec2{4, 2});
    }
    {
        auto node = registry().make_leaf("LookAtRobot", {}, 2);
        CHECK(world.tick(*node) == Status::Success);
        CHECK(world.self.gaze_target == Vec2{8, 2});
    }
    {
        auto node = registry().make_leaf("LookAtAgent", {{"agent", "99"}}, 3);
        CHECK(world.tick(*node) == Status::Failure);
    }
}

TEST_CASE("SaySomething appends without dedup and IsSpeaking matches with expiry") {
    auto world = two_agent_world();
    auto say = registry().make_leaf("SaySomething", {{"message", "follow me"}}, 0);
    CHECK(world.tick(*say) == Status::Success);
    CHECK(world.tick(*say) == Status::Success);
    CHECK(world.speech.size() == 2);  // one entry per tick, no dedup

    auto hears = registry().make_leaf("IsSpeaking", {{"speaker", "1"}, {"message", "follow me"}}, 1);
    CHECK(world.tick(*hears) == Status::Success);

    world.snap.t += 10.0;  // both entries now older than 5 s
    CHECK(world.tick(*hears) == Status::Failure);

    auto empty_q = registry().make_leaf("IsSpeaking", {}, 2);
    bt::SpeechChannel fresh;
    bt::TickContext quiet{world.snap, world.self, world.intent, world.blackboard, fresh,
                          world.last_intent, nullptr};
    CHECK(empty_q->tick(quiet) == Status::Failure);
}

TEST_CASE("IsLookingAtMe follows gaze, falls back to yaw, and needs sight") {
    auto world = two_agent_world();  // self at (2,2), observer id 2 at (4,2)
    auto node = registry().make_leaf("IsLookingAtMe", {{"observer", "2"}}, 0);

    SUBCASE("gaze pointed at me") {
        world.snap.agents[1].gaze_target = Vec2{2, 2};
        CHECK(world.tick(*node) == Status::Success);
    }
    SUBCASE("gazing directly away") {
        world.snap.agents[1].gaze_target = Vec2{9, 2};
        CHECK(world.tick(*node) == Status::Failure);
    }
    SUBCASE("no gaze target: heading yaw decides") {
        world.snap.agents[1].pose.set_yaw(kPi);  // facing me
        CHECK(world.tick(*node) == Status::Success);
        world.snap.agents[1].pose.set_yaw(0.0);
        CHECK(world.tick(*node) == Status::Failure);
    }
    SUBCASE("a wall blocks the look") {
        world.snap.agents[1].gaze_target = Vec2{2, 2};
        world.snap.grid = OccupancyGrid::from_ascii(
            "....................\n"
            "......#.............\n"
            "......#.............\n"
            "......#.............\n"
            "....................",
            1.0);
        // wall column at x=6..7 between self (2,2) and observer... grid is 20x5 m;
        // place both inside and the wall between them.
        world.self.pose = {2, 2, 0};
        world.snap.agents[1].pose = {12, 2, 0};
        world.snap.agents[1].gaze_target = Vec2{2, 2};
        CHECK(world.tick(*node) == Status::Failure);
    }
    SUBCASE("unknown observer fails") {
        auto bad = registry().make_leaf("IsLookingAtMe", {{"observer", "42"}}, 1);
        CHECK(world.tick(*bad) == Status::Failure);
    }
}

TEST_CASE("geometric conditions") {
    auto world = two_agent_world();  // self (2,2), other (4,2), robot (8,2)
    SUBCASE("IsAtPosition on another agent") {
        auto node = registry().make_leaf(
            "IsAtPosition", {{"agent", "2"}, {"point", "4.3,2"}, {"tolerance", "0.5"}}, 0);
        CHECK(world.tick(*node) == Status::Success);
        auto far = registry().make_leaf("IsAtPosition", {{"agent", "2"}, {"point", "9,9"}}, 1);
        CHECK(world.tick(*far) == Status::Failure);
    }
    SUBCASE("IsAtPosition defaults to self") {
        auto node = registry().make_leaf("IsAtPosition", {{"point", "2.1,2"}}, 0);
        CHECK(world.tick(*node) == Status::Success);
    }
    SUBCASE("IsAgentNearby / IsRobotNearby") {
        CHECK(world.tick(*registry().make_leaf("IsAgentNearby", {{"agent", "2"}, {"range", "3"}}, 0)) ==
              Status::Success);
        CHECK(world.tick(*registry().make_leaf("IsAgentNearby", {{"agent", "2"}, {"range", "1"}}, 1)) ==
              Status::Failure);
        CHECK(world.tick(*registry().make_leaf("IsRobotNearby", {{"range", "6.5"}}, 2)) ==
              Status::Success);
        CHECK(world.tick(*registry().make_leaf("IsRobotNearby", {{"range", "2"}}, 3)) ==
              Status::Failure);
    }
    SUBCASE("IsRobotVisible honors range, fov and occlusion") {
        world.self.pose.set_yaw(0.0);  // facing the robot at +x
        CHECK(world.tick(*registry().make_leaf("IsRobotVisible", {{"range", "7"}}, 0)) ==
              Status::Success);
        CHECK(world.tick(*registry().make_leaf("IsRobotVisible", {{"range", "5"}}, 1)) ==
              Status::Failure);  // 6 m away
        world.self.pose.set_yaw(kPi);  // robot behind
        CHECK(world.tick(*registry().make_leaf("IsRobotVisible", {{"range", "7"}}, 2)) ==
              Status::Failure);
    }
    SUBCASE("TimeExpired uses the simulated clock") {
        auto node = registry().make_leaf("TimeExpired", {{"duration", "1"}}, 0);
        CHECK(world.tick(*node) == Status::Failure);
        world.snap.t = 0.99;
        CHECK(world.tick(*node) == Status::Failure);
        world.snap.t = 1.0;
        CHECK(world.tick(*node) == Status::Success);
        world.snap.t = 2.0;
        CHECK(world.tick(*node) == Status::Success);  // latched via blackboard clock
    }
    SUBCASE("wait mode turns condition failure into RUNNING") {
        auto node = registry().make_leaf("IsRobotNearby", {{"range", "2"}, {"wait", "true"}}, 0);
        CHECK(world.tick(*node) == Status::Running);
        world.snap.robot.pose = {3, 2, 0};
        CHECK(world.tick(*node) == Status::Success);
    }
}

TEST_CASE("ConversationFormation assigns circle slots by ascending id") {
    auto world = two_agent_world();  // self id 1 at (2,2), partner id 2 at (4,2)
    auto node = registry().make_leaf("ConversationFormation", {{"partners", "2"}}, 0);
    auto ctx = world.ctx();
    CHECK(node->tick(ctx) == Status::Running);
    // centroid (3,2); id order [1,2]: self takes angle 0 -> slot (3.9, 2)
    CHECK(world.intent.goal->x == doctest::Approx(3.9));
    CHECK(world.intent.goal->y == doctest::Approx(2.0));
    CHECK(world.self.gaze_target == Vec2{3, 2});
    CHECK(world.self.behavior_status == BehaviorStatus::Interacting);

    SUBCASE("partner slot is diametrically opposite") {
        test::TickWorld partner_world(test::make_agent(2, {4, 2}));
        partner_world.snap.agents.push_back(test::make_agent(1, {2, 2}));
        auto pnode = registry().make_leaf("ConversationFormation", {{"partners", "1"}}, 0);
        auto pctx = partner_world.ctx();
        CHECK(pnode->tick(pctx) == Status::Running);
        CHECK(partner_world.intent.goal->x == doctest::Approx(2.1));  // centroid - 0.9
        CHECK(partner_world.intent.goal->y == doctest::Approx(2.0));
    }
    SUBCASE("success latches once at the slot and facing the centroid") {
        world.self.pose = {3.9, 2.0, kPi};  // at slot, facing centroid (-x)
        auto c2 = world.ctx();
        CHECK(node->tick(c2) == Status::Success);
        world.self.pose = {9, 9, 0};  // even displaced, the latch holds
        auto c3 = world.ctx();
        CHECK(node->tick(c3) == Status::Success);
    }
    SUBCASE("missing partner fails") {
        auto bad = registry().make_leaf("ConversationFormation", {{"partners", "77"}}, 1);
        CHECK(world.tick(*bad) == Status::Failure);
    }
}

TEST_CASE("FollowAgent trails the target and reports despawn as success") {
    auto world = two_agent_world();
    auto node = registry().make_leaf("FollowAgent", {{"target", "2"}}, 0);
    world.snap.agents[1].velocity = {1, 0};
    auto ctx = world.ctx();
    CHECK(node->tick(ctx) == Status::Running);
    CHECK(world.intent.goal->x == doctest::Approx(4.0 - 1.2));  // behind the heading
    CHECK(world.intent.goal->y == doctest::Approx(2.0));

    SUBCASE("unknown target fails on the first tick") {
        auto bad = registry().make_leaf("FollowAgent", {{"target", "1234"}}, 1);
        CHECK(world.tick(*bad) == Status::Failure);
    }
    SUBCASE("despawned target succeeds") {
        world.snap.agents.erase(world.snap.agents.begin() + 1);
        auto c2 = world.ctx();
        CHECK(node->tick(c2) == Status::Success);
    }
}

TEST_CASE("BlockRobot targets the point ahead of the robot, facing it") {
    auto world = two_agent_world();
    world.snap.robot.pose = {8, 2, kPi / 2};  // heading north
    auto node = registry().make_leaf("BlockRobot", {}, 0);
    auto ctx = world.ctx();
    CHECK(node->tick(ctx) == Status::Running);
    CHECK(world.intent.goal->x == doctest::Approx(8.0));
    CHECK(world.intent.goal->y == doctest::Approx(3.0));  // 1 m along the heading
    CHECK(world.self.gaze_target == Vec2{8, 2});

    world.snap.robot.pose = {19, 19, 0};  // far beyond give-up range
    auto c2 = world.ctx();
    CHECK(node->tick(c2) == Status::Failure);
}

TEST_CASE("ApproachRobot skips straight to observation when already close") {
    test::TickWorld world(test::make_agent(1, {7, 2}));
    world.snap.robot.pose = {8, 2, 0};
    auto node = registry().make_leaf("ApproachRobot",
                                     {{"stop_distance", "1.5"}, {"observe_time", "1"}}, 0);
    Status s = Status::Running;
    int ticks = 0;
    while (s == Status::Running && ticks < 100) {
        s = world.tick(*node);
        CHECK(world.self.gaze_target == Vec2{8, 2});  // gaze contract every tick
        ++ticks;
    }
    CHECK(s == Status::Success);
    CHECK(ticks == 21);  // observe_time 1 s at dt 0.05, phase skip on tick one
}

TEST_CASE("reaction presets compile to valid registry trees") {
    const std::vector<Vec2> goals{{1, 1}, {5, 5}};

    SUBCASE("regular uses only GoTo leaves and pedestrian mode") {
        auto build = build_reaction_preset(ReactionPreset::Regular, goals);
        REQUIRE(build.tree);
        const auto names = bt::leaf_names(*build.tree);
        for (const auto& n : names) CHECK(n == "GoTo");
        CHECK(build.robot_mode == sfm::RobotMode::as_pedestrian());
        CHECK_NOTHROW(bt::validate_structure(*build.tree));
    }
    SUBCASE("impassive ignores the robot") {
        auto build = build_reaction_preset(ReactionPreset::Impassive, goals);
        CHECK(build.robot_mode == sfm::RobotMode::ignored());
        const auto names = bt::leaf_names(*build.tree);
        for (const auto& n : names) CHECK(n == "GoTo");
    }
    SUBCASE("surprised watches and stops") {
        auto build = build_reaction_preset(ReactionPreset::Surprised, goals);
        const auto names = bt::leaf_names(*build.tree);
        CHECK(std::count(names.begin(), names.end(), "IsRobotVisible") == 1);
        CHECK(std::count(names.begin(), names.end(), "StopAndWaitTimer") == 1);
        CHECK(std::count(names.begin(), names.end(), "LookAtRobot") == 1);
        CHECK_NOTHROW(bt::validate_structure(*build.tree));
    }
    SUBCASE("curious approaches once per encounter") {
        auto build = build_reaction_preset(ReactionPreset::Curious, goals);
        const auto names = bt::leaf_names(*build.tree);
        CHECK(std::count(names.begin(), names.end(), "ApproachRobot") == 1);
        CHECK(std::count(names.begin(), names.end(), "IsNewRobotEncounter") == 1);
    }
    SUBCASE("scared boosts speed and scales the robot force") {
        auto build = build_reaction_preset(ReactionPreset::Scared, goals);
        CHECK(build.robot_mode == sfm::RobotMode::custom_factor(2.5));
        const auto names = bt::leaf_names(*build.tree);
        CHECK(std::count(names.begin(), names.end(), "SetSpeedFactor") == 1);
        CHECK(std::count(names.begin(), names.end(), "IsRobotNearby") == 1);
    }
    SUBCASE("threatening blocks the robot") {
        auto build = build_reaction_preset(ReactionPreset::Threatening, goals);
        const auto names = bt::leaf_names(*build.tree);
        CHECK(std::count(names.begin(), names.end(), "BlockRobot") == 1);
    }
    SUBCASE("all presets tick on a minimal snapshot") {
        for (ReactionPreset p : {ReactionPreset::Regular, ReactionPreset::Impassive,
                                 ReactionPreset::Surprised, ReactionPreset::Curious,
                                 ReactionPreset::Scared, ReactionPreset::Threatening}) {
            auto build = build_reaction_preset(p, goals);
            auto world = two_agent_world();
            REQUIRE(build.tree);
            CHECK_NOTHROW(world.tick(*build.tree));
        }
    }
}

TEST_SUITE_END();
