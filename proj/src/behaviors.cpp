#include "socnav/behaviors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "socnav/parse_util.hpp"

namespace socnav::behaviors {

using bt::LeafImpl;
using bt::ParamMap;
using bt::Status;
using bt::TickContext;

const char* to_string(ParamType t) {
    switch (t) {
        case ParamType::Number: return "number";
        case ParamType::Point: return "point";
        case ParamType::String: return "string";
        case ParamType::Id: return "id";
        case ParamType::IdList: return "id_list";
        case ParamType::Bool: return "bool";
    }
    return "?";
}

namespace {

double num(const ParamMap& p, const std::string& key) {
    return parse_double(p.at(key), "parameter '" + key + "'");
}

int id_of(const ParamMap& p, const std::string& key) {
    return static_cast<int>(parse_int(p.at(key), "parameter '" + key + "'"));
}

Vec2 point(const ParamMap& p, const std::string& key) {
    return parse_point(p.at(key), "parameter '" + key + "'");
}

bool visible_from(const TickContext& ctx, const Vec2& observer, const Pose2D& observer_pose,
                  const Vec2& target, double range, double fov) {
    if ((target - observer).norm() > range) return false;
    if (!in_fov(observer_pose, target, fov)) return false;
    if (ctx.view.grid && ctx.view.grid->in_bounds(observer) && ctx.view.grid->in_bounds(target))
        return line_of_sight(*ctx.view.grid, observer, target);
    return true;
}

bool robot_visible(const TickContext& ctx, double range, double fov) {
    return visible_from(ctx, ctx.self.position(), ctx.self.pose, ctx.view.robot.position(), range, fov);
}

constexpr double kTimerEps = 1e-9;

// ---------------------------------------------------------------- actions

class GoToImpl : public LeafImpl {
public:
    explicit GoToImpl(const ParamMap& p) : goal_(point(p, "goal")), tolerance_(num(p, "tolerance")) {}

    Status tick(TickContext& ctx) override {
        const Vec2 pos = ctx.self.position();
        const double dist = (goal_ - pos).norm();
        ctx.intent.goal = goal_;
        if (dist <= tolerance_) {
            advance_goal_index(ctx);
            return Status::Success;
        }
        ctx.self.behavior_status = BehaviorStatus::Navigating;

        // Stall detection: fail when the distance to the goal has not improved
        // by more than 0.05 m over 10 s of actual navigation. The clock is
        // frozen while another leaf held the agent stopped.
        if (!started_) {
            started_ = true;
            best_dist_ = dist;
            last_improve_t_ = ctx.view.t;
        } else if (ctx.last_applied.stop || ctx.last_applied.speed_factor == 0.0) {
            last_improve_t_ = ctx.view.t;
        } else if (best_dist_ - dist > 0.05) {
            best_dist_ = dist;
            last_improve_t_ = ctx.view.t;
        } else if (ctx.view.t - last_improve_t_ > 10.0) {
            return Status::Failure;
        }
        return Status::Running;
    }

    void halt() override { started_ = false; }

private:
    void advance_goal_index(TickContext& ctx) const {
        auto& self = ctx.self;
        if (self.goals.empty() || self.current_goal_index >= self.goals.size()) return;
        const Vec2& expected = self.goals[self.current_goal_index];
        if ((expected - goal_).norm() < 1e-9)
            self.current_goal_index = (self.current_goal_index + 1) % self.goals.size();
    }

    Vec2 goal_;
    double tolerance_;
    bool started_ = false;
    double best_dist_ = 0.0;
    double last_improve_t_ = 0.0;
};

class LookAtPointImpl : public LeafImpl {
public:
    explicit LookAtPointImpl(const ParamMap& p) : target_(point(p, "point")) {}
    Status tick(TickContext& ctx) override {
        ctx.self.gaze_target = target_;
        return Status::Success;
    }

private:
    Vec2 target_;
};

class LookAtAgentImpl : public LeafImpl {
public:
    explicit LookAtAgentImpl(const ParamMap& p) : agent_(id_of(p, "agent")) {}
    Status tick(TickContext& ctx) override {
        const AgentState* other = ctx.view.find_agent(agent_);
        if (!other) return Status::Failure;
        ctx.self.gaze_target = other->position();
        return Status::Success;
    }

private:
    int agent_;
};

class LookAtRobotImpl : public LeafImpl {
public:
    explicit LookAtRobotImpl(const ParamMap&) {}
    Status tick(TickContext& ctx) override {
        ctx.self.gaze_target = ctx.view.robot.position();
        return Status::Success;
    }
};

class StopAndWaitTimerImpl : public LeafImpl {
public:
    explicit StopAndWaitTimerImpl(const ParamMap& p) : duration_(num(p, "duration")) {
        if (duration_ <= 0.0) throw std::invalid_argument("StopAndWaitTimer: duration must be > 0");
    }

    Status tick(TickContext& ctx) override {
        if (!started_) {
            started_ = true;
            start_t_ = ctx.view.t;
        }
        ctx.intent.stop = true;
        ctx.self.behavior_status = BehaviorStatus::Waiting;
        return ctx.view.t - start_t_ >= duration_ - kTimerEps ? Status::Success : Status::Running;
    }

    void halt() override { started_ = false; }

private:
    double duration_;
    bool started_ = false;
    double start_t_ = 0.0;
};

class ApproachRobotImpl : public LeafImpl {
public:
    explicit ApproachRobotImpl(const ParamMap& p)
        : stop_distance_(num(p, "stop_distance")), observe_time_(num(p, "observe_time")) {}

    Status tick(TickContext& ctx) override {
        const Vec2 robot = ctx.view.robot.position();
        const Vec2 pos = ctx.self.position();
        ctx.self.gaze_target = robot;
        if (!started_) {
            started_ = true;
            start_t_ = ctx.view.t;
        }
        if (!observing_) {
            const double dist = (pos - robot).norm();
            if (dist <= stop_distance_ * 1.1) {
                observing_ = true;
                observe_start_ = ctx.view.t;
            } else {
                if (ctx.view.t - start_t_ > 20.0) return Status::Failure;
                ctx.intent.goal = robot + (pos - robot).normalized() * stop_distance_;
                ctx.self.behavior_status = BehaviorStatus::Navigating;
                return Status::Running;
            }
        }
        ctx.intent.stop = true;
        ctx.self.behavior_status = BehaviorStatus::Interacting;
        return ctx.view.t - observe_start_ >= observe_time_ - kTimerEps ? Status::Success
                                                                        : Status::Running;
    }

    void halt() override {
        started_ = false;
        observing_ = false;
    }

private:
    double stop_distance_;
    double observe_time_;
    bool started_ = false;
    bool observing_ = false;
    double start_t_ = 0.0;
    double observe_start_ = 0.0;
};

class ConversationFormationImpl : public LeafImpl {
public:
    explicit ConversationFormationImpl(const ParamMap& p)
        : partners_(parse_id_list(p.at("partners"), "parameter 'partners'")),
          radius_(num(p, "circle_radius")) {}

    Status tick(TickContext& ctx) override {
        std::vector<int> ids = partners_;
        ids.push_back(ctx.self.id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (int id : ids)
            if (id != ctx.self.id && !ctx.view.find_agent(id)) return Status::Failure;

        if (!center_set_) {
            Vec2 c = ctx.self.position();
            for (int id : ids)
                if (id != ctx.self.id) c += ctx.view.find_agent(id)->position();
            center_ = c / static_cast<double>(ids.size());
            center_set_ = true;
        }

        // Slot on the circle, equal spacing, ordered by ascending agent id.
        const auto it = std::find(ids.begin(), ids.end(), ctx.self.id);
        const std::size_t k = static_cast<std::size_t>(it - ids.begin());
        const double angle = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(ids.size());
        const Vec2 slot = center_ + radius_ * Vec2{std::cos(angle), std::sin(angle)};

        ctx.intent.goal = slot;
        ctx.self.gaze_target = center_;
        ctx.self.behavior_status = BehaviorStatus::Interacting;
        if (formed_) return Status::Success;  // latched: re-ticks keep holding the formation

        if ((ctx.self.position() - slot).norm() > 0.2) return Status::Running;
        const double yaw_err =
            std::abs(wrap_angle(bearing(ctx.self.position(), center_) - ctx.self.pose.yaw));
        if (yaw_err > 0.3) return Status::Running;
        formed_ = true;
        return Status::Success;
    }

    void halt() override {
        center_set_ = false;
        formed_ = false;
    }

private:
    std::vector<int> partners_;
    double radius_;
    bool center_set_ = false;
    bool formed_ = false;
    Vec2 center_;
};

class FollowAgentImpl : public LeafImpl {
public:
    explicit FollowAgentImpl(const ParamMap& p)
        : target_(id_of(p, "target")), follow_distance_(num(p, "follow_distance")) {}

    Status tick(TickContext& ctx) override {
        const AgentState* target = ctx.view.find_agent(target_);
        if (!target) return seen_ ? Status::Success : Status::Failure;  // despawned vs unknown
        seen_ = true;
        const Vec2 heading = target->velocity.norm() > 0.05 ? target->velocity.normalized()
                                                            : heading_vector(target->pose.yaw);
        ctx.intent.goal = target->position() - heading * follow_distance_;
        ctx.self.gaze_target = target->position();
        ctx.self.behavior_status = BehaviorStatus::Navigating;
        return Status::Running;
    }

    void halt() override { seen_ = false; }

private:
    int target_;
    double follow_distance_;
    bool seen_ = false;
};

class SaySomethingImpl : public LeafImpl {
public:
    explicit SaySomethingImpl(const ParamMap& p) : message_(p.at("message")) {}
    Status tick(TickContext& ctx) override {
        ctx.speech.say(ctx.view.t, ctx.self.id, message_);
        ctx.emit("speech", "SaySomething", message_);
        ctx.self.behavior_status = BehaviorStatus::Interacting;
        return Status::Success;
    }

private:
    std::string message_;
};

class BlockRobotImpl : public LeafImpl {
public:
    explicit BlockRobotImpl(const ParamMap& p)
        : lead_(num(p, "lead_distance")), give_up_(num(p, "give_up_range")) {}

    Status tick(TickContext& ctx) override {
        const RobotState& robot = ctx.view.robot;
        if ((ctx.self.position() - robot.position()).norm() > give_up_) return Status::Failure;
        ctx.intent.goal = robot.position() + heading_vector(robot.pose.yaw) * lead_;
        ctx.self.gaze_target = robot.position();
        ctx.self.behavior_status = BehaviorStatus::Navigating;
        return Status::Running;
    }

private:
    double lead_;
    double give_up_;
};

class FleeFromRobotImpl : public LeafImpl {
public:
    explicit FleeFromRobotImpl(const ParamMap& p)
        : safe_distance_(num(p, "safe_distance")), speed_factor_(num(p, "speed_factor")) {}

    Status tick(TickContext& ctx) override {
        const Vec2 robot = ctx.view.robot.position();
        const Vec2 pos = ctx.self.position();
        if ((pos - robot).norm() >= safe_distance_) return Status::Success;
        Vec2 away = (pos - robot).normalized();
        if (away == Vec2{}) away = heading_vector(ctx.self.pose.yaw);
        ctx.intent.goal = pos + away * 2.0;
        ctx.intent.speed_factor *= speed_factor_;
        ctx.self.behavior_status = BehaviorStatus::Navigating;
        return Status::Running;
    }

private:
    double safe_distance_;
    double speed_factor_;
};

class SetSpeedFactorImpl : public LeafImpl {
public:
    explicit SetSpeedFactorImpl(const ParamMap& p) : factor_(num(p, "factor")) {}
    Status tick(TickContext& ctx) override {
        ctx.intent.speed_factor *= factor_;
        return Status::Success;
    }

private:
    double factor_;
};

// -------------------------------------------------------------- conditions

class IsAtPositionImpl : public LeafImpl {
public:
    explicit IsAtPositionImpl(const ParamMap& p)
        : target_(point(p, "point")), tolerance_(num(p, "tolerance")) {
        if (auto it = p.find("agent"); it != p.end() && !it->second.empty())
            agent_ = static_cast<int>(parse_int(it->second, "parameter 'agent'"));
    }

    Status tick(TickContext& ctx) override {
        Vec2 pos;
        if (agent_ && *agent_ != ctx.self.id) {
            const AgentState* a = ctx.view.find_agent(*agent_);
            if (!a) return Status::Failure;
            pos = a->position();
        } else {
            pos = ctx.self.position();
        }
        return (pos - target_).norm() <= tolerance_ ? Status::Success : Status::Failure;
    }

private:
    std::optional<int> agent_;  // nullopt = the ticking agent itself
    Vec2 target_;
    double tolerance_;
};

class IsAgentNearbyImpl : public LeafImpl {
public:
    explicit IsAgentNearbyImpl(const ParamMap& p) : agent_(id_of(p, "agent")), range_(num(p, "range")) {}
    Status tick(TickContext& ctx) override {
        const AgentState* a = ctx.view.find_agent(agent_);
        if (!a) return Status::Failure;
        return (a->position() - ctx.self.position()).norm() <= range_ ? Status::Success
                                                                      : Status::Failure;
    }

private:
    int agent_;
    double range_;
};

class IsRobotNearbyImpl : public LeafImpl {
public:
    explicit IsRobotNearbyImpl(const ParamMap& p) : range_(num(p, "range")) {}
    Status tick(TickContext& ctx) override {
        return (ctx.view.robot.position() - ctx.self.position()).norm() <= range_
                   ? Status::Success
                   : Status::Failure;
    }

private:
    double range_;
};

class IsRobotVisibleImpl : public LeafImpl {
public:
    explicit IsRobotVisibleImpl(const ParamMap& p) : range_(num(p, "range")), fov_(num(p, "fov")) {}
    Status tick(TickContext& ctx) override {
        return robot_visible(ctx, range_, fov_) ? Status::Success : Status::Failure;
    }

private:
    double range_;
    double fov_;
};

class IsSpeakingImpl : public LeafImpl {
public:
    explicit IsSpeakingImpl(const ParamMap& p) {
        if (auto it = p.find("speaker"); it != p.end() && !it->second.empty())
            speaker_ = static_cast<int>(parse_int(it->second, "parameter 'speaker'"));
        if (auto it = p.find("message"); it != p.end()) message_ = it->second;
    }

    Status tick(TickContext& ctx) override {
        return ctx.speech.is_speaking(ctx.view.t, speaker_, message_) ? Status::Success
                                                                      : Status::Failure;
    }

private:
    std::optional<int> speaker_;
    std::optional<std::string> message_;
};

class IsLookingAtMeImpl : public LeafImpl {
public:
    explicit IsLookingAtMeImpl(const ParamMap& p) : observer_(id_of(p, "observer")), cone_(num(p, "cone")) {}

    Status tick(TickContext& ctx) override {
        const AgentState* obs = ctx.view.find_agent(observer_);
        if (!obs) return Status::Failure;
        const Vec2 me = ctx.self.position();
        Vec2 gaze_dir;
        if (obs->gaze_target)
            gaze_dir = (*obs->gaze_target - obs->position()).normalized();
        if (gaze_dir == Vec2{}) gaze_dir = heading_vector(obs->pose.yaw);
        const Vec2 to_me = me - obs->position();
        if (to_me == Vec2{}) return Status::Success;
        const double off = std::abs(
            wrap_angle(std::atan2(to_me.y, to_me.x) - std::atan2(gaze_dir.y, gaze_dir.x)));
        if (off > cone_ / 2.0) return Status::Failure;
        if (ctx.view.grid && ctx.view.grid->in_bounds(obs->position()) && ctx.view.grid->in_bounds(me) &&
            !line_of_sight(*ctx.view.grid, obs->position(), me))
            return Status::Failure;
        return Status::Success;
    }

private:
    int observer_;
    double cone_;
};

/// Simulated-clock timer. The start time lives in the blackboard so it
/// survives node halts; it measures from the first evaluation in the run.
class TimeExpiredImpl : public LeafImpl {
public:
    TimeExpiredImpl(const ParamMap& p, int uid)
        : duration_(num(p, "duration")), key_("_time_expired_" + std::to_string(uid)) {
        if (duration_ <= 0.0) throw std::invalid_argument("TimeExpired: duration must be > 0");
    }

    Status tick(TickContext& ctx) override {
        double start = ctx.blackboard.get_or<double>(key_, ctx.view.t);
        if (!ctx.blackboard.has(key_)) ctx.blackboard.set(key_, start);
        return ctx.view.t - start >= duration_ - kTimerEps ? Status::Success : Status::Failure;
    }

private:
    double duration_;
    std::string key_;
};

/// Rising edge of robot visibility, at most one success per contiguous
/// visibility episode. The armed flag lives in the blackboard so tree
/// restarts do not retrigger it.
class IsNewRobotEncounterImpl : public LeafImpl {
public:
    IsNewRobotEncounterImpl(const ParamMap& p, int uid)
        : range_(num(p, "range")), fov_(num(p, "fov")), key_("_encounter_armed_" + std::to_string(uid)) {}

    Status tick(TickContext& ctx) override {
        const bool visible = robot_visible(ctx, range_, fov_);
        const bool armed = ctx.blackboard.get_or<std::int64_t>(key_, 1) != 0;
        if (!visible) {
            ctx.blackboard.set(key_, std::int64_t{1});
            return Status::Failure;
        }
        if (!armed) return Status::Failure;
        ctx.blackboard.set(key_, std::int64_t{0});
        return Status::Success;
    }

private:
    double range_;
    double fov_;
    std::string key_;
};

// ---------------------------------------------------------------- registry

constexpr double kDefaultHumanFov = kPi;  // +-90 deg

template <typename T>
std::function<std::unique_ptr<LeafImpl>(const ParamMap&, int)> simple() {
    return [](const ParamMap& p, int) { return std::make_unique<T>(p); };
}

template <typename T>
std::function<std::unique_ptr<LeafImpl>(const ParamMap&, int)> with_uid() {
    return [](const ParamMap& p, int uid) { return std::make_unique<T>(p, uid); };
}

}  // namespace

NodeRegistry::NodeRegistry() {
    const std::string pi_s = num_to_string(kDefaultHumanFov);
    leaves_ = {
        {"GoTo", false,
         {{"goal", ParamType::Point, true, ""}, {"tolerance", ParamType::Number, false, "0.3"}},
         simple<GoToImpl>(),
         "navigate straight to a point; fails after a 10 s stall"},
        {"LookAtPoint", false, {{"point", ParamType::Point, true, ""}}, simple<LookAtPointImpl>(),
         "set the gaze target to a fixed point"},
        {"LookAtAgent", false, {{"agent", ParamType::Id, true, ""}}, simple<LookAtAgentImpl>(),
         "set the gaze target to another agent's position"},
        {"LookAtRobot", false, {}, simple<LookAtRobotImpl>(), "set the gaze target to the robot"},
        {"StopAndWaitTimer", false, {{"duration", ParamType::Number, true, ""}},
         simple<StopAndWaitTimerImpl>(), "brake to rest and wait the given simulated seconds"},
        {"ApproachRobot", false,
         {{"stop_distance", ParamType::Number, false, "1.5"},
          {"observe_time", ParamType::Number, false, "3"}},
         simple<ApproachRobotImpl>(), "walk up to the robot, observe it, then succeed"},
        {"ConversationFormation", false,
         {{"partners", ParamType::IdList, true, ""},
          {"circle_radius", ParamType::Number, false, "0.9"}},
         simple<ConversationFormationImpl>(),
         "take a slot on a talking circle with the partners and face its center"},
        {"FollowAgent", false,
         {{"target", ParamType::Id, true, ""}, {"follow_distance", ParamType::Number, false, "1.2"}},
         simple<FollowAgentImpl>(), "trail another agent at the given distance"},
        {"SaySomething", false, {{"message", ParamType::String, true, ""}}, simple<SaySomethingImpl>(),
         "append a message to the shared speech channel"},
        {"BlockRobot", false,
         {{"lead_distance", ParamType::Number, false, "1"},
          {"give_up_range", ParamType::Number, false, "7"}},
         simple<BlockRobotImpl>(), "stand in front of the robot's heading, facing it"},
        {"FleeFromRobot", false,
         {{"safe_distance", ParamType::Number, false, "5"},
          {"speed_factor", ParamType::Number, false, "1.5"}},
         simple<FleeFromRobotImpl>(), "hurry directly away from the robot until clear"},
        {"SetSpeedFactor", false, {{"factor", ParamType::Number, true, ""}},
         simple<SetSpeedFactorImpl>(), "scale the desired speed for this tick"},

        {"IsAtPosition", true,
         {{"agent", ParamType::Id, false, ""},
          {"point", ParamType::Point, true, ""},
          {"tolerance", ParamType::Number, false, "0.5"}},
         simple<IsAtPositionImpl>(), "an agent (default: self) is within tolerance of a point"},
        {"IsAgentNearby", true,
         {{"agent", ParamType::Id, true, ""}, {"range", ParamType::Number, false, "3"}},
         simple<IsAgentNearbyImpl>(), "another agent is within range"},
        {"IsRobotNearby", true, {{"range", ParamType::Number, false, "3"}}, simple<IsRobotNearbyImpl>(),
         "the robot is within range"},
        {"IsRobotVisible", true,
         {{"range", ParamType::Number, false, "5"}, {"fov", ParamType::Number, false, pi_s}},
         simple<IsRobotVisibleImpl>(), "the robot is within range, in view, and unoccluded"},
        {"IsSpeaking", true,
         {{"speaker", ParamType::Id, false, ""}, {"message", ParamType::String, false, ""}},
         simple<IsSpeakingImpl>(), "a matching speech entry younger than 5 s exists"},
        {"IsLookingAtMe", true,
         {{"observer", ParamType::Id, true, ""}, {"cone", ParamType::Number, false, num_to_string(kPi / 3.0)}},
         simple<IsLookingAtMeImpl>(), "the observer's gaze points at this agent, unoccluded"},
        {"TimeExpired", true, {{"duration", ParamType::Number, true, ""}}, with_uid<TimeExpiredImpl>(),
         "the simulated clock has advanced past duration since first evaluation"},
        {"IsNewRobotEncounter", true,
         {{"range", ParamType::Number, false, "5"}, {"fov", ParamType::Number, false, pi_s}},
         with_uid<IsNewRobotEncounterImpl>(),
         "fires once per contiguous robot-visibility episode"},
    };
    std::sort(leaves_.begin(), leaves_.end(),
              [](const LeafDesc& a, const LeafDesc& b) { return a.name < b.name; });

    // Alternate spellings kept for compatibility with existing trees.
    aliases_ = {
        {"LookingAtPoint", "LookAtPoint"}, {"LookingAtAgent", "LookAtAgent"},
        {"LookingAtRobot", "LookAtRobot"}, {"isSpeaking", "IsSpeaking"},
        {"isAtPosition", "IsAtPosition"},  {"isLookingAtMe", "IsLookingAtMe"},
        {"isRobotVisible", "IsRobotVisible"},
    };
}

const NodeRegistry& NodeRegistry::instance() {
    static NodeRegistry registry;
    return registry;
}

std::string NodeRegistry::resolve(const std::string& name) const {
    auto alias = aliases_.find(name);
    const std::string& canonical = alias != aliases_.end() ? alias->second : name;
    for (const auto& leaf : leaves_)
        if (leaf.name == canonical) return canonical;
    return {};
}

const LeafDesc* NodeRegistry::find(const std::string& name) const {
    const std::string canonical = resolve(name);
    if (canonical.empty()) return nullptr;
    for (const auto& leaf : leaves_)
        if (leaf.name == canonical) return &leaf;
    return nullptr;
}

std::vector<const LeafDesc*> NodeRegistry::list() const {
    std::vector<const LeafDesc*> out;
    out.reserve(leaves_.size());
    for (const auto& leaf : leaves_) out.push_back(&leaf);
    return out;
}

bt::NodePtr NodeRegistry::make_leaf(const std::string& name, const bt::ParamMap& params,
                                    int uid) const {
    const LeafDesc* desc = find(name);
    if (!desc) throw std::invalid_argument("unknown BT node '" + name + "'");

    bool wait_mode = false;
    ParamMap filled;
    for (const auto& [key, value] : params) {
        if (key == "wait" && desc->condition) {
            wait_mode = parse_bool(value, "node '" + name + "' parameter 'wait'");
            continue;
        }
        const bool known = std::any_of(desc->params.begin(), desc->params.end(),
                                       [&](const ParamSpec& s) { return s.name == key; });
        if (!known)
            throw std::invalid_argument("unknown parameter '" + key + "' for node '" + name + "'");
        filled[key] = value;
    }
    for (const ParamSpec& spec : desc->params) {
        if (filled.count(spec.name)) continue;
        if (spec.required)
            throw std::invalid_argument("node '" + name + "' missing required parameter '" +
                                        spec.name + "'");
        if (!spec.default_value.empty()) filled[spec.name] = spec.default_value;
    }

    auto impl = desc->make(filled, uid);  // typed parsing happens here; throws on bad values
    return std::make_unique<bt::LeafNode>(desc->condition ? bt::NodeKind::Condition
                                                          : bt::NodeKind::Action,
                                          desc->name, params, std::move(impl), wait_mode, uid);
}

// ----------------------------------------------------------------- presets

const char* to_string(ReactionPreset p) {
    switch (p) {
        case ReactionPreset::Regular: return "regular";
        case ReactionPreset::Impassive: return "impassive";
        case ReactionPreset::Surprised: return "surprised";
        case ReactionPreset::Curious: return "curious";
        case ReactionPreset::Scared: return "scared";
        case ReactionPreset::Threatening: return "threatening";
    }
    return "regular";
}

std::optional<ReactionPreset> reaction_preset_from_string(const std::string& s) {
    for (ReactionPreset p : {ReactionPreset::Regular, ReactionPreset::Impassive,
                             ReactionPreset::Surprised, ReactionPreset::Curious,
                             ReactionPreset::Scared, ReactionPreset::Threatening})
        if (s == to_string(p)) return p;
    return std::nullopt;
}

namespace {

bt::NodePtr leaf(int& uid, const std::string& name, bt::ParamMap params = {}) {
    return NodeRegistry::instance().make_leaf(name, params, uid++);
}

/// Endless goal cycle; with no goals it idles forever instead.
bt::NodePtr goal_loop(int& uid, const std::vector<Vec2>& goals) {
    auto seq = std::make_unique<bt::SequenceNode>();
    for (const Vec2& g : goals) seq->add_child(leaf(uid, "GoTo", {{"goal", point_to_string(g)}}));
    return std::make_unique<bt::RepeatNode>(std::move(seq), std::nullopt);
}

}  // namespace

PresetBuild build_reaction_preset(ReactionPreset kind, const std::vector<Vec2>& goals) {
    int uid = 0;
    PresetBuild out;
    out.robot_mode = sfm::RobotMode::as_pedestrian();

    switch (kind) {
        case ReactionPreset::Regular:
            out.tree = goal_loop(uid, goals);
            break;
        case ReactionPreset::Impassive:
            out.robot_mode = sfm::RobotMode::ignored();
            out.tree = goal_loop(uid, goals);
            break;
        case ReactionPreset::Surprised: {
            // Stop and stare in 1 s slices while the robot stays visible.
            auto stare = std::make_unique<bt::SequenceNode>();
            stare->add_child(leaf(uid, "IsRobotVisible", {{"range", "4"}}));
            stare->add_child(leaf(uid, "LookAtRobot"));
            stare->add_child(leaf(uid, "StopAndWaitTimer", {{"duration", "1"}}));
            auto parallel = std::make_unique<bt::ParallelNode>(1);
            parallel->add_child(goal_loop(uid, goals));
            parallel->add_child(std::make_unique<bt::RepeatNode>(std::move(stare), std::nullopt));
            out.tree = std::move(parallel);
            break;
        }
        case ReactionPreset::Curious: {
            // Approach once per encounter; the goal loop is suspended while the
            // reaction runs and resumes (from the first goal) afterwards.
            auto react = std::make_unique<bt::SequenceNode>();
            react->add_child(leaf(uid, "IsNewRobotEncounter", {{"range", "5"}}));
            react->add_child(
                leaf(uid, "ApproachRobot", {{"stop_distance", "1.5"}, {"observe_time", "4"}}));
            auto root = std::make_unique<bt::ReactiveSequenceNode>();
            root->add_child(std::make_unique<bt::InverterNode>(std::move(react)));
            root->add_child(goal_loop(uid, goals));
            out.tree = std::move(root);
            break;
        }
        case ReactionPreset::Scared: {
            out.robot_mode = sfm::RobotMode::custom_factor(2.5);
            auto hurry = std::make_unique<bt::SequenceNode>();
            hurry->add_child(leaf(uid, "IsRobotNearby", {{"range", "3"}}));
            hurry->add_child(leaf(uid, "SetSpeedFactor", {{"factor", "1.25"}}));
            auto parallel = std::make_unique<bt::ParallelNode>(1);
            parallel->add_child(goal_loop(uid, goals));
            parallel->add_child(std::make_unique<bt::RepeatNode>(std::move(hurry), std::nullopt));
            out.tree = std::move(parallel);
            break;
        }
        case ReactionPreset::Threatening: {
            auto block = std::make_unique<bt::SequenceNode>();
            block->add_child(leaf(uid, "IsRobotVisible", {{"range", "5"}}));
            block->add_child(leaf(uid, "BlockRobot"));
            auto parallel = std::make_unique<bt::ParallelNode>(1);
            parallel->add_child(goal_loop(uid, goals));
            parallel->add_child(std::make_unique<bt::RepeatNode>(std::move(block), std::nullopt));
            out.tree = std::move(parallel);
            break;
        }
    }
    return out;
}

}  // namespace socnav::behaviors
