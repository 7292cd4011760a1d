#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "socnav/events.hpp"
#include "socnav/world.hpp"

namespace socnav::bt {

enum class Status { Success, Failure, Running };

const char* to_string(Status s);

/// Per-agent key-value store shared by the leaves of one agent's tree.
class Blackboard {
public:
    using Value = std::variant<double, Vec2, std::string, std::int64_t>;

    void set(const std::string& key, Value v) { values_[key] = std::move(v); }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void erase(const std::string& key) { values_.erase(key); }

    template <typename T>
    std::optional<T> get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        if (const T* p = std::get_if<T>(&it->second)) return *p;
        return std::nullopt;
    }

    template <typename T>
    T get_or(const std::string& key, T fallback) const {
        auto v = get<T>(key);
        return v ? *v : fallback;
    }

private:
    std::map<std::string, Value> values_;
};

struct SpeechEntry {
    double t = 0.0;
    int speaker_id = 0;
    std::string message;
};

/// Global append-only speech log. Entries stay forever; condition matching
/// only considers entries younger than the expiry window.
class SpeechChannel {
public:
    static constexpr double kMatchWindow = 5.0;  // seconds

    void say(double t, int speaker_id, std::string message);
    const std::vector<SpeechEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// True iff some entry with age <= kMatchWindow matches the filters.
    bool is_speaking(double now, std::optional<int> speaker,
                     const std::optional<std::string>& message) const;

private:
    std::vector<SpeechEntry> entries_;
};

/// Everything a leaf sees while ticking. `self` is the agent's mutable
/// next-state: its kinematic fields still hold the pre-step values, and
/// leaves write gaze/status/goal bookkeeping into it.
struct TickContext {
    const WorldSnapshot& view;
    AgentState& self;
    ControlIntent& intent;
    Blackboard& blackboard;
    SpeechChannel& speech;
    const ControlIntent& last_applied;  // the intent that drove the previous step
    const EventSink* events = nullptr;

    void emit(const std::string& kind, const std::string& name, const std::string& detail = {}) const {
        if (events && *events) (*events)({view.t, self.id, kind, name, detail});
    }
};

class Node;
using NodePtr = std::unique_ptr<Node>;

enum class NodeKind {
    Sequence,
    ReactiveSequence,
    Fallback,
    Parallel,
    Inverter,
    Repeat,
    Timeout,
    Action,
    Condition
};

const char* to_string(NodeKind k);

class Node {
public:
    explicit Node(NodeKind kind) : kind_(kind) {}
    virtual ~Node() = default;

    NodeKind kind() const { return kind_; }
    bool is_leaf() const { return kind_ == NodeKind::Action || kind_ == NodeKind::Condition; }

    virtual Status tick(TickContext& ctx) = 0;
    /// Forced preemption: clears all memory recursively.
    virtual void halt() = 0;

    virtual std::string display_name() const { return to_string(kind_); }
    virtual std::size_t child_count() const { return 0; }
    virtual Node* child(std::size_t) const { return nullptr; }

private:
    NodeKind kind_;
};

class Composite : public Node {
public:
    using Node::Node;
    void add_child(NodePtr c) { children_.push_back(std::move(c)); }
    std::size_t child_count() const override { return children_.size(); }
    Node* child(std::size_t i) const override { return children_[i].get(); }
    void halt() override {
        for (auto& c : children_) c->halt();
    }

protected:
    std::vector<NodePtr> children_;
};

/// Sequence with memory: resumes at the running child across ticks.
class SequenceNode : public Composite {
public:
    SequenceNode() : Composite(NodeKind::Sequence) {}
    Status tick(TickContext& ctx) override;
    void halt() override;

private:
    std::size_t current_ = 0;
};

/// Re-ticks from the first child every tick; preempted later children are halted.
class ReactiveSequenceNode : public Composite {
public:
    ReactiveSequenceNode() : Composite(NodeKind::ReactiveSequence) {}
    Status tick(TickContext& ctx) override;
};

/// Memory fallback: mirror of SequenceNode with Success/Failure swapped.
class FallbackNode : public Composite {
public:
    FallbackNode() : Composite(NodeKind::Fallback) {}
    Status tick(TickContext& ctx) override;
    void halt() override;

private:
    std::size_t current_ = 0;
};

/// Ticks every child each tick (no latching). Success once the per-tick
/// success count reaches the threshold; failure once enough children have
/// failed this tick to make the threshold unreachable.
class ParallelNode : public Composite {
public:
    explicit ParallelNode(int success_threshold)
        : Composite(NodeKind::Parallel), threshold_(success_threshold) {}
    Status tick(TickContext& ctx) override;
    int threshold() const { return threshold_; }

private:
    int threshold_;
};

class Decorator : public Node {
public:
    Decorator(NodeKind kind, NodePtr child) : Node(kind), child_(std::move(child)) {}
    std::size_t child_count() const override { return 1; }
    Node* child(std::size_t) const override { return child_.get(); }
    void halt() override { child_->halt(); }

protected:
    NodePtr child_;
};

class InverterNode : public Decorator {
public:
    explicit InverterNode(NodePtr child) : Decorator(NodeKind::Inverter, std::move(child)) {}
    Status tick(TickContext& ctx) override;
};

/// Re-enters the child on success, up to n times (or forever). Child failure
/// propagates.
class RepeatNode : public Decorator {
public:
    RepeatNode(NodePtr child, std::optional<int> times)
        : Decorator(NodeKind::Repeat, std::move(child)), times_(times) {}
    Status tick(TickContext& ctx) override;
    void halt() override;
    std::optional<int> times() const { return times_; }

private:
    std::optional<int> times_;  // nullopt = forever
    int count_ = 0;
};

/// Fails and halts the child once it has been RUNNING longer than the limit
/// in simulated time.
class TimeoutNode : public Decorator {
public:
    TimeoutNode(NodePtr child, double seconds)
        : Decorator(NodeKind::Timeout, std::move(child)), limit_(seconds) {}
    Status tick(TickContext& ctx) override;
    void halt() override;
    double limit() const { return limit_; }

private:
    double limit_;
    bool started_ = false;
    double start_t_ = 0.0;
};

/// A leaf behavior implementation (lives in the behaviors module).
class LeafImpl {
public:
    virtual ~LeafImpl() = default;
    virtual Status tick(TickContext& ctx) = 0;
    virtual void halt() {}
};

using ParamMap = std::map<std::string, std::string>;

/// Leaf wrapper: owns the implementation, emits log events, applies the
/// universal `wait` mode of conditions (predicate false -> RUNNING).
class LeafNode : public Node {
public:
    LeafNode(NodeKind kind, std::string name, ParamMap raw_params, std::unique_ptr<LeafImpl> impl,
             bool wait_mode, int uid);
    Status tick(TickContext& ctx) override;
    void halt() override;

    std::string display_name() const override { return name_; }
    const std::string& name() const { return name_; }
    const ParamMap& raw_params() const { return raw_params_; }
    int uid() const { return uid_; }
    bool wait_mode() const { return wait_mode_; }

private:
    std::string name_;
    ParamMap raw_params_;
    std::unique_ptr<LeafImpl> impl_;
    bool wait_mode_;
    int uid_;
    bool fresh_ = true;             // next tick starts an episode (actions)
    bool was_success_ = false;      // condition rising-edge tracking
};

/// Clear all node memory so the next tick behaves like the first. Blackboard
/// and speech channel are untouched.
inline void reset(Node& tree) { tree.halt(); }

/// Collect the leaf names of a tree (duplicates removed, sorted).
std::vector<std::string> leaf_names(const Node& tree);

/// Throws std::invalid_argument when structural invariants are broken
/// (decorator arity, parallel threshold range, leaf children).
void validate_structure(const Node& tree, const std::string& path = "");

}  // namespace socnav::bt
