#include "socnav/bt.hpp"

#include <algorithm>
#include <stdexcept>

namespace socnav::bt {

const char* to_string(Status s) {
    switch (s) {
        case Status::Success: return "success";
        case Status::Failure: return "failure";
        case Status::Running: return "running";
    }
    return "running";
}

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Sequence: return "Sequence";
        case NodeKind::ReactiveSequence: return "ReactiveSequence";
        case NodeKind::Fallback: return "Fallback";
        case NodeKind::Parallel: return "Parallel";
        case NodeKind::Inverter: return "Inverter";
        case NodeKind::Repeat: return "Repeat";
        case NodeKind::Timeout: return "Timeout";
        case NodeKind::Action: return "Action";
        case NodeKind::Condition: return "Condition";
    }
    return "?";
}

void SpeechChannel::say(double t, int speaker_id, std::string message) {
    if (!entries_.empty() && t < entries_.back().t)
        throw std::logic_error("speech channel timestamps must be non-decreasing");
    entries_.push_back({t, speaker_id, std::move(message)});
}

bool SpeechChannel::is_speaking(double now, std::optional<int> speaker,
                                const std::optional<std::string>& message) const {
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
        if (now - it->t > kMatchWindow) break;  // older entries only get older
        if (it->t > now) continue;
        if (speaker && it->speaker_id != *speaker) continue;
        if (message && it->message != *message) continue;
        return true;
    }
    return false;
}

Status SequenceNode::tick(TickContext& ctx) {
    while (current_ < children_.size()) {
        const Status s = children_[current_]->tick(ctx);
        if (s == Status::Running) return Status::Running;
        if (s == Status::Failure) {
            halt();  // traversal over: children start fresh next time
            return Status::Failure;
        }
        ++current_;
    }
    halt();
    return Status::Success;
}

void SequenceNode::halt() {
    current_ = 0;
    Composite::halt();
}

Status ReactiveSequenceNode::tick(TickContext& ctx) {
    for (std::size_t i = 0; i < children_.size(); ++i) {
        const Status s = children_[i]->tick(ctx);
        if (s == Status::Running) {
            for (std::size_t j = i + 1; j < children_.size(); ++j) children_[j]->halt();
            return s;
        }
        if (s == Status::Failure) {
            halt();
            return s;
        }
    }
    halt();
    return Status::Success;
}

Status FallbackNode::tick(TickContext& ctx) {
    while (current_ < children_.size()) {
        const Status s = children_[current_]->tick(ctx);
        if (s == Status::Running) return Status::Running;
        if (s == Status::Success) {
            halt();
            return Status::Success;
        }
        ++current_;
    }
    halt();
    return Status::Failure;
}

void FallbackNode::halt() {
    current_ = 0;
    Composite::halt();
}

Status ParallelNode::tick(TickContext& ctx) {
    int succeeded = 0, failed = 0;
    for (auto& c : children_) {
        const Status s = c->tick(ctx);
        if (s == Status::Success) ++succeeded;
        else if (s == Status::Failure) ++failed;
    }
    const int n = static_cast<int>(children_.size());
    if (succeeded >= threshold_) {
        Composite::halt();
        return Status::Success;
    }
    if (failed > n - threshold_) {
        Composite::halt();
        return Status::Failure;
    }
    return Status::Running;
}

Status InverterNode::tick(TickContext& ctx) {
    const Status s = child_->tick(ctx);
    if (s == Status::Running) return Status::Running;
    child_->halt();
    return s == Status::Success ? Status::Failure : Status::Success;
}

Status RepeatNode::tick(TickContext& ctx) {
    const Status s = child_->tick(ctx);
    if (s == Status::Running) return Status::Running;
    child_->halt();  // every iteration starts a fresh episode
    if (s == Status::Failure) {
        count_ = 0;
        return Status::Failure;
    }
    ++count_;
    if (times_ && count_ >= *times_) {
        count_ = 0;
        return Status::Success;
    }
    return Status::Running;
}

void RepeatNode::halt() {
    count_ = 0;
    Decorator::halt();
}

Status TimeoutNode::tick(TickContext& ctx) {
    if (!started_) {
        started_ = true;
        start_t_ = ctx.view.t;
    }
    const Status s = child_->tick(ctx);
    if (s != Status::Running) {
        child_->halt();
        started_ = false;
        return s;
    }
    if (ctx.view.t - start_t_ > limit_ + 1e-9) {
        child_->halt();
        started_ = false;
        return Status::Failure;
    }
    return Status::Running;
}

void TimeoutNode::halt() {
    started_ = false;
    Decorator::halt();
}

LeafNode::LeafNode(NodeKind kind, std::string name, ParamMap raw_params,
                   std::unique_ptr<LeafImpl> impl, bool wait_mode, int uid)
    : Node(kind), name_(std::move(name)), raw_params_(std::move(raw_params)),
      impl_(std::move(impl)), wait_mode_(wait_mode), uid_(uid) {}

Status LeafNode::tick(TickContext& ctx) {
    const bool is_condition = kind() == NodeKind::Condition;
    if (fresh_ && !is_condition) ctx.emit("action_start", name_);
    fresh_ = false;

    Status s = impl_->tick(ctx);
    if (is_condition) {
        if (s == Status::Success) {
            if (!was_success_) ctx.emit("condition_success", name_);
            was_success_ = true;
        } else {
            was_success_ = false;
            if (wait_mode_ && s == Status::Failure) s = Status::Running;
        }
        return s;
    }
    if (s != Status::Running) {
        ctx.emit("action_end", name_, to_string(s));
        // State survives a terminal tick (latched leaves re-ticked under a
        // Parallel); only a halt from an ancestor re-arms the episode.
        fresh_ = true;
    }
    return s;
}

void LeafNode::halt() {
    impl_->halt();
    fresh_ = true;
    was_success_ = false;
}

namespace {

void collect_leaves(const Node& n, std::vector<std::string>& out) {
    if (n.is_leaf()) {
        out.push_back(n.display_name());
        return;
    }
    for (std::size_t i = 0; i < n.child_count(); ++i) collect_leaves(*n.child(i), out);
}

}  // namespace

std::vector<std::string> leaf_names(const Node& tree) {
    std::vector<std::string> names;
    collect_leaves(tree, names);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

void validate_structure(const Node& tree, const std::string& path) {
    const std::string here = path.empty() ? "/" + tree.display_name() : path + "/" + tree.display_name();
    switch (tree.kind()) {
        case NodeKind::Inverter:
        case NodeKind::Repeat:
        case NodeKind::Timeout:
            if (tree.child_count() != 1)
                throw std::invalid_argument("decorator must have exactly one child at " + here);
            break;
        case NodeKind::Parallel: {
            const auto& p = static_cast<const ParallelNode&>(tree);
            const int n = static_cast<int>(tree.child_count());
            if (n == 0 || p.threshold() < 1 || p.threshold() > n)
                throw std::invalid_argument("parallel threshold out of range at " + here);
            break;
        }
        case NodeKind::Action:
        case NodeKind::Condition:
            if (tree.child_count() != 0)
                throw std::invalid_argument("leaf node cannot have children at " + here);
            break;
        default:
            break;
    }
    for (std::size_t i = 0; i < tree.child_count(); ++i) validate_structure(*tree.child(i), here);
}

}  // namespace socnav::bt
