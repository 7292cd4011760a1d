#include <doctest.h>

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "socnav/bt.hpp"
#include "support/helpers.hpp"

using namespace socnav;
using bt::Status;

namespace {

/// Leaf returning a scripted status, counting its ticks.
class StubLeaf : public bt::LeafImpl {
public:
    explicit StubLeaf(Status status) : status_(status) {}
    Status tick(bt::TickContext&) override {
        ++ticks;
        return status_;
    }
    void set(Status s) { status_ = s; }
    int ticks = 0;

private:
    Status status_;
};

struct LeafHandle {
    StubLeaf* impl;
    bt::NodePtr node;
};

LeafHandle stub(Status s, bool condition = false) {
    auto impl = std::make_unique<StubLeaf>(s);
    StubLeaf* raw = impl.get();
    auto node = std::make_unique<bt::LeafNode>(
        condition ? bt::NodeKind::Condition : bt::NodeKind::Action, "Stub", bt::ParamMap{},
        std::move(impl), false, 0);
    return {raw, std::move(node)};
}

// Independent truth-table oracles, re-derived from the contracts.
Status oracle_sequence(const std::vector<Status>& kids) {
    for (Status s : kids)
        if (s != Status::Success) return s;
    return Status::Success;
}

Status oracle_fallback(const std::vector<Status>& kids) {
    for (Status s : kids)
        if (s != Status::Failure) return s;
    return Status::Failure;
}

Status oracle_parallel(const std::vector<Status>& kids, int threshold) {
    int success = 0, failure = 0;
    for (Status s : kids) {
        if (s == Status::Success) ++success;
        if (s == Status::Failure) ++failure;
    }
    if (success >= threshold) return Status::Success;
    if (failure > static_cast<int>(kids.size()) - threshold) return Status::Failure;
    return Status::Running;
}

void for_each_combo(int n, const std::function<void(const std::vector<Status>&)>& fn) {
    const std::array<Status, 3> all{Status::Success, Status::Failure, Status::Running};
    std::vector<Status> combo(static_cast<std::size_t>(n));
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            fn(combo);
            return;
        }
        for (Status s : all) {
            combo[static_cast<std::size_t>(i)] = s;
            rec(i + 1);
        }
    };
    rec(0);
}

}  // namespace

TEST_SUITE_BEGIN("bt");

TEST_CASE("sequence, fallback and parallel truth tables, exhaustive to 3 children") {
    test::TickWorld world;
    for (int n = 1; n <= 3; ++n) {
        for_each_combo(n, [&](const std::vector<Status>& combo) {
            {
                auto seq = std::make_unique<bt::SequenceNode>();
                for (Status s : combo) seq->add_child(stub(s).node);
                CHECK(world.tick(*seq) == oracle_sequence(combo));
            }
            {
                auto fb = std::make_unique<bt::FallbackNode>();
                for (Status s : combo) fb->add_child(stub(s).node);
                CHECK(world.tick(*fb) == oracle_fallback(combo));
            }
            for (int threshold = 1; threshold <= n; ++threshold) {
                auto par = std::make_unique<bt::ParallelNode>(threshold);
                for (Status s : combo) par->add_child(stub(s).node);
                CHECK(world.tick(*par) == oracle_parallel(combo, threshold));
            }
        });
    }
}

TEST_CASE("inverter truth table") {
    test::TickWorld world;
    for (Status s : {Status::Success, Status::Failure, Status::Running}) {
        bt::InverterNode inv(stub(s).node);
        const Status expected = s == Status::Running
                                    ? Status::Running
                                    : (s == Status::Success ? Status::Failure : Status::Success);
        CHECK(world.tick(inv) == expected);
    }
}

TEST_CASE("memory sequence resumes at the running child") {
    test::TickWorld world;
    auto first = stub(Status::Success);
    auto second = stub(Status::Running);
    auto seq = std::make_unique<bt::SequenceNode>();
    StubLeaf* first_impl = first.impl;
    StubLeaf* second_impl = second.impl;
    seq->add_child(std::move(first.node));
    seq->add_child(std::move(second.node));

    CHECK(world.tick(*seq) == Status::Running);
    CHECK(world.tick(*seq) == Status::Running);
    CHECK(world.tick(*seq) == Status::Running);
    CHECK(first_impl->ticks == 1);  // ticked exactly once per traversal cycle
    CHECK(second_impl->ticks == 3);

    second_impl->set(Status::Success);
    CHECK(world.tick(*seq) == Status::Success);
    CHECK(first_impl->ticks == 1);

    // traversal complete: the next tick starts from the first child again
    second_impl->set(Status::Running);
    CHECK(world.tick(*seq) == Status::Running);
    CHECK(first_impl->ticks == 2);
}

TEST_CASE("reactive sequence re-ticks from the first child every tick") {
    test::TickWorld world;
    auto cond = stub(Status::Success, true);
    auto body = stub(Status::Running);
    StubLeaf* cond_impl = cond.impl;
    StubLeaf* body_impl = body.impl;
    auto seq = std::make_unique<bt::ReactiveSequenceNode>();
    seq->add_child(std::move(cond.node));
    seq->add_child(std::move(body.node));

    CHECK(world.tick(*seq) == Status::Running);
    CHECK(world.tick(*seq) == Status::Running);
    CHECK(cond_impl->ticks == 2);
    CHECK(body_impl->ticks == 2);

    cond_impl->set(Status::Failure);
    CHECK(world.tick(*seq) == Status::Failure);
    CHECK(body_impl->ticks == 2);  // preempted, not ticked
}

TEST_CASE("repeat re-enters on success and propagates failure") {
    test::TickWorld world;
    SUBCASE("finite count") {
        auto child = stub(Status::Success);
        StubLeaf* impl = child.impl;
        bt::RepeatNode repeat(std::move(child.node), 3);
        CHECK(world.tick(repeat) == Status::Running);
        CHECK(world.tick(repeat) == Status::Running);
        CHECK(world.tick(repeat) == Status::Success);
        CHECK(impl->ticks == 3);
    }
    SUBCASE("forever never succeeds") {
        auto child = stub(Status::Success);
        bt::RepeatNode repeat(std::move(child.node), std::nullopt);
        for (int i = 0; i < 50; ++i) CHECK(world.tick(repeat) == Status::Running);
    }
    SUBCASE("failure propagates") {
        auto child = stub(Status::Failure);
        bt::RepeatNode repeat(std::move(child.node), std::nullopt);
        CHECK(world.tick(repeat) == Status::Failure);
    }
}

TEST_CASE("timeout fails a child stuck in RUNNING past the limit") {
    test::TickWorld world;
    auto child = stub(Status::Running);
    StubLeaf* impl = child.impl;
    bt::TimeoutNode timeout(std::move(child.node), 0.5);
    Status s = Status::Running;
    int ticks = 0;
    while (s == Status::Running && ticks < 100) {
        s = world.tick(timeout);
        ++ticks;
    }
    CHECK(s == Status::Failure);
    CHECK(ticks == 12);  // starts at t=0, dt=0.05; fails once elapsed 0.55 > 0.5

    // after the timeout the child restarts fresh
    impl->set(Status::Success);
    CHECK(world.tick(timeout) == Status::Success);
}

TEST_CASE("reset clears node memory but not the blackboard or speech") {
    test::TickWorld world;
    auto first = stub(Status::Success);
    auto second = stub(Status::Running);
    StubLeaf* first_impl = first.impl;
    auto seq = std::make_unique<bt::SequenceNode>();
    seq->add_child(std::move(first.node));
    seq->add_child(std::move(second.node));

    world.blackboard.set("key", 1.5);
    world.speech.say(0.0, 1, "hello");

    CHECK(world.tick(*seq) == Status::Running);
    CHECK(first_impl->ticks == 1);
    bt::reset(*seq);
    CHECK(world.tick(*seq) == Status::Running);
    CHECK(first_impl->ticks == 2);  // first child re-ticked after reset

    bt::reset(*seq);
    bt::reset(*seq);  // idempotent
    CHECK(world.blackboard.get<double>("key") == 1.5);
    CHECK(world.speech.size() == 1);
}

TEST_CASE("ticking is deterministic for fixed tree state and inputs") {
    auto build = [] {
        auto seq = std::make_unique<bt::SequenceNode>();
        seq->add_child(stub(Status::Success).node);
        seq->add_child(stub(Status::Running).node);
        return seq;
    };
    test::TickWorld w1, w2;
    auto t1 = build();
    auto t2 = build();
    for (int i = 0; i < 10; ++i) CHECK(w1.tick(*t1) == w2.tick(*t2));
}

TEST_CASE("speech channel matching respects the 5 s expiry and filters") {
    bt::SpeechChannel channel;
    channel.say(1.0, 2, "follow me");
    CHECK(channel.is_speaking(2.0, 2, std::string("follow me")));
    CHECK(channel.is_speaking(2.0, std::nullopt, std::nullopt));
    CHECK(channel.is_speaking(2.0, 2, std::nullopt));
    CHECK_FALSE(channel.is_speaking(2.0, 3, std::nullopt));
    CHECK_FALSE(channel.is_speaking(2.0, 2, std::string("other")));
    CHECK(channel.is_speaking(6.0, 2, std::string("follow me")));        // age 5.0 still matches
    CHECK_FALSE(channel.is_speaking(7.0, 2, std::string("follow me")));  // age 6 > 5
    CHECK_THROWS_AS(channel.say(0.5, 1, "back in time"), std::logic_error);

    channel.say(3.0, 1, "");  // empty messages are allowed
    CHECK(channel.size() == 2);
    CHECK(channel.is_speaking(3.0, 1, std::string("")));
}

TEST_CASE("blackboard values are typed") {
    bt::Blackboard bb;
    bb.set("num", 2.5);
    bb.set("point", Vec2{1, 2});
    bb.set("name", std::string("w"));
    bb.set("id", std::int64_t{7});
    CHECK(bb.get<double>("num") == 2.5);
    CHECK(bb.get<Vec2>("point")->x == 1);
    CHECK(bb.get<std::string>("name") == "w");
    CHECK(bb.get<std::int64_t>("id") == 7);
    CHECK_FALSE(bb.get<double>("missing").has_value());
    CHECK_FALSE(bb.get<double>("name").has_value());  // wrong type
    CHECK(bb.get_or<double>("missing", 9.0) == 9.0);
}

TEST_CASE("structural validation rejects bad arity and thresholds") {
    bt::InverterNode inv(std::make_unique<bt::SequenceNode>());
    CHECK_NOTHROW(bt::validate_structure(inv));

    auto par = std::make_unique<bt::ParallelNode>(3);
    par->add_child(stub(Status::Success).node);
    CHECK_THROWS_WITH_AS(bt::validate_structure(*par), doctest::Contains("threshold"),
                         std::invalid_argument);
}

TEST_SUITE_END();
