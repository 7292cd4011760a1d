#include "socnav/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "socnav/parse_util.hpp"

namespace socnav::sim {

RobotPolicy::RobotPolicy(const io::RobotPolicySpec& spec, Pose2D initial, double radius,
                         const std::string& base_dir)
    : spec_(spec), initial_(initial), radius_(radius) {
    if (spec_.kind == io::RobotPolicySpec::Kind::Waypoints) {
        path_.push_back(initial_.position());
        for (const Vec2& w : spec_.waypoints) path_.push_back(w);
        cumulative_.push_back(0.0);
        for (std::size_t i = 1; i < path_.size(); ++i)
            cumulative_.push_back(cumulative_.back() + (path_[i] - path_[i - 1]).norm());
    } else if (spec_.kind == io::RobotPolicySpec::Kind::Replay) {
        std::filesystem::path p = spec_.file;
        if (!p.is_absolute()) p = std::filesystem::path(base_dir) / p;
        std::ifstream in(p);
        if (!in) throw std::runtime_error("cannot open replay file '" + p.string() + "'");
        std::string line;
        std::getline(in, line);  // header: t,x,y,yaw[,vx,vy]
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split(line, ',');
            if (f.size() != 4 && f.size() != 6)
                throw std::runtime_error("replay row needs t,x,y,yaw[,vx,vy]: " + line);
            ReplayRow row{};
            row.t = parse_double(f[0], "replay t");
            row.x = parse_double(f[1], "replay x");
            row.y = parse_double(f[2], "replay y");
            row.yaw = parse_double(f[3], "replay yaw");
            if (f.size() == 6) {
                row.vx = parse_double(f[4], "replay vx");
                row.vy = parse_double(f[5], "replay vy");
            }
            replay_.push_back(row);
        }
        if (replay_.empty()) throw std::runtime_error("replay file has no rows");
        std::sort(replay_.begin(), replay_.end(),
                  [](const ReplayRow& a, const ReplayRow& b) { return a.t < b.t; });
        // Derive velocities when the file carries none.
        if (replay_.size() >= 2 && std::all_of(replay_.begin(), replay_.end(), [](const ReplayRow& r) {
                return r.vx == 0.0 && r.vy == 0.0;
            })) {
            for (std::size_t i = 0; i + 1 < replay_.size(); ++i) {
                const double dt = replay_[i + 1].t - replay_[i].t;
                if (dt > 0.0) {
                    replay_[i].vx = (replay_[i + 1].x - replay_[i].x) / dt;
                    replay_[i].vy = (replay_[i + 1].y - replay_[i].y) / dt;
                }
            }
            replay_.back().vx = replay_[replay_.size() - 2].vx;
            replay_.back().vy = replay_[replay_.size() - 2].vy;
        }
    }
}

RobotState RobotPolicy::state_at(double t) const {
    RobotState out;
    out.radius = radius_;
    switch (spec_.kind) {
        case io::RobotPolicySpec::Kind::Static:
            out.pose = initial_;
            break;
        case io::RobotPolicySpec::Kind::Straight: {
            out.pose.set_position(initial_.position() + spec_.velocity * t);
            out.velocity = spec_.velocity;
            out.pose.set_yaw(spec_.velocity.norm() > 0.0
                                 ? std::atan2(spec_.velocity.y, spec_.velocity.x)
                                 : initial_.yaw);
            break;
        }
        case io::RobotPolicySpec::Kind::Waypoints: {
            const double total = cumulative_.back();
            const double s = std::min(spec_.speed * t, total);
            std::size_t seg = 1;
            while (seg < cumulative_.size() && cumulative_[seg] < s) ++seg;
            if (seg >= cumulative_.size()) {  // arrived
                out.pose.set_position(path_.back());
                out.pose.set_yaw(initial_.yaw);
                if (path_.size() >= 2) {
                    const Vec2 dir = (path_.back() - path_[path_.size() - 2]).normalized();
                    if (dir.norm() > 0.0) out.pose.set_yaw(std::atan2(dir.y, dir.x));
                }
                break;
            }
            const Vec2 a = path_[seg - 1];
            const Vec2 b = path_[seg];
            const double seg_len = cumulative_[seg] - cumulative_[seg - 1];
            const double f = seg_len > 0.0 ? (s - cumulative_[seg - 1]) / seg_len : 0.0;
            const Vec2 dir = (b - a).normalized();
            out.pose.set_position(a + (b - a) * f);
            out.pose.set_yaw(std::atan2(dir.y, dir.x));
            if (s < total) out.velocity = dir * spec_.speed;
            break;
        }
        case io::RobotPolicySpec::Kind::Replay: {
            if (t <= replay_.front().t) {
                const ReplayRow& r = replay_.front();
                out.pose = {r.x, r.y, r.yaw};
                out.velocity = {r.vx, r.vy};
                break;
            }
            if (t >= replay_.back().t) {
                const ReplayRow& r = replay_.back();
                out.pose = {r.x, r.y, r.yaw};
                out.velocity = {};
                break;
            }
            std::size_t hi = 1;
            while (hi < replay_.size() && replay_[hi].t < t) ++hi;
            const ReplayRow& a = replay_[hi - 1];
            const ReplayRow& b = replay_[hi];
            const double f = (t - a.t) / (b.t - a.t);
            out.pose.set_position({a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f});
            out.pose.set_yaw(a.yaw + wrap_angle(b.yaw - a.yaw) * f);
            out.velocity = {a.vx + (b.vx - a.vx) * f, a.vy + (b.vy - a.vy) * f};
            break;
        }
    }
    return out;
}

io::Scenario apply_overrides(io::Scenario scenario, const RunOverrides& o) {
    if (o.dt) scenario.dt = *o.dt;
    if (o.duration) scenario.duration = *o.duration;
    if (o.seed) scenario.seed = *o.seed;
    if (o.robot_policy) {
        scenario.robot.policy = *o.robot_policy;
        scenario.robot.goal.reset();
        if (scenario.robot.policy.kind == io::RobotPolicySpec::Kind::Waypoints)
            scenario.robot.goal = scenario.robot.policy.waypoints.back();
    }
    if (o.metrics) {
        scenario.metrics_all = o.metrics->empty();
        scenario.metrics = *o.metrics;
    }
    return scenario;
}

std::vector<std::string> metric_selection(const io::Scenario& scenario) {
    if (scenario.metrics_all) return {};
    for (const std::string& name : scenario.metrics)
        if (!eval::MetricsRegistry::instance().find(name))
            throw std::invalid_argument("unknown metric '" + name + "'");
    return scenario.metrics;
}

RunResult run(const io::Scenario& base_scenario, const RunOverrides& overrides,
              const std::string& base_dir) {
    const io::Scenario scenario = apply_overrides(base_scenario, overrides);
    if (!(scenario.dt > 0.0 && scenario.dt <= 0.2))
        throw std::invalid_argument("dt must be in (0, 0.2]");
    const std::vector<std::string> selection = metric_selection(scenario);

    Engine engine(scenario, base_dir);
    RobotPolicy policy(scenario.robot.policy, scenario.robot.pose, scenario.robot.radius, base_dir);
    engine.set_time_robot(0.0, policy.state_at(0.0));

    const std::optional<Vec2> goal = scenario.robot.goal;
    constexpr double kGoalTolerance = 0.3;
    if (goal)
        engine.push_event({0.0, -1, "robot_goal_set", "", point_to_string(*goal)});
    bool goal_reached = false;
    auto check_goal = [&](double t) {
        if (!goal || goal_reached) return;
        if ((engine.robot().position() - *goal).norm() <= kGoalTolerance) {
            goal_reached = true;
            engine.push_event({t, -1, "robot_goal_reached", "", ""});
        }
    };

    // Record markers sorted into a start/stop tape.
    struct Marker {
        double t;
        bool start;
    };
    std::vector<Marker> markers;
    for (const auto& [start, stop] : overrides.record_markers) {
        if (stop < start) throw std::invalid_argument("record marker stop before start");
        markers.push_back({start, true});
        markers.push_back({stop, false});
    }
    std::sort(markers.begin(), markers.end(), [](const Marker& a, const Marker& b) {
        return a.t < b.t || (a.t == b.t && !a.start && b.start);
    });
    std::size_t next_marker = 0;
    auto apply_markers = [&](double t) {
        while (next_marker < markers.size() && markers[next_marker].t <= t + 1e-9) {
            if (markers[next_marker].start) engine.record_start();
            else engine.record_stop();
            ++next_marker;
        }
    };

    check_goal(0.0);
    apply_markers(0.0);
    engine.record_current();

    const long steps = std::lround(scenario.duration / scenario.dt);
    for (long k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * scenario.dt;
        engine.advance(t, policy.state_at(t));
        check_goal(t);
        apply_markers(t);
    }

    RunResult result;
    result.scenario_hash = fnv1a_hex(io::serialize_scenario(scenario));
    engine.finish();
    result.log = engine.log();
    result.report = eval::compute_metrics(result.log, selection, result.scenario_hash, scenario.seed);
    if (overrides.out_dir) eval::write_report_files(result.report, result.log, *overrides.out_dir);
    return result;
}

}  // namespace socnav::sim
