#include "socnav/evaluator.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "socnav/parse_util.hpp"

namespace socnav::eval {

namespace {

constexpr double kTimeEps = 1e-9;
const double kInf = std::numeric_limits<double>::infinity();

double surface_distance(const RobotState& robot, const AgentState& agent) {
    return (robot.position() - agent.position()).norm() - robot.radius - agent.radius;
}

}  // namespace

std::vector<std::size_t> TrajectoryLog::window_indices(const Window& w) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < steps.size(); ++i)
        if (steps[i].t >= w.start - kTimeEps && steps[i].t <= w.end + kTimeEps) idx.push_back(i);
    return idx;
}

std::vector<Window> TrajectoryLog::effective_windows() const {
    if (!windows.empty()) return windows;
    const double end = steps.empty() ? 0.0 : steps.back().t;
    const double start = steps.empty() ? 0.0 : steps.front().t;
    return {{start, end}};
}

void Recorder::start(double t) {
    if (open_) throw std::runtime_error("recording already started");
    open_ = t;
}

void Recorder::stop(double t) {
    if (!open_) throw std::runtime_error("recording stop without start");
    if (t < *open_) throw std::runtime_error("recording stop before start");
    closed_.push_back({*open_, t});
    open_.reset();
}

std::vector<Window> Recorder::windows(double duration) const {
    std::vector<Window> out = closed_;
    if (open_) out.push_back({*open_, duration});
    return out;  // empty = caller default (whole run)
}

// ----------------------------------------------------------------- metrics

namespace {

struct WindowView {
    const TrajectoryLog& log;
    std::vector<std::size_t> idx;

    explicit WindowView(const TrajectoryLog& l, const Window& w) : log(l), idx(l.window_indices(w)) {}
    std::size_t count() const { return idx.size(); }
    const StepRecord& at(std::size_t k) const { return log.steps[idx[k]]; }
};

std::vector<double> robot_speeds(const WindowView& v) {
    std::vector<double> speeds;
    speeds.reserve(v.count());
    for (std::size_t k = 0; k < v.count(); ++k) speeds.push_back(v.at(k).robot.velocity.norm());
    return speeds;
}

enum class Zone { Intimate, Personal, Social };

bool in_zone(double d, Zone z) {
    switch (z) {
        case Zone::Intimate: return d < 0.45;
        case Zone::Personal: return d >= 0.45 && d < 1.2;
        case Zone::Social: return d >= 1.2 && d < 3.6;
    }
    return false;
}

struct ZoneStats {
    int episodes = 0;
    double time = 0.0;
};

ZoneStats zone_stats(const WindowView& v, Zone zone) {
    ZoneStats stats;
    if (v.count() == 0 || v.at(0).agents.empty()) return stats;
    const std::size_t humans = v.at(0).agents.size();
    for (std::size_t h = 0; h < humans; ++h) {
        bool was_in = false;
        for (std::size_t k = 0; k < v.count(); ++k) {
            if (h >= v.at(k).agents.size()) break;
            const bool now = in_zone(surface_distance(v.at(k).robot, v.at(k).agents[h]), zone);
            if (now && !was_in) ++stats.episodes;
            if (now && k > 0) stats.time += v.log.dt;
            was_in = now;
        }
    }
    return stats;
}

MetricValue zone_metric(const TrajectoryLog& log, const Window& w, Zone zone, bool count) {
    WindowView v(log, w);
    if (v.count() == 0) return MetricValue::inapplicable("empty window");
    if (v.at(0).agents.empty()) return MetricValue::inapplicable("no human agents");
    const ZoneStats s = zone_stats(v, zone);
    return {count ? static_cast<double>(s.episodes) : s.time, true, {}};
}

// Per-human per-step approach speed (positive = closing), first step zero.
std::vector<std::vector<double>> approach_speeds(const WindowView& v) {
    std::vector<std::vector<double>> out;
    if (v.count() == 0) return out;
    const std::size_t humans = v.at(0).agents.size();
    out.assign(humans, std::vector<double>(v.count(), 0.0));
    for (std::size_t h = 0; h < humans; ++h)
        for (std::size_t k = 1; k < v.count(); ++k) {
            const double prev = surface_distance(v.at(k - 1).robot, v.at(k - 1).agents[h]);
            const double now = surface_distance(v.at(k).robot, v.at(k).agents[h]);
            out[h][k] = (prev - now) / v.log.dt;
        }
    return out;
}

std::vector<double> danger_series(const WindowView& v) {
    std::vector<double> danger(v.count(), 0.0);
    const auto v_app = approach_speeds(v);
    for (std::size_t k = 1; k < v.count(); ++k) {
        double worst = 0.0;
        for (std::size_t h = 0; h < v_app.size(); ++h) {
            const double d = surface_distance(v.at(k).robot, v.at(k).agents[h]);
            const double value = std::exp(-d / 1.5) * std::max(0.0, v_app[h][k]) / 1.0;
            worst = std::max(worst, value);
        }
        danger[k] = worst;
    }
    return danger;
}

/// Smallest positive root of |p_rel + v_rel t| = radius_sum, +inf when none.
double ttc_pair(const Vec2& p_rel, const Vec2& v_rel, double radius_sum) {
    const double a = v_rel.squared_norm();
    const double b = 2.0 * p_rel.dot(v_rel);
    const double c = p_rel.squared_norm() - radius_sum * radius_sum;
    if (a == 0.0) return kInf;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return kInf;
    const double sq = std::sqrt(disc);
    const double t1 = (-b - sq) / (2.0 * a);
    const double t2 = (-b + sq) / (2.0 * a);
    if (t1 > 0.0) return t1;
    if (t2 > 0.0) return t2;
    return kInf;
}

MetricValue nav_diff_metric(const TrajectoryLog& log, const Window& w, int order, bool want_max) {
    WindowView v(log, w);
    const std::size_t need = static_cast<std::size_t>(order) + 1;
    if (v.count() < need)
        return MetricValue::inapplicable("window shorter than " + std::to_string(need) + " steps");
    std::vector<double> series = robot_speeds(v);
    for (int d = 0; d < order; ++d) {
        std::vector<double> next(series.size() - 1);
        for (std::size_t k = 1; k < series.size(); ++k) next[k - 1] = (series[k] - series[k - 1]) / log.dt;
        series = std::move(next);
    }
    double acc = 0.0, worst = 0.0;
    for (double x : series) {
        acc += std::abs(x);
        worst = std::max(worst, std::abs(x));
    }
    return {want_max ? worst : acc / static_cast<double>(series.size()), true, {}};
}

std::optional<double> goal_reached_time(const TrajectoryLog& log) {
    for (const SimEvent& e : log.events)
        if (e.kind == "robot_goal_reached") return e.t;
    return std::nullopt;
}

bool goal_defined(const TrajectoryLog& log) {
    for (const SimEvent& e : log.events)
        if (e.kind == "robot_goal_set" || e.kind == "robot_goal_reached") return true;
    return false;
}

sfm::Neighbor as_neighbor(const RobotState& r) { return {r.position(), r.velocity}; }

/// |social force on the robot| and sum over humans of |their force from the
/// robot alone|, both with default parameters for cross-run comparability.
std::pair<double, double> social_force_terms(const StepRecord& s) {
    static const sfm::SfmParams params = sfm::default_params();
    AgentState robot_agent;
    robot_agent.id = -1;
    robot_agent.pose = s.robot.pose;
    robot_agent.velocity = s.robot.velocity;

    std::vector<sfm::Neighbor> humans;
    humans.reserve(s.agents.size());
    for (const AgentState& a : s.agents) humans.push_back({a.position(), a.velocity});
    const double robot_term = sfm::social_force(robot_agent, humans, params).norm();

    double humans_term = 0.0;
    const std::vector<sfm::Neighbor> robot_neighbor{as_neighbor(s.robot)};
    for (const AgentState& a : s.agents)
        humans_term += sfm::social_force(a, robot_neighbor, params).norm();
    return {robot_term, humans_term};
}

MetricValue force_metric(const TrajectoryLog& log, const Window& w, int which, int stat) {
    // which: 0 social_work, 1 robot term, 2 humans term; stat: 0 avg, 1 max
    WindowView v(log, w);
    if (v.count() < 2) return MetricValue::inapplicable("window shorter than 2 steps");
    double work = 0.0, acc = 0.0, worst = 0.0;
    for (std::size_t k = 1; k < v.count(); ++k) {
        const auto [robot_term, humans_term] = social_force_terms(v.at(k));
        work += (robot_term + humans_term) * log.dt;
        const double x = which == 1 ? robot_term : humans_term;
        acc += x;
        worst = std::max(worst, x);
    }
    if (which == 0) return {work, true, {}};
    return {stat == 1 ? worst : acc / static_cast<double>(v.count() - 1), true, {}};
}

}  // namespace

MetricsRegistry::MetricsRegistry() {
    auto simple = [this](const char* name, const char* unit, const char* def_id, auto fn) {
        defs_.push_back({name, unit, def_id, fn});
    };

    // -- robot navigation ---------------------------------------------------
    simple("success", "bool", "success.v1", [](const TrajectoryLog& log, const Window& w) -> MetricValue {
        if (!goal_defined(log)) return MetricValue::inapplicable("no robot goal defined");
        const auto reached = goal_reached_time(log);
        const bool ok = reached && *reached >= w.start - kTimeEps && *reached <= w.end + kTimeEps;
        return {ok ? 1.0 : 0.0, true, {}};
    });
    simple("time_to_goal", "s", "time_to_goal.v1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               if (!goal_defined(log)) return MetricValue::inapplicable("no robot goal defined");
               const auto reached = goal_reached_time(log);
               if (!reached || *reached < w.start - kTimeEps || *reached > w.end + kTimeEps)
                   return MetricValue::inapplicable("goal not reached in window");
               return {*reached - w.start, true, {}};
           });
    simple("path_length", "m", "path_length.v1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               WindowView v(log, w);
               if (v.count() == 0) return MetricValue::inapplicable("empty window");
               double len = 0.0;
               for (std::size_t k = 1; k < v.count(); ++k)
                   len += (v.at(k).robot.position() - v.at(k - 1).robot.position()).norm();
               return {len, true, {}};
           });
    simple("cumulative_heading_change", "rad", "cumulative_heading_change.v1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               WindowView v(log, w);
               if (v.count() == 0) return MetricValue::inapplicable("empty window");
               double total = 0.0;
               for (std::size_t k = 1; k < v.count(); ++k)
                   total += std::abs(wrap_angle(v.at(k).robot.pose.yaw - v.at(k - 1).robot.pose.yaw));
               return {total, true, {}};
           });
    simple("avg_speed", "m/s", "avg_speed.v1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               WindowView v(log, w);
               if (v.count() == 0) return MetricValue::inapplicable("empty window");
               const auto speeds = robot_speeds(v);
               double acc = 0.0;
               for (double s : speeds) acc += s;
               return {acc / static_cast<double>(speeds.size()), true, {}};
           });
    simple("max_speed", "m/s", "max_speed.v1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               WindowView v(log, w);
               if (v.count() == 0) return MetricValue::inapplicable("empty window");
               double worst = 0.0;
               for (double s : robot_speeds(v)) worst = std::max(worst, s);
               return {worst, true, {}};
           });
    simple("avg_acceleration", "m/s^2", "avg_acceleration.v1",
           [](const TrajectoryLog& log, const Window& w) { return nav_diff_metric(log, w, 1, false); });
    simple("max_acceleration", "m/s^2", "max_acceleration.v1",
           [](const TrajectoryLog& log, const Window& w) { return nav_diff_metric(log, w, 1, true); });
    simple("avg_jerk", "m/s^3", "avg_jerk.v1",
           [](const TrajectoryLog& log, const Window& w) { return nav_diff_metric(log, w, 2, false); });
    simple("max_jerk", "m/s^3", "max_jerk.v1",
           [](const TrajectoryLog& log, const Window& w) { return nav_diff_metric(log, w, 2, true); });

    // -- proxemics ------------------------------------------------------------
    simple("intimate_intrusion_count", "episodes", "proxemic_intrusion.v1",
           [](const TrajectoryLog& l, const Window& w) { return zone_metric(l, w, Zone::Intimate, true); });
    simple("intimate_intrusion_time", "s", "proxemic_intrusion.v1",
           [](const TrajectoryLog& l, const Window& w) { return zone_metric(l, w, Zone::Intimate, false); });
    simple("personal_intrusion_count", "episodes", "proxemic_intrusion.v1",
           [](const TrajectoryLog& l, const Window& w) { return zone_metric(l, w, Zone::Personal, true); });
    simple("personal_intrusion_time", "s", "proxemic_intrusion.v1",
           [](const TrajectoryLog& l, const Window& w) { return zone_metric(l, w, Zone::Personal, false); });
    simple("social_intrusion_count", "episodes", "proxemic_intrusion.v1",
           [](const TrajectoryLog& l, const Window& w) { return zone_metric(l, w, Zone::Social, true); });
    simple("social_intrusion_time", "s", "proxemic_intrusion.v1",
           [](const TrajectoryLog& l, const Window& w) { return zone_metric(l, w, Zone::Social, false); });
    simple("min_distance_to_human", "m", "min_distance_to_human.v1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               WindowView v(log, w);
               if (v.count() == 0) return MetricValue::inapplicable("empty window");
               if (v.at(0).agents.empty()) return MetricValue::inapplicable("no human agents");
               double best = kInf;
               for (std::size_t k = 0; k < v.count(); ++k)
                   for (const AgentState& a : v.at(k).agents)
                       best = std::min(best, surface_distance(v.at(k).robot, a));
               return {best, true, {}};
           });
    simple("avg_distance_to_closest_human", "m", "avg_distance_to_closest_human.v1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               WindowView v(log, w);
               if (v.count() == 0) return MetricValue::inapplicable("empty window");
               if (v.at(0).agents.empty()) return MetricValue::inapplicable("no human agents");
               double acc = 0.0;
               for (std::size_t k = 0; k < v.count(); ++k) {
                   double closest = kInf;
                   for (const AgentState& a : v.at(k).agents)
                       closest = std::min(closest, surface_distance(v.at(k).robot, a));
                   acc += closest;
               }
               return {acc / static_cast<double>(v.count()), true, {}};
           });
    simple("human_collision_count", "collisions", "human_collision.v1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               WindowView v(log, w);
               if (v.count() == 0) return MetricValue::inapplicable("empty window");
               if (v.at(0).agents.empty()) return MetricValue::inapplicable("no human agents");
               int count = 0;
               const std::size_t humans = v.at(0).agents.size();
               for (std::size_t h = 0; h < humans; ++h) {
                   bool armed = true;
                   for (std::size_t k = 0; k < v.count(); ++k) {
                       const double d = surface_distance(v.at(k).robot, v.at(k).agents[h]);
                       if (d <= 0.0 && armed) {
                           ++count;
                           armed = false;
                       } else if (d > 0.05) {
                           armed = true;  // hysteresis: separation must exceed 0.05 m
                       }
                   }
               }
               return {static_cast<double>(count), true, {}};
           });
    simple("robot_obstacle_collision_count", "collisions", "robot_obstacle_collision.v1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               if (!log.grid) return MetricValue::inapplicable("no map available");
               WindowView v(log, w);
               if (v.count() == 0) return MetricValue::inapplicable("empty window");
               int count = 0;
               bool armed = true;
               for (std::size_t k = 0; k < v.count(); ++k) {
                   const RobotState& r = v.at(k).robot;
                   double d = kInf;
                   if (log.grid->in_bounds(r.position()))
                       d = distance_to_nearest_obstacle(*log.grid, r.position()).distance;
                   if (d < r.radius && armed) {
                       ++count;
                       armed = false;
                   } else if (d >= r.radius + 0.05) {
                       armed = true;
                   }
               }
               return {static_cast<double>(count), true, {}};
           });

    // -- social force ---------------------------------------------------------
    simple("social_work", "N*s", "social_work.v1",
           [](const TrajectoryLog& l, const Window& w) { return force_metric(l, w, 0, 0); });
    simple("avg_social_force_on_robot", "N", "social_force_on_robot.v1",
           [](const TrajectoryLog& l, const Window& w) { return force_metric(l, w, 1, 0); });
    simple("max_social_force_on_robot", "N", "social_force_on_robot.v1",
           [](const TrajectoryLog& l, const Window& w) { return force_metric(l, w, 1, 1); });
    simple("avg_social_force_on_humans", "N", "social_force_on_humans.v1",
           [](const TrajectoryLog& l, const Window& w) { return force_metric(l, w, 2, 0); });
    simple("max_social_force_on_humans", "N", "social_force_on_humans.v1",
           [](const TrajectoryLog& l, const Window& w) { return force_metric(l, w, 2, 1); });

    // -- danger & surprise (normative approximations, see definition ids) -----
    simple("min_time_to_collision", "s", "time_to_collision.approx1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               WindowView v(log, w);
               if (v.count() == 0) return MetricValue::inapplicable("empty window");
               if (v.at(0).agents.empty()) return MetricValue::inapplicable("no human agents");
               double best = kInf;
               for (std::size_t k = 0; k < v.count(); ++k)
                   for (const AgentState& a : v.at(k).agents)
                       best = std::min(best, ttc_pair(a.position() - v.at(k).robot.position(),
                                                      a.velocity - v.at(k).robot.velocity,
                                                      v.at(k).robot.radius + a.radius));
               return {best, true, {}};
           });
    simple("mean_danger_index", "1", "danger_index.approx1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               WindowView v(log, w);
               if (v.count() == 0) return MetricValue::inapplicable("empty window");
               if (v.at(0).agents.empty()) return MetricValue::inapplicable("no human agents");
               if (v.count() < 2) return {0.0, true, {}};
               const auto danger = danger_series(v);
               double acc = 0.0;
               for (std::size_t k = 1; k < danger.size(); ++k) acc += danger[k];
               return {acc / static_cast<double>(danger.size() - 1), true, {}};
           });
    simple("surprise_event_count", "events", "surprise_event.approx1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               WindowView v(log, w);
               if (v.count() == 0) return MetricValue::inapplicable("empty window");
               if (v.at(0).agents.empty()) return MetricValue::inapplicable("no human agents");
               const auto v_app = approach_speeds(v);
               const double half_fov = 50.0 * kPi / 180.0;
               int count = 0;
               for (std::size_t h = 0; h < v_app.size(); ++h) {
                   bool prev = false;
                   for (std::size_t k = 0; k < v.count(); ++k) {
                       const AgentState& human = v.at(k).agents[h];
                       const RobotState& robot = v.at(k).robot;
                       const double heading = human.velocity.norm() > 0.05
                                                  ? std::atan2(human.velocity.y, human.velocity.x)
                                                  : human.pose.yaw;
                       const double off = std::abs(
                           wrap_angle(bearing(human.position(), robot.position()) - heading));
                       const bool now = surface_distance(robot, human) < 2.5 && off > half_fov &&
                                        v_app[h][k] > 0.5;
                       if (now && !prev) ++count;
                       prev = now;
                   }
               }
               return {static_cast<double>(count), true, {}};
           });
    simple("cumulative_danger", "s", "danger_index.approx1",
           [](const TrajectoryLog& log, const Window& w) -> MetricValue {
               WindowView v(log, w);
               if (v.count() == 0) return MetricValue::inapplicable("empty window");
               if (v.at(0).agents.empty()) return MetricValue::inapplicable("no human agents");
               const auto danger = danger_series(v);
               double acc = 0.0;
               for (std::size_t k = 1; k < danger.size(); ++k) acc += danger[k] * log.dt;
               return {acc, true, {}};
           });

    std::sort(defs_.begin(), defs_.end(),
              [](const MetricDef& a, const MetricDef& b) { return a.name < b.name; });
}

MetricsRegistry& MetricsRegistry::instance() {
    static MetricsRegistry registry;
    return registry;
}

void MetricsRegistry::add(MetricDef def) {
    if (find(def.name)) throw std::invalid_argument("metric '" + def.name + "' already registered");
    defs_.push_back(std::move(def));
    std::sort(defs_.begin(), defs_.end(),
              [](const MetricDef& a, const MetricDef& b) { return a.name < b.name; });
}

const MetricDef* MetricsRegistry::find(const std::string& name) const {
    for (const auto& d : defs_)
        if (d.name == name) return &d;
    return nullptr;
}

std::vector<std::string> MetricsRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(defs_.size());
    for (const auto& d : defs_) out.push_back(d.name);
    return out;
}

MetricsReport compute_metrics(const TrajectoryLog& log, const std::vector<std::string>& selection,
                              const std::string& scenario_hash, std::uint64_t seed) {
    const MetricsRegistry& registry = MetricsRegistry::instance();
    std::vector<std::string> names = selection.empty() ? registry.names() : selection;

    MetricsReport report;
    report.scenario_hash = scenario_hash;
    report.seed = seed;
    report.dt = log.dt;
    for (const Window& w : log.effective_windows()) {
        WindowReport wr;
        wr.window = w;
        const auto idx = log.window_indices(w);
        wr.step_count = idx.empty() ? 0 : idx.size() - 1;
        for (const std::string& name : names) {
            const MetricDef* def = registry.find(name);
            if (!def) throw std::invalid_argument("unknown metric '" + name + "'");
            const MetricValue value = def->compute(log, w);
            wr.entries[name] = {value.value, def->unit, def->definition_id, value.applicable,
                                value.reason};
        }
        report.windows.push_back(std::move(wr));
    }
    return report;
}

// -------------------------------------------------------------------- files

std::string report_to_yaml(const MetricsReport& report) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "scenario_hash" << YAML::Value << report.scenario_hash;
    out << YAML::Key << "seed" << YAML::Value << report.seed;
    out << YAML::Key << "dt" << YAML::Value << report.dt;
    out << YAML::Key << "windows" << YAML::Value << YAML::BeginSeq;
    for (const WindowReport& w : report.windows) {
        out << YAML::BeginMap;
        out << YAML::Key << "start" << YAML::Value << w.window.start;
        out << YAML::Key << "end" << YAML::Value << w.window.end;
        out << YAML::Key << "steps" << YAML::Value << w.step_count;
        out << YAML::Key << "metrics" << YAML::Value << YAML::BeginMap;
        for (const auto& [name, entry] : w.entries) {
            out << YAML::Key << name << YAML::Value << YAML::Flow << YAML::BeginMap;
            if (entry.applicable) {
                out << YAML::Key << "value" << YAML::Value << entry.value;
            } else {
                out << YAML::Key << "inapplicable" << YAML::Value << true;
                out << YAML::Key << "reason" << YAML::Value << entry.reason;
            }
            out << YAML::Key << "unit" << YAML::Value << entry.unit;
            out << YAML::Key << "definition" << YAML::Value << entry.definition_id;
            out << YAML::EndMap;
        }
        out << YAML::EndMap << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace

void write_trajectories_csv(const TrajectoryLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,id,x,y,yaw,vx,vy\n";
    for (const StepRecord& s : log.steps) {
        out << num_to_string(s.t) << ",-1," << num_to_string(s.robot.pose.x) << ','
            << num_to_string(s.robot.pose.y) << ',' << num_to_string(s.robot.pose.yaw) << ','
            << num_to_string(s.robot.velocity.x) << ',' << num_to_string(s.robot.velocity.y) << '\n';
        for (const AgentState& a : s.agents) {
            out << num_to_string(s.t) << ',' << a.id << ',' << num_to_string(a.pose.x) << ','
                << num_to_string(a.pose.y) << ',' << num_to_string(a.pose.yaw) << ','
                << num_to_string(a.velocity.x) << ',' << num_to_string(a.velocity.y) << '\n';
        }
    }
}

void write_events_csv(const TrajectoryLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,agent_id,kind,name,detail\n";
    for (const SimEvent& e : log.events)
        out << num_to_string(e.t) << ',' << e.agent_id << ',' << csv_escape(e.kind) << ','
            << csv_escape(e.name) << ',' << csv_escape(e.detail) << '\n';
}

void write_report_files(const MetricsReport& report, const TrajectoryLog& log,
                        const std::string& dir) {
    std::filesystem::create_directories(dir);
    const auto base = std::filesystem::path(dir);
    std::ofstream metrics(base / "metrics.yaml", std::ios::binary);
    if (!metrics) throw std::runtime_error("cannot write metrics.yaml in " + dir);
    metrics << report_to_yaml(report);
    write_trajectories_csv(log, (base / "trajectories.csv").string());
    write_events_csv(log, (base / "events.csv").string());
}

TrajectoryLog read_log_csv(const std::string& trajectories_path, const std::string& events_path,
                           GridPtr grid) {
    TrajectoryLog log;
    log.grid = std::move(grid);

    std::ifstream in(trajectories_path);
    if (!in) throw std::runtime_error("cannot open " + trajectories_path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = csv_split(line);
        if (f.size() != 7) throw std::runtime_error("bad trajectory row: " + line);
        const double t = parse_double(f[0], "t");
        const int id = static_cast<int>(parse_int(f[1], "id"));
        if (log.steps.empty() || std::abs(log.steps.back().t - t) > kTimeEps) log.steps.push_back({});
        StepRecord& step = log.steps.back();
        step.t = t;
        if (id < 0) {
            step.robot.pose = {parse_double(f[2], "x"), parse_double(f[3], "y"), parse_double(f[4], "yaw")};
            step.robot.velocity = {parse_double(f[5], "vx"), parse_double(f[6], "vy")};
        } else {
            AgentState a;
            a.id = id;
            a.pose = {parse_double(f[2], "x"), parse_double(f[3], "y"), parse_double(f[4], "yaw")};
            a.velocity = {parse_double(f[5], "vx"), parse_double(f[6], "vy")};
            step.agents.push_back(std::move(a));
        }
    }
    if (log.steps.size() >= 2) log.dt = log.steps[1].t - log.steps[0].t;

    if (!events_path.empty()) {
        std::ifstream events(events_path);
        if (!events) throw std::runtime_error("cannot open " + events_path);
        std::getline(events, line);  // header
        std::optional<double> open_start;
        while (std::getline(events, line)) {
            if (line.empty()) continue;
            const auto f = csv_split(line);
            if (f.size() != 5) throw std::runtime_error("bad event row: " + line);
            SimEvent e{parse_double(f[0], "t"), static_cast<int>(parse_int(f[1], "agent_id")), f[2],
                       f[3], f[4]};
            if (e.kind == "record_start") open_start = e.t;
            if (e.kind == "record_stop" && open_start) {
                log.windows.push_back({*open_start, e.t});
                open_start.reset();
            }
            log.events.push_back(std::move(e));
        }
        if (open_start && !log.steps.empty()) log.windows.push_back({*open_start, log.steps.back().t});
    }
    return log;
}

}  // namespace socnav::eval
