#include "socnav/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "socnav/bt_xml.hpp"
#include "socnav/parse_util.hpp"
#include "socnav/rng.hpp"

namespace socnav::io {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("scenario: " + msg); }

std::string line_context(const YAML::Node& node) {
    return node.Mark().is_null() ? std::string{}
                                 : " (line " + std::to_string(node.Mark().line + 1) + ")";
}

double as_number(const YAML::Node& node, const std::string& what) {
    try {
        return node.as<double>();
    } catch (const YAML::Exception&) {
        fail("malformed " + what + line_context(node));
    }
}

Vec2 as_point(const YAML::Node& node, const std::string& what) {
    if (!node.IsSequence() || node.size() != 2) fail("malformed " + what + ": expected [x, y]" + line_context(node));
    return {as_number(node[0], what), as_number(node[1], what)};
}

Pose2D as_pose(const YAML::Node& node, const std::string& what) {
    if (!node.IsSequence() || (node.size() != 2 && node.size() != 3))
        fail("malformed pose for " + what + ": expected [x, y] or [x, y, yaw]" + line_context(node));
    const double yaw = node.size() == 3 ? as_number(node[2], what) : 0.0;
    return {as_number(node[0], what), as_number(node[1], what), yaw};
}

std::vector<Vec2> as_points(const YAML::Node& node, const std::string& what) {
    if (!node.IsSequence()) fail("malformed " + what + ": expected a list of [x, y]" + line_context(node));
    std::vector<Vec2> pts;
    for (const auto& item : node) pts.push_back(as_point(item, what));
    return pts;
}

MapRef parse_map(const YAML::Node& node) {
    if (!node) fail("missing 'map'");
    if (node.IsScalar()) return node.as<std::string>();
    if (!node.IsMap()) fail("'map' must be a path or an inline grid mapping" + line_context(node));
    if (node["file"]) return node["file"].as<std::string>();
    InlineMap inl;
    if (!node["grid"]) fail("inline map needs a 'grid' block" + line_context(node));
    inl.grid = node["grid"].as<std::string>();
    if (node["resolution"]) inl.resolution = as_number(node["resolution"], "map resolution");
    if (inl.resolution <= 0.0) fail("map resolution must be > 0");
    if (node["origin"]) inl.origin = as_pose(node["origin"], "map origin");
    return inl;
}

RobotPolicySpec parse_policy(const YAML::Node& node) {
    RobotPolicySpec policy;
    if (!node) return policy;
    if (!node.IsMap() || !node["type"]) fail("robot policy needs a 'type'" + line_context(node));
    const std::string type = node["type"].as<std::string>();
    if (type == "static") {
        policy.kind = RobotPolicySpec::Kind::Static;
    } else if (type == "straight") {
        policy.kind = RobotPolicySpec::Kind::Straight;
        if (!node["velocity"]) fail("straight policy needs 'velocity'");
        policy.velocity = as_point(node["velocity"], "robot velocity");
    } else if (type == "waypoints") {
        policy.kind = RobotPolicySpec::Kind::Waypoints;
        if (!node["points"]) fail("waypoints policy needs 'points'");
        policy.waypoints = as_points(node["points"], "robot waypoints");
        if (policy.waypoints.empty()) fail("waypoints policy needs at least one point");
        if (node["speed"]) policy.speed = as_number(node["speed"], "robot speed");
        if (policy.speed <= 0.0) fail("robot speed must be > 0");
    } else if (type == "replay") {
        policy.kind = RobotPolicySpec::Kind::Replay;
        if (!node["file"]) fail("replay policy needs 'file'");
        policy.file = node["file"].as<std::string>();
    } else {
        fail("unknown robot policy type '" + type + "'");
    }
    return policy;
}

BehaviorSpec parse_behavior(const YAML::Node& node, int agent_id) {
    BehaviorSpec spec;
    if (!node) return spec;  // default: regular preset
    if (!node.IsMap()) fail("agent " + std::to_string(agent_id) + ": 'behavior' must be a mapping");
    int variants = 0;
    if (node["preset"]) ++variants;
    if (node["bt_file"]) ++variants;
    if (node["bt_inline"]) ++variants;
    if (variants != 1)
        fail("agent " + std::to_string(agent_id) +
             ": behavior must have exactly one of preset/bt_file/bt_inline");
    if (node["preset"]) {
        const std::string name = node["preset"].as<std::string>();
        auto preset = behaviors::reaction_preset_from_string(name);
        if (!preset) fail("agent " + std::to_string(agent_id) + ": unknown preset '" + name + "'");
        spec.kind = BehaviorSpec::Kind::Preset;
        spec.preset = *preset;
    } else if (node["bt_file"]) {
        spec.kind = BehaviorSpec::Kind::BtFile;
        spec.bt_file = node["bt_file"].as<std::string>();
    } else {
        spec.kind = BehaviorSpec::Kind::BtInline;
        spec.bt_inline = node["bt_inline"].as<std::string>();
    }
    return spec;
}

SfmSpec parse_sfm(const YAML::Node& node, int agent_id) {
    SfmSpec spec;
    if (!node) return spec;
    if (node["mode"]) {
        const std::string mode = node["mode"].as<std::string>();
        if (mode == "default") spec.mode = sfm::ParamMode::Default;
        else if (mode == "custom") spec.mode = sfm::ParamMode::Custom;
        else if (mode == "random") spec.mode = sfm::ParamMode::Random;
        else fail("agent " + std::to_string(agent_id) + ": unknown sfm mode '" + mode + "'");
    }
    if (node["seed"]) spec.seed = node["seed"].as<std::uint64_t>();
    if (node["overrides"]) {
        if (!node["overrides"].IsMap())
            fail("agent " + std::to_string(agent_id) + ": sfm overrides must be a mapping");
        for (const auto& kv : node["overrides"])
            spec.overrides[kv.first.as<std::string>()] =
                as_number(kv.second, "sfm override " + kv.first.as<std::string>());
    }
    // Validate override names eagerly.
    apply_overrides(sfm::default_params(), spec.overrides);
    return spec;
}

void check_in_bounds(const OccupancyGrid& grid, const Vec2& p, const std::string& what) {
    if (!grid.in_bounds(p))
        fail(what + " (" + num_to_string(p.x) + ", " + num_to_string(p.y) + ") outside map");
}

/// Structural + cross-reference validation; called with the loaded grid.
void validate(const Scenario& s, const OccupancyGrid& grid, const std::string& base_dir) {
    if (!(s.dt > 0.0 && s.dt <= 0.2)) fail("dt must be in (0, 0.2]");
    if (s.duration <= 0.0) fail("duration must be > 0");

    check_in_bounds(grid, s.robot.pose.position(), "robot pose");
    for (const Vec2& w : s.robot.policy.waypoints) check_in_bounds(grid, w, "robot waypoint");

    std::set<int> ids;
    for (const AgentSpec& a : s.agents) {
        const std::string who = "agent " + std::to_string(a.id);
        if (!ids.insert(a.id).second) fail("duplicate agent id " + std::to_string(a.id));
        if (a.id < 0) fail(who + ": id must be non-negative");
        if (a.radius < 0.2 || a.radius > 0.6) fail(who + ": radius must be within [0.2, 0.6]");
        if (a.desired_speed <= 0.0) fail(who + ": desired_speed must be > 0");
        if (a.max_speed < a.desired_speed) fail(who + ": max_speed must be >= desired_speed");
        check_in_bounds(grid, a.pose.position(), who + " pose");
        for (const Vec2& g : a.goals) check_in_bounds(grid, g, who + " goal");

        // Resolve and structurally validate the behavior tree now so tick time
        // can never hit a name-resolution error.
        try {
            if (a.behavior.kind == BehaviorSpec::Kind::BtFile) {
                const fs::path path = fs::path(a.behavior.bt_file).is_absolute()
                                          ? fs::path(a.behavior.bt_file)
                                          : fs::path(base_dir) / a.behavior.bt_file;
                std::ifstream in(path);
                if (!in) fail(who + ": cannot open bt_file '" + path.string() + "'");
                std::stringstream buf;
                buf << in.rdbuf();
                auto tree = parse_bt(buf.str());
                for (std::size_t i = 0; i < tree->child_count(); ++i) (void)i;
            } else if (a.behavior.kind == BehaviorSpec::Kind::BtInline) {
                (void)parse_bt(a.behavior.bt_inline);
            }
        } catch (const std::runtime_error& e) {
            std::string msg = e.what();
            if (msg.rfind("scenario: ", 0) == 0) throw;
            fail(msg + " (agent " + std::to_string(a.id) + ")");
        }
    }

    std::set<int> grouped;
    std::set<int> group_ids;
    for (const GroupSpec& g : s.groups) {
        const std::string gwho = "group " + std::to_string(g.id);
        if (!group_ids.insert(g.id).second) fail("duplicate " + gwho);
        if (g.members.size() < 2) fail(gwho + ": group requires >=2 members");
        for (int m : g.members) {
            if (!ids.count(m)) fail(gwho + " references unknown agent " + std::to_string(m));
            if (!grouped.insert(m).second)
                fail("agent " + std::to_string(m) + " belongs to more than one group");
        }
    }
}

}  // namespace

sfm::SfmParams apply_overrides(const sfm::SfmParams& base,
                               const std::map<std::string, double>& overrides) {
    sfm::SfmParams out = base;
    for (const auto& [key, value] : overrides) {
        if (key == "k_desired") out.k_desired = value;
        else if (key == "relaxation_time") out.relaxation_time = value;
        else if (key == "k_obstacle") out.k_obstacle = value;
        else if (key == "b_obstacle") out.b_obstacle = value;
        else if (key == "k_social") out.k_social = value;
        else if (key == "lambda") out.lambda = value;
        else if (key == "gamma") out.gamma = value;
        else if (key == "n") out.n = value;
        else if (key == "n_prime") out.n_prime = value;
        else if (key == "k_group_gaze") out.k_group_gaze = value;
        else if (key == "k_group_coherence") out.k_group_coherence = value;
        else if (key == "k_group_repulsion") out.k_group_repulsion = value;
        else if (key == "perception_radius") out.perception_radius = value;
        else fail("unknown sfm parameter '" + key + "'");
    }
    if (out.relaxation_time <= 0.0 || out.gamma <= 0.0 || out.perception_radius <= 0.0)
        fail("sfm overrides: relaxation_time, gamma and perception_radius must be > 0");
    return out;
}

sfm::SfmParams resolve_params(const AgentSpec& agent, std::uint64_t run_seed) {
    sfm::SfmParams params = apply_overrides(sfm::default_params(), agent.sfm.overrides);
    switch (agent.sfm.mode) {
        case sfm::ParamMode::Default:
            params.mode = sfm::ParamMode::Default;
            return params;
        case sfm::ParamMode::Custom:
            params.mode = sfm::ParamMode::Custom;
            return params;
        case sfm::ParamMode::Random: {
            const std::uint64_t seed =
                agent.sfm.seed ? *agent.sfm.seed : derive_agent_seed(run_seed, agent.id);
            return sfm::sample_params(params, seed);
        }
    }
    return params;
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        fail(std::string("YAML parse error: ") + e.what());
    }
    if (!doc.IsMap()) fail("top level must be a mapping");

    Scenario s;
    s.map = parse_map(doc["map"]);
    if (doc["dt"]) s.dt = as_number(doc["dt"], "dt");
    if (doc["duration"]) s.duration = as_number(doc["duration"], "duration");
    if (doc["seed"]) s.seed = doc["seed"].as<std::uint64_t>();

    if (doc["robot"]) {
        const YAML::Node r = doc["robot"];
        if (r["pose"]) s.robot.pose = as_pose(r["pose"], "robot");
        if (r["radius"]) s.robot.radius = as_number(r["radius"], "robot radius");
        if (s.robot.radius <= 0.0) fail("robot radius must be > 0");
        s.robot.policy = parse_policy(r["policy"]);
        if (r["goal"]) s.robot.goal = as_point(r["goal"], "robot goal");
    }
    if (!s.robot.goal && s.robot.policy.kind == RobotPolicySpec::Kind::Waypoints)
        s.robot.goal = s.robot.policy.waypoints.back();

    if (doc["agents"]) {
        if (!doc["agents"].IsSequence()) fail("'agents' must be a list");
        for (const auto& a : doc["agents"]) {
            AgentSpec spec;
            if (!a["id"]) fail("every agent needs an id" + line_context(a));
            spec.id = a["id"].as<int>();
            const std::string who = "agent " + std::to_string(spec.id);
            if (a["pose"]) spec.pose = as_pose(a["pose"], who);
            if (a["radius"]) spec.radius = as_number(a["radius"], who + " radius");
            if (a["desired_speed"]) spec.desired_speed = as_number(a["desired_speed"], who + " desired_speed");
            if (a["max_speed"]) spec.max_speed = as_number(a["max_speed"], who + " max_speed");
            if (a["goals"]) spec.goals = as_points(a["goals"], who + " goals");
            spec.behavior = parse_behavior(a["behavior"], spec.id);
            spec.sfm = parse_sfm(a["sfm"], spec.id);
            s.agents.push_back(std::move(spec));
        }
    }

    if (doc["groups"]) {
        if (!doc["groups"].IsSequence()) fail("'groups' must be a list");
        for (const auto& g : doc["groups"]) {
            GroupSpec group;
            if (!g["id"]) fail("every group needs an id" + line_context(g));
            group.id = g["id"].as<int>();
            if (g["members"])
                for (const auto& m : g["members"]) group.members.push_back(m.as<int>());
            s.groups.push_back(std::move(group));
        }
    }

    if (doc["metrics"]) {
        const YAML::Node m = doc["metrics"];
        if (m.IsScalar() && m.as<std::string>() == "all") {
            s.metrics_all = true;
        } else if (m.IsSequence()) {
            s.metrics_all = false;
            for (const auto& name : m) s.metrics.push_back(name.as<std::string>());
        } else {
            fail("'metrics' must be 'all' or a list of names");
        }
    }

    GridPtr grid = load_map(s.map, base_dir);
    validate(s, *grid, base_dir);
    std::sort(s.agents.begin(), s.agents.end(),
              [](const AgentSpec& a, const AgentSpec& b) { return a.id < b.id; });
    return s;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), fs::path(path).parent_path().string());
}

namespace {

void emit_point(YAML::Emitter& out, const Vec2& p) {
    out << YAML::Flow << YAML::BeginSeq << p.x << p.y << YAML::EndSeq;
}

void emit_pose(YAML::Emitter& out, const Pose2D& p) {
    out << YAML::Flow << YAML::BeginSeq << p.x << p.y;
    if (p.yaw != 0.0) out << p.yaw;
    out << YAML::EndSeq;
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;

    out << YAML::Key << "map" << YAML::Value;
    if (const std::string* path = std::get_if<std::string>(&s.map)) {
        out << *path;
    } else {
        const InlineMap& m = std::get<InlineMap>(s.map);
        out << YAML::BeginMap;
        out << YAML::Key << "grid" << YAML::Value << YAML::Literal << m.grid;
        out << YAML::Key << "resolution" << YAML::Value << m.resolution;
        if (!(m.origin == Pose2D{})) {
            out << YAML::Key << "origin" << YAML::Value;
            emit_pose(out, m.origin);
        }
        out << YAML::EndMap;
    }

    if (s.dt != 0.05) out << YAML::Key << "dt" << YAML::Value << s.dt;
    if (s.duration != 120.0) out << YAML::Key << "duration" << YAML::Value << s.duration;
    if (s.seed != 0) out << YAML::Key << "seed" << YAML::Value << s.seed;

    out << YAML::Key << "robot" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "pose" << YAML::Value;
    emit_pose(out, s.robot.pose);
    if (s.robot.radius != 0.3) out << YAML::Key << "radius" << YAML::Value << s.robot.radius;
    if (s.robot.policy.kind != RobotPolicySpec::Kind::Static) {
        out << YAML::Key << "policy" << YAML::Value << YAML::BeginMap;
        switch (s.robot.policy.kind) {
            case RobotPolicySpec::Kind::Static:
                break;
            case RobotPolicySpec::Kind::Straight:
                out << YAML::Key << "type" << YAML::Value << "straight";
                out << YAML::Key << "velocity" << YAML::Value;
                emit_point(out, s.robot.policy.velocity);
                break;
            case RobotPolicySpec::Kind::Waypoints:
                out << YAML::Key << "type" << YAML::Value << "waypoints";
                out << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
                for (const Vec2& w : s.robot.policy.waypoints) emit_point(out, w);
                out << YAML::EndSeq;
                if (s.robot.policy.speed != 1.0)
                    out << YAML::Key << "speed" << YAML::Value << s.robot.policy.speed;
                break;
            case RobotPolicySpec::Kind::Replay:
                out << YAML::Key << "type" << YAML::Value << "replay";
                out << YAML::Key << "file" << YAML::Value << s.robot.policy.file;
                break;
        }
        out << YAML::EndMap;
    }
    // The waypoint-derived goal is refilled on read; only explicit ones survive.
    if (s.robot.goal &&
        !(s.robot.policy.kind == RobotPolicySpec::Kind::Waypoints &&
          *s.robot.goal == s.robot.policy.waypoints.back())) {
        out << YAML::Key << "goal" << YAML::Value;
        emit_point(out, *s.robot.goal);
    }
    out << YAML::EndMap;

    out << YAML::Key << "agents" << YAML::Value << YAML::BeginSeq;
    for (const AgentSpec& a : s.agents) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << a.id;
        out << YAML::Key << "pose" << YAML::Value;
        emit_pose(out, a.pose);
        if (a.radius != 0.3) out << YAML::Key << "radius" << YAML::Value << a.radius;
        if (a.desired_speed != 1.0)
            out << YAML::Key << "desired_speed" << YAML::Value << a.desired_speed;
        if (a.max_speed != 1.5) out << YAML::Key << "max_speed" << YAML::Value << a.max_speed;
        if (!a.goals.empty()) {
            out << YAML::Key << "goals" << YAML::Value << YAML::BeginSeq;
            for (const Vec2& g : a.goals) emit_point(out, g);
            out << YAML::EndSeq;
        }
        const bool default_behavior = a.behavior.kind == BehaviorSpec::Kind::Preset &&
                                      a.behavior.preset == behaviors::ReactionPreset::Regular;
        if (!default_behavior) {
            out << YAML::Key << "behavior" << YAML::Value << YAML::BeginMap;
            switch (a.behavior.kind) {
                case BehaviorSpec::Kind::Preset:
                    out << YAML::Key << "preset" << YAML::Value << behaviors::to_string(a.behavior.preset);
                    break;
                case BehaviorSpec::Kind::BtFile:
                    out << YAML::Key << "bt_file" << YAML::Value << a.behavior.bt_file;
                    break;
                case BehaviorSpec::Kind::BtInline:
                    out << YAML::Key << "bt_inline" << YAML::Value << YAML::Literal << a.behavior.bt_inline;
                    break;
            }
            out << YAML::EndMap;
        }
        if (a.sfm.mode != sfm::ParamMode::Default || !a.sfm.overrides.empty() || a.sfm.seed) {
            out << YAML::Key << "sfm" << YAML::Value << YAML::BeginMap;
            if (a.sfm.mode != sfm::ParamMode::Default)
                out << YAML::Key << "mode" << YAML::Value << sfm::to_string(a.sfm.mode);
            if (a.sfm.seed) out << YAML::Key << "seed" << YAML::Value << *a.sfm.seed;
            if (!a.sfm.overrides.empty()) {
                out << YAML::Key << "overrides" << YAML::Value << YAML::BeginMap;
                for (const auto& [key, value] : a.sfm.overrides)
                    out << YAML::Key << key << YAML::Value << value;
                out << YAML::EndMap;
            }
            out << YAML::EndMap;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    if (!s.groups.empty()) {
        out << YAML::Key << "groups" << YAML::Value << YAML::BeginSeq;
        for (const GroupSpec& g : s.groups) {
            out << YAML::BeginMap;
            out << YAML::Key << "id" << YAML::Value << g.id;
            out << YAML::Key << "members" << YAML::Value << YAML::Flow << YAML::BeginSeq;
            for (int m : g.members) out << m;
            out << YAML::EndSeq << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }

    if (!s.metrics_all) {
        out << YAML::Key << "metrics" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const auto& name : s.metrics) out << name;
        out << YAML::EndSeq;
    }

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

namespace {

GridPtr load_pgm(const std::string& pgm_path, double resolution, Pose2D origin,
                 double occupied_thresh, bool negate) {
    std::ifstream in(pgm_path, std::ios::binary);
    if (!in) fail("cannot open map image '" + pgm_path + "'");

    auto next_token = [&in, &pgm_path]() {
        std::string tok;
        for (;;) {
            int c = in.get();
            if (c == EOF) fail("truncated PGM '" + pgm_path + "'");
            if (c == '#') {
                std::string dummy;
                std::getline(in, dummy);
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok += static_cast<char>(c);
        }
    };

    const std::string magic = next_token();
    if (magic != "P2" && magic != "P5") fail("unsupported PGM magic '" + magic + "' in " + pgm_path);
    const int width = static_cast<int>(parse_int(next_token(), "PGM width"));
    const int height = static_cast<int>(parse_int(next_token(), "PGM height"));
    const int maxval = static_cast<int>(parse_int(next_token(), "PGM maxval"));
    if (width <= 0 || height <= 0) fail("bad PGM dimensions in " + pgm_path);
    if (maxval <= 0 || maxval > 255) fail("PGM maxval must be <= 255 in " + pgm_path);

    std::vector<std::uint8_t> image(static_cast<std::size_t>(width) * height);
    if (magic == "P5") {
        in.read(reinterpret_cast<char*>(image.data()), static_cast<std::streamsize>(image.size()));
        if (in.gcount() != static_cast<std::streamsize>(image.size()))
            fail("truncated PGM '" + pgm_path + "'");
    } else {
        for (auto& px : image) px = static_cast<std::uint8_t>(parse_int(next_token(), "PGM pixel"));
    }

    // Image row 0 is the top of the map; storage row 0 is the bottom.
    std::vector<std::uint8_t> cells(image.size());
    for (int cy = 0; cy < height; ++cy) {
        for (int cx = 0; cx < width; ++cx) {
            const std::uint8_t px = image[static_cast<std::size_t>(height - 1 - cy) * width + cx];
            const double shade = static_cast<double>(px) / maxval;
            const double occ = negate ? shade : 1.0 - shade;
            cells[static_cast<std::size_t>(cy) * width + cx] = occ > occupied_thresh ? 1 : 0;
        }
    }
    return std::make_shared<OccupancyGrid>(width, height, resolution, origin, std::move(cells));
}

}  // namespace

GridPtr load_map_file(const std::string& yaml_path) {
    YAML::Node doc;
    try {
        doc = YAML::LoadFile(yaml_path);
    } catch (const YAML::Exception& e) {
        fail("cannot load map yaml '" + yaml_path + "': " + e.what());
    }
    if (!doc["image"] || !doc["resolution"]) fail("map yaml needs 'image' and 'resolution'");
    const double resolution = doc["resolution"].as<double>();
    Pose2D origin;
    if (doc["origin"]) origin = as_pose(doc["origin"], "map origin");
    const double occupied_thresh = doc["occupied_thresh"] ? doc["occupied_thresh"].as<double>() : 0.65;
    const bool negate = doc["negate"] ? doc["negate"].as<int>() != 0 : false;

    fs::path image_path = doc["image"].as<std::string>();
    if (!image_path.is_absolute()) image_path = fs::path(yaml_path).parent_path() / image_path;
    return load_pgm(image_path.string(), resolution, origin, occupied_thresh, negate);
}

GridPtr load_map(const MapRef& map, const std::string& base_dir) {
    if (const std::string* path = std::get_if<std::string>(&map)) {
        fs::path p = *path;
        if (!p.is_absolute()) p = fs::path(base_dir) / p;
        if (!fs::exists(p)) fail("map file not found: " + p.string());
        return load_map_file(p.string());
    }
    const InlineMap& m = std::get<InlineMap>(map);
    return OccupancyGrid::from_ascii(m.grid, m.resolution, m.origin);
}

}  // namespace socnav::io
