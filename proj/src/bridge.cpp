#include "socnav/bridge.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/select.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <iostream>
#include <stdexcept>

#include "socnav/harness.hpp"
#include "socnav/parse_util.hpp"

namespace socnav::bridge {

using nlohmann::json;

namespace {

json error_reply(const std::string& message) {
    return json{{"type", "error"}, {"message", message}};
}

RobotState robot_from_json(const json& j, double default_radius) {
    RobotState r;
    r.pose = {j.at("x").get<double>(), j.at("y").get<double>(), j.value("yaw", 0.0)};
    r.velocity = {j.value("vx", 0.0), j.value("vy", 0.0)};
    r.radius = j.value("radius", default_radius);
    return r;
}

}  // namespace

Session::Session(std::string base_dir, std::string default_out_dir)
    : base_dir_(std::move(base_dir)), out_dir_(std::move(default_out_dir)) {}

json Session::agents_json() const {
    json agents = json::array();
    for (const AgentState& a : engine_->agent_states()) {
        agents.push_back({{"id", a.id},
                          {"x", a.pose.x},
                          {"y", a.pose.y},
                          {"yaw", a.pose.yaw},
                          {"vx", a.velocity.x},
                          {"vy", a.velocity.y},
                          {"status", to_string(a.behavior_status)},
                          {"animation", sim::Engine::animation_hint(a.behavior_status)}});
    }
    return agents;
}

json Session::handle_init(const json& msg) {
    if (engine_) return error_reply("already initialized");
    if (!msg.contains("scenario") || !msg.at("scenario").is_string())
        return error_reply("init needs a 'scenario' string (YAML document)");
    io::Scenario scenario;
    try {
        scenario = io::parse_scenario(msg.at("scenario").get<std::string>(), base_dir_);
    } catch (const std::exception& e) {
        return error_reply(e.what());
    }
    if (msg.contains("out_dir")) out_dir_ = msg.at("out_dir").get<std::string>();
    engine_ = std::make_unique<sim::Engine>(scenario, base_dir_);
    RobotState robot;
    robot.pose = scenario.robot.pose;
    robot.radius = scenario.robot.radius;
    engine_->set_time_robot(0.0, robot);
    return json{{"type", "ack"},
                {"agents", engine_->agent_count()},
                {"dt", engine_->dt()},
                {"agent_states", agents_json()}};
}

json Session::handle_step(const json& msg) {
    if (!engine_) return error_reply("uninitialized: send init first");
    if (!msg.contains("t") || !msg.at("t").is_number()) return error_reply("step needs numeric 't'");
    const double t = msg.at("t").get<double>();
    if (last_step_t_ && t <= *last_step_t_)
        return error_reply("non-monotonic time: t=" + num_to_string(t) + " after t=" +
                           num_to_string(*last_step_t_));
    if (msg.contains("dt")) {
        const double dt = msg.at("dt").get<double>();
        if (std::abs(dt - engine_->dt()) > 1e-12)
            return error_reply("dt mismatch: scenario uses " + num_to_string(engine_->dt()));
    }

    RobotState robot = engine_->robot();
    try {
        if (msg.contains("robot")) robot = robot_from_json(msg.at("robot"), engine_->robot().radius);
        std::vector<sim::AdoptedAgent> adopted;
        if (msg.contains("agents")) {
            for (const json& a : msg.at("agents")) {
                sim::AdoptedAgent p;
                p.id = a.at("id").get<int>();
                p.pose = {a.at("x").get<double>(), a.at("y").get<double>(), a.value("yaw", 0.0)};
                p.velocity = {a.value("vx", 0.0), a.value("vy", 0.0)};
                adopted.push_back(p);
            }
        }
        engine_->set_time_robot(t, robot);
        engine_->adopt_agent_poses(adopted);  // external simulator is authoritative
    } catch (const std::exception& e) {
        return error_reply(e.what());
    }
    last_step_t_ = t;

    engine_->record_current();
    engine_->compute_next();
    return json{{"type", "agents_reply"}, {"t", t}, {"agents", agents_json()}};
}

json Session::handle_command(const json& msg) {
    if (!engine_) return error_reply("uninitialized: send init first");
    const std::string cmd = msg.value("command", "");
    try {
        if (cmd == "record_start") {
            engine_->record_start();
            return json{{"type", "ack"}};
        }
        if (cmd == "record_stop") {
            engine_->record_stop();
            return json{{"type", "ack"}};
        }
        if (cmd == "finish") {
            const eval::TrajectoryLog& log = engine_->finish();
            const auto selection = sim::metric_selection(engine_->scenario());
            const std::string hash = fnv1a_hex(io::serialize_scenario(engine_->scenario()));
            const auto report =
                eval::compute_metrics(log, selection, hash, engine_->scenario().seed);
            eval::write_report_files(report, log, out_dir_);
            report_written_ = true;
            done_ = true;
            return json{{"type", "ack"}, {"report_dir", out_dir_}};
        }
    } catch (const std::exception& e) {
        return error_reply(e.what());
    }
    return error_reply("unknown command '" + cmd + "'");
}

json Session::handle(const json& msg) {
    if (!msg.is_object() || !msg.contains("type") || !msg.at("type").is_string())
        return error_reply("message needs a 'type'");
    const std::string type = msg.at("type").get<std::string>();
    if (type == "init") return handle_init(msg);
    if (type == "step") return handle_step(msg);
    if (type == "command") return handle_command(msg);
    if (type == "bye") {
        done_ = true;
        return json{{"type", "ack"}};
    }
    return error_reply("unknown message type '" + type + "'");
}

std::string Session::handle_line(const std::string& line) {
    json msg;
    try {
        msg = json::parse(line);
    } catch (const json::parse_error& e) {
        return error_reply(std::string("malformed JSON: ") + e.what()).dump();
    }
    return handle(msg).dump();
}

void Session::flush_partial() {
    if (!engine_ || report_written_) return;
    const eval::TrajectoryLog& log = engine_->finish();
    const auto selection = sim::metric_selection(engine_->scenario());
    const std::string hash = fnv1a_hex(io::serialize_scenario(engine_->scenario()));
    const auto report = eval::compute_metrics(log, selection, hash, engine_->scenario().seed);
    eval::write_report_files(report, log, out_dir_);
    report_written_ = true;
}

void serve_stream(std::istream& in, std::ostream& out, const std::string& base_dir,
                  const std::string& out_dir) {
    Session session(base_dir, out_dir);
    std::string line;
    while (!session.done() && std::getline(in, line)) {
        if (line.empty()) continue;
        out << session.handle_line(line) << "\n";
        out.flush();
    }
    session.flush_partial();  // EOF mid-run still leaves a usable report
}

namespace {

struct Fd {
    int fd = -1;
    ~Fd() {
        if (fd >= 0) ::close(fd);
    }
};

}  // namespace

int serve_tcp(int port, const std::string& base_dir, const std::string& out_dir) {
    Fd listener;
    listener.fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener.fd < 0) {
        std::cerr << "socket: " << std::strerror(errno) << "\n";
        return 1;
    }
    int yes = 1;
    ::setsockopt(listener.fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(listener.fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        std::cerr << "bind 127.0.0.1:" << port << ": " << std::strerror(errno) << "\n";
        return 1;
    }
    if (::listen(listener.fd, 4) < 0) {
        std::cerr << "listen: " << std::strerror(errno) << "\n";
        return 1;
    }

    Fd client;
    client.fd = ::accept(listener.fd, nullptr, nullptr);
    if (client.fd < 0) {
        std::cerr << "accept: " << std::strerror(errno) << "\n";
        return 1;
    }

    Session session(base_dir, out_dir);
    std::string buffer;
    char chunk[4096];
    bool clean = false;

    while (!session.done()) {
        fd_set readable;
        FD_ZERO(&readable);
        FD_SET(client.fd, &readable);
        FD_SET(listener.fd, &readable);
        const int maxfd = std::max(client.fd, listener.fd);
        if (::select(maxfd + 1, &readable, nullptr, nullptr, nullptr) < 0) break;

        if (FD_ISSET(listener.fd, &readable)) {
            // Single-session server: turn away concurrent clients explicitly.
            Fd intruder;
            intruder.fd = ::accept(listener.fd, nullptr, nullptr);
            if (intruder.fd >= 0) {
                const std::string refusal =
                    error_reply("session already active; single-session server").dump() + "\n";
                (void)!::write(intruder.fd, refusal.data(), refusal.size());
            }
            continue;
        }

        const ssize_t n = ::read(client.fd, chunk, sizeof chunk);
        if (n <= 0) break;  // disconnect
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t pos;
        while (!session.done() && (pos = buffer.find('\n')) != std::string::npos) {
            const std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            if (line.empty()) continue;
            const std::string reply = session.handle_line(line) + "\n";
            if (::write(client.fd, reply.data(), reply.size()) < 0) break;
        }
        if (session.done()) clean = true;
    }
    session.flush_partial();
    return clean || session.done() ? 0 : 0;
}

}  // namespace socnav::bridge
