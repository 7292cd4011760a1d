#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "socnav/engine.hpp"

namespace socnav::bridge {

/// One manager session of the wrapper protocol: init -> step* -> finish/bye.
/// Newline-delimited JSON, one message per line, strict request-reply.
class Session {
public:
    explicit Session(std::string base_dir = ".", std::string default_out_dir = "bridge_out");

    /// Handle one decoded message; always returns a reply message.
    nlohmann::json handle(const nlohmann::json& msg);
    /// Parse one NDJSON line and handle it; malformed input yields an error
    /// reply and the session continues.
    std::string handle_line(const std::string& line);

    bool done() const { return done_; }
    bool initialized() const { return engine_ != nullptr; }
    sim::Engine* engine() { return engine_.get(); }

    /// Flush a partial report (EOF or disconnect before finish).
    void flush_partial();

private:
    nlohmann::json handle_init(const nlohmann::json& msg);
    nlohmann::json handle_step(const nlohmann::json& msg);
    nlohmann::json handle_command(const nlohmann::json& msg);
    nlohmann::json agents_json() const;

    std::unique_ptr<sim::Engine> engine_;
    std::string base_dir_;
    std::string out_dir_;
    std::optional<double> last_step_t_;
    bool done_ = false;
    bool report_written_ = false;
};

/// Serve exactly one session over the given streams (stdio embedding).
void serve_stream(std::istream& in, std::ostream& out, const std::string& base_dir,
                  const std::string& out_dir);

/// Serve exactly one TCP session on 127.0.0.1:port; concurrent connection
/// attempts are refused with an error message. Returns 0 on clean shutdown.
int serve_tcp(int port, const std::string& base_dir, const std::string& out_dir);

}  // namespace socnav::bridge
