#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include "contsim/config.hpp"
#include "contsim/env.hpp"

namespace contsim {

// Newline-delimited JSON session around one Env.
//
// Requests:   {"cmd":"hello"} | {"cmd":"reset","seed":S} | {"cmd":"step","action":A} | {"cmd":"close"}
// Responses:  {"spec":{...}} | {"transition":{...}} | {"ack":"close"} | {"error":{"code":C,"message":M}}
//
// Error codes: bad_json, bad_action, episode_over, not_reset. Every error is
// recoverable; the session keeps its episode state.
class Session {
 public:
  explicit Session(std::shared_ptr<const EnvConfig> cfg);

  // Handles one request line (without the trailing newline) and returns the
  // response line (without newline).
  std::string handle(std::string_view line);

  bool closed() const { return closed_; }

 private:
  std::shared_ptr<const EnvConfig> cfg_;
  Env env_;
  std::string fingerprint_;
  bool closed_ = false;
};

// Serves one session over a pair of streams until close or EOF.
void serve_stream(std::shared_ptr<const EnvConfig> cfg, std::istream& in, std::ostream& out);

// Listens on 127.0.0.1:port (0 picks a free port), one thread and one Env per
// connection. on_listening receives the bound port. Returns once `stop` is set.
void serve_tcp(std::shared_ptr<const EnvConfig> cfg, std::uint16_t port, const std::atomic<bool>& stop,
               const std::function<void(std::uint16_t)>& on_listening = {});

}  // namespace contsim
