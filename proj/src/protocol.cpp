#include "contsim/protocol.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <json.hpp>

namespace contsim {

using nlohmann::json;

namespace {

std::string error_response(const char* code, const std::string& message) {
  return json{{"error", {{"code", code}, {"message", message}}}}.dump();
}

json transition_json(const Observation& obs, double reward, bool terminated, bool truncated, const json& info) {
  return json{{"transition",
               {{"observation", obs},
                {"reward", reward},
                {"terminated", terminated},
                {"truncated", truncated},
                {"info", info}}}};
}

}  // namespace

Session::Session(std::shared_ptr<const EnvConfig> cfg)
    : cfg_(cfg), env_(cfg), fingerprint_(config_fingerprint(*cfg)) {}

std::string Session::handle(std::string_view line) {
  json req;
  try {
    req = json::parse(line);
  } catch (const json::parse_error& e) {
    return error_response("bad_json", e.what());
  }
  if (!req.is_object() || !req.contains("cmd") || !req["cmd"].is_string()) {
    return error_response("bad_json", "request must be an object with a string 'cmd'");
  }
  const std::string cmd = req["cmd"].get<std::string>();

  if (cmd == "hello") {
    return json{{"spec",
                 {{"n", cfg_->n()},
                  {"m", cfg_->m()},
                  {"obs_len", cfg_->n() + cfg_->m()},
                  {"actions", cfg_->n() + 1},
                  {"max_episode_steps", cfg_->max_episode_steps},
                  {"timestep_seconds", cfg_->timestep_seconds},
                  {"fingerprint", fingerprint_}}}}
        .dump();
  }

  if (cmd == "reset") {
    if (!req.contains("seed") || !req["seed"].is_number_integer() ||
        (req["seed"].is_number_integer() && !req["seed"].is_number_unsigned())) {
      return error_response("bad_json", "reset needs a non-negative integer 'seed'");
    }
    const Observation obs = env_.reset(req["seed"].get<std::uint64_t>());
    return transition_json(obs, 0.0, false, false, json::object()).dump();
  }

  if (cmd == "step") {
    if (!req.contains("action") || !req["action"].is_number_integer()) {
      return error_response("bad_action", "step needs an integer 'action' in 0.." + std::to_string(cfg_->n()));
    }
    Action a;
    try {
      a = decode_action(req["action"].get<long long>(), cfg_->n());
    } catch (const std::out_of_range& e) {
      return error_response("bad_action", e.what());
    }
    if (!env_.has_episode()) return error_response("not_reset", "send reset before the first step");
    if (env_.done()) return error_response("episode_over", "episode has ended; send reset");
    const StepResult r = env_.step(a);
    json info{{"pu_available", r.info.pu_available}, {"emptied_volume", nullptr}, {"pu_index", nullptr}};
    if (r.info.emptied_volume) info["emptied_volume"] = *r.info.emptied_volume;
    if (r.info.pu_index) info["pu_index"] = *r.info.pu_index + 1;
    return transition_json(r.observation, r.reward, r.terminated, r.truncated, info).dump();
  }

  if (cmd == "close") {
    closed_ = true;
    return json{{"ack", "close"}}.dump();
  }

  return error_response("bad_json", "unknown cmd '" + cmd + "'");
}

void serve_stream(std::shared_ptr<const EnvConfig> cfg, std::istream& in, std::ostream& out) {
  Session session(std::move(cfg));
  std::string line;
  while (!session.closed() && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out << session.handle(line) << '\n';
    out.flush();
  }
}

namespace {

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = o.fd_;
      o.fd_ = -1;
    }
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }

  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

bool write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t w = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<std::size_t>(w);
  }
  return true;
}

void serve_connection(std::shared_ptr<const EnvConfig> cfg, Fd conn, const std::atomic<bool>& stop) {
  Session session(std::move(cfg));
  std::string buffer;
  char chunk[4096];
  while (!session.closed() && !stop.load()) {
    pollfd pfd{conn.get(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready < 0 && errno != EINTR) return;
    if (ready <= 0) continue;
    const ssize_t got = ::recv(conn.get(), chunk, sizeof chunk, 0);
    if (got <= 0) return;
    buffer.append(chunk, static_cast<std::size_t>(got));
    std::size_t start = 0;
    for (std::size_t nl = buffer.find('\n'); nl != std::string::npos; nl = buffer.find('\n', start)) {
      std::string line = buffer.substr(start, nl - start);
      start = nl + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (!write_all(conn.get(), session.handle(line) + "\n")) return;
      if (session.closed()) return;
    }
    buffer.erase(0, start);
  }
}

}  // namespace

void serve_tcp(std::shared_ptr<const EnvConfig> cfg, std::uint16_t port, const std::atomic<bool>& stop,
               const std::function<void(std::uint16_t)>& on_listening) {
  Fd listener(::socket(AF_INET, SOCK_STREAM, 0));
  if (listener.get() < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  const int yes = 1;
  ::setsockopt(listener.get(), SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listener.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    throw std::runtime_error("bind port " + std::to_string(port) + ": " + std::strerror(errno));
  }
  if (::listen(listener.get(), 16) < 0) throw std::runtime_error(std::string("listen: ") + std::strerror(errno));
  socklen_t len = sizeof addr;
  ::getsockname(listener.get(), reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listening) on_listening(ntohs(addr.sin_port));

  std::vector<std::thread> workers;
  while (!stop.load()) {
    pollfd pfd{listener.get(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    Fd conn(::accept(listener.get(), nullptr, nullptr));
    if (conn.get() < 0) continue;
    workers.emplace_back(serve_connection, cfg, std::move(conn), std::cref(stop));
  }
  for (auto& w : workers) w.join();
}

}  // namespace contsim
