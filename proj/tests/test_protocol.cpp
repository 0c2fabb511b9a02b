#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <future>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "contsim/protocol.hpp"
#include "contsim/rollout.hpp"
#include "support.hpp"

using namespace contsim;
using nlohmann::json;

namespace {

std::shared_ptr<const EnvConfig> cfg_5_2() { return std::make_shared<const EnvConfig>(default_config({5, 2, 120})); }

std::string error_code(const std::string& response) {
  const json j = json::parse(response);
  return j.contains("error") ? j["error"]["code"].get<std::string>() : std::string{};
}

}  // namespace

TEST_CASE("hello reports the spaces") {
  Session s(cfg_5_2());
  const json r = json::parse(s.handle(R"({"cmd":"hello"})"));
  CHECK(r["spec"]["n"] == 5);
  CHECK(r["spec"]["m"] == 2);
  CHECK(r["spec"]["obs_len"] == 7);
  CHECK(r["spec"]["actions"] == 6);
  CHECK(r["spec"]["fingerprint"] == config_fingerprint(*cfg_5_2()));
}

TEST_CASE("error codes and recovery") {
  Session s(cfg_5_2());
  CHECK(error_code(s.handle("{oops")) == "bad_json");
  CHECK(error_code(s.handle(R"({"nocmd":1})")) == "bad_json");
  CHECK(error_code(s.handle(R"({"cmd":"fly"})")) == "bad_json");
  CHECK(error_code(s.handle(R"({"cmd":"reset"})")) == "bad_json");
  CHECK(error_code(s.handle(R"({"cmd":"reset","seed":-3})")) == "bad_json");
  CHECK(error_code(s.handle(R"({"cmd":"step","action":0})")) == "not_reset");
  CHECK(error_code(s.handle(R"({"cmd":"step","action":7})")) == "bad_action");
  CHECK(error_code(s.handle(R"({"cmd":"step","action":-1})")) == "bad_action");
  CHECK(error_code(s.handle(R"({"cmd":"step","action":1.5})")) == "bad_action");

  const json reset = json::parse(s.handle(R"({"cmd":"reset","seed":4})"));
  CHECK(reset["transition"]["observation"].size() == 7);
  CHECK(error_code(s.handle(R"({"cmd":"step","action":6})")) == "bad_action");
  const json step = json::parse(s.handle(R"({"cmd":"step","action":0})"));
  CHECK(step["transition"]["reward"] == 0.0);
  CHECK(step["transition"]["info"]["pu_available"] == false);
  CHECK(step["transition"]["info"]["emptied_volume"].is_null());

  const json bye = json::parse(s.handle(R"({"cmd":"close"})"));
  CHECK(bye["ack"] == "close");
  CHECK(s.closed());
}

TEST_CASE("stepping past the end is episode_over until reset") {
  EnvConfig cfg = default_config({5, 2, 120});
  cfg.max_episode_steps = 3;
  Session s(std::make_shared<const EnvConfig>(cfg));
  s.handle(R"({"cmd":"reset","seed":1})");
  for (int k = 0; k < 3; ++k) CHECK(error_code(s.handle(R"({"cmd":"step","action":0})")).empty());
  CHECK(error_code(s.handle(R"({"cmd":"step","action":0})")) == "episode_over");
  s.handle(R"({"cmd":"reset","seed":2})");
  CHECK(error_code(s.handle(R"({"cmd":"step","action":0})")).empty());
}

TEST_CASE("protocol episode equals the in-process rollout") {
  const auto cfg = cfg_5_2();
  const Trajectory traj = run_episode(*cfg, UniformRandom{}, 21);
  Session s(cfg);
  json obs = json::parse(s.handle(R"({"cmd":"reset","seed":21})"))["transition"]["observation"];
  for (const StepRecord& r : traj.steps) {
    CHECK(obs.get<std::vector<double>>() == observe(State{r.volumes, r.timers, r.t}));
    const json tr = json::parse(s.handle(json{{"cmd", "step"}, {"action", r.action.code}}.dump()))["transition"];
    CHECK(tr["reward"].get<double>() == r.reward);
    CHECK(tr["terminated"].get<bool>() == r.terminated);
    CHECK(tr["truncated"].get<bool>() == r.truncated);
    CHECK(tr["info"]["pu_available"].get<bool>() == r.pu_available);
    if (r.emptied_volume) {
      CHECK(tr["info"]["emptied_volume"].get<double>() == *r.emptied_volume);
      CHECK(tr["info"]["pu_index"].get<int>() >= 1);
    }
    obs = tr["observation"];
  }
}

TEST_CASE("serve_stream answers each line and stops at close") {
  std::istringstream in("{\"cmd\":\"hello\"}\n\n{\"cmd\":\"reset\",\"seed\":3}\r\n{\"cmd\":\"close\"}\n{\"cmd\":\"hello\"}\n");
  std::ostringstream out;
  serve_stream(cfg_5_2(), in, out);
  std::istringstream lines(out.str());
  std::string line;
  std::vector<std::string> got;
  while (std::getline(lines, line)) got.push_back(line);
  REQUIRE(got.size() == 3);
  CHECK(json::parse(got[0]).contains("spec"));
  CHECK(json::parse(got[1]).contains("transition"));
  CHECK(json::parse(got[2]).contains("ack"));
}

TEST_CASE("tcp transport serves independent sessions") {
  std::atomic<bool> stop{false};
  std::promise<std::uint16_t> bound;
  std::thread server([&] { serve_tcp(cfg_5_2(), 0, stop, [&](std::uint16_t p) { bound.set_value(p); }); });
  const std::uint16_t port = bound.get_future().get();

  auto talk = [port](const std::vector<std::string>& requests) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    std::vector<std::string> replies;
    std::string pending;
    for (const auto& req : requests) {
      const std::string line = req + "\n";
      REQUIRE(::send(fd, line.data(), line.size(), 0) == static_cast<ssize_t>(line.size()));
      while (pending.find('\n') == std::string::npos) {
        char buf[4096];
        const ssize_t got = ::recv(fd, buf, sizeof buf, 0);
        REQUIRE(got > 0);
        pending.append(buf, static_cast<std::size_t>(got));
      }
      const auto nl = pending.find('\n');
      replies.push_back(pending.substr(0, nl));
      pending.erase(0, nl + 1);
    }
    ::close(fd);
    return replies;
  };

  const std::vector<std::string> script = {R"({"cmd":"reset","seed":5})", R"({"cmd":"step","action":1})",
                                           R"({"cmd":"step","action":0})", R"({"cmd":"close"})"};
  const auto a = talk(script);
  const auto b = talk(script);
  CHECK(a == b);
  Session local(cfg_5_2());
  for (std::size_t k = 0; k < script.size(); ++k) CHECK(a[k] == local.handle(script[k]));

  stop = true;
  server.join();
}
