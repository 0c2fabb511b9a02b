#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "contsim/config.hpp"
#include "contsim/rng.hpp"

namespace contsim {

struct State {
  std::vector<double> volumes;  // v_1..v_n
  std::vector<double> timers;   // p_1..p_m, seconds until free
  std::int64_t t = 0;

  bool operator==(const State&) const = default;
};

// Integer action encoding: 0 is do-nothing, i in 1..n empties container i.
struct Action {
  int code = 0;

  static constexpr Action do_nothing() { return Action{0}; }
  static constexpr Action empty(int container) { return Action{container}; }

  bool is_do_nothing() const { return code == 0; }
  // Zero-based index of the targeted container. Only valid for emptying actions.
  std::size_t container_index() const { return static_cast<std::size_t>(code - 1); }

  bool operator==(const Action&) const = default;
};

// Throws std::out_of_range unless 0 <= code <= n.
Action decode_action(long long code, std::size_t n);

struct StepInfo {
  bool pu_available = false;
  std::optional<double> emptied_volume;  // set iff a PU took the job
  std::optional<std::size_t> pu_index;   // zero-based

  bool operator==(const StepInfo&) const = default;
};

using Observation = std::vector<double>;

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool terminated = false;  // overflow
  bool truncated = false;   // horizon reached
  StepInfo info;
};

// Flat [v_1..v_n, p_1..p_m].
Observation observe(const State& s);

// Raised when stepping a finished episode or before reset.
class EpisodeOver : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Initial state: volumes Uniform[lo, hi] in container order, timers free.
State initial_state(const EnvConfig& cfg, Rng& rng);

struct Transition {
  State next;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  StepInfo info;
};

// One MDP transition. Consumes exactly n normal draws from rng in container
// order, whatever the action. Pure given (state, action, cfg, rng state).
Transition transition(const State& s, Action a, const EnvConfig& cfg, Rng& rng);

// Stateful episode driver. Not thread-safe; separate instances are independent.
class Env {
 public:
  explicit Env(std::shared_ptr<const EnvConfig> cfg);
  explicit Env(EnvConfig cfg);

  Observation reset(std::uint64_t seed);
  StepResult step(Action a);

  const EnvConfig& config() const { return *cfg_; }
  const State& state() const { return state_; }
  const Rng& rng() const { return rng_; }
  bool has_episode() const { return started_; }
  bool done() const { return done_; }

 private:
  std::shared_ptr<const EnvConfig> cfg_;
  State state_;
  Rng rng_;
  bool started_ = false;
  bool done_ = false;
};

}  // namespace contsim
