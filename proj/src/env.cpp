#include "contsim/env.hpp"

#include <string>

#include "contsim/dynamics.hpp"
#include "contsim/reward.hpp"

namespace contsim {

Action decode_action(long long code, std::size_t n) {
  if (code < 0 || code > static_cast<long long>(n)) {
    throw std::out_of_range("action " + std::to_string(code) + " outside 0.." + std::to_string(n));
  }
  return Action{static_cast<int>(code)};
}

Observation observe(const State& s) {
  Observation obs;
  obs.reserve(s.volumes.size() + s.timers.size());
  obs.insert(obs.end(), s.volumes.begin(), s.volumes.end());
  obs.insert(obs.end(), s.timers.begin(), s.timers.end());
  return obs;
}

State initial_state(const EnvConfig& cfg, Rng& rng) {
  State s;
  s.volumes.reserve(cfg.n());
  const auto [lo, hi] = cfg.initial_volume_range;
  for (std::size_t i = 0; i < cfg.n(); ++i) s.volumes.push_back(lo + (hi - lo) * rng.uniform01());
  s.timers.assign(cfg.m(), 0.0);
  return s;
}

Transition transition(const State& s, Action a, const EnvConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.n();
  const double delta = cfg.timestep_seconds;

  std::optional<std::size_t> free_pu;
  if (!a.is_do_nothing()) {
    for (std::size_t j = 0; j < s.timers.size(); ++j) {
      if (s.timers[j] == 0.0) {
        free_pu = j;
        break;
      }
    }
  }

  Transition tr;
  tr.next.t = s.t + 1;
  tr.next.volumes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NoiseDraw eps{cfg.noise_std_per_step(i) * rng.normal()};
    tr.next.volumes[i] = step_volume(s.volumes[i], cfg.drift_per_step(i), eps);
  }
  tr.next.timers.resize(s.timers.size());
  for (std::size_t j = 0; j < s.timers.size(); ++j) tr.next.timers[j] = decay_timer(s.timers[j], delta);

  if (!a.is_do_nothing()) tr.info.pu_available = free_pu.has_value();
  if (free_pu) {
    const std::size_t i = a.container_index();
    const double v = s.volumes[i];
    tr.next.volumes[i] = 0.0;
    tr.next.timers[*free_pu] = processing_time(v, cfg.containers[i]);
    tr.info.emptied_volume = v;
    tr.info.pu_index = free_pu;
  }

  tr.reward = reward(s, a, tr.next, cfg, tr.info.pu_available, tr.info.emptied_volume);
  tr.terminated = any_overflow(tr.next, cfg);
  tr.truncated = !tr.terminated && tr.next.t >= cfg.max_episode_steps;
  return tr;
}

Env::Env(std::shared_ptr<const EnvConfig> cfg) : cfg_(std::move(cfg)) { validate(*cfg_); }

Env::Env(EnvConfig cfg) : Env(std::make_shared<const EnvConfig>(std::move(cfg))) {}

Observation Env::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  state_ = initial_state(*cfg_, rng_);
  started_ = true;
  done_ = false;
  return observe(state_);
}

StepResult Env::step(Action a) {
  if (!started_) throw EpisodeOver("step called before reset");
  if (done_) throw EpisodeOver("episode is over; call reset");
  (void)decode_action(a.code, cfg_->n());

  Transition tr = transition(state_, a, *cfg_, rng_);
  state_ = std::move(tr.next);
  done_ = tr.terminated || tr.truncated;
  return StepResult{observe(state_), tr.reward, tr.terminated, tr.truncated, tr.info};
}

}  // namespace contsim
