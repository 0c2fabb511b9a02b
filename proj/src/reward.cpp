#include "contsim/reward.hpp"

#include <cmath>

#include "contsim/env.hpp"

namespace contsim {

double emptying_reward_excess(double volume, const ContainerParams& p, double reward_penalty) {
  double excess = 0.0;
  for (const Optimum& o : p.optima) {
    const double d = volume - o.volume;
    excess += (o.height - reward_penalty) * std::exp(-(d * d) / (2.0 * o.width * o.width));
  }
  return excess;
}

double emptying_reward(double volume, const ContainerParams& p, double reward_penalty) {
  return reward_penalty + emptying_reward_excess(volume, p, reward_penalty);
}

bool any_overflow(const State& s, const EnvConfig& cfg) {
  for (double v : s.volumes) {
    if (v >= cfg.max_volume) return true;
  }
  return false;
}

double reward(const State& /*current*/, const Action& action, const State& next, const EnvConfig& cfg,
              bool pu_was_available, std::optional<double> emptied_volume) {
  if (any_overflow(next, cfg)) return cfg.reward_min;
  if (action.is_do_nothing()) return 0.0;
  if (!pu_was_available || !emptied_volume || *emptied_volume == 0.0) return cfg.reward_penalty;
  return emptying_reward(*emptied_volume, cfg.containers[action.container_index()], cfg.reward_penalty);
}

}  // namespace contsim
