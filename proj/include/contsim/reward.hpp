#pragma once

#include <optional>

#include "contsim/config.hpp"

namespace contsim {

struct State;
struct Action;

// Sum-of-Gaussians emptying reward:
//   r_pen + sum_k (h_k - r_pen) * exp(-(v - v*_k)^2 / (2 w_k^2)).
// Callers handle v == 0 (penalty) before calling.
double emptying_reward(double volume, const ContainerParams& p, double reward_penalty);

// Only the Gaussian excess above r_pen; strictly positive whenever exp does
// not underflow, even where the full reward rounds to r_pen.
double emptying_reward_excess(double volume, const ContainerParams& p, double reward_penalty);

// Full reward case analysis. Overflow in `next` dominates; then do-nothing
// (0); then a futile attempt (no free PU or empty container) gives r_pen;
// otherwise the emptying reward of the pre-emptying volume.
double reward(const State& current, const Action& action, const State& next, const EnvConfig& cfg,
              bool pu_was_available, std::optional<double> emptied_volume);

bool any_overflow(const State& s, const EnvConfig& cfg);

}  // namespace contsim
