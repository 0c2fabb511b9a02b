#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>

#include "contsim/config.hpp"
#include "contsim/env.hpp"
#include "contsim/rng.hpp"

namespace contsim {

struct RuleBased {
  double threshold = 1.0;  // volume units, > 0
};
struct UniformRandom {};
struct DoNothing {};

using PolicyKind = std::variant<RuleBased, UniformRandom, DoNothing>;

// "rule-based" | "random" | "do-nothing". Throws std::invalid_argument.
PolicyKind parse_policy(std::string_view name, double threshold = 1.0);
std::string policy_name(const PolicyKind& kind);

// Empties the lowest-index container with |v_i - v*_i1| < threshold, where
// v*_i1 is its ideal optimum. Ignores PU availability.
Action rule_based_action(const State& s, const EnvConfig& cfg, double threshold = 1.0);

// Uniform over {do-nothing, empty 1, ..., empty n}.
Action uniform_random_action(Rng& rng, std::size_t n);

// A policy maps the current state to an action. Stateful policies (random)
// carry their own stream inside the closure.
using Policy = std::function<Action(const State&)>;

// The random policy draws from its own stream derived from episode_seed, so
// the env's noise stream is unaffected by the choice of policy.
Policy make_policy(const PolicyKind& kind, const EnvConfig& cfg, std::uint64_t episode_seed);

}  // namespace contsim
