#include "contsim/policies.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace contsim {

namespace {
constexpr std::uint64_t kPolicyStreamSalt = 0x706f6c6963792d31ULL;
}

PolicyKind parse_policy(std::string_view name, double threshold) {
  if (name == "rule-based") {
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    return RuleBased{threshold};
  }
  if (name == "random") return UniformRandom{};
  if (name == "do-nothing") return DoNothing{};
  throw std::invalid_argument("unknown policy '" + std::string(name) + "' (rule-based, random, do-nothing)");
}

std::string policy_name(const PolicyKind& kind) {
  struct {
    std::string operator()(const RuleBased&) const { return "rule-based"; }
    std::string operator()(const UniformRandom&) const { return "random"; }
    std::string operator()(const DoNothing&) const { return "do-nothing"; }
  } visitor;
  return std::visit(visitor, kind);
}

Action rule_based_action(const State& s, const EnvConfig& cfg, double threshold) {
  for (std::size_t i = 0; i < cfg.n(); ++i) {
    if (std::fabs(s.volumes[i] - cfg.containers[i].ideal().volume) < threshold) {
      return Action::empty(static_cast<int>(i + 1));
    }
  }
  return Action::do_nothing();
}

Action uniform_random_action(Rng& rng, std::size_t n) {
  return Action{static_cast<int>(rng.uniform_index(n + 1))};
}

Policy make_policy(const PolicyKind& kind, const EnvConfig& cfg, std::uint64_t episode_seed) {
  if (const auto* rb = std::get_if<RuleBased>(&kind)) {
    return [cfg, threshold = rb->threshold](const State& s) { return rule_based_action(s, cfg, threshold); };
  }
  if (std::holds_alternative<UniformRandom>(kind)) {
    auto rng = std::make_shared<Rng>(mix_seed(episode_seed ^ kPolicyStreamSalt));
    return [rng, n = cfg.n()](const State&) { return uniform_random_action(*rng, n); };
  }
  return [](const State&) { return Action::do_nothing(); };
}

}  // namespace contsim
