#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "contsim/config.hpp"
#include "contsim/env.hpp"
#include "contsim/policies.hpp"

namespace contsim {

// One transition as seen by the agent: the state it acted on, what it did,
// and what came back.
struct StepRecord {
  std::int64_t t = 0;
  std::vector<double> volumes;
  std::vector<double> timers;
  Action action;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  bool pu_available = false;
  std::optional<double> emptied_volume;

  bool operator==(const StepRecord&) const = default;
};

struct Trajectory {
  std::vector<StepRecord> steps;
  std::string config_fingerprint;
  std::uint64_t seed = 0;

  bool operator==(const Trajectory&) const = default;
};

Trajectory run_episode(const EnvConfig& cfg, const Policy& policy, std::uint64_t seed);
Trajectory run_episode(const EnvConfig& cfg, const PolicyKind& kind, std::uint64_t seed);

// One episode per seed, on up to `jobs` threads. Output order follows `seeds`
// and does not depend on `jobs`.
std::vector<Trajectory> run_episodes(const EnvConfig& cfg, const PolicyKind& kind,
                                     const std::vector<std::uint64_t>& seeds, unsigned jobs = 1);

struct EpisodeStats {
  double cumulative_reward = 0.0;
  std::size_t steps = 0;
  bool overflow = false;
  double emptying_fraction = 0.0;  // share of steps with an emptying action
};

EpisodeStats episode_stats(const Trajectory& traj);

struct Summary {
  double mean = 0.0;
  double std_dev = 0.0;  // sample (n - 1); 0 for a single episode
  std::vector<EpisodeStats> episodes;
};

// Throws std::invalid_argument on empty input.
Summary summarize(const std::vector<Trajectory>& trajs);

// Step function F(x) = #{s <= x} / N on the sorted unique sample values.
struct Ecdf {
  std::vector<double> values;
  std::vector<double> fractions;

  double operator()(double x) const;
};

// Throws std::invalid_argument on empty input.
Ecdf ecdf(std::vector<double> samples);

struct EmptyingEvent {
  std::size_t container = 0;  // zero-based
  std::int64_t t = 0;
  double volume = 0.0;  // volume when the attempt was made
  double reward = 0.0;
  bool pu_available = false;

  bool operator==(const EmptyingEvent&) const = default;
};

struct EventFilter {
  std::optional<std::size_t> container;  // zero-based
  bool successful_only = false;          // PU free and volume > 0
};

std::vector<EmptyingEvent> emptying_events(const std::vector<Trajectory>& trajs, const EventFilter& filter = {});

// CSV trace: header `t,v_1..v_n,p_1..p_m,action,reward,terminated,truncated`,
// numbers at 17 significant digits, '\n' line endings.
void write_trace(const Trajectory& traj, std::ostream& out);
void export_trace(const Trajectory& traj, const std::filesystem::path& destination);

// Inverse of write_trace. PU availability and emptied volume are recovered
// from the recorded timers. Throws std::runtime_error on malformed input.
Trajectory read_trace(std::istream& in, std::uint64_t seed = 0, std::string fingerprint = {});
Trajectory import_trace(const std::filesystem::path& source, std::uint64_t seed = 0, std::string fingerprint = {});

// "%.17g"
std::string format_number(double x);

}  // namespace contsim
