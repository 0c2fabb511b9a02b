#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace contsim {

// One Gaussian bump of the emptying reward.
struct Optimum {
  double volume = 0.0;  // volume units, multiple of product_size
  double height = 1.0;  // in (0, 1]
  double width = 1.0;   // volume units, > 0

  bool operator==(const Optimum&) const = default;
};

// Physical parameters of one container. Rates are stored per second; the
// engine derives the per-step drift and noise from the configured timestep.
struct ContainerParams {
  std::string name;
  double fill_rate = 0.0;          // volume units / s
  double noise_std_per_sec = 0.0;  // volume units / sqrt(s)
  double product_size = 1.0;       // volume units
  double actuation_time = 1.0;     // s
  double time_per_product = 1.0;   // s
  std::vector<Optimum> optima;     // first entry is the ideal optimum (height 1)

  const Optimum& ideal() const { return optima.front(); }

  bool operator==(const ContainerParams&) const = default;
};

struct VolumeRange {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const VolumeRange&) const = default;
};

struct EnvConfig {
  std::vector<ContainerParams> containers;
  int pu_count = 1;
  double max_volume = 40.0;
  double timestep_seconds = 60.0;
  int max_episode_steps = 1500;
  double reward_min = -1.0;
  double reward_penalty = -0.1;
  VolumeRange initial_volume_range{0.0, 30.0};

  std::size_t n() const { return containers.size(); }
  std::size_t m() const { return static_cast<std::size_t>(pu_count); }

  // Per-step drift alpha_i = fill_rate * delta.
  double drift_per_step(std::size_t i) const;
  // Per-step noise standard deviation sigma_i = noise_std_per_sec * sqrt(delta).
  double noise_std_per_step(std::size_t i) const;

  bool operator==(const EnvConfig&) const = default;
};

// Malformed document.
class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed document violating an invariant. field() names the offender.
class ConfigValidationError : public std::runtime_error {
 public:
  ConfigValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Throws ConfigValidationError on the first violated invariant.
void validate(const EnvConfig& cfg);

EnvConfig parse_config(std::string_view text);
EnvConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const EnvConfig& cfg);

// 16 hex digits, FNV-1a over the canonical serialization.
std::string config_fingerprint(const EnvConfig& cfg);

// Grid scan of the emptying reward on {0, step, 2 step, ..., max_volume}.
// Warns when a container's reward exceeds 1 or its heights decrease with volume.
std::vector<std::string> validate_reward_landscape(const EnvConfig& cfg, double grid_step);

// Warns when the timestep is not shorter than the time any PU needs to
// process one product's worth of volume (actuation + one product).
std::vector<std::string> timestep_warnings(const EnvConfig& cfg);

struct GridPoint {
  int n = 5;
  int m = 2;
  int delta = 60;

  bool operator==(const GridPoint&) const = default;
};

// "5-2-120" -> {5, 2, 120}
GridPoint parse_grid_point(std::string_view text);
std::string to_string(const GridPoint& g);

// All supported points of the experiment grid, in shipping order.
std::vector<GridPoint> supported_grid();

// Synthetic config for a grid point; throws std::invalid_argument when the
// point is outside {5,11} x {2,5,11} x {60,120} or m > n.
EnvConfig default_config(const GridPoint& g);

// "synthetic-<n>-<m>-<delta>.json"
std::string default_config_filename(const GridPoint& g);

}  // namespace contsim
