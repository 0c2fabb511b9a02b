#include "contsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "contsim/reward.hpp"

namespace contsim {

using nlohmann::json;

double EnvConfig::drift_per_step(std::size_t i) const { return containers[i].fill_rate * timestep_seconds; }

double EnvConfig::noise_std_per_step(std::size_t i) const {
  return containers[i].noise_std_per_sec * std::sqrt(timestep_seconds);
}

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigValidationError(field, what);
}

bool is_multiple(double v, double b) {
  const double q = v / b;
  const double k = std::round(q);
  return k >= 1.0 && std::fabs(q - k) <= 1e-9 * std::max(1.0, k);
}

void validate_container(const ContainerParams& c, const std::string& at, double max_volume) {
  require(!c.name.empty(), at + ".name", "must not be empty");
  require(c.fill_rate >= 0.0 && std::isfinite(c.fill_rate), at + ".fill_rate", "must be non-negative");
  require(c.noise_std_per_sec >= 0.0 && std::isfinite(c.noise_std_per_sec), at + ".noise_std_per_sec",
          "must be non-negative");
  require(c.product_size > 0.0 && std::isfinite(c.product_size), at + ".product_size", "must be positive");
  require(c.actuation_time > 0.0 && std::isfinite(c.actuation_time), at + ".actuation_time", "must be positive");
  require(c.time_per_product > 0.0 && std::isfinite(c.time_per_product), at + ".time_per_product",
          "must be positive");
  require(!c.optima.empty(), at + ".optima", "must list at least one optimum");
  for (std::size_t k = 0; k < c.optima.size(); ++k) {
    const Optimum& o = c.optima[k];
    const std::string f = at + ".optima[" + std::to_string(k) + "]";
    require(o.width > 0.0 && std::isfinite(o.width), f + ".width", "must be positive");
    require(o.height > 0.0 && o.height <= 1.0, f + ".height", "must lie in (0, 1]");
    if (k == 0) {
      require(o.height == 1.0, f + ".height", "first optimum is the ideal one and must have height 1");
    } else {
      require(o.height < 1.0, f + ".height", "only the first optimum may have height 1");
    }
    require(o.volume > 0.0 && o.volume < max_volume, f + ".volume", "optimum must lie strictly inside (0, max_volume)");
    require(is_multiple(o.volume, c.product_size), f + ".volume", "optimum not a multiple of product size");
  }
}

// Parsing helpers: every field is required, unknown keys are rejected.
void check_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigParseError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw ConfigParseError(where + ": unknown field '" + key + "'");
  }
  for (const char* k : keys) {
    if (!j.contains(k)) throw ConfigParseError(where + ": missing field '" + std::string(k) + "'");
  }
}

double get_number(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigParseError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int get_int(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigParseError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

ContainerParams container_from_json(const json& j, const std::string& where) {
  check_keys(j,
             {"name", "fill_rate", "noise_std_per_sec", "product_size", "actuation_time", "time_per_product",
              "optima"},
             where);
  ContainerParams c;
  if (!j.at("name").is_string()) throw ConfigParseError(where + ".name: expected a string");
  c.name = j.at("name").get<std::string>();
  c.fill_rate = get_number(j, "fill_rate", where);
  c.noise_std_per_sec = get_number(j, "noise_std_per_sec", where);
  c.product_size = get_number(j, "product_size", where);
  c.actuation_time = get_number(j, "actuation_time", where);
  c.time_per_product = get_number(j, "time_per_product", where);
  const json& optima = j.at("optima");
  if (!optima.is_array()) throw ConfigParseError(where + ".optima: expected an array");
  for (std::size_t k = 0; k < optima.size(); ++k) {
    const std::string at = where + ".optima[" + std::to_string(k) + "]";
    check_keys(optima[k], {"volume", "height", "width"}, at);
    c.optima.push_back(
        {get_number(optima[k], "volume", at), get_number(optima[k], "height", at), get_number(optima[k], "width", at)});
  }
  return c;
}

json to_json(const EnvConfig& cfg) {
  json containers = json::array();
  for (const auto& c : cfg.containers) {
    json optima = json::array();
    for (const auto& o : c.optima) optima.push_back({{"volume", o.volume}, {"height", o.height}, {"width", o.width}});
    containers.push_back({{"name", c.name},
                          {"fill_rate", c.fill_rate},
                          {"noise_std_per_sec", c.noise_std_per_sec},
                          {"product_size", c.product_size},
                          {"actuation_time", c.actuation_time},
                          {"time_per_product", c.time_per_product},
                          {"optima", optima}});
  }
  return json{{"containers", containers},
              {"pu_count", cfg.pu_count},
              {"max_volume", cfg.max_volume},
              {"timestep_seconds", cfg.timestep_seconds},
              {"max_episode_steps", cfg.max_episode_steps},
              {"reward_min", cfg.reward_min},
              {"reward_penalty", cfg.reward_penalty},
              {"initial_volume_range", {cfg.initial_volume_range.lo, cfg.initial_volume_range.hi}}};
}

}  // namespace

void validate(const EnvConfig& cfg) {
  require(!cfg.containers.empty(), "containers", "must contain at least one container");
  require(cfg.pu_count >= 1, "pu_count", "must be at least 1");
  require(cfg.max_volume > 0.0 && std::isfinite(cfg.max_volume), "max_volume", "must be positive");
  require(cfg.timestep_seconds > 0.0 && std::isfinite(cfg.timestep_seconds), "timestep_seconds", "must be positive");
  require(cfg.max_episode_steps >= 1, "max_episode_steps", "must be at least 1");
  require(cfg.reward_penalty < 0.0, "reward_penalty", "reward_penalty must be negative");
  require(cfg.reward_min < cfg.reward_penalty, "reward_min", "reward_min must be smaller than reward_penalty");
  const auto [lo, hi] = cfg.initial_volume_range;
  require(lo >= 0.0 && lo <= hi && hi < cfg.max_volume, "initial_volume_range",
          "must satisfy 0 <= lo <= hi < max_volume");
  for (std::size_t i = 0; i < cfg.containers.size(); ++i) {
    validate_container(cfg.containers[i], "containers[" + std::to_string(i) + "]", cfg.max_volume);
  }
}

EnvConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(std::string("malformed JSON: ") + e.what());
  }
  check_keys(j,
             {"containers", "pu_count", "max_volume", "timestep_seconds", "max_episode_steps", "reward_min",
              "reward_penalty", "initial_volume_range"},
             "config");
  EnvConfig cfg;
  const json& containers = j.at("containers");
  if (!containers.is_array()) throw ConfigParseError("config.containers: expected an array");
  for (std::size_t i = 0; i < containers.size(); ++i) {
    cfg.containers.push_back(container_from_json(containers[i], "containers[" + std::to_string(i) + "]"));
  }
  cfg.pu_count = get_int(j, "pu_count", "config");
  cfg.max_volume = get_number(j, "max_volume", "config");
  cfg.timestep_seconds = get_number(j, "timestep_seconds", "config");
  cfg.max_episode_steps = get_int(j, "max_episode_steps", "config");
  cfg.reward_min = get_number(j, "reward_min", "config");
  cfg.reward_penalty = get_number(j, "reward_penalty", "config");
  const json& range = j.at("initial_volume_range");
  if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number()) {
    throw ConfigParseError("config.initial_volume_range: expected [lo, hi]");
  }
  cfg.initial_volume_range = {range[0].get<double>(), range[1].get<double>()};
  validate(cfg);
  return cfg;
}

EnvConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const EnvConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string config_fingerprint(const EnvConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(cfg).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::vector<std::string> validate_reward_landscape(const EnvConfig& cfg, double grid_step) {
  std::vector<std::string> warnings;
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be positive");
  const auto points = static_cast<long long>(std::floor(cfg.max_volume / grid_step));
  for (const ContainerParams& c : cfg.containers) {
    double peak = -std::numeric_limits<double>::infinity();
    double peak_at = 0.0;
    for (long long k = 0; k <= points; ++k) {
      const double v = static_cast<double>(k) * grid_step;
      const double r = emptying_reward(v, c, cfg.reward_penalty);
      if (r > peak) {
        peak = r;
        peak_at = v;
      }
    }
    if (peak > 1.0 + 1e-9) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "container %s: reward exceeds 1 (%.6f at volume %.4g); peaks overlap",
                    c.name.c_str(), peak, peak_at);
      warnings.emplace_back(buf);
    }
    bool ordered = true;
    for (const Optimum& a : c.optima) {
      for (const Optimum& b : c.optima) {
        if (a.volume < b.volume && a.height > b.height) ordered = false;
      }
    }
    if (!ordered) {
      warnings.push_back("container " + c.name + ": optimum heights are not non-decreasing in volume");
    }
  }
  return warnings;
}

std::vector<std::string> timestep_warnings(const EnvConfig& cfg) {
  std::vector<std::string> warnings;
  for (const ContainerParams& c : cfg.containers) {
    const double one_product = c.actuation_time + c.time_per_product;
    if (!(cfg.timestep_seconds < one_product)) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "container %s: timestep %.6g s is not shorter than the %.6g s a PU needs for one product",
                    c.name.c_str(), cfg.timestep_seconds, one_product);
      warnings.emplace_back(buf);
    }
  }
  return warnings;
}

GridPoint parse_grid_point(std::string_view text) {
  GridPoint g;
  char tail = 0;
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%d-%d-%d%c", &g.n, &g.m, &g.delta, &tail) != 3) {
    throw std::invalid_argument("grid point must look like <n>-<m>-<delta>, got '" + s + "'");
  }
  return g;
}

std::string to_string(const GridPoint& g) {
  return std::to_string(g.n) + "-" + std::to_string(g.m) + "-" + std::to_string(g.delta);
}

std::vector<GridPoint> supported_grid() {
  std::vector<GridPoint> grid;
  for (int n : {5, 11}) {
    for (int m : {2, 5, 11}) {
      if (m > n) continue;
      for (int delta : {60, 120}) grid.push_back({n, m, delta});
    }
  }
  return grid;
}

namespace {

struct Preset {
  const char* name;
  double fill_rate;
};

// Synthetic plant: names echo the facility's labels, values are invented.
constexpr Preset kPresets[] = {
    {"C1-20", 0.008}, {"C1-40", 0.006}, {"C1-60", 0.002},  {"C1-70", 0.004},  {"C1-80", 0.005}, {"C1-30", 0.007},
    {"C1-50", 0.0055}, {"C2-10", 0.0045}, {"C2-20", 0.0065}, {"C2-40", 0.003}, {"C2-60", 0.0075},
};

}  // namespace

EnvConfig default_config(const GridPoint& g) {
  bool supported = false;
  for (const GridPoint& p : supported_grid()) supported = supported || p == g;
  if (!supported) {
    throw std::invalid_argument("unsupported grid point " + to_string(g) +
                                " (n in {5,11}, m in {2,5,11}, delta in {60,120}, m <= n)");
  }
  EnvConfig cfg;
  for (int i = 0; i < g.n; ++i) {
    ContainerParams c;
    c.name = kPresets[i].name;
    c.fill_rate = kPresets[i].fill_rate;
    c.noise_std_per_sec = 0.01;
    c.product_size = 5.0;
    c.actuation_time = 120.0;
    c.time_per_product = 40.0;
    c.optima = {{35.0, 1.0, 1.5}, {25.0, 0.7, 1.5}, {15.0, 0.4, 1.5}};
    cfg.containers.push_back(std::move(c));
  }
  cfg.pu_count = g.m;
  cfg.max_volume = 40.0;
  cfg.timestep_seconds = g.delta;
  cfg.max_episode_steps = 1500;
  cfg.reward_min = -1.0;
  cfg.reward_penalty = -0.1;
  cfg.initial_volume_range = {0.0, 30.0};
  return cfg;
}

std::string default_config_filename(const GridPoint& g) { return "synthetic-" + to_string(g) + ".json"; }

}  // namespace contsim
