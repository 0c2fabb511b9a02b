// contsim: validate configs, roll out baseline policies, analyze traces,
// benchmark the experiment grid, and serve the environment to external agents.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contsim/config.hpp"
#include "contsim/policies.hpp"
#include "contsim/protocol.hpp"
#include "contsim/rollout.hpp"

namespace fs = std::filesystem;
using namespace contsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Raised for bad user input that is not a CLI11 parse error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

EnvConfig resolve_config(const std::string& path, const std::string& grid) {
  if (!path.empty()) return load_config(path);
  if (!grid.empty()) {
    try {
      return default_config(parse_grid_point(grid));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  throw UsageError("one of --config or --grid is required");
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::uint64_t> consecutive_seeds(std::uint64_t first, int count) {
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < count; ++k) seeds.push_back(first + static_cast<std::uint64_t>(k));
  return seeds;
}

std::string mean_pm_std(const Summary& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f +- %.2f", s.mean, s.std_dev);
  return buf;
}

// ---- validate ---------------------------------------------------------------

struct ValidateArgs {
  std::string config;
  double grid_step = 0.01;
};

int cmd_validate(const ValidateArgs& a) {
  EnvConfig cfg;
  try {
    cfg = load_config(a.config);
  } catch (const ConfigValidationError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigParseError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitUsage;
  }
  auto warnings = validate_reward_landscape(cfg, a.grid_step);
  for (auto& w : timestep_warnings(cfg)) warnings.push_back(std::move(w));
  std::cout << "ok: " << a.config << " (n=" << cfg.n() << ", m=" << cfg.m() << ", delta=" << cfg.timestep_seconds
            << ", T=" << cfg.max_episode_steps << ", fingerprint " << config_fingerprint(cfg) << ")\n";
  for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
  return kExitOk;
}

// ---- rollout ----------------------------------------------------------------

struct RolloutArgs {
  std::string config;
  std::string grid;
  std::string policy = "rule-based";
  double threshold = 1.0;
  int episodes = 1;
  std::uint64_t seed = 1;
  std::string out_dir;
  unsigned jobs = 1;
  int horizon = 0;
};

int cmd_rollout(const RolloutArgs& a) {
  EnvConfig cfg = resolve_config(a.config, a.grid);
  if (a.horizon > 0) cfg.max_episode_steps = a.horizon;
  PolicyKind kind;
  try {
    kind = parse_policy(a.policy, a.threshold);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto seeds = consecutive_seeds(a.seed, a.episodes);
  const auto trajs = run_episodes(cfg, kind, seeds, a.jobs);
  const Summary summary = summarize(trajs);

  fs::create_directories(a.out_dir);
  std::ostringstream table;
  table << "seed,cumulative_reward,steps,overflow,emptying_fraction\n";
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    export_trace(trajs[k], fs::path(a.out_dir) / ("trace_seed" + std::to_string(seeds[k]) + ".csv"));
    const EpisodeStats& e = summary.episodes[k];
    table << seeds[k] << "," << format_number(e.cumulative_reward) << "," << e.steps << "," << (e.overflow ? 1 : 0)
          << "," << format_number(e.emptying_fraction) << "\n";
  }
  write_file(fs::path(a.out_dir) / "episodes.csv", table.str());

  std::ostringstream text;
  text << "config_fingerprint " << config_fingerprint(cfg) << "\n"
       << "policy " << policy_name(kind) << "\n"
       << "episodes " << trajs.size() << "\n"
       << "seeds " << seeds.front() << ".." << seeds.back() << "\n"
       << "mean_cumulative_reward " << format_number(summary.mean) << "\n"
       << "std_cumulative_reward " << format_number(summary.std_dev) << "\n";
  write_file(fs::path(a.out_dir) / "summary.txt", text.str());

  std::cout << policy_name(kind) << ": " << mean_pm_std(summary) << " over " << trajs.size() << " episode(s)\n";
  return kExitOk;
}

// ---- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
  std::string traces;
  std::string mode;
  bool per_container = false;
  std::string out_dir;
};

std::vector<fs::path> trace_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("traces directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("trace_", 0) == 0 && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no trace_*.csv files in " + dir.string());
  return files;
}

std::string ecdf_table(const std::vector<EmptyingEvent>& events, bool rewards, bool per_container) {
  std::map<std::string, std::vector<double>> groups;
  for (const EmptyingEvent& e : events) {
    const std::string key = per_container ? std::to_string(e.container + 1) : "all";
    groups[key].push_back(rewards ? e.reward : e.volume);
  }
  std::ostringstream out;
  out << "group,value,cumulative_fraction\n";
  // Numeric container order, not lexicographic.
  std::vector<std::string> keys;
  for (const auto& [k, v] : groups) keys.push_back(k);
  std::sort(keys.begin(), keys.end(), [](const std::string& x, const std::string& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  for (const auto& k : keys) {
    const Ecdf f = ecdf(groups[k]);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      out << k << "," << format_number(f.values[i]) << "," << format_number(f.fractions[i]) << "\n";
    }
  }
  return out.str();
}

std::string plot_data(const Trajectory& traj) {
  std::ostringstream out;
  const std::size_t n = traj.steps.empty() ? 0 : traj.steps.front().volumes.size();
  out << "t";
  for (std::size_t i = 1; i <= n; ++i) out << ",v_" << i;
  out << ",emptied_container,nonzero_reward\n";
  for (const StepRecord& r : traj.steps) {
    out << r.t;
    for (double v : r.volumes) out << "," << format_number(v);
    out << ",";
    if (!r.action.is_do_nothing()) out << r.action.code;
    out << ",";
    if (r.reward != 0.0) out << format_number(r.reward);
    out << "\n";
  }
  return out.str();
}

int cmd_analyze(const AnalyzeArgs& a) {
  const auto files = trace_files(a.traces);
  std::vector<Trajectory> trajs;
  for (const auto& f : files) {
    try {
      trajs.push_back(import_trace(f));
    } catch (const std::exception& e) {
      throw std::runtime_error(f.string() + ": " + e.what());
    }
  }
  fs::create_directories(a.out_dir);

  if (a.mode == "trace-plot-data") {
    for (std::size_t k = 0; k < files.size(); ++k) {
      write_file(fs::path(a.out_dir) / ("plot_" + files[k].stem().string() + ".csv"), plot_data(trajs[k]));
    }
    std::cout << "wrote plot data for " << files.size() << " trace(s)\n";
    return kExitOk;
  }

  const bool rewards = a.mode == "ecdf-rewards";
  EventFilter filter;
  filter.successful_only = !rewards;
  const auto events = emptying_events(trajs, filter);
  const fs::path out = fs::path(a.out_dir) / (rewards ? "ecdf_rewards.csv" : "ecdf_volumes.csv");
  if (events.empty()) {
    std::cerr << "warning: no emptying events in " << files.size() << " trace(s); ECDF table is empty\n";
  }
  write_file(out, ecdf_table(events, rewards, a.per_container));
  std::cout << "wrote " << out.string() << " from " << events.size() << " event(s)\n";
  return kExitOk;
}

// ---- benchmark --------------------------------------------------------------

struct BenchmarkArgs {
  std::vector<std::string> grid;
  int episodes = 15;
  std::uint64_t seed = 1;
  int horizon = 600;
  double threshold = 1.0;
  unsigned jobs = 1;
  std::string out_dir;
};

int cmd_benchmark(const BenchmarkArgs& a) {
  std::vector<GridPoint> points;
  try {
    if (a.grid.empty()) {
      points = supported_grid();
    } else {
      for (const auto& g : a.grid) {
        points.push_back(parse_grid_point(g));
        (void)default_config(points.back());
      }
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const std::vector<PolicyKind> policies = {RuleBased{a.threshold}, UniformRandom{}, DoNothing{}};
  const auto seeds = consecutive_seeds(a.seed, a.episodes);

  std::ostringstream csv;
  csv << "n,m,delta,policy,mean,std\n";
  std::printf("%3s %3s %6s | %-18s | %-18s | %-18s\n", "n", "m", "delta", "rule-based", "random", "do-nothing");
  for (const GridPoint& g : points) {
    EnvConfig cfg = default_config(g);
    cfg.max_episode_steps = a.horizon;
    std::printf("%3d %3d %6d", g.n, g.m, g.delta);
    for (const PolicyKind& kind : policies) {
      const Summary s = summarize(run_episodes(cfg, kind, seeds, a.jobs));
      std::printf(" | %-18s", mean_pm_std(s).c_str());
      csv << g.n << "," << g.m << "," << g.delta << "," << policy_name(kind) << "," << format_number(s.mean) << ","
          << format_number(s.std_dev) << "\n";
    }
    std::printf("\n");
  }
  std::fflush(stdout);
  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    write_file(fs::path(a.out_dir) / "benchmark.csv", csv.str());
  }
  return kExitOk;
}

// ---- serve ------------------------------------------------------------------

struct ServeArgs {
  std::string config;
  std::string grid;
  std::string transport = "stdio";
  std::uint16_t port = 5555;
};

int cmd_serve(const ServeArgs& a) {
  auto cfg = std::make_shared<const EnvConfig>(resolve_config(a.config, a.grid));
  if (a.transport == "stdio") {
    std::ios::sync_with_stdio(false);
    serve_stream(cfg, std::cin, std::cout);
    return kExitOk;
  }
  std::atomic<bool> stop{false};
  serve_tcp(cfg, a.port, stop, [](std::uint16_t port) {
    std::cerr << "listening on 127.0.0.1:" << port << "\n";
  });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Container-management resource-allocation simulator"};
  app.require_subcommand(1);

  ValidateArgs va;
  auto* validate_cmd = app.add_subcommand("validate", "Load a config, check invariants and the reward landscape");
  validate_cmd->add_option("--config", va.config, "Config JSON file")->required()->check(CLI::ExistingFile);
  validate_cmd->add_option("--grid-step", va.grid_step, "Volume grid step for the reward scan")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  RolloutArgs ra;
  auto* rollout_cmd = app.add_subcommand("rollout", "Run episodes of a built-in policy and export traces");
  auto* rc = rollout_cmd->add_option("--config", ra.config, "Config JSON file")->check(CLI::ExistingFile);
  rollout_cmd->add_option("--grid", ra.grid, "Use the shipped synthetic config <n>-<m>-<delta>")->excludes(rc);
  rollout_cmd->add_option("--policy", ra.policy, "rule-based | random | do-nothing")
      ->capture_default_str()
      ->check(CLI::IsMember({"rule-based", "random", "do-nothing"}));
  rollout_cmd->add_option("--threshold", ra.threshold, "Rule-based distance to the ideal volume")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  rollout_cmd->add_option("--episodes", ra.episodes, "Number of episodes (seeds seed, seed+1, ...)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  rollout_cmd->add_option("--seed", ra.seed, "First episode seed")->capture_default_str();
  rollout_cmd->add_option("--out-dir", ra.out_dir, "Output directory for traces and summaries")->required();
  rollout_cmd->add_option("--jobs", ra.jobs, "Parallel episodes; results do not depend on it")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  rollout_cmd->add_option("--horizon", ra.horizon, "Override the episode length T (0 keeps the config's)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  AnalyzeArgs aa;
  auto* analyze_cmd = app.add_subcommand("analyze", "Compute ECDF tables and plot data from exported traces");
  analyze_cmd->add_option("--traces", aa.traces, "Directory holding trace_*.csv files")->required();
  analyze_cmd->add_option("--mode", aa.mode, "ecdf-volumes | ecdf-rewards | trace-plot-data")
      ->required()
      ->check(CLI::IsMember({"ecdf-volumes", "ecdf-rewards", "trace-plot-data"}));
  analyze_cmd->add_flag("--per-container", aa.per_container, "One ECDF per container instead of pooled");
  analyze_cmd->add_option("--out-dir", aa.out_dir, "Output directory")->required();

  BenchmarkArgs ba;
  auto* benchmark_cmd = app.add_subcommand("benchmark", "Compare built-in policies over grid points");
  benchmark_cmd->add_option("--grid", ba.grid, "Grid points <n>-<m>-<delta> (default: the whole grid)")
      ->delimiter(',');
  benchmark_cmd->add_option("--episodes", ba.episodes, "Episodes per policy and grid point")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  benchmark_cmd->add_option("--seed", ba.seed, "First episode seed")->capture_default_str();
  benchmark_cmd->add_option("--horizon", ba.horizon, "Evaluation episode length T")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  benchmark_cmd->add_option("--threshold", ba.threshold, "Rule-based distance to the ideal volume")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  benchmark_cmd->add_option("--jobs", ba.jobs, "Parallel episodes")->capture_default_str()->check(CLI::PositiveNumber);
  benchmark_cmd->add_option("--out-dir", ba.out_dir, "Also write benchmark.csv here");

  ServeArgs sa;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the environment over newline-delimited JSON");
  auto* sc = serve_cmd->add_option("--config", sa.config, "Config JSON file")->check(CLI::ExistingFile);
  serve_cmd->add_option("--grid", sa.grid, "Use the shipped synthetic config <n>-<m>-<delta>")->excludes(sc);
  serve_cmd->add_option("--transport", sa.transport, "stdio | tcp")
      ->capture_default_str()
      ->check(CLI::IsMember({"stdio", "tcp"}));
  serve_cmd->add_option("--port", sa.port, "TCP port on 127.0.0.1")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate_cmd) return cmd_validate(va);
    if (*rollout_cmd) return cmd_rollout(ra);
    if (*analyze_cmd) return cmd_analyze(aa);
    if (*benchmark_cmd) return cmd_benchmark(ba);
    if (*serve_cmd) return cmd_serve(sa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigValidationError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigParseError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
