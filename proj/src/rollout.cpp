#include "contsim/rollout.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace contsim {

Trajectory run_episode(const EnvConfig& cfg, const Policy& policy, std::uint64_t seed) {
  Env env(cfg);
  env.reset(seed);
  Trajectory traj;
  traj.seed = seed;
  traj.config_fingerprint = config_fingerprint(cfg);
  traj.steps.reserve(static_cast<std::size_t>(cfg.max_episode_steps));
  while (!env.done()) {
    const State& s = env.state();
    StepRecord rec;
    rec.t = s.t;
    rec.volumes = s.volumes;
    rec.timers = s.timers;
    rec.action = policy(s);
    StepResult r = env.step(rec.action);
    rec.reward = r.reward;
    rec.terminated = r.terminated;
    rec.truncated = r.truncated;
    rec.pu_available = r.info.pu_available;
    rec.emptied_volume = r.info.emptied_volume;
    traj.steps.push_back(std::move(rec));
  }
  return traj;
}

Trajectory run_episode(const EnvConfig& cfg, const PolicyKind& kind, std::uint64_t seed) {
  return run_episode(cfg, make_policy(kind, cfg, seed), seed);
}

std::vector<Trajectory> run_episodes(const EnvConfig& cfg, const PolicyKind& kind,
                                     const std::vector<std::uint64_t>& seeds, unsigned jobs) {
  std::vector<Trajectory> out(seeds.size());
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(seeds.size())));
  if (jobs <= 1) {
    for (std::size_t k = 0; k < seeds.size(); ++k) out[k] = run_episode(cfg, kind, seeds[k]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t k = next++; k < seeds.size(); k = next++) {
        try {
          out[k] = run_episode(cfg, kind, seeds[k]);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

EpisodeStats episode_stats(const Trajectory& traj) {
  EpisodeStats st;
  st.steps = traj.steps.size();
  std::size_t emptying = 0;
  for (const StepRecord& r : traj.steps) {
    st.cumulative_reward += r.reward;
    if (!r.action.is_do_nothing()) ++emptying;
  }
  st.overflow = !traj.steps.empty() && traj.steps.back().terminated;
  st.emptying_fraction = st.steps ? static_cast<double>(emptying) / static_cast<double>(st.steps) : 0.0;
  return st;
}

Summary summarize(const std::vector<Trajectory>& trajs) {
  if (trajs.empty()) throw std::invalid_argument("summarize: no trajectories");
  Summary s;
  for (const Trajectory& t : trajs) s.episodes.push_back(episode_stats(t));
  const double n = static_cast<double>(trajs.size());
  for (const EpisodeStats& e : s.episodes) s.mean += e.cumulative_reward;
  s.mean /= n;
  if (trajs.size() > 1) {
    double ss = 0.0;
    for (const EpisodeStats& e : s.episodes) ss += (e.cumulative_reward - s.mean) * (e.cumulative_reward - s.mean);
    s.std_dev = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

double Ecdf::operator()(double x) const {
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  if (it == values.begin()) return 0.0;
  return fractions[static_cast<std::size_t>(it - values.begin()) - 1];
}

Ecdf ecdf(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("ecdf: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  Ecdf out;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (k + 1 < samples.size() && samples[k + 1] == samples[k]) continue;
    out.values.push_back(samples[k]);
    out.fractions.push_back(static_cast<double>(k + 1) / n);
  }
  return out;
}

std::vector<EmptyingEvent> emptying_events(const std::vector<Trajectory>& trajs, const EventFilter& filter) {
  std::vector<EmptyingEvent> events;
  for (const Trajectory& traj : trajs) {
    for (const StepRecord& r : traj.steps) {
      if (r.action.is_do_nothing()) continue;
      const std::size_t i = r.action.container_index();
      if (filter.container && *filter.container != i) continue;
      const double v = r.volumes[i];
      if (filter.successful_only && !(r.pu_available && v > 0.0)) continue;
      events.push_back({i, r.t, v, r.reward, r.pu_available});
    }
  }
  return events;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trace(const Trajectory& traj, std::ostream& out) {
  const std::size_t n = traj.steps.empty() ? 0 : traj.steps.front().volumes.size();
  const std::size_t m = traj.steps.empty() ? 0 : traj.steps.front().timers.size();
  std::string line = "t";
  for (std::size_t i = 1; i <= n; ++i) line += ",v_" + std::to_string(i);
  for (std::size_t j = 1; j <= m; ++j) line += ",p_" + std::to_string(j);
  line += ",action,reward,terminated,truncated\n";
  out << line;
  for (const StepRecord& r : traj.steps) {
    line = std::to_string(r.t);
    for (double v : r.volumes) line += "," + format_number(v);
    for (double p : r.timers) line += "," + format_number(p);
    line += "," + std::to_string(r.action.code) + "," + format_number(r.reward) + "," +
            (r.terminated ? "1" : "0") + "," + (r.truncated ? "1" : "0") + "\n";
    out << line;
  }
}

void export_trace(const Trajectory& traj, const std::filesystem::path& destination) {
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + destination.string());
  write_trace(traj, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + destination.string());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') {
    throw std::runtime_error("trace line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

long long parse_int(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') {
    throw std::runtime_error("trace line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

Trajectory read_trace(std::istream& in, std::uint64_t seed, std::string fingerprint) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace is empty");
  const auto header = split_csv(line);
  std::size_t n = 0, m = 0;
  for (const auto& h : header) {
    if (h.rfind("v_", 0) == 0) ++n;
    if (h.rfind("p_", 0) == 0) ++m;
  }
  if (header.size() != n + m + 5 || header.front() != "t" || header[n + m + 1] != "action" ||
      header[n + m + 2] != "reward" || header[n + m + 3] != "terminated" || header[n + m + 4] != "truncated") {
    throw std::runtime_error("trace header is not t,v_1..v_n,p_1..p_m,action,reward,terminated,truncated");
  }

  Trajectory traj;
  traj.seed = seed;
  traj.config_fingerprint = std::move(fingerprint);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields");
    }
    StepRecord r;
    r.t = parse_int(cells[0], line_no);
    for (std::size_t i = 0; i < n; ++i) r.volumes.push_back(parse_double(cells[1 + i], line_no));
    for (std::size_t j = 0; j < m; ++j) r.timers.push_back(parse_double(cells[1 + n + j], line_no));
    r.action = decode_action(parse_int(cells[1 + n + m], line_no), n);
    r.reward = parse_double(cells[2 + n + m], line_no);
    r.terminated = parse_int(cells[3 + n + m], line_no) != 0;
    r.truncated = parse_int(cells[4 + n + m], line_no) != 0;
    if (!r.action.is_do_nothing()) {
      r.pu_available = std::any_of(r.timers.begin(), r.timers.end(), [](double p) { return p == 0.0; });
      if (r.pu_available) r.emptied_volume = r.volumes[r.action.container_index()];
    }
    traj.steps.push_back(std::move(r));
  }
  return traj;
}

Trajectory import_trace(const std::filesystem::path& source, std::uint64_t seed, std::string fingerprint) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + source.string());
  return read_trace(in, seed, std::move(fingerprint));
}

}  // namespace contsim
