#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "contsim/config.hpp"

namespace contsim::testing {

inline std::filesystem::path config_dir() { return CONTSIM_CONFIG_DIR; }
inline std::string cli_binary() { return CONTSIM_BIN; }

inline std::vector<std::pair<std::string, EnvConfig>> shipped_configs() {
  std::vector<std::pair<std::string, EnvConfig>> out;
  for (const GridPoint& g : supported_grid()) {
    const auto name = default_config_filename(g);
    out.emplace_back(name, load_config(config_dir() / name));
  }
  return out;
}

// One container, one PU, synthetic-style reward with a single ideal optimum.
inline EnvConfig single_container(double volume_per_step, double delta, double noise_per_sec = 0.0) {
  EnvConfig cfg;
  ContainerParams c;
  c.name = "C";
  c.fill_rate = volume_per_step / delta;
  c.noise_std_per_sec = noise_per_sec;
  c.product_size = 5.0;
  c.actuation_time = 120.0;
  c.time_per_product = 40.0;
  c.optima = {{35.0, 1.0, 2.0}};
  cfg.containers = {c};
  cfg.pu_count = 1;
  cfg.max_volume = 40.0;
  cfg.timestep_seconds = delta;
  cfg.max_episode_steps = 1500;
  cfg.reward_min = -1.0;
  cfg.reward_penalty = -0.1;
  cfg.initial_volume_range = {0.0, 30.0};
  return cfg;
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "contsim-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

// Runs a shell command, capturing stdout; stderr is discarded.
inline CommandResult run_command(const std::string& cmd) {
  CommandResult r;
  FILE* pipe = ::popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), got);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Child process with line-oriented pipes on stdin/stdout.
class LineProcess {
 public:
  explicit LineProcess(const std::vector<std::string>& argv) {
    int to_child[2], from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) throw std::runtime_error("pipe failed");
    pid_ = ::fork();
    if (pid_ < 0) throw std::runtime_error("fork failed");
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      std::vector<char*> args;
      for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
      args.push_back(nullptr);
      ::execv(args[0], args.data());
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    in_ = ::fdopen(to_child[1], "w");
    out_ = ::fdopen(from_child[0], "r");
  }
  ~LineProcess() { finish(); }
  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;

  std::string request(const std::string& line) {
    std::fputs(line.c_str(), in_);
    std::fputc('\n', in_);
    std::fflush(in_);
    std::string response;
    for (int ch = std::fgetc(out_); ch != EOF && ch != '\n'; ch = std::fgetc(out_)) response.push_back(char(ch));
    return response;
  }

  int finish() {
    if (pid_ <= 0) return status_;
    if (in_) std::fclose(in_);
    in_ = nullptr;
    int status = 0;
    ::waitpid(pid_, &status, 0);
    if (out_) std::fclose(out_);
    out_ = nullptr;
    pid_ = -1;
    status_ = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return status_;
  }

 private:
  pid_t pid_ = -1;
  FILE* in_ = nullptr;
  FILE* out_ = nullptr;
  int status_ = -1;
};

}  // namespace contsim::testing
