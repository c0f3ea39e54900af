#pragma once

#include "ltlshape/io.hpp"
#include "ltlshape/learner.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltlshape::cli {

/// Bad flags, configs or inputs. Reported with exit code 2.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  std::optional<std::filesystem::path> scenario;
  /// Replaces the scenario's task when set.
  std::optional<std::string> formula;
  learner::Hyperparams hp;
  progress::ShapingConfig shaping;
  /// Replaces the scenario's menus with primitives (false) or the full
  /// standard menu (true) when set.
  std::optional<bool> options;
  std::filesystem::path out = ".";
  std::vector<std::uint64_t> seeds{1};
  std::size_t plan_length = 100;

  /// Throws UsageError unless the config can run.
  void validate() const;
};

/// Applies a JSON config on top of base. Keys mirror the long flags with
/// dashes turned into underscores (`updates_per_step`, `replay_cap`, ...);
/// `seed` takes a number or a list.
RunConfig parse_config(std::string_view json_text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path &path, RunConfig base = {});

struct CompileReport {
  automaton::BuchiAutomaton automaton;
  progress::ProgressAnnotation annotation;
  std::string hoa;
  std::string progress;
  /// Human readable state / SCC / level table.
  std::string summary;
};

/// Translates the formula's NNF over aps (the formula's own propositions
/// when empty) and annotates it.
CompileReport compile(std::string_view formula, std::vector<std::string> aps = {});

/// Scenario from the config with the formula and menu overrides applied.
learner::Problem load_problem(const RunConfig &cfg);

struct SeedReport {
  std::uint64_t seed = 0;
  learner::TrainResult result;
  learner::Plan plan;
};

std::string summary_line(const SeedReport &r);

/// Trains once per seed and writes metrics_seed<k>.csv, q_seed<k>.csv and
/// plan_seed<k>.json into cfg.out, printing one summary line per seed.
std::vector<SeedReport> run_train(const RunConfig &cfg, std::ostream &log);

struct BenchConfig {
  std::vector<int> sizes;
  std::vector<std::uint64_t> seeds{1};
  /// Hyperparameters and shaping for every cell; the step budget caps runs
  /// that never converge.
  RunConfig base;
  unsigned jobs = 1;
};

/// One row per (size, mode, seed), primitives before options, rows in a
/// fixed order regardless of jobs. Failed cells yield success = false.
std::vector<io::BenchRow> run_bench(const BenchConfig &cfg);

/// Entry point shared by the executable and the tests.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace ltlshape::cli
