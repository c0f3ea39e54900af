#pragma once

#include "ltlshape/learner.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ltlshape::io {

/// Raised by the readers on malformed input.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// `episode,env_steps,cumulative_reward,reached_accepting,max_progress_level,wall_ms`
void write_metrics_csv(std::ostream &out, const std::vector<learner::EpisodeMetrics> &episodes);
std::vector<learner::EpisodeMetrics> read_metrics_csv(std::istream &in);

/// `joint_state,automaton_state,joint_option,value` for every stored entry,
/// sorted by key. Joint states print as `x:y;x:y`.
void write_q_dump(std::ostream &out, const learner::QTable &q, const world::GridSpec &g);
learner::QTable read_q_dump(std::istream &in, const world::GridSpec &g);

std::string format_joint_state(const world::JointState &s);
world::JointState parse_joint_state(std::string_view text);

std::string plan_to_json(const learner::Plan &plan);
learner::Plan plan_from_json(std::string_view text);

struct BenchRow {
  int grid = 0;
  bool options = false;
  std::uint64_t seed = 0;
  /// Convergence step; empty when the run never converged.
  std::optional<std::size_t> iters;
  double wall_s = 0.0;
  bool success = false;

  bool operator==(const BenchRow &) const = default;
};

/// `grid,mode,seed,iters,wall_s,success` with mode `options` or `primitives`.
void write_bench_csv(std::ostream &out, const std::vector<BenchRow> &rows);
std::vector<BenchRow> read_bench_csv(std::istream &in);

} // namespace ltlshape::io
