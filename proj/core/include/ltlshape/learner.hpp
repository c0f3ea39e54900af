#pragma once

#include "ltlshape/automaton.hpp"
#include "ltlshape/progress.hpp"
#include "ltlshape/world.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ltlshape::learner {

using automaton::StateId;
using world::GridSpec;
using world::JointState;

using Rng = std::mt19937_64;

inline constexpr std::size_t kMaxAgents = 4;

/// Gridworld, task automaton and its progress annotation, bundled.
struct Problem {
  GridSpec grid;
  automaton::BuchiAutomaton automaton;
  progress::ProgressAnnotation annotation;
  /// Per automaton state, see terminal_states.
  std::vector<char> terminal;
};

/// States whose SCC is closed (no edge leaves it), contains a cycle and
/// consists of accepting states only. Once there, every continuation that
/// keeps a successor is accepted, so the reach part of the task is done.
std::vector<char> terminal_states(const automaton::BuchiAutomaton &a, const progress::ProgressAnnotation &ann);

/// Parses the formula, translates its NNF over the formula's propositions and
/// annotates the result. Throws std::invalid_argument when the formula uses a
/// proposition the grid never produces; ltl::ParseError on bad syntax.
Problem make_problem(GridSpec grid, std::string_view formula);

/// Entering a terminal state ends an episode and bootstraps 0.
bool is_terminal(const Problem &p, StateId q);

struct AugmentedState {
  JointState s;
  StateId q = 0;
  auto operator<=>(const AugmentedState &) const = default;
};

/// 16 bits of automaton state, 12 bits of cell index per agent.
using StateKey = std::uint64_t;
StateKey pack(const GridSpec &g, const AugmentedState &a);
AugmentedState unpack(const GridSpec &g, StateKey key);

/// Permitted option indices per agent, one bit per menu entry.
using ChoiceMasks = std::array<std::uint32_t, kMaxAgents>;

/// Menu sizes of the grid's agents and the resulting joint option ids.
class JointOptionSpace {
public:
  explicit JointOptionSpace(const GridSpec &g);

  std::uint32_t size() const { return size_; }
  std::size_t num_agents() const { return agents_; }
  std::uint32_t radix(std::size_t agent) const { return radix_[agent]; }
  std::uint32_t option_of(std::uint32_t id, std::size_t agent) const { return (id / radix_[agent]) % sizes_[agent]; }

  /// Ascending ids of the cross product of the masks.
  void ids(const ChoiceMasks &masks, std::vector<std::uint32_t> &out) const;

  template <typename F> void for_each(const ChoiceMasks &masks, F &&f) const {
    walk(masks, agents_, 0, f);
  }

private:
  template <typename F> void walk(const ChoiceMasks &masks, std::size_t agent, std::uint32_t base, F &f) const {
    if (agent == 0) {
      f(base);
      return;
    }
    const std::size_t a = agent - 1;
    for (std::uint32_t bits = masks[a]; bits; bits &= bits - 1)
      walk(masks, a, base + static_cast<std::uint32_t>(__builtin_ctz(bits)) * radix_[a], f);
  }

  std::size_t agents_;
  std::array<std::uint32_t, kMaxAgents> sizes_{};
  std::array<std::uint32_t, kMaxAgents> radix_{};
  std::uint32_t size_ = 1;
};

/// Masks for the permissible joint options at s: an agent continuing an
/// active option is pinned to it, every other agent may pick any executable
/// option.
ChoiceMasks choice_masks(const GridSpec &g, const JointState &s, const world::JointOption *current);

/// Action values keyed by augmented state and joint option id. Unseen
/// entries read as exactly 0.
class QTable {
public:
  explicit QTable(std::uint32_t num_joint_options) : width_(num_joint_options) {}

  std::uint32_t num_joint_options() const { return width_; }
  std::size_t num_states() const { return rows_.size(); }

  double get(StateKey s, std::uint32_t jo) const;
  void set(StateKey s, std::uint32_t jo, double value);
  /// Row of num_joint_options() values, or nullptr if the state is unseen.
  const double *row(StateKey s) const;
  double *mutable_row(StateKey s);

  /// Largest value over the joint options described by masks (0 for unseen).
  double max_over(StateKey s, const ChoiceMasks &masks, const JointOptionSpace &space) const;

  /// Keys of every stored state, ascending.
  std::vector<StateKey> keys() const;

  bool operator==(const QTable &other) const;

private:
  std::uint32_t width_;
  std::unordered_map<StateKey, std::size_t> rows_;
  std::vector<double> values_;
};

/// One accepted transition of the product, ready for replay.
struct Experience {
  StateKey from = 0;
  std::uint32_t joint_option = 0;
  double reward = 0.0;
  StateKey to = 0;
  /// Bit a set iff agent a's option terminated on this step.
  std::uint32_t terminated = 0;
  /// `to` is terminal: no bootstrap.
  bool terminal = false;
  /// Permissible options at `to`, honouring options still active.
  ChoiceMasks next_choices{};
};

class ReplayMemory {
public:
  ReplayMemory(std::size_t capacity, std::uint64_t seed);

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience &operator[](std::size_t i) const { return items_.at(i); }

  /// Evicts the oldest experience once full.
  void push(const Experience &e);
  /// Uniform draws with replacement from the current contents.
  void sample(std::size_t n, std::vector<Experience> &out);

private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Experience> items_;
  Rng rng_;
};

struct Hyperparams {
  double epsilon = 0.1;
  double gamma = 0.9;
  double alpha = 0.1;
  std::size_t replay_capacity = 50000;
  /// Experiences drawn per replay batch.
  std::size_t batch_size = 32;
  /// Replay batches per environment step.
  std::size_t updates_per_step = 32;
  std::size_t max_trajectory = 100;
  std::size_t total_steps = 12000;
  /// Stop once the largest |dQ| seen in a window of stop_window steps falls
  /// below this value. 0 disables the check.
  double stop_tolerance = 0.0;
  std::size_t stop_window = 1000;
  std::uint64_t seed = 1;
  /// Reward for entering a terminal accepting state; see make_reward_model.
  std::optional<double> accept_reward;
  /// Greedy evaluation rollout every eval_every steps (0 disables).
  std::size_t eval_every = 500;
  /// Consecutive successful evaluations that count as convergence.
  std::size_t eval_streak = 3;
  bool stop_on_convergence = false;

  /// Throws std::invalid_argument when a value is out of range.
  void validate() const;
};

struct RewardModel {
  progress::ShapingConfig shaping;
  double accept_reward = 0.0;
};

/// Shaping with gamma taken from the hyperparameters. Unless overridden the
/// acceptance reward is multiplier * num_levels / (1 - gamma): the discounted
/// value of holding one level above the maximum forever, which makes
/// finishing the task worth more than lingering at any level. For gamma == 1
/// it is multiplier * num_levels * max_trajectory.
RewardModel make_reward_model(const Problem &p, const Hyperparams &hp, progress::ShapingConfig shaping);

/// Successor on `label` with the highest progress level, ties to the
/// smallest id; nullopt when the label is rejected.
std::optional<StateId> resolve_successor(const Problem &p, StateId q, const ltl::Label &label);

struct Transition {
  StateId q_next = 0;
  double reward = 0.0;
  bool terminal = false;
};

/// Automaton side of one environment step: the label of s_next decides the
/// successor; nullopt means rejection.
std::optional<Transition> observe(const Problem &p, const RewardModel &rewards, StateId q, const JointState &s_next);

/// Full experience for an environment step, or nullopt on rejection.
std::optional<Experience> observe(const Problem &p, const RewardModel &rewards, const AugmentedState &from,
                                  std::uint32_t joint_option, const world::StepResult &step);

/// epsilon-greedy over the permissible ids. Exploits with probability
/// 1 - epsilon, breaking ties toward the smallest id. Throws
/// world::ContractViolation on an empty set.
std::uint32_t choose_joint_option(const QTable &q, StateKey s, std::span<const std::uint32_t> permissible,
                                  double epsilon, Rng &rng);

/// Applies the experiences in order. The bootstrap maximises over each
/// experience's next_choices and is 0 for terminal ones. Returns the largest
/// |dQ| applied.
double q_update(QTable &q, std::span<const Experience> batch, double gamma, double alpha,
                const JointOptionSpace &space);

struct EpisodeMetrics {
  std::size_t episode = 0;
  std::size_t env_steps = 0;
  double cumulative_reward = 0.0;
  bool reached_accepting = false;
  int max_progress_level = 0;
  double wall_ms = 0.0;
};

struct Checkpoint {
  std::size_t step = 0;
  bool success = false;
  int max_progress_level = 0;
};

struct TrainResult {
  QTable q;
  std::vector<EpisodeMetrics> episodes;
  std::vector<Checkpoint> checkpoints;
  std::size_t steps_run = 0;
  std::optional<std::size_t> first_success_episode;
  /// Step of the first checkpoint of the first streak of eval_streak
  /// successful greedy evaluations.
  std::optional<std::size_t> converged_step;
  bool stopped_by_tolerance = false;
  double wall_seconds = 0.0;
};

TrainResult train(const Problem &p, const Hyperparams &hp, const progress::ShapingConfig &shaping);

enum class PlanStatus { Satisfied, Violated, Timeout };
std::string_view to_string(PlanStatus s);
PlanStatus parse_plan_status(std::string_view text);

struct PlanStep {
  AugmentedState from;
  std::uint32_t joint_option = 0;
  std::vector<std::size_t> options;
  std::vector<world::OptionKind> kinds;
  std::vector<world::Move> moves;
  /// Reached joint state and automaton state (unchanged q on rejection).
  AugmentedState to;
  ltl::Label label;
  bool rejected = false;
};

struct Plan {
  std::vector<PlanStep> steps;
  PlanStatus status = PlanStatus::Timeout;
  int max_progress_level = 0;
};

/// Greedy (epsilon = 0) rollout from the start state for at most max_len
/// steps. Stops on entering a terminal state or on rejection.
Plan extract_plan(const QTable &q, const Problem &p, std::size_t max_len);

/// Greedy value max_o Q(s0, q0, o) over the options permissible at the start.
double initial_value(const QTable &q, const Problem &p);

} // namespace ltlshape::learner
