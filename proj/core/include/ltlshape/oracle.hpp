#pragma once

#include "ltlshape/learner.hpp"

#include <optional>
#include <vector>

namespace ltlshape::learner {

/// Upper bound on joint states x automaton states x joint options.
inline constexpr std::size_t kOracleCap = 20'000'000;

struct OracleResult {
  std::size_t num_joint_states = 0;
  std::size_t num_automaton_states = 0;
  std::uint32_t num_joint_options = 0;
  /// Q*(s, q, o) laid out as [(s * nq + q) * njo + o]; -inf marks rejected
  /// transitions.
  std::vector<double> q;
  double initial_value = 0.0;
  /// Length of the greedy plan from the initial state to a terminal state,
  /// or nullopt if the greedy policy never gets there.
  std::optional<std::size_t> plan_length;
  std::size_t sweeps = 0;
  bool converged = false;

  std::size_t joint_state_index(const world::GridSpec &g, const world::JointState &s) const;
  double value(const world::GridSpec &g, const AugmentedState &a, std::uint32_t joint_option) const;
};

/// Exact Bellman backups over the explicit product of every joint state with
/// every automaton state. Rejected transitions are left out, entering a
/// terminal state bootstraps 0, and rewards match the learner's. Stops once
/// the largest update falls below tol or after max_sweeps. Throws
/// std::invalid_argument for non-primitive menus, gamma outside [0, 1] or a
/// product above kOracleCap.
OracleResult value_iteration_oracle(const Problem &p, const RewardModel &rewards, double gamma, double tol,
                                    std::size_t max_sweeps = 100000);

} // namespace ltlshape::learner
