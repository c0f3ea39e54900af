#pragma once

#include "ltlshape/automaton.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ltlshape::progress {

using automaton::BuchiAutomaton;
using automaton::StateId;

/// Level assigned to states the initial state cannot reach.
inline constexpr int kUnreachable = std::numeric_limits<int>::max();

using CondensationEdge = std::pair<std::uint32_t, std::uint32_t>;

struct SccDecomposition {
  /// SCC index per automaton state. Indices are topologically ordered: every
  /// condensation edge (a, b) has a < b.
  std::vector<std::uint32_t> scc_id;
  std::uint32_t count = 0;
  /// Sorted, unique SCC pairs joined by at least one automaton edge.
  std::vector<CondensationEdge> condensation;
};

SccDecomposition tarjan_scc(const BuchiAutomaton &a);

struct ProgressAnnotation {
  std::vector<int> level;
  std::vector<std::uint32_t> scc_id;
  std::vector<CondensationEdge> condensation;
  int num_levels = 0;
  /// States with level == kUnreachable.
  std::vector<StateId> unreachable;

  int level_of(StateId q) const { return level.at(q); }
  int max_level() const { return num_levels - 1; }
};

/// Breadth-first labelling of the SCC condensation starting from the SCC of
/// the initial state: that SCC gets level 0, and every not yet annotated SCC
/// adjacent to a level-k SCC gets level k + 1.
ProgressAnnotation annotate_progress(const BuchiAutomaton &a);

enum class ShapingMode {
  /// multiplier * level(q_next)
  Proportional,
  /// gamma * phi(q_next) - phi(q_prev), phi(q) = multiplier * level(q)
  Potential,
  /// No shaping term; only the terminal acceptance reward remains.
  None,
};

struct ShapingConfig {
  double multiplier = 50.0;
  ShapingMode mode = ShapingMode::Proportional;
  double gamma = 0.9;

  /// Throws std::invalid_argument unless multiplier > 0 and gamma in (0, 1].
  void validate() const;
};

std::string_view to_string(ShapingMode mode);
/// Accepts `proportional`, `potential` and `none`.
ShapingMode parse_shaping_mode(std::string_view text);

double shaped_reward(StateId q_next, const ProgressAnnotation &ann, const ShapingConfig &cfg, StateId q_prev);

/// Text dump: a `state,scc,level` table followed by a `condensation` table of
/// `from,to` SCC pairs. Unreachable levels print as `inf`.
std::string dump(const ProgressAnnotation &ann);
ProgressAnnotation parse_dump(std::string_view text);

} // namespace ltlshape::progress
