#pragma once

#include "ltlshape/ltl.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ltlshape::world {

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell &) const = default;
};

enum class Move { Up, Down, Left, Right, Stay };

/// Up is y + 1, Right is x + 1.
Cell apply(Cell c, Move m);
std::string_view to_string(Move m);

inline constexpr std::string_view kObstacleProp = "o";
inline constexpr std::string_view kCollisionProp = "col";

enum class OptionKind { Up, Down, Left, Right, Stay, GoToGoal, ObstacleAvoid };

std::string_view to_string(OptionKind k);
OptionKind parse_option_kind(std::string_view text);
constexpr bool is_primitive(OptionKind k) { return k != OptionKind::GoToGoal && k != OptionKind::ObstacleAvoid; }

/// An option's initiation set, policy and termination condition are fixed by
/// its kind; GoToGoal additionally carries its target cell.
struct OptionDef {
  OptionKind kind = OptionKind::Stay;
  Cell target{};

  bool operator==(const OptionDef &) const = default;
};

/// The five primitives, optionally followed by GoToGoal(goal) and
/// ObstacleAvoid. Throws std::invalid_argument if full is set without a goal.
std::vector<OptionDef> standard_menu(bool full, std::optional<Cell> goal);

/// A proposition bound to a set of cells. With an agent index the
/// proposition holds iff that agent stands on one of the cells; without one
/// it holds iff any agent does.
struct LabelBinding {
  std::string prop;
  std::optional<std::size_t> agent;
  std::vector<Cell> cells;
};

struct JointState {
  std::vector<Cell> positions;
  auto operator<=>(const JointState &) const = default;
};

class GridSpec {
public:
  /// Throws std::invalid_argument when starts or labelled cells leave the
  /// grid, a start is an obstacle, an option menu is empty, or a binding
  /// reuses a reserved proposition name.
  GridSpec(int width, int height, std::vector<Cell> obstacles, std::vector<LabelBinding> labels,
           std::vector<Cell> starts, std::vector<std::optional<Cell>> goals,
           std::vector<std::vector<OptionDef>> option_menus);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t num_agents() const { return starts_.size(); }
  const std::vector<Cell> &obstacles() const { return obstacles_; }
  const std::vector<LabelBinding> &labels() const { return labels_; }
  const std::vector<Cell> &starts() const { return starts_; }
  const std::vector<std::optional<Cell>> &goals() const { return goals_; }
  const std::vector<OptionDef> &options(std::size_t agent) const { return menus_.at(agent); }
  const std::vector<std::vector<OptionDef>> &menus() const { return menus_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool is_obstacle(Cell c) const;
  bool is_free(Cell c) const { return in_bounds(c) && !is_obstacle(c); }
  std::size_t cell_index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }

  JointState start_state() const { return JointState{starts_}; }
  /// Every proposition label() can produce, sorted.
  std::vector<std::string> propositions() const;

  /// Same grid with each agent's menu replaced by standard_menu(full, goal).
  GridSpec with_standard_menus(bool full) const;

private:
  int width_;
  int height_;
  std::vector<Cell> obstacles_;
  std::vector<char> obstacle_mask_;
  std::vector<LabelBinding> labels_;
  std::vector<Cell> starts_;
  std::vector<std::optional<Cell>> goals_;
  std::vector<std::vector<OptionDef>> menus_;
};

/// Throws std::invalid_argument unless every position lies inside the grid
/// and there is one position per agent.
void validate(const GridSpec &g, const JointState &s);

/// Propositions true in s, including the reserved `o` (an agent on an
/// obstacle) and `col` (two agents on one cell).
ltl::Label label(const GridSpec &g, const JointState &s);

/// Smallest Chebyshev distance from the agent to an obstacle or another
/// agent; a large sentinel when there is neither.
int clearance(const GridSpec &g, const JointState &s, std::size_t agent);

bool can_initiate(const GridSpec &g, const JointState &s, std::size_t agent, const OptionDef &o);
/// Primitive move the option's internal policy emits at s.
Move option_policy(const GridSpec &g, const JointState &s, std::size_t agent, const OptionDef &o);
/// Termination condition evaluated at the state reached after `elapsed` steps.
bool option_terminates(const GridSpec &g, const JointState &s, std::size_t agent, const OptionDef &o, int elapsed);

/// Ascending indices into g.options(agent) whose initiation predicate holds.
std::vector<std::size_t> executable_options(const GridSpec &g, const JointState &s, std::size_t agent);

/// One option per agent. Agents with `active` set are continuing an option
/// that has not terminated; `elapsed` counts steps already executed.
struct JointOption {
  std::vector<std::size_t> options;
  std::vector<char> active;
  std::vector<int> elapsed;

  bool operator==(const JointOption &) const = default;
};

/// Mixed-radix index of the per-agent option choice, agent 0 least significant.
std::uint32_t joint_option_id(const GridSpec &g, const std::vector<std::size_t> &options);
std::vector<std::size_t> decode_joint_option(const GridSpec &g, std::uint32_t id);
std::uint32_t num_joint_options(const GridSpec &g);

/// With no active agents: the cross product of every agent's executable set.
/// Otherwise active agents keep their option and only the others vary.
/// Ordered by ascending joint option id.
std::vector<JointOption> permissible_joint_options(const GridSpec &g, const JointState &s, const JointOption *active);

struct StepResult {
  JointState next;
  std::vector<Move> moves;
  std::vector<char> terminated;
  /// The joint option after the step: elapsed incremented, active = !terminated.
  JointOption continuing;
};

/// Applies every agent's option policy for one simultaneous step. Moves that
/// leave the grid or enter an obstacle resolve to Stay. Throws
/// ContractViolation if an inactive agent's option cannot be initiated at s.
StepResult step(const GridSpec &g, const JointState &s, const JointOption &jo);

} // namespace ltlshape::world
