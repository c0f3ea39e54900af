#include "ltlshape/world.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cstdlib>

namespace ltlshape::world {

namespace {

constexpr std::array<Move, 4> kMoveOrder{Move::Up, Move::Down, Move::Left, Move::Right};
constexpr int kFarAway = INT_MAX / 2;

int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }
int chebyshev(Cell a, Cell b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

bool is_reserved(std::string_view p) { return p == kObstacleProp || p == kCollisionProp; }

} // namespace

Cell apply(Cell c, Move m) {
  switch (m) {
  case Move::Up: return {c.x, c.y + 1};
  case Move::Down: return {c.x, c.y - 1};
  case Move::Left: return {c.x - 1, c.y};
  case Move::Right: return {c.x + 1, c.y};
  case Move::Stay: return c;
  }
  return c;
}

std::string_view to_string(Move m) {
  switch (m) {
  case Move::Up: return "up";
  case Move::Down: return "down";
  case Move::Left: return "left";
  case Move::Right: return "right";
  case Move::Stay: return "stay";
  }
  return "?";
}

std::string_view to_string(OptionKind k) {
  switch (k) {
  case OptionKind::Up: return "up";
  case OptionKind::Down: return "down";
  case OptionKind::Left: return "left";
  case OptionKind::Right: return "right";
  case OptionKind::Stay: return "stay";
  case OptionKind::GoToGoal: return "go_to_goal";
  case OptionKind::ObstacleAvoid: return "obstacle_avoid";
  }
  return "?";
}

OptionKind parse_option_kind(std::string_view text) {
  for (auto k : {OptionKind::Up, OptionKind::Down, OptionKind::Left, OptionKind::Right, OptionKind::Stay,
                 OptionKind::GoToGoal, OptionKind::ObstacleAvoid})
    if (to_string(k) == text)
      return k;
  throw std::invalid_argument("unknown option kind '" + std::string(text) + "'");
}

std::vector<OptionDef> standard_menu(bool full, std::optional<Cell> goal) {
  std::vector<OptionDef> menu{{OptionKind::Up, {}},
                              {OptionKind::Down, {}},
                              {OptionKind::Left, {}},
                              {OptionKind::Right, {}},
                              {OptionKind::Stay, {}}};
  if (full) {
    if (!goal)
      throw std::invalid_argument("go_to_goal needs a goal cell");
    menu.push_back({OptionKind::GoToGoal, *goal});
    menu.push_back({OptionKind::ObstacleAvoid, {}});
  }
  return menu;
}

GridSpec::GridSpec(int width, int height, std::vector<Cell> obstacles, std::vector<LabelBinding> labels,
                   std::vector<Cell> starts, std::vector<std::optional<Cell>> goals,
                   std::vector<std::vector<OptionDef>> option_menus)
    : width_(width), height_(height), obstacles_(std::move(obstacles)), labels_(std::move(labels)),
      starts_(std::move(starts)), goals_(std::move(goals)), menus_(std::move(option_menus)) {
  if (width_ <= 0 || height_ <= 0 || width_ > 64 || height_ > 64)
    throw std::invalid_argument("grid dimensions must lie in 1..64");
  if (starts_.empty() || starts_.size() > 4)
    throw std::invalid_argument("between 1 and 4 agents are supported");
  if (goals_.size() != starts_.size() || menus_.size() != starts_.size())
    throw std::invalid_argument("goals and option menus need one entry per agent");
  obstacle_mask_.assign(static_cast<std::size_t>(width_) * height_, 0);
  for (Cell c : obstacles_) {
    if (!in_bounds(c))
      throw std::invalid_argument("obstacle outside the grid");
    obstacle_mask_[cell_index(c)] = 1;
  }
  for (Cell c : starts_) {
    if (!in_bounds(c))
      throw std::invalid_argument("agent start outside the grid");
    if (is_obstacle(c))
      throw std::invalid_argument("agent start on an obstacle");
  }
  for (const auto &goal : goals_)
    if (goal && !in_bounds(*goal))
      throw std::invalid_argument("agent goal outside the grid");
  for (const auto &b : labels_) {
    if (b.prop.empty() || is_reserved(b.prop))
      throw std::invalid_argument("label binding uses an empty or reserved proposition '" + b.prop + "'");
    if (b.agent && *b.agent >= starts_.size())
      throw std::invalid_argument("label binding for unknown agent");
    for (Cell c : b.cells)
      if (!in_bounds(c))
        throw std::invalid_argument("labelled cell outside the grid");
  }
  for (std::size_t a = 0; a < menus_.size(); ++a) {
    if (menus_[a].empty())
      throw std::invalid_argument("empty option menu");
    for (const auto &o : menus_[a])
      if (o.kind == OptionKind::GoToGoal && !in_bounds(o.target))
        throw std::invalid_argument("go_to_goal target outside the grid");
  }
}

bool GridSpec::is_obstacle(Cell c) const { return in_bounds(c) && obstacle_mask_[cell_index(c)]; }

std::vector<std::string> GridSpec::propositions() const {
  std::vector<std::string> out{std::string(kObstacleProp), std::string(kCollisionProp)};
  for (const auto &b : labels_)
    out.push_back(b.prop);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GridSpec GridSpec::with_standard_menus(bool full) const {
  std::vector<std::vector<OptionDef>> menus;
  for (const auto &goal : goals_)
    menus.push_back(standard_menu(full, goal));
  return GridSpec(width_, height_, obstacles_, labels_, starts_, goals_, std::move(menus));
}

void validate(const GridSpec &g, const JointState &s) {
  if (s.positions.size() != g.num_agents())
    throw std::invalid_argument("joint state has the wrong number of agents");
  for (Cell c : s.positions)
    if (!g.in_bounds(c))
      throw std::invalid_argument("agent position outside the grid");
}

ltl::Label label(const GridSpec &g, const JointState &s) {
  ltl::Label out;
  const auto &pos = s.positions;
  for (const auto &b : g.labels()) {
    bool holds = false;
    for (std::size_t a = 0; a < pos.size() && !holds; ++a) {
      if (b.agent && *b.agent != a)
        continue;
      holds = std::find(b.cells.begin(), b.cells.end(), pos[a]) != b.cells.end();
    }
    if (holds)
      out.insert(b.prop);
  }
  for (Cell c : pos)
    if (g.is_obstacle(c))
      out.insert(std::string(kObstacleProp));
  for (std::size_t a = 0; a < pos.size(); ++a)
    for (std::size_t b = a + 1; b < pos.size(); ++b)
      if (pos[a] == pos[b])
        out.insert(std::string(kCollisionProp));
  return out;
}

namespace {

int clearance_at(const GridSpec &g, const JointState &s, std::size_t agent, Cell here) {
  int best = kFarAway;
  for (Cell o : g.obstacles())
    best = std::min(best, chebyshev(here, o));
  for (std::size_t b = 0; b < s.positions.size(); ++b)
    if (b != agent)
      best = std::min(best, chebyshev(here, s.positions[b]));
  return best;
}

std::optional<Move> goal_move(const GridSpec &g, Cell here, Cell target) {
  const int d = manhattan(here, target);
  for (Move m : kMoveOrder) {
    const Cell next = apply(here, m);
    if (g.is_free(next) && manhattan(next, target) < d)
      return m;
  }
  return std::nullopt;
}

std::optional<Move> avoid_move(const GridSpec &g, const JointState &s, std::size_t agent) {
  const Cell here = s.positions[agent];
  const int current = clearance_at(g, s, agent, here);
  std::optional<Move> best;
  int best_clearance = current;
  for (Move m : kMoveOrder) {
    const Cell next = apply(here, m);
    if (!g.is_free(next))
      continue;
    const int c = clearance_at(g, s, agent, next);
    if (c > best_clearance) {
      best_clearance = c;
      best = m;
    }
  }
  return best;
}

Move primitive_move(OptionKind k) {
  switch (k) {
  case OptionKind::Up: return Move::Up;
  case OptionKind::Down: return Move::Down;
  case OptionKind::Left: return Move::Left;
  case OptionKind::Right: return Move::Right;
  default: return Move::Stay;
  }
}

} // namespace

int clearance(const GridSpec &g, const JointState &s, std::size_t agent) {
  return clearance_at(g, s, agent, s.positions.at(agent));
}

bool can_initiate(const GridSpec &g, const JointState &s, std::size_t agent, const OptionDef &o) {
  switch (o.kind) {
  case OptionKind::GoToGoal:
    return s.positions.at(agent) != o.target;
  case OptionKind::ObstacleAvoid:
    return clearance(g, s, agent) <= 1;
  default:
    return true;
  }
}

Move option_policy(const GridSpec &g, const JointState &s, std::size_t agent, const OptionDef &o) {
  switch (o.kind) {
  case OptionKind::GoToGoal:
    return goal_move(g, s.positions.at(agent), o.target).value_or(Move::Stay);
  case OptionKind::ObstacleAvoid:
    return avoid_move(g, s, agent).value_or(Move::Stay);
  default:
    return primitive_move(o.kind);
  }
}

bool option_terminates(const GridSpec &g, const JointState &s, std::size_t agent, const OptionDef &o, int elapsed) {
  switch (o.kind) {
  case OptionKind::GoToGoal: {
    const Cell here = s.positions.at(agent);
    return here == o.target || !goal_move(g, here, o.target);
  }
  case OptionKind::ObstacleAvoid:
    return clearance(g, s, agent) >= 2 || !avoid_move(g, s, agent);
  default:
    return elapsed >= 1;
  }
}

std::vector<std::size_t> executable_options(const GridSpec &g, const JointState &s, std::size_t agent) {
  std::vector<std::size_t> out;
  const auto &menu = g.options(agent);
  for (std::size_t i = 0; i < menu.size(); ++i)
    if (can_initiate(g, s, agent, menu[i]))
      out.push_back(i);
  return out;
}

std::uint32_t num_joint_options(const GridSpec &g) {
  std::uint32_t n = 1;
  for (const auto &m : g.menus())
    n *= static_cast<std::uint32_t>(m.size());
  return n;
}

std::uint32_t joint_option_id(const GridSpec &g, const std::vector<std::size_t> &options) {
  if (options.size() != g.num_agents())
    throw ContractViolation("joint option has the wrong number of agents");
  std::uint32_t id = 0;
  std::uint32_t radix = 1;
  for (std::size_t a = 0; a < options.size(); ++a) {
    const auto size = g.options(a).size();
    if (options[a] >= size)
      throw ContractViolation("option index out of range");
    id += static_cast<std::uint32_t>(options[a]) * radix;
    radix *= static_cast<std::uint32_t>(size);
  }
  return id;
}

std::vector<std::size_t> decode_joint_option(const GridSpec &g, std::uint32_t id) {
  if (id >= num_joint_options(g))
    throw ContractViolation("joint option id out of range");
  std::vector<std::size_t> out(g.num_agents());
  for (std::size_t a = 0; a < out.size(); ++a) {
    const auto size = static_cast<std::uint32_t>(g.options(a).size());
    out[a] = id % size;
    id /= size;
  }
  return out;
}

std::vector<JointOption> permissible_joint_options(const GridSpec &g, const JointState &s, const JointOption *active) {
  const std::size_t n = g.num_agents();
  std::vector<std::vector<std::size_t>> choices(n);
  for (std::size_t a = 0; a < n; ++a) {
    if (active && active->active.at(a))
      choices[a] = {active->options.at(a)};
    else
      choices[a] = executable_options(g, s, a);
  }

  std::vector<JointOption> out;
  std::vector<std::size_t> pick(n, 0);
  // Odometer with agent 0 fastest, which yields ascending ids.
  while (true) {
    JointOption jo;
    jo.options.resize(n);
    jo.active.assign(n, 0);
    jo.elapsed.assign(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
      jo.options[a] = choices[a][pick[a]];
      if (active && active->active.at(a)) {
        jo.active[a] = 1;
        jo.elapsed[a] = active->elapsed.at(a);
      }
    }
    out.push_back(std::move(jo));
    std::size_t a = 0;
    while (a < n && ++pick[a] == choices[a].size())
      pick[a++] = 0;
    if (a == n)
      break;
  }
  return out;
}

StepResult step(const GridSpec &g, const JointState &s, const JointOption &jo) {
  const std::size_t n = g.num_agents();
  if (jo.options.size() != n || jo.active.size() != n || jo.elapsed.size() != n)
    throw ContractViolation("joint option has the wrong number of agents");
  StepResult r;
  r.next = s;
  r.moves.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    const OptionDef &o = g.options(a).at(jo.options[a]);
    if (!jo.active[a] && !can_initiate(g, s, a, o))
      throw ContractViolation("option '" + std::string(to_string(o.kind)) + "' cannot be initiated by agent " +
                              std::to_string(a));
    Move m = option_policy(g, s, a, o);
    const Cell target = apply(s.positions[a], m);
    if (!g.is_free(target))
      m = Move::Stay;
    r.moves[a] = m;
    r.next.positions[a] = apply(s.positions[a], m);
  }
  r.terminated.resize(n);
  r.continuing = jo;
  for (std::size_t a = 0; a < n; ++a) {
    const OptionDef &o = g.options(a)[jo.options[a]];
    const int elapsed = jo.elapsed[a] + 1;
    r.terminated[a] = option_terminates(g, r.next, a, o, elapsed);
    r.continuing.elapsed[a] = elapsed;
    r.continuing.active[a] = !r.terminated[a];
  }
  return r;
}

} // namespace ltlshape::world
