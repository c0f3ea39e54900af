#include "ltlshape/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ltlshape::learner {

namespace {

constexpr unsigned kQBits = 16;
constexpr unsigned kCellBits = 12;

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

} // namespace

Problem make_problem(GridSpec grid, std::string_view formula) {
  if (grid.num_agents() == 0 || grid.num_agents() > kMaxAgents)
    throw std::invalid_argument("the learner supports 1 to " + std::to_string(kMaxAgents) + " agents");
  if (static_cast<std::size_t>(grid.width()) * grid.height() > (std::size_t{1} << kCellBits))
    throw std::invalid_argument("grid has more cells than a state key can hold");
  for (std::size_t a = 0; a < grid.num_agents(); ++a)
    if (grid.options(a).size() > 32)
      throw std::invalid_argument("an agent menu may hold at most 32 options");

  const ltl::Formula nnf = ltl::to_nnf(ltl::parse(formula));
  std::vector<std::string> aps = ltl::atomic_props(nnf);
  const auto produced = grid.propositions();
  for (const auto &p : aps)
    if (!std::binary_search(produced.begin(), produced.end(), p))
      throw std::invalid_argument("proposition '" + p + "' is not produced by the scenario's labels");

  automaton::BuchiAutomaton ba = automaton::translate(nnf, std::move(aps));
  if (ba.num_states() > (std::size_t{1} << kQBits))
    throw std::invalid_argument("automaton has too many states for a state key");
  progress::ProgressAnnotation ann = progress::annotate_progress(ba);
  std::vector<char> terminal = terminal_states(ba, ann);
  return Problem{std::move(grid), std::move(ba), std::move(ann), std::move(terminal)};
}

std::vector<char> terminal_states(const automaton::BuchiAutomaton &a, const progress::ProgressAnnotation &ann) {
  const std::size_t n = a.num_states();
  std::uint32_t count = 0;
  for (auto id : ann.scc_id)
    count = std::max(count, id + 1);
  std::vector<char> closed(count, 1), all_accepting(count, 1), cyclic(count, 0);
  std::vector<std::size_t> size(count, 0);
  for (StateId q = 0; q < n; ++q) {
    ++size[ann.scc_id[q]];
    if (!a.is_accepting(q))
      all_accepting[ann.scc_id[q]] = 0;
  }
  for (const auto &e : a.edges()) {
    const auto from = ann.scc_id[e.src];
    if (from != ann.scc_id[e.dst])
      closed[from] = 0;
    else if (e.src == e.dst)
      cyclic[from] = 1;
  }
  std::vector<char> out(n, 0);
  for (StateId q = 0; q < n; ++q) {
    const auto c = ann.scc_id[q];
    out[q] = closed[c] && all_accepting[c] && (cyclic[c] || size[c] > 1) && ann.level[q] != progress::kUnreachable;
  }
  return out;
}

bool is_terminal(const Problem &p, StateId q) { return p.terminal.at(q) != 0; }

StateKey pack(const GridSpec &g, const AugmentedState &a) {
  StateKey key = a.q;
  unsigned shift = kQBits;
  for (const auto &c : a.s.positions) {
    key |= static_cast<StateKey>(g.cell_index(c)) << shift;
    shift += kCellBits;
  }
  return key;
}

AugmentedState unpack(const GridSpec &g, StateKey key) {
  AugmentedState a;
  a.q = static_cast<StateId>(key & ((StateKey{1} << kQBits) - 1));
  a.s.positions.resize(g.num_agents());
  unsigned shift = kQBits;
  for (auto &c : a.s.positions) {
    const auto idx = static_cast<int>((key >> shift) & ((StateKey{1} << kCellBits) - 1));
    c = world::Cell{idx % g.width(), idx / g.width()};
    shift += kCellBits;
  }
  return a;
}

JointOptionSpace::JointOptionSpace(const GridSpec &g) : agents_(g.num_agents()) {
  if (agents_ > kMaxAgents)
    throw std::invalid_argument("too many agents");
  for (std::size_t a = 0; a < agents_; ++a) {
    sizes_[a] = static_cast<std::uint32_t>(g.options(a).size());
    radix_[a] = size_;
    size_ *= sizes_[a];
  }
}

void JointOptionSpace::ids(const ChoiceMasks &masks, std::vector<std::uint32_t> &out) const {
  out.clear();
  for_each(masks, [&](std::uint32_t id) { out.push_back(id); });
  // The walk varies the last agent slowest, so ids come out ascending already.
}

ChoiceMasks choice_masks(const GridSpec &g, const JointState &s, const world::JointOption *current) {
  ChoiceMasks m{};
  for (std::size_t a = 0; a < g.num_agents(); ++a) {
    if (current && current->active.at(a)) {
      m[a] = 1U << current->options.at(a);
      continue;
    }
    const auto &menu = g.options(a);
    for (std::size_t i = 0; i < menu.size(); ++i)
      if (world::can_initiate(g, s, a, menu[i]))
        m[a] |= 1U << i;
  }
  return m;
}

double QTable::get(StateKey s, std::uint32_t jo) const {
  const double *r = row(s);
  return r ? r[jo] : 0.0;
}

void QTable::set(StateKey s, std::uint32_t jo, double value) {
  if (jo >= width_)
    throw std::out_of_range("joint option id out of range");
  mutable_row(s)[jo] = value;
}

const double *QTable::row(StateKey s) const {
  auto it = rows_.find(s);
  return it == rows_.end() ? nullptr : values_.data() + it->second * width_;
}

double *QTable::mutable_row(StateKey s) {
  auto [it, inserted] = rows_.try_emplace(s, rows_.size());
  if (inserted)
    values_.resize(values_.size() + width_, 0.0);
  return values_.data() + it->second * width_;
}

double QTable::max_over(StateKey s, const ChoiceMasks &masks, const JointOptionSpace &space) const {
  const double *r = row(s);
  if (!r)
    return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  space.for_each(masks, [&](std::uint32_t id) { best = std::max(best, r[id]); });
  return std::isinf(best) ? 0.0 : best;
}

std::vector<StateKey> QTable::keys() const {
  std::vector<StateKey> out;
  out.reserve(rows_.size());
  for (const auto &[k, _] : rows_)
    out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

bool QTable::operator==(const QTable &other) const {
  if (width_ != other.width_ || rows_.size() != other.rows_.size())
    return false;
  for (const auto &[k, idx] : rows_) {
    const double *mine = values_.data() + idx * width_;
    const double *theirs = other.row(k);
    if (!theirs || !std::equal(mine, mine + width_, theirs))
      return false;
  }
  return true;
}

ReplayMemory::ReplayMemory(std::size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {
  if (capacity == 0)
    throw std::invalid_argument("replay capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayMemory::push(const Experience &e) {
  if (items_.size() < capacity_) {
    items_.push_back(e);
    return;
  }
  items_[head_] = e;
  head_ = (head_ + 1) % capacity_;
}

void ReplayMemory::sample(std::size_t n, std::vector<Experience> &out) {
  out.clear();
  if (items_.empty())
    return;
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(items_[pick(rng_)]);
}

void Hyperparams::validate() const {
  auto fail = [](const std::string &what) { throw std::invalid_argument(what); };
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    fail("epsilon must lie in [0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0))
    fail("gamma must lie in (0, 1]");
  if (!(alpha > 0.0 && alpha <= 1.0))
    fail("alpha must lie in (0, 1]");
  if (replay_capacity == 0)
    fail("replay capacity must be positive");
  if (batch_size == 0)
    fail("batch size must be positive");
  if (max_trajectory == 0)
    fail("max trajectory length must be positive");
  if (!(stop_tolerance >= 0.0) || !std::isfinite(stop_tolerance))
    fail("stopping tolerance must be a finite non-negative number");
  if (stop_tolerance > 0.0 && stop_window == 0)
    fail("stop window must be positive");
  if (accept_reward && !std::isfinite(*accept_reward))
    fail("accept reward must be finite");
  if (eval_streak == 0)
    fail("evaluation streak must be positive");
}

RewardModel make_reward_model(const Problem &p, const Hyperparams &hp, progress::ShapingConfig shaping) {
  shaping.gamma = hp.gamma;
  shaping.validate();
  RewardModel m{shaping, 0.0};
  if (hp.accept_reward) {
    m.accept_reward = *hp.accept_reward;
  } else {
    const double top = shaping.multiplier * p.annotation.num_levels;
    m.accept_reward = hp.gamma < 1.0 ? top / (1.0 - hp.gamma) : top * static_cast<double>(hp.max_trajectory);
  }
  return m;
}

std::optional<StateId> resolve_successor(const Problem &p, StateId q, const ltl::Label &label) {
  const auto succ = p.automaton.successors(q, label);
  if (succ.empty())
    return std::nullopt;
  StateId best = succ.front();
  for (StateId s : succ)
    if (p.annotation.level_of(s) > p.annotation.level_of(best))
      best = s;
  return best;
}

std::optional<Transition> observe(const Problem &p, const RewardModel &rewards, StateId q, const JointState &s_next) {
  const auto q_next = resolve_successor(p, q, world::label(p.grid, s_next));
  if (!q_next)
    return std::nullopt;
  Transition t;
  t.q_next = *q_next;
  t.terminal = is_terminal(p, *q_next);
  t.reward = progress::shaped_reward(*q_next, p.annotation, rewards.shaping, q);
  if (t.terminal)
    t.reward += rewards.accept_reward;
  return t;
}

std::optional<Experience> observe(const Problem &p, const RewardModel &rewards, const AugmentedState &from,
                                  std::uint32_t joint_option, const world::StepResult &step) {
  const auto t = observe(p, rewards, from.q, step.next);
  if (!t)
    return std::nullopt;
  Experience e;
  e.from = pack(p.grid, from);
  e.joint_option = joint_option;
  e.reward = t->reward;
  e.to = pack(p.grid, AugmentedState{step.next, t->q_next});
  for (std::size_t a = 0; a < step.terminated.size(); ++a)
    if (step.terminated[a])
      e.terminated |= 1U << a;
  e.terminal = t->terminal;
  e.next_choices = choice_masks(p.grid, step.next, &step.continuing);
  return e;
}

std::uint32_t choose_joint_option(const QTable &q, StateKey s, std::span<const std::uint32_t> permissible,
                                  double epsilon, Rng &rng) {
  if (permissible.empty())
    throw world::ContractViolation("no permissible joint option");
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, permissible.size() - 1);
    return permissible[pick(rng)];
  }
  const double *r = q.row(s);
  if (!r)
    return *std::min_element(permissible.begin(), permissible.end());
  std::uint32_t best = permissible.front();
  for (std::uint32_t id : permissible)
    if (r[id] > r[best] || (r[id] == r[best] && id < best))
      best = id;
  return best;
}

double q_update(QTable &q, std::span<const Experience> batch, double gamma, double alpha,
                const JointOptionSpace &space) {
  double delta = 0.0;
  for (const Experience &e : batch) {
    const double next = e.terminal ? 0.0 : q.max_over(e.to, e.next_choices, space);
    double &v = q.mutable_row(e.from)[e.joint_option];
    const double updated = (1.0 - alpha) * v + alpha * (e.reward + gamma * next);
    delta = std::max(delta, std::abs(updated - v));
    v = updated;
  }
  return delta;
}

namespace {

world::JointOption fresh_joint_option(const JointOptionSpace &space, std::uint32_t id,
                                      const world::JointOption *current) {
  world::JointOption jo;
  const std::size_t n = space.num_agents();
  jo.options.resize(n);
  jo.active.assign(n, 0);
  jo.elapsed.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    jo.options[a] = space.option_of(id, a);
    if (current && current->active[a]) {
      jo.active[a] = 1;
      jo.elapsed[a] = current->elapsed[a];
    }
  }
  return jo;
}

} // namespace

TrainResult train(const Problem &p, const Hyperparams &hp, const progress::ShapingConfig &shaping) {
  hp.validate();
  const auto started = std::chrono::steady_clock::now();
  const RewardModel rewards = make_reward_model(p, hp, shaping);
  const JointOptionSpace space(p.grid);

  // Independent streams for action selection and replay sampling.
  std::seed_seq seq{static_cast<std::uint32_t>(hp.seed), static_cast<std::uint32_t>(hp.seed >> 32)};
  std::array<std::uint32_t, 4> words{};
  seq.generate(words.begin(), words.end());
  Rng act_rng((std::uint64_t{words[0]} << 32) | words[1]);
  ReplayMemory memory(hp.replay_capacity, (std::uint64_t{words[2]} << 32) | words[3]);

  TrainResult out{QTable(space.size()), {}, {}, 0, std::nullopt, std::nullopt, false, 0.0};
  std::vector<Experience> batch;
  std::vector<std::uint32_t> ids;
  batch.reserve(hp.batch_size);

  AugmentedState cur{p.grid.start_state(), p.automaton.initial()};
  world::JointOption active;
  bool have_active = false;
  EpisodeMetrics ep;
  ep.max_progress_level = p.annotation.level_of(cur.q);
  auto ep_started = std::chrono::steady_clock::now();

  auto end_episode = [&](bool success) {
    ep.reached_accepting = success;
    ep.wall_ms = elapsed_ms(ep_started);
    if (success && !out.first_success_episode)
      out.first_success_episode = ep.episode;
    out.episodes.push_back(ep);
    const std::size_t next_index = ep.episode + 1;
    ep = EpisodeMetrics{};
    ep.episode = next_index;
    cur = AugmentedState{p.grid.start_state(), p.automaton.initial()};
    ep.max_progress_level = p.annotation.level_of(cur.q);
    have_active = false;
    ep_started = std::chrono::steady_clock::now();
  };

  double window_delta = 0.0;
  std::size_t streak = 0;
  for (std::size_t t = 1; t <= hp.total_steps; ++t) {
    const world::JointOption *current = have_active ? &active : nullptr;
    space.ids(choice_masks(p.grid, cur.s, current), ids);
    const StateKey key = pack(p.grid, cur);
    const std::uint32_t id = choose_joint_option(out.q, key, ids, hp.epsilon, act_rng);
    const world::JointOption jo = fresh_joint_option(space, id, current);
    const world::StepResult res = world::step(p.grid, cur.s, jo);
    ++ep.env_steps;
    out.steps_run = t;

    if (auto e = observe(p, rewards, cur, id, res)) {
      memory.push(*e);
      ep.cumulative_reward += e->reward;
      const AugmentedState next = unpack(p.grid, e->to);
      ep.max_progress_level = std::max(ep.max_progress_level, p.annotation.level_of(next.q));
      cur = next;
      active = res.continuing;
      have_active = true;
      if (e->terminal)
        end_episode(true);
      else if (ep.env_steps >= hp.max_trajectory)
        end_episode(false);
    } else {
      end_episode(false);
    }

    for (std::size_t k = 0; k < hp.updates_per_step; ++k) {
      memory.sample(hp.batch_size, batch);
      window_delta = std::max(window_delta, q_update(out.q, batch, hp.gamma, hp.alpha, space));
    }

    if (hp.eval_every > 0 && t % hp.eval_every == 0) {
      const Plan plan = extract_plan(out.q, p, hp.max_trajectory);
      const bool ok = plan.status == PlanStatus::Satisfied;
      out.checkpoints.push_back({t, ok, plan.max_progress_level});
      streak = ok ? streak + 1 : 0;
      if (streak == hp.eval_streak && !out.converged_step) {
        out.converged_step = out.checkpoints[out.checkpoints.size() - hp.eval_streak].step;
        if (hp.stop_on_convergence)
          break;
      }
    }
    if (hp.stop_tolerance > 0.0 && t % hp.stop_window == 0) {
      if (window_delta < hp.stop_tolerance) {
        out.stopped_by_tolerance = true;
        break;
      }
      window_delta = 0.0;
    }
  }
  if (ep.env_steps > 0) {
    ep.wall_ms = elapsed_ms(ep_started);
    out.episodes.push_back(ep);
  }
  out.wall_seconds = elapsed_ms(started) / 1000.0;
  return out;
}

std::string_view to_string(PlanStatus s) {
  switch (s) {
  case PlanStatus::Satisfied:
    return "satisfied";
  case PlanStatus::Violated:
    return "violated";
  case PlanStatus::Timeout:
    return "timeout";
  }
  return "?";
}

PlanStatus parse_plan_status(std::string_view text) {
  if (text == "satisfied")
    return PlanStatus::Satisfied;
  if (text == "violated")
    return PlanStatus::Violated;
  if (text == "timeout")
    return PlanStatus::Timeout;
  throw std::invalid_argument("unknown plan status '" + std::string(text) + "'");
}

Plan extract_plan(const QTable &q, const Problem &p, std::size_t max_len) {
  const JointOptionSpace space(p.grid);
  const RewardModel rewards{progress::ShapingConfig{}, 0.0};
  Rng unused(0);
  std::vector<std::uint32_t> ids;

  Plan plan;
  AugmentedState cur{p.grid.start_state(), p.automaton.initial()};
  plan.max_progress_level = p.annotation.level_of(cur.q);
  world::JointOption active;
  bool have_active = false;
  for (std::size_t t = 0; t < max_len; ++t) {
    const world::JointOption *current = have_active ? &active : nullptr;
    space.ids(choice_masks(p.grid, cur.s, current), ids);
    const std::uint32_t id = choose_joint_option(q, pack(p.grid, cur), ids, 0.0, unused);
    const world::JointOption jo = fresh_joint_option(space, id, current);
    const world::StepResult res = world::step(p.grid, cur.s, jo);

    PlanStep st;
    st.from = cur;
    st.joint_option = id;
    st.options = jo.options;
    for (std::size_t a = 0; a < jo.options.size(); ++a)
      st.kinds.push_back(p.grid.options(a)[jo.options[a]].kind);
    st.moves = res.moves;
    st.label = world::label(p.grid, res.next);
    const auto t_next = observe(p, rewards, cur.q, res.next);
    st.rejected = !t_next;
    st.to = AugmentedState{res.next, t_next ? t_next->q_next : cur.q};
    plan.steps.push_back(std::move(st));

    if (!t_next) {
      plan.status = PlanStatus::Violated;
      return plan;
    }
    plan.max_progress_level = std::max(plan.max_progress_level, p.annotation.level_of(t_next->q_next));
    cur = plan.steps.back().to;
    active = res.continuing;
    have_active = true;
    if (t_next->terminal) {
      plan.status = PlanStatus::Satisfied;
      return plan;
    }
  }
  plan.status = PlanStatus::Timeout;
  return plan;
}

double initial_value(const QTable &q, const Problem &p) {
  const JointOptionSpace space(p.grid);
  const AugmentedState s0{p.grid.start_state(), p.automaton.initial()};
  return q.max_over(pack(p.grid, s0), choice_masks(p.grid, s0.s, nullptr), space);
}

} // namespace ltlshape::learner
