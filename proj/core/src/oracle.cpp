#include "ltlshape/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ltlshape::learner {

namespace {

constexpr double kRejected = -std::numeric_limits<double>::infinity();

struct Outcome {
  std::uint32_t next = 0; // product index s' * nq + q'
  double reward = 0.0;
  bool valid = false;
  bool terminal = false;
};

} // namespace

std::size_t OracleResult::joint_state_index(const world::GridSpec &g, const world::JointState &s) const {
  const std::size_t cells = static_cast<std::size_t>(g.width()) * g.height();
  std::size_t idx = 0;
  for (std::size_t a = s.positions.size(); a-- > 0;)
    idx = idx * cells + g.cell_index(s.positions[a]);
  return idx;
}

double OracleResult::value(const world::GridSpec &g, const AugmentedState &a, std::uint32_t joint_option) const {
  const std::size_t s = joint_state_index(g, a.s);
  return q.at((s * num_automaton_states + a.q) * num_joint_options + joint_option);
}

OracleResult value_iteration_oracle(const Problem &p, const RewardModel &rewards, double gamma, double tol,
                                    std::size_t max_sweeps) {
  const auto &g = p.grid;
  for (const auto &menu : g.menus())
    for (const auto &o : menu)
      if (!world::is_primitive(o.kind))
        throw std::invalid_argument("the oracle handles primitive options only");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("gamma must lie in [0, 1]");

  const std::size_t cells = static_cast<std::size_t>(g.width()) * g.height();
  const std::size_t agents = g.num_agents();
  const std::size_t nq = p.automaton.num_states();
  const std::uint32_t njo = world::num_joint_options(g);
  double joint = 1.0;
  for (std::size_t a = 0; a < agents; ++a)
    joint *= static_cast<double>(cells);
  if (joint * static_cast<double>(nq) * njo > static_cast<double>(kOracleCap))
    throw std::invalid_argument("product state space exceeds the oracle cap of " + std::to_string(kOracleCap) +
                                " entries");
  const std::size_t ns = static_cast<std::size_t>(joint);

  OracleResult r;
  r.num_joint_states = ns;
  r.num_automaton_states = nq;
  r.num_joint_options = njo;

  auto decode = [&](std::size_t idx) {
    world::JointState s;
    s.positions.resize(agents);
    for (std::size_t a = 0; a < agents; ++a) {
      const auto c = static_cast<int>(idx % cells);
      s.positions[a] = world::Cell{c % g.width(), c / g.width()};
      idx /= cells;
    }
    return s;
  };

  // Every primitive can always be initiated, so all joint options apply.
  std::vector<Outcome> model(ns * nq * njo);
  for (std::size_t si = 0; si < ns; ++si) {
    const world::JointState s = decode(si);
    for (std::uint32_t o = 0; o < njo; ++o) {
      world::JointOption jo;
      jo.options = world::decode_joint_option(g, o);
      jo.active.assign(agents, 0);
      jo.elapsed.assign(agents, 0);
      const world::StepResult step = world::step(g, s, jo);
      const std::size_t next_s = r.joint_state_index(g, step.next);
      for (std::size_t q = 0; q < nq; ++q) {
        Outcome &out = model[(si * nq + q) * njo + o];
        const auto t = observe(p, rewards, static_cast<StateId>(q), step.next);
        if (!t)
          continue;
        out.valid = true;
        out.next = static_cast<std::uint32_t>(next_s * nq + t->q_next);
        out.reward = t->reward;
        out.terminal = t->terminal;
      }
    }
  }

  std::vector<double> v(ns * nq, 0.0);
  r.q.assign(model.size(), kRejected);
  for (r.sweeps = 1; r.sweeps <= max_sweeps; ++r.sweeps) {
    double delta = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
      const Outcome &m = model[i];
      if (!m.valid)
        continue;
      const double updated = m.reward + (m.terminal ? 0.0 : gamma * v[m.next]);
      if (r.q[i] != kRejected)
        delta = std::max(delta, std::abs(updated - r.q[i]));
      else
        delta = std::max(delta, std::abs(updated));
      r.q[i] = updated;
    }
    for (std::size_t x = 0; x < v.size(); ++x) {
      const double *row = r.q.data() + x * njo;
      const double best = *std::max_element(row, row + njo);
      v[x] = best == kRejected ? 0.0 : best;
    }
    if (delta < tol) {
      r.converged = true;
      break;
    }
  }
  r.sweeps = std::min(r.sweeps, max_sweeps);

  const std::size_t start = r.joint_state_index(g, g.start_state()) * nq + p.automaton.initial();
  r.initial_value = v[start];

  // Greedy rollout, smallest id on ties, rejected options excluded.
  std::size_t x = start;
  for (std::size_t len = 1; len <= ns * nq; ++len) {
    const double *row = r.q.data() + x * njo;
    const std::uint32_t best = static_cast<std::uint32_t>(std::max_element(row, row + njo) - row);
    if (row[best] == kRejected)
      break;
    const Outcome &m = model[x * njo + best];
    if (m.terminal) {
      r.plan_length = len;
      break;
    }
    x = m.next;
  }
  return r;
}

} // namespace ltlshape::learner
