#include "ltlshape/automaton.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

namespace ltlshape::automaton {

namespace {

using ltl::Formula;
using ltl::Op;
using Obligations = std::vector<Formula>; // sorted, unique, never contains `true`

struct Cover {
  ApMask pos = 0;
  ApMask neg = 0;
  std::set<Formula> next;
  std::uint32_t postponed = 0;
};

void collect_eventualities(const Formula &f, std::set<Formula> &out) {
  if (f.op() == Op::Until || f.op() == Op::Finally)
    out.insert(f);
  const int n = ltl::arity(f.op());
  if (n >= 1)
    collect_eventualities(f.lhs(), out);
  if (n == 2)
    collect_eventualities(f.rhs(), out);
}

class Tableau {
public:
  Tableau(const Formula &f, const std::vector<std::string> &aps) : aps_(aps) {
    std::set<Formula> ev;
    collect_eventualities(f, ev);
    eventualities_.assign(ev.begin(), ev.end());
    if (eventualities_.size() > 32)
      throw std::invalid_argument("formula has more than 32 Until/Finally subformulas");
  }

  std::size_t num_sets() const { return eventualities_.size(); }

  /// All consistent one-step covers of a conjunction of obligations.
  std::vector<Cover> expand(const Obligations &state) const {
    std::vector<Cover> out;
    std::vector<Formula> todo(state.rbegin(), state.rend());
    expand(std::move(todo), {}, Cover{}, out);
    return out;
  }

private:
  std::size_t ap_of(const Formula &p) const {
    auto it = std::find(aps_.begin(), aps_.end(), p.name());
    if (it == aps_.end())
      throw std::invalid_argument("proposition '" + p.name() + "' is not in the AP universe");
    return static_cast<std::size_t>(it - aps_.begin());
  }

  std::uint32_t set_bit(const Formula &f) const {
    auto it = std::lower_bound(eventualities_.begin(), eventualities_.end(), f);
    return 1U << static_cast<unsigned>(it - eventualities_.begin());
  }

  static void defer(Cover &c, const Formula &f) {
    if (f.op() != Op::True)
      c.next.insert(f);
  }

  void expand(std::vector<Formula> todo, std::set<Formula> done, Cover cover, std::vector<Cover> &out) const {
    while (!todo.empty()) {
      Formula f = std::move(todo.back());
      todo.pop_back();
      if (!done.insert(f).second)
        continue;
      switch (f.op()) {
      case Op::True:
        break;
      case Op::False:
        return;
      case Op::Prop: {
        const ApMask bit = ApMask{1} << ap_of(f);
        if (cover.neg & bit)
          return;
        cover.pos |= bit;
        break;
      }
      case Op::Not: {
        if (f.child().op() != Op::Prop)
          throw std::invalid_argument("translate expects a formula in negation normal form");
        const ApMask bit = ApMask{1} << ap_of(f.child());
        if (cover.pos & bit)
          return;
        cover.neg |= bit;
        break;
      }
      case Op::And:
        todo.push_back(f.rhs());
        todo.push_back(f.lhs());
        break;
      case Op::Or: {
        auto left = todo;
        left.push_back(f.lhs());
        expand(std::move(left), done, cover, out);
        todo.push_back(f.rhs());
        break;
      }
      case Op::Next:
        defer(cover, f.child());
        break;
      case Op::Finally: {
        auto now = todo;
        now.push_back(f.child());
        expand(std::move(now), done, cover, out);
        defer(cover, f);
        cover.postponed |= set_bit(f);
        break;
      }
      case Op::Globally:
        todo.push_back(f.child());
        defer(cover, f);
        break;
      case Op::Until: {
        auto now = todo;
        now.push_back(f.rhs());
        expand(std::move(now), done, cover, out);
        todo.push_back(f.lhs());
        defer(cover, f);
        cover.postponed |= set_bit(f);
        break;
      }
      case Op::Release: {
        auto now = todo;
        now.push_back(f.rhs());
        now.push_back(f.lhs());
        expand(std::move(now), done, cover, out);
        todo.push_back(f.rhs());
        defer(cover, f);
        break;
      }
      case Op::Implies:
        throw std::invalid_argument("translate expects a formula in negation normal form");
      }
    }
    if (cover.next.contains(Formula::falsity()))
      return;
    out.push_back(std::move(cover));
  }

  const std::vector<std::string> &aps_;
  std::vector<Formula> eventualities_;
};

/// A state stands for the conjunction of its obligations, so conjunctions
/// are split into their conjuncts.
void add_conjuncts(const Formula &f, std::set<Formula> &out) {
  if (f.op() == Op::And) {
    add_conjuncts(f.lhs(), out);
    add_conjuncts(f.rhs(), out);
  } else if (f.op() != Op::True) {
    out.insert(f);
  }
}

Obligations obligations_of(const std::set<Formula> &formulas) {
  std::set<Formula> flat;
  for (const auto &f : formulas)
    add_conjuncts(f, flat);
  return Obligations(flat.begin(), flat.end());
}

Guard literal_guard(ApMask pos, ApMask neg, std::size_t num_aps) {
  Guard g = Guard::truth();
  for (std::size_t i = 0; i < num_aps; ++i) {
    const ApMask bit = ApMask{1} << i;
    if (pos & bit)
      g = Guard::conj(std::move(g), Guard::ap(i));
    else if (neg & bit)
      g = Guard::conj(std::move(g), Guard::negate(Guard::ap(i)));
  }
  return g;
}

} // namespace

GeneralizedBuchi translate_generalized(const ltl::Formula &f, std::vector<std::string> ap_universe) {
  if (!ltl::is_nnf(f))
    throw std::invalid_argument("translate expects a formula in negation normal form");
  for (const auto &p : ltl::atomic_props(f))
    if (std::find(ap_universe.begin(), ap_universe.end(), p) == ap_universe.end())
      throw std::invalid_argument("proposition '" + p + "' is not in the AP universe");

  const Tableau tableau(f, ap_universe);
  const std::uint32_t all = tableau.num_sets() == 32 ? ~0U : ((1U << tableau.num_sets()) - 1U);

  std::map<Obligations, StateId> ids;
  std::vector<Obligations> states;
  std::deque<StateId> todo;
  auto intern = [&](Obligations key) {
    auto [it, inserted] = ids.try_emplace(key, static_cast<StateId>(states.size()));
    if (inserted) {
      states.push_back(std::move(key));
      todo.push_back(it->second);
    }
    return it->second;
  };

  intern(obligations_of({f}));

  std::vector<GeneralizedBuchi::Edge> edges;
  while (!todo.empty()) {
    const StateId src = todo.front();
    todo.pop_front();
    // Covers that share a target and acceptance marks become one edge.
    std::vector<GeneralizedBuchi::Edge> merged;
    for (const Cover &c : tableau.expand(states[src])) {
      const StateId dst = intern(obligations_of(c.next));
      const std::uint32_t marks = all & ~c.postponed;
      Guard g = literal_guard(c.pos, c.neg, ap_universe.size());
      auto it = std::find_if(merged.begin(), merged.end(),
                             [&](const auto &e) { return e.dst == dst && e.marks == marks; });
      if (it == merged.end())
        merged.push_back({src, std::move(g), dst, marks});
      else
        it->guard = Guard::disj(it->guard, std::move(g));
    }
    edges.insert(edges.end(), merged.begin(), merged.end());
  }
  return GeneralizedBuchi(std::move(ap_universe), states.size(), 0, std::move(edges), tableau.num_sets());
}

} // namespace ltlshape::automaton
