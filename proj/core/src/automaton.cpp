#include "ltlshape/automaton.hpp"

#include "ltlshape/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace ltlshape::automaton {

namespace {

ApMask mask_over(const std::vector<std::string> &aps, const ltl::Label &label) {
  ApMask m = 0;
  for (std::size_t i = 0; i < aps.size(); ++i)
    if (label.contains(aps[i]))
      m |= ApMask{1} << i;
  return m;
}

void check_universe(const std::vector<std::string> &aps) {
  if (aps.size() > kMaxAps)
    throw std::invalid_argument("AP universe larger than 64 propositions");
  for (std::size_t i = 0; i < aps.size(); ++i)
    for (std::size_t j = i + 1; j < aps.size(); ++j)
      if (aps[i] == aps[j])
        throw std::invalid_argument("duplicate proposition '" + aps[i] + "' in AP universe");
}

void check_guard(const Guard &g, std::size_t num_aps) {
  if (auto m = g.max_ap(); m && *m >= num_aps)
    throw std::invalid_argument("guard references AP index " + std::to_string(*m) + " outside the universe");
}

} // namespace

BuchiAutomaton::BuchiAutomaton(std::vector<std::string> ap_universe, std::size_t num_states, StateId initial,
                               std::vector<Edge> edges, std::vector<bool> accepting)
    : aps_(std::move(ap_universe)), initial_(initial), edges_(std::move(edges)), accepting_(std::move(accepting)) {
  check_universe(aps_);
  if (num_states == 0)
    throw std::invalid_argument("automaton needs at least one state");
  if (accepting_.size() != num_states)
    throw std::invalid_argument("acceptance vector size differs from state count");
  if (initial_ >= num_states)
    throw std::invalid_argument("initial state out of range");
  for (const auto &e : edges_) {
    if (e.src >= num_states || e.dst >= num_states)
      throw std::invalid_argument("edge endpoint out of range");
    check_guard(e.guard, aps_.size());
  }
  // CSR index of outgoing edges, stable in edge order.
  out_begin_.assign(num_states + 1, 0);
  for (const auto &e : edges_)
    ++out_begin_[e.src + 1];
  for (std::size_t q = 0; q < num_states; ++q)
    out_begin_[q + 1] += out_begin_[q];
  out_index_.resize(edges_.size());
  std::vector<std::size_t> fill(out_begin_.begin(), out_begin_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i)
    out_index_[fill[edges_[i].src]++] = i;
}

std::span<const std::size_t> BuchiAutomaton::out_edges(StateId q) const {
  if (q >= num_states())
    throw std::out_of_range("unknown automaton state " + std::to_string(q));
  return {out_index_.data() + out_begin_[q], out_begin_[q + 1] - out_begin_[q]};
}

ApMask BuchiAutomaton::mask_of(const ltl::Label &label) const { return mask_over(aps_, label); }

std::vector<StateId> BuchiAutomaton::successors(StateId q, ApMask label) const {
  std::vector<StateId> out;
  for (std::size_t i : out_edges(q))
    if (edges_[i].guard.satisfied_by(label))
      out.push_back(edges_[i].dst);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::vector<StateId>> BuchiAutomaton::adjacency() const {
  std::vector<std::vector<StateId>> adj(num_states());
  for (const auto &e : edges_)
    adj[e.src].push_back(e.dst);
  for (auto &row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return adj;
}

GeneralizedBuchi::GeneralizedBuchi(std::vector<std::string> ap_universe, std::size_t num_states, StateId initial,
                                   std::vector<Edge> edges, std::size_t num_sets)
    : aps_(std::move(ap_universe)), num_states_(num_states), initial_(initial), edges_(std::move(edges)),
      num_sets_(num_sets) {
  check_universe(aps_);
  if (num_states_ == 0 || initial_ >= num_states_)
    throw std::invalid_argument("bad initial state");
  if (num_sets_ > 32)
    throw std::invalid_argument("at most 32 acceptance sets");
  for (const auto &e : edges_) {
    if (e.src >= num_states_ || e.dst >= num_states_)
      throw std::invalid_argument("edge endpoint out of range");
    check_guard(e.guard, aps_.size());
  }
}

ApMask GeneralizedBuchi::mask_of(const ltl::Label &label) const { return mask_over(aps_, label); }

BuchiAutomaton degeneralize(const GeneralizedBuchi &g) {
  const std::uint32_t k = static_cast<std::uint32_t>(g.num_sets());
  std::vector<std::vector<std::size_t>> out(g.num_states());
  for (std::size_t i = 0; i < g.edges().size(); ++i)
    out[g.edges()[i].src].push_back(i);

  // Level c < k waits for acceptance set c; level k means every set was seen
  // since the last visit to level k, and those copies are accepting.
  std::map<std::pair<StateId, std::uint32_t>, StateId> ids;
  std::vector<std::pair<StateId, std::uint32_t>> states;
  std::deque<StateId> todo;
  auto intern = [&](StateId s, std::uint32_t c) {
    auto [it, inserted] = ids.try_emplace({s, c}, static_cast<StateId>(states.size()));
    if (inserted) {
      states.emplace_back(s, c);
      todo.push_back(it->second);
    }
    return it->second;
  };
  intern(g.initial(), 0);

  std::vector<Edge> edges;
  while (!todo.empty()) {
    const StateId id = todo.front();
    todo.pop_front();
    const auto [s, c] = states[id];
    std::vector<std::pair<StateId, Guard>> merged;
    for (std::size_t ei : out[s]) {
      const auto &e = g.edges()[ei];
      std::uint32_t j = c == k ? 0 : c;
      while (j < k && ((e.marks >> j) & 1U))
        ++j;
      const StateId dst = intern(e.dst, j);
      auto it = std::find_if(merged.begin(), merged.end(), [&](const auto &p) { return p.first == dst; });
      if (it == merged.end())
        merged.emplace_back(dst, e.guard);
      else
        it->second = Guard::disj(it->second, e.guard);
    }
    for (auto &[dst, guard] : merged)
      edges.push_back({id, std::move(guard), dst});
  }

  std::vector<bool> accepting(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    accepting[i] = states[i].second == k;
  return BuchiAutomaton(g.ap_universe(), states.size(), 0, std::move(edges), std::move(accepting));
}

BuchiAutomaton translate(const ltl::Formula &nnf_formula, std::vector<std::string> ap_universe) {
  return degeneralize(translate_generalized(nnf_formula, std::move(ap_universe)));
}

// ---------------------------------------------------------------------------
// Lasso acceptance: search the finite product of automaton states and word
// positions for a reachable cycle that satisfies the acceptance condition.

namespace {

struct Product {
  graph::Adjacency adj;
  // Acceptance marks per product edge, parallel to adj.
  std::vector<std::vector<std::uint32_t>> marks;
  std::size_t positions;
};

template <typename EdgeRange, typename MaskFn>
Product build_product(std::size_t num_states, const EdgeRange &edges, const ltl::LassoWord &w, MaskFn mask_of) {
  if (w.loop.empty())
    throw std::invalid_argument("lasso word needs a nonempty loop");
  Product p;
  p.positions = w.size();
  p.adj.resize(num_states * p.positions);
  p.marks.resize(p.adj.size());
  std::vector<ApMask> masks(p.positions);
  for (std::size_t i = 0; i < p.positions; ++i)
    masks[i] = mask_of(w.at(i));
  for (const auto &e : edges) {
    for (std::size_t i = 0; i < p.positions; ++i) {
      if (!e.guard.satisfied_by(masks[i]))
        continue;
      const auto from = static_cast<graph::Vertex>(e.src * p.positions + i);
      p.adj[from].push_back(static_cast<graph::Vertex>(e.dst * p.positions + w.succ(i)));
      if constexpr (requires { e.marks; })
        p.marks[from].push_back(e.marks);
      else
        p.marks[from].push_back(0);
    }
  }
  return p;
}

} // namespace

bool accepts_lasso(const BuchiAutomaton &a, const ltl::LassoWord &w) {
  const Product p = build_product(a.num_states(), a.edges(), w, [&](const ltl::Label &l) { return a.mask_of(l); });
  const auto reach = graph::reachable_from(p.adj, static_cast<graph::Vertex>(a.initial() * p.positions));
  const auto scc = graph::strongly_connected_components(p.adj);
  std::vector<char> nontrivial(scc.count, 0);
  for (graph::Vertex v = 0; v < p.adj.size(); ++v)
    for (graph::Vertex u : p.adj[v])
      if (scc.component[u] == scc.component[v])
        nontrivial[scc.component[v]] = 1;
  for (graph::Vertex v = 0; v < p.adj.size(); ++v) {
    const StateId q = static_cast<StateId>(v / p.positions);
    if (reach[v] && a.is_accepting(q) && nontrivial[scc.component[v]])
      return true;
  }
  return false;
}

bool accepts_lasso(const GeneralizedBuchi &g, const ltl::LassoWord &w) {
  const Product p = build_product(g.num_states(), g.edges(), w, [&](const ltl::Label &l) { return g.mask_of(l); });
  const auto reach = graph::reachable_from(p.adj, static_cast<graph::Vertex>(g.initial() * p.positions));
  const auto scc = graph::strongly_connected_components(p.adj);
  std::vector<std::uint32_t> seen_marks(scc.count, 0);
  std::vector<char> nontrivial(scc.count, 0);
  for (graph::Vertex v = 0; v < p.adj.size(); ++v) {
    if (!reach[v])
      continue;
    for (std::size_t i = 0; i < p.adj[v].size(); ++i) {
      const graph::Vertex u = p.adj[v][i];
      if (scc.component[u] != scc.component[v])
        continue;
      nontrivial[scc.component[v]] = 1;
      seen_marks[scc.component[v]] |= p.marks[v][i];
    }
  }
  const std::uint32_t all = g.num_sets() == 32 ? ~0U : ((1U << g.num_sets()) - 1U);
  for (std::uint32_t c = 0; c < scc.count; ++c)
    if (nontrivial[c] && (seen_marks[c] & all) == all)
      return true;
  return false;
}

bool structurally_equal(const BuchiAutomaton &a, const BuchiAutomaton &b) {
  if (a.num_states() != b.num_states() || a.initial() != b.initial() || a.ap_universe() != b.ap_universe())
    return false;
  for (StateId q = 0; q < a.num_states(); ++q)
    if (a.is_accepting(q) != b.is_accepting(q))
      return false;
  auto collect = [](const BuchiAutomaton &x) {
    std::map<std::pair<StateId, StateId>, Guard> m;
    for (const auto &e : x.edges()) {
      auto [it, inserted] = m.try_emplace({e.src, e.dst}, e.guard);
      if (!inserted)
        it->second = Guard::disj(it->second, e.guard);
    }
    return m;
  };
  const auto ea = collect(a);
  const auto eb = collect(b);
  if (ea.size() != eb.size())
    return false;
  for (const auto &[key, guard] : ea) {
    auto it = eb.find(key);
    if (it == eb.end() || !equivalent(guard, it->second, a.ap_universe().size()))
      return false;
  }
  return true;
}

} // namespace ltlshape::automaton
