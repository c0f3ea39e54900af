#pragma once

#include "ltlshape/ltl.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ltlshape::automaton {

using StateId = std::uint32_t;

/// Bit i set iff proposition i of the AP universe holds.
using ApMask = std::uint64_t;
inline constexpr std::size_t kMaxAps = 64;

/// Propositional edge condition over AP indices.
class Guard {
public:
  enum class Kind { True, False, Ap, Not, And, Or };

  static Guard truth();
  static Guard falsity();
  static Guard ap(std::size_t index);
  static Guard negate(Guard g);
  static Guard conj(Guard a, Guard b);
  static Guard disj(Guard a, Guard b);

  Kind kind() const;
  std::size_t ap_index() const;
  const Guard &lhs() const;
  const Guard &rhs() const;

  bool satisfied_by(ApMask label) const;
  /// Largest AP index referenced, or nullopt for constant guards.
  std::optional<std::size_t> max_ap() const;

  /// HOA label expression: `t`, `f`, `0`, `!1`, `0&!1`, `(0&1)|2`.
  std::string to_hoa() const;

private:
  struct Node;
  explicit Guard(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses an HOA label expression (without the surrounding brackets).
Guard parse_guard(std::string_view text);

/// True iff a and b agree on every label over the first `num_aps` propositions.
bool equivalent(const Guard &a, const Guard &b, std::size_t num_aps);

struct Edge {
  StateId src;
  Guard guard;
  StateId dst;
};

/// Nondeterministic Buchi automaton with state-based acceptance.
class BuchiAutomaton {
public:
  /// Throws std::invalid_argument when an endpoint, the initial state or a
  /// guard AP index is out of range.
  BuchiAutomaton(std::vector<std::string> ap_universe, std::size_t num_states, StateId initial,
                 std::vector<Edge> edges, std::vector<bool> accepting);

  std::size_t num_states() const { return accepting_.size(); }
  StateId initial() const { return initial_; }
  const std::vector<Edge> &edges() const { return edges_; }
  /// Indices into edges() of the edges leaving q.
  std::span<const std::size_t> out_edges(StateId q) const;
  bool is_accepting(StateId q) const { return accepting_.at(q); }
  const std::vector<std::string> &ap_universe() const { return aps_; }

  /// Restriction of a label to the AP universe; other names are ignored.
  ApMask mask_of(const ltl::Label &label) const;

  /// States reachable from q in one step on `label`, ascending and unique.
  /// Throws std::out_of_range for an unknown state.
  std::vector<StateId> successors(StateId q, ApMask label) const;
  std::vector<StateId> successors(StateId q, const ltl::Label &label) const {
    return successors(q, mask_of(label));
  }

  /// Plain successor lists, ignoring guards.
  std::vector<std::vector<StateId>> adjacency() const;

private:
  std::vector<std::string> aps_;
  StateId initial_;
  std::vector<Edge> edges_;
  std::vector<bool> accepting_;
  std::vector<std::size_t> out_index_;
  std::vector<std::size_t> out_begin_;
};

/// Generalized Buchi automaton with transition-based acceptance: bit j of
/// `marks` puts the edge in acceptance set j.
class GeneralizedBuchi {
public:
  struct Edge {
    StateId src;
    Guard guard;
    StateId dst;
    std::uint32_t marks;
  };

  GeneralizedBuchi(std::vector<std::string> ap_universe, std::size_t num_states, StateId initial,
                   std::vector<Edge> edges, std::size_t num_sets);

  std::size_t num_states() const { return num_states_; }
  StateId initial() const { return initial_; }
  std::size_t num_sets() const { return num_sets_; }
  const std::vector<Edge> &edges() const { return edges_; }
  const std::vector<std::string> &ap_universe() const { return aps_; }
  ApMask mask_of(const ltl::Label &label) const;

private:
  std::vector<std::string> aps_;
  std::size_t num_states_;
  StateId initial_;
  std::vector<Edge> edges_;
  std::size_t num_sets_;
};

/// Tableau expansion of an NNF formula into a transition-based generalized
/// Buchi automaton with one acceptance set per Until/Finally subformula.
/// Throws std::invalid_argument if f is not in NNF or mentions a proposition
/// outside ap_universe.
GeneralizedBuchi translate_generalized(const ltl::Formula &f, std::vector<std::string> ap_universe);

/// Counter-based degeneralization; only states reachable from the initial
/// state are kept.
BuchiAutomaton degeneralize(const GeneralizedBuchi &g);

/// translate_generalized followed by degeneralize.
BuchiAutomaton translate(const ltl::Formula &nnf_formula, std::vector<std::string> ap_universe);

bool accepts_lasso(const BuchiAutomaton &a, const ltl::LassoWord &w);
bool accepts_lasso(const GeneralizedBuchi &g, const ltl::LassoWord &w);

/// HOA v1 with state-based `Acceptance: 1 Inf(0)`.
std::string serialize_hoa(const BuchiAutomaton &a);

class HoaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Reads the subset of HOA v1 emitted by serialize_hoa (single initial state,
/// Buchi acceptance, explicit labels). Throws HoaError.
BuchiAutomaton parse_hoa(std::string_view text);

/// Same state numbering, initial state, acceptance and, per (src, dst) pair,
/// semantically equal guard disjunctions.
bool structurally_equal(const BuchiAutomaton &a, const BuchiAutomaton &b);

} // namespace ltlshape::automaton
