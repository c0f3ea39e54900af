#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ltlshape::ltl {

/// Set of atomic propositions that hold at one position of a word.
using Label = std::set<std::string, std::less<>>;

enum class Op {
  True,
  False,
  Prop,
  Not,
  And,
  Or,
  Implies,
  Next,
  Finally,
  Globally,
  Until,
  // Internal dual of Until. Produced by to_nnf, never by the parser.
  Release,
};

constexpr int arity(Op op) {
  switch (op) {
  case Op::True:
  case Op::False:
  case Op::Prop:
    return 0;
  case Op::Not:
  case Op::Next:
  case Op::Finally:
  case Op::Globally:
    return 1;
  default:
    return 2;
  }
}

/// Immutable LTL syntax tree. Copies share structure.
class Formula {
public:
  static Formula truth();
  static Formula falsity();
  static Formula prop(std::string name);
  static Formula unary(Op op, Formula child);
  static Formula binary(Op op, Formula lhs, Formula rhs);

  Op op() const;
  /// Proposition name; empty for every other node kind.
  const std::string &name() const;
  /// First child (the only child of unary nodes).
  const Formula &lhs() const;
  const Formula &rhs() const;
  const Formula &child() const { return lhs(); }

  /// Identity of the shared node, usable as a memo key.
  const void *id() const { return node_.get(); }

  friend bool operator==(const Formula &a, const Formula &b);
  friend bool operator<(const Formula &a, const Formula &b);

private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Shorthands used by tests and the translator.
Formula operator!(Formula f);
Formula operator&&(Formula a, Formula b);
Formula operator||(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula next(Formula f);
Formula finally(Formula f);
Formula globally(Formula f);
Formula until(Formula a, Formula b);
Formula release(Formula a, Formula b);

/// Three-way structural comparison; a total order over formulas.
int compare(const Formula &a, const Formula &b);

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t offset, const std::string &what)
      : std::runtime_error("syntax error at offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

/// Grammar, tightest binding first: unary `! X F G`, `U` (right assoc), `&`,
/// `|`, `->` (right assoc). Atoms are `true`, `false`, `[a-z][a-z0-9_]*` and
/// parenthesised formulas. Throws ParseError with the byte offset of the
/// offending token (or the input length when input ends early).
Formula parse(std::string_view text);

/// Fully parenthesised rendering that parse() maps back to an equal tree.
/// Release nodes, which have no concrete syntax, print as `!(!a U !b)`.
std::string to_string(const Formula &f);

/// Negation normal form: Implies eliminated, Not only directly above Prop.
/// Positive F and G are kept; negated F becomes `false R ..` and negated G
/// becomes `true U ..`.
Formula to_nnf(const Formula &f);
bool is_nnf(const Formula &f);

/// Sorted, de-duplicated proposition names occurring in f.
std::vector<std::string> atomic_props(const Formula &f);

std::size_t depth(const Formula &f);

/// Ultimately periodic word prefix . loop^omega.
struct LassoWord {
  std::vector<Label> prefix;
  std::vector<Label> loop;

  std::size_t size() const { return prefix.size() + loop.size(); }
  const Label &at(std::size_t position) const {
    return position < prefix.size() ? prefix[position] : loop[position - prefix.size()];
  }
  /// Successor position in the finite unrolling (wraps into the loop).
  std::size_t succ(std::size_t position) const {
    return position + 1 < size() ? position + 1 : prefix.size();
  }
};

/// Standard LTL satisfaction of f by the infinite word w. Throws
/// std::invalid_argument if the loop is empty.
bool eval_lasso(const Formula &f, const LassoWord &w);

} // namespace ltlshape::ltl
