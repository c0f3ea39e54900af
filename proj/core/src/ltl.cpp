#include "ltlshape/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace ltlshape::ltl {

struct Formula::Node {
  Op op;
  std::string name;
  std::vector<Formula> children;
};

Formula Formula::truth() {
  static const Formula t{std::make_shared<const Node>(Node{Op::True, {}, {}})};
  return t;
}

Formula Formula::falsity() {
  static const Formula f{std::make_shared<const Node>(Node{Op::False, {}, {}})};
  return f;
}

Formula Formula::prop(std::string name) {
  if (name.empty())
    throw std::invalid_argument("empty proposition name");
  return Formula{std::make_shared<const Node>(Node{Op::Prop, std::move(name), {}})};
}

Formula Formula::unary(Op op, Formula child) {
  if (arity(op) != 1)
    throw std::invalid_argument("operator is not unary");
  return Formula{std::make_shared<const Node>(Node{op, {}, {std::move(child)}})};
}

Formula Formula::binary(Op op, Formula lhs, Formula rhs) {
  if (arity(op) != 2)
    throw std::invalid_argument("operator is not binary");
  return Formula{std::make_shared<const Node>(Node{op, {}, {std::move(lhs), std::move(rhs)}})};
}

Op Formula::op() const { return node_->op; }
const std::string &Formula::name() const { return node_->name; }

const Formula &Formula::lhs() const {
  if (node_->children.empty())
    throw std::logic_error("formula node has no children");
  return node_->children[0];
}

const Formula &Formula::rhs() const {
  if (node_->children.size() < 2)
    throw std::logic_error("formula node is not binary");
  return node_->children[1];
}

int compare(const Formula &a, const Formula &b) {
  if (a.id() == b.id())
    return 0;
  if (a.op() != b.op())
    return a.op() < b.op() ? -1 : 1;
  switch (arity(a.op())) {
  case 0:
    return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
  case 1:
    return compare(a.child(), b.child());
  default:
    if (int c = compare(a.lhs(), b.lhs()); c != 0)
      return c;
    return compare(a.rhs(), b.rhs());
  }
}

bool operator==(const Formula &a, const Formula &b) { return compare(a, b) == 0; }
bool operator<(const Formula &a, const Formula &b) { return compare(a, b) < 0; }

Formula operator!(Formula f) { return Formula::unary(Op::Not, std::move(f)); }
Formula operator&&(Formula a, Formula b) { return Formula::binary(Op::And, std::move(a), std::move(b)); }
Formula operator||(Formula a, Formula b) { return Formula::binary(Op::Or, std::move(a), std::move(b)); }
Formula implies(Formula a, Formula b) { return Formula::binary(Op::Implies, std::move(a), std::move(b)); }
Formula next(Formula f) { return Formula::unary(Op::Next, std::move(f)); }
Formula finally(Formula f) { return Formula::unary(Op::Finally, std::move(f)); }
Formula globally(Formula f) { return Formula::unary(Op::Globally, std::move(f)); }
Formula until(Formula a, Formula b) { return Formula::binary(Op::Until, std::move(a), std::move(b)); }
Formula release(Formula a, Formula b) { return Formula::binary(Op::Release, std::move(a), std::move(b)); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { End, True, False, Ident, Not, And, Or, Implies, Next, Finally, Globally, Until, LParen, RParen };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;
};

const char *describe(Tok t) {
  switch (t) {
  case Tok::End: return "end of input";
  case Tok::True: return "'true'";
  case Tok::False: return "'false'";
  case Tok::Ident: return "proposition";
  case Tok::Not: return "'!'";
  case Tok::And: return "'&'";
  case Tok::Or: return "'|'";
  case Tok::Implies: return "'->'";
  case Tok::Next: return "'X'";
  case Tok::Finally: return "'F'";
  case Tok::Globally: return "'G'";
  case Tok::Until: return "'U'";
  case Tok::LParen: return "'('";
  case Tok::RParen: return "')'";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    auto single = [&](Tok t) {
      out.push_back({t, start, std::string(1, c)});
      ++i;
    };
    switch (c) {
    case '!': single(Tok::Not); continue;
    case '&': single(Tok::And); continue;
    case '|': single(Tok::Or); continue;
    case 'X': single(Tok::Next); continue;
    case 'F': single(Tok::Finally); continue;
    case 'G': single(Tok::Globally); continue;
    case 'U': single(Tok::Until); continue;
    case '(': single(Tok::LParen); continue;
    case ')': single(Tok::RParen); continue;
    case '-':
      if (i + 1 < text.size() && text[i + 1] == '>') {
        out.push_back({Tok::Implies, start, "->"});
        i += 2;
        continue;
      }
      throw ParseError(start, "expected '->'");
    default:
      break;
    }
    if (c >= 'a' && c <= 'z') {
      while (i < text.size() &&
             ((text[i] >= 'a' && text[i] <= 'z') || (text[i] >= '0' && text[i] <= '9') || text[i] == '_'))
        ++i;
      std::string word(text.substr(start, i - start));
      Tok kind = word == "true" ? Tok::True : word == "false" ? Tok::False : Tok::Ident;
      out.push_back({kind, start, std::move(word)});
      continue;
    }
    throw ParseError(start, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, text.size(), {}});
  return out;
}

class Parser {
public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Formula run() {
    if (peek().kind == Tok::End)
      throw ParseError(peek().offset, "empty formula");
    Formula f = implication();
    if (peek().kind != Tok::End)
      unexpected("end of input");
    return f;
  }

private:
  const Token &peek() const { return toks_[pos_]; }
  const Token &advance() { return toks_[pos_++]; }

  [[noreturn]] void unexpected(const char *expected) const {
    throw ParseError(peek().offset, std::string("expected ") + expected + ", found " + describe(peek().kind));
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::Implies) {
      advance();
      return implies(std::move(lhs), implication());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (peek().kind == Tok::Or) {
      advance();
      f = std::move(f) || conjunction();
    }
    return f;
  }

  Formula conjunction() {
    Formula f = until_expr();
    while (peek().kind == Tok::And) {
      advance();
      f = std::move(f) && until_expr();
    }
    return f;
  }

  Formula until_expr() {
    Formula lhs = prefix();
    if (peek().kind == Tok::Until) {
      advance();
      return until(std::move(lhs), until_expr());
    }
    return lhs;
  }

  Formula prefix() {
    switch (peek().kind) {
    case Tok::Not: advance(); return !prefix();
    case Tok::Next: advance(); return next(prefix());
    case Tok::Finally: advance(); return finally(prefix());
    case Tok::Globally: advance(); return globally(prefix());
    default: return atom();
    }
  }

  Formula atom() {
    switch (peek().kind) {
    case Tok::True: advance(); return Formula::truth();
    case Tok::False: advance(); return Formula::falsity();
    case Tok::Ident: return Formula::prop(advance().text);
    case Tok::LParen: {
      advance();
      Formula inner = implication();
      if (peek().kind != Tok::RParen)
        unexpected("')'");
      advance();
      return inner;
    }
    default:
      unexpected("formula");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

} // namespace

Formula parse(std::string_view text) { return Parser(tokenize(text)).run(); }

// ---------------------------------------------------------------------------
// Printing

std::string to_string(const Formula &f) {
  switch (f.op()) {
  case Op::True: return "true";
  case Op::False: return "false";
  case Op::Prop: return f.name();
  case Op::Not: return "(! " + to_string(f.child()) + ")";
  case Op::Next: return "(X " + to_string(f.child()) + ")";
  case Op::Finally: return "(F " + to_string(f.child()) + ")";
  case Op::Globally: return "(G " + to_string(f.child()) + ")";
  case Op::And: return "(" + to_string(f.lhs()) + " & " + to_string(f.rhs()) + ")";
  case Op::Or: return "(" + to_string(f.lhs()) + " | " + to_string(f.rhs()) + ")";
  case Op::Implies: return "(" + to_string(f.lhs()) + " -> " + to_string(f.rhs()) + ")";
  case Op::Until: return "(" + to_string(f.lhs()) + " U " + to_string(f.rhs()) + ")";
  case Op::Release:
    return "(! ((! " + to_string(f.lhs()) + ") U (! " + to_string(f.rhs()) + ")))";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Negation normal form

namespace {

Formula nnf(const Formula &f, bool negated) {
  switch (f.op()) {
  case Op::True: return negated ? Formula::falsity() : f;
  case Op::False: return negated ? Formula::truth() : f;
  case Op::Prop: return negated ? !f : f;
  case Op::Not: return nnf(f.child(), !negated);
  case Op::Next: return next(nnf(f.child(), negated));
  case Op::And:
    return negated ? nnf(f.lhs(), true) || nnf(f.rhs(), true) : nnf(f.lhs(), false) && nnf(f.rhs(), false);
  case Op::Or:
    return negated ? nnf(f.lhs(), true) && nnf(f.rhs(), true) : nnf(f.lhs(), false) || nnf(f.rhs(), false);
  case Op::Implies:
    return negated ? nnf(f.lhs(), false) && nnf(f.rhs(), true) : nnf(f.lhs(), true) || nnf(f.rhs(), false);
  case Op::Finally:
    return negated ? release(Formula::falsity(), nnf(f.child(), true)) : finally(nnf(f.child(), false));
  case Op::Globally:
    return negated ? until(Formula::truth(), nnf(f.child(), true)) : globally(nnf(f.child(), false));
  case Op::Until:
    return negated ? release(nnf(f.lhs(), true), nnf(f.rhs(), true)) : until(nnf(f.lhs(), false), nnf(f.rhs(), false));
  case Op::Release:
    return negated ? until(nnf(f.lhs(), true), nnf(f.rhs(), true)) : release(nnf(f.lhs(), false), nnf(f.rhs(), false));
  }
  return f;
}

} // namespace

Formula to_nnf(const Formula &f) { return nnf(f, false); }

bool is_nnf(const Formula &f) {
  switch (f.op()) {
  case Op::True:
  case Op::False:
  case Op::Prop:
    return true;
  case Op::Not:
    return f.child().op() == Op::Prop;
  case Op::Implies:
    return false;
  default:
    if (arity(f.op()) == 1)
      return is_nnf(f.child());
    return is_nnf(f.lhs()) && is_nnf(f.rhs());
  }
}

namespace {

void collect_props(const Formula &f, std::vector<std::string> &out) {
  if (f.op() == Op::Prop) {
    out.push_back(f.name());
    return;
  }
  const int n = arity(f.op());
  if (n >= 1)
    collect_props(f.lhs(), out);
  if (n == 2)
    collect_props(f.rhs(), out);
}

} // namespace

std::vector<std::string> atomic_props(const Formula &f) {
  std::vector<std::string> out;
  collect_props(f, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t depth(const Formula &f) {
  switch (arity(f.op())) {
  case 0: return 0;
  case 1: return 1 + depth(f.child());
  default: return 1 + std::max(depth(f.lhs()), depth(f.rhs()));
  }
}

// ---------------------------------------------------------------------------
// Lasso semantics

namespace {

class LassoEvaluator {
public:
  explicit LassoEvaluator(const LassoWord &w) : w_(w), n_(w.size()) {}

  const std::vector<char> &eval(const Formula &f) {
    if (auto it = memo_.find(f.id()); it != memo_.end())
      return it->second;
    std::vector<char> v(n_, 0);
    switch (f.op()) {
    case Op::True: std::fill(v.begin(), v.end(), 1); break;
    case Op::False: break;
    case Op::Prop:
      for (std::size_t i = 0; i < n_; ++i)
        v[i] = w_.at(i).contains(f.name());
      break;
    case Op::Not: {
      const auto &a = eval(f.child());
      for (std::size_t i = 0; i < n_; ++i)
        v[i] = !a[i];
      break;
    }
    case Op::And:
    case Op::Or:
    case Op::Implies: {
      const auto a = eval(f.lhs());
      const auto &b = eval(f.rhs());
      for (std::size_t i = 0; i < n_; ++i)
        v[i] = f.op() == Op::And ? (a[i] && b[i]) : f.op() == Op::Or ? (a[i] || b[i]) : (!a[i] || b[i]);
      break;
    }
    case Op::Next: {
      const auto &a = eval(f.child());
      for (std::size_t i = 0; i < n_; ++i)
        v[i] = a[w_.succ(i)];
      break;
    }
    case Op::Finally: v = fixpoint(truth_vector(), eval(f.child()), false); break;
    case Op::Globally: v = fixpoint(eval(f.child()), falsity_vector(), true); break;
    case Op::Until: {
      const auto a = eval(f.lhs());
      v = fixpoint(a, eval(f.rhs()), false);
      break;
    }
    case Op::Release: {
      // a R b == b & (a | X(a R b)): greatest fixpoint
      const auto a = eval(f.lhs());
      const auto &b = eval(f.rhs());
      v.assign(n_, 1);
      for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t k = n_; k-- > 0;) {
          const char next = b[k] && (a[k] || v[w_.succ(k)]);
          if (next != v[k]) {
            v[k] = next;
            changed = true;
          }
        }
      }
      break;
    }
    }
    return memo_.emplace(f.id(), std::move(v)).first->second;
  }

private:
  std::vector<char> truth_vector() const { return std::vector<char>(n_, 1); }
  std::vector<char> falsity_vector() const { return std::vector<char>(n_, 0); }

  // Least fixpoint of v = goal | (hold & X v) when greatest == false,
  // greatest fixpoint of v = hold & X v (goal unused) when greatest == true.
  std::vector<char> fixpoint(const std::vector<char> &hold, const std::vector<char> &goal, bool greatest) const {
    std::vector<char> v(n_, greatest ? 1 : 0);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t k = n_; k-- > 0;) {
        const char next = greatest ? (hold[k] && v[w_.succ(k)]) : (goal[k] || (hold[k] && v[w_.succ(k)]));
        if (next != v[k]) {
          v[k] = next;
          changed = true;
        }
      }
    }
    return v;
  }

  const LassoWord &w_;
  std::size_t n_;
  std::unordered_map<const void *, std::vector<char>> memo_;
};

} // namespace

bool eval_lasso(const Formula &f, const LassoWord &w) {
  if (w.loop.empty())
    throw std::invalid_argument("lasso word needs a nonempty loop");
  LassoEvaluator ev(w);
  return ev.eval(f)[0] != 0;
}

} // namespace ltlshape::ltl
