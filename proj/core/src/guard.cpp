#include "ltlshape/automaton.hpp"

#include <cctype>
#include <stdexcept>

namespace ltlshape::automaton {

struct Guard::Node {
  Kind kind;
  std::size_t ap = 0;
  std::vector<Guard> children;
};

Guard Guard::truth() {
  static const Guard t{std::make_shared<const Node>(Node{Kind::True, 0, {}})};
  return t;
}

Guard Guard::falsity() {
  static const Guard f{std::make_shared<const Node>(Node{Kind::False, 0, {}})};
  return f;
}

Guard Guard::ap(std::size_t index) {
  if (index >= kMaxAps)
    throw std::invalid_argument("AP index out of range");
  return Guard{std::make_shared<const Node>(Node{Kind::Ap, index, {}})};
}

Guard Guard::negate(Guard g) {
  if (g.kind() == Kind::True)
    return falsity();
  if (g.kind() == Kind::False)
    return truth();
  return Guard{std::make_shared<const Node>(Node{Kind::Not, 0, {std::move(g)}})};
}

Guard Guard::conj(Guard a, Guard b) {
  if (a.kind() == Kind::True)
    return b;
  if (b.kind() == Kind::True)
    return a;
  if (a.kind() == Kind::False || b.kind() == Kind::False)
    return falsity();
  return Guard{std::make_shared<const Node>(Node{Kind::And, 0, {std::move(a), std::move(b)}})};
}

Guard Guard::disj(Guard a, Guard b) {
  if (a.kind() == Kind::False)
    return b;
  if (b.kind() == Kind::False)
    return a;
  if (a.kind() == Kind::True || b.kind() == Kind::True)
    return truth();
  return Guard{std::make_shared<const Node>(Node{Kind::Or, 0, {std::move(a), std::move(b)}})};
}

Guard::Kind Guard::kind() const { return node_->kind; }
std::size_t Guard::ap_index() const { return node_->ap; }
const Guard &Guard::lhs() const { return node_->children.at(0); }
const Guard &Guard::rhs() const { return node_->children.at(1); }

bool Guard::satisfied_by(ApMask label) const {
  switch (node_->kind) {
  case Kind::True: return true;
  case Kind::False: return false;
  case Kind::Ap: return (label >> node_->ap) & 1U;
  case Kind::Not: return !lhs().satisfied_by(label);
  case Kind::And: return lhs().satisfied_by(label) && rhs().satisfied_by(label);
  case Kind::Or: return lhs().satisfied_by(label) || rhs().satisfied_by(label);
  }
  return false;
}

std::optional<std::size_t> Guard::max_ap() const {
  switch (node_->kind) {
  case Kind::True:
  case Kind::False:
    return std::nullopt;
  case Kind::Ap:
    return node_->ap;
  case Kind::Not:
    return lhs().max_ap();
  default: {
    auto a = lhs().max_ap();
    auto b = rhs().max_ap();
    if (!a)
      return b;
    if (!b)
      return a;
    return std::max(*a, *b);
  }
  }
}

std::string Guard::to_hoa() const {
  switch (node_->kind) {
  case Kind::True: return "t";
  case Kind::False: return "f";
  case Kind::Ap: return std::to_string(node_->ap);
  case Kind::Not: {
    const auto inner = lhs().to_hoa();
    const bool atomic = lhs().kind() == Kind::Ap || lhs().kind() == Kind::Not;
    return atomic ? "!" + inner : "!(" + inner + ")";
  }
  case Kind::And: {
    auto side = [](const Guard &g) { return g.kind() == Kind::Or ? "(" + g.to_hoa() + ")" : g.to_hoa(); };
    return side(lhs()) + "&" + side(rhs());
  }
  case Kind::Or:
    return lhs().to_hoa() + "|" + rhs().to_hoa();
  }
  return {};
}

namespace {

class GuardParser {
public:
  explicit GuardParser(std::string_view text) : s_(text) {}

  Guard run() {
    Guard g = disjunction();
    skip();
    if (i_ != s_.size())
      fail("trailing characters");
    return g;
  }

private:
  [[noreturn]] void fail(const std::string &what) const {
    throw HoaError("bad label expression '" + std::string(s_) + "' at " + std::to_string(i_) + ": " + what);
  }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
      ++i_;
  }

  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  Guard disjunction() {
    Guard g = conjunction();
    while (eat('|'))
      g = Guard::disj(std::move(g), conjunction());
    return g;
  }

  Guard conjunction() {
    Guard g = atom();
    while (eat('&'))
      g = Guard::conj(std::move(g), atom());
    return g;
  }

  Guard atom() {
    skip();
    if (i_ >= s_.size())
      fail("unexpected end");
    const char c = s_[i_];
    if (c == '!') {
      ++i_;
      return Guard::negate(atom());
    }
    if (c == '(') {
      ++i_;
      Guard g = disjunction();
      if (!eat(')'))
        fail("expected ')'");
      return g;
    }
    if (c == 't') {
      ++i_;
      return Guard::truth();
    }
    if (c == 'f') {
      ++i_;
      return Guard::falsity();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t value = 0;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
        value = value * 10 + static_cast<std::size_t>(s_[i_++] - '0');
      if (value >= kMaxAps)
        fail("AP index too large");
      return Guard::ap(value);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

} // namespace

Guard parse_guard(std::string_view text) { return GuardParser(text).run(); }

bool equivalent(const Guard &a, const Guard &b, std::size_t num_aps) {
  if (num_aps > 20)
    throw std::invalid_argument("guard equivalence check limited to 20 APs");
  const ApMask end = ApMask{1} << num_aps;
  for (ApMask m = 0; m < end; ++m)
    if (a.satisfied_by(m) != b.satisfied_by(m))
      return false;
  return true;
}

} // namespace ltlshape::automaton
