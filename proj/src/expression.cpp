#include "cryophase/expression.hpp"

#include "cryophase/errors.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

namespace cryophase {

struct Expression::Node {
  enum Kind { Number, Variable, Negate, Binary, Call } kind = Number;
  double value = 0.0;
  std::string name; // variable or function name
  char op = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

const std::map<std::string, std::size_t> &function_arity() {
  static const std::map<std::string, std::size_t> table{
      {"cos", 1}, {"sin", 1}, {"exp", 1}, {"tanh", 1}, {"log", 1}, {"sqrt", 1},
      {"abs", 1}, {"step", 1}, {"min", 2}, {"max", 2}};
  return table;
}

class Parser {
public:
  Parser(const std::string &text, const std::set<std::string> &vars) : s_(text), vars_(vars) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size())
      fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string &what) const {
    throw ValidationError("expression '" + s_ + "', column " + std::to_string(pos_ + 1) + ": " +
                          what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Binary;
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+'))
        lhs = binary('+', lhs, term());
      else if (accept('-'))
        lhs = binary('-', lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*'))
        lhs = binary('*', lhs, unary());
      else if (accept('/'))
        lhs = binary('/', lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Negate;
      n->args = {unary()};
      return n;
    }
    if (accept('+'))
      return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^'))
      return binary('^', base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size())
      fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')'))
        fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char *begin = s_.c_str() + pos_;
      char *end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin)
        fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      const auto fn = function_arity().find(name);
      if (fn != function_arity().end()) {
        if (!accept('('))
          fail("expected '(' after " + name);
        auto n = std::make_shared<Node>();
        n->kind = Node::Call;
        n->name = name;
        n->args.push_back(expr());
        while (accept(','))
          n->args.push_back(expr());
        if (!accept(')'))
          fail("expected ')' closing " + name);
        if (n->args.size() != fn->second)
          fail(name + " takes " + std::to_string(fn->second) + " argument(s)");
        return n;
      }
      auto n = std::make_shared<Node>();
      if (name == "pi") {
        n->value = std::numbers::pi;
        return n;
      }
      if (!vars_.count(name)) {
        pos_ = start;
        fail("unknown name '" + name + "'");
      }
      n->kind = Node::Variable;
      n->name = name;
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string &s_;
  const std::set<std::string> &vars_;
  std::size_t pos_ = 0;
};

double eval(const Node &n, const std::map<std::string, double> &b) {
  switch (n.kind) {
  case Node::Number:
    return n.value;
  case Node::Variable: {
    const auto it = b.find(n.name);
    return it == b.end() ? 0.0 : it->second;
  }
  case Node::Negate:
    return -eval(*n.args[0], b);
  case Node::Binary: {
    const double x = eval(*n.args[0], b), y = eval(*n.args[1], b);
    switch (n.op) {
    case '+':
      return x + y;
    case '-':
      return x - y;
    case '*':
      return x * y;
    case '/':
      return x / y;
    default:
      return std::pow(x, y);
    }
  }
  case Node::Call: {
    const double x = eval(*n.args[0], b);
    if (n.name == "cos")
      return std::cos(x);
    if (n.name == "sin")
      return std::sin(x);
    if (n.name == "exp")
      return std::exp(x);
    if (n.name == "tanh")
      return std::tanh(x);
    if (n.name == "log")
      return std::log(x);
    if (n.name == "sqrt")
      return std::sqrt(x);
    if (n.name == "abs")
      return std::abs(x);
    if (n.name == "step")
      return x >= 0.0 ? 1.0 : 0.0;
    const double y = eval(*n.args[1], b);
    return n.name == "min" ? std::min(x, y) : std::max(x, y);
  }
  }
  return 0.0;
}

} // namespace

Expression::Expression(const std::string &text, std::initializer_list<std::string> variables)
    : text_(text) {
  const std::set<std::string> vars(variables);
  root_ = Parser(text_, vars).parse();
}

double Expression::operator()(const std::map<std::string, double> &bindings) const {
  return eval(*root_, bindings);
}

} // namespace cryophase
