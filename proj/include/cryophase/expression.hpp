#pragma once

#include <map>
#include <memory>
#include <string>

namespace cryophase {

/// Compiled arithmetic expression over named variables.
///
/// Grammar: numbers, variables, + - * / ^ (right associative), unary minus,
/// parentheses and the functions cos sin exp tanh log sqrt abs step min max.
/// `step(s)` is 1 for s >= 0 and 0 otherwise. `pi` is a built-in constant;
/// everything else must be one of the declared variable names.
class Expression {
public:
  /// Parses `text`; `variables` lists the admissible names. Throws
  /// ValidationError with the column of the offending token.
  Expression(const std::string &text, std::initializer_list<std::string> variables);

  /// Evaluates with the given bindings; unbound declared variables read as 0.
  double operator()(const std::map<std::string, double> &bindings) const;

  const std::string &text() const noexcept { return text_; }

  struct Node;

private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

} // namespace cryophase
