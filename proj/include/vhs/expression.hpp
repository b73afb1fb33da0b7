#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vhs {

class ExpressionParseError : public std::runtime_error {
 public:
  ExpressionParseError(const std::string& message, std::size_t position);
  // 1-based character column in the source text.
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

using Bindings = std::map<std::string, double, std::less<>>;

/// Restricted arithmetic expression: numbers, identifiers, + - * / ^
/// (also the Unicode forms × ÷ −), unary minus, parentheses and the
/// functions ln, exp, sqrt. The constant `pi` is predefined.
class Expression {
 public:
  static Expression parse(std::string_view text);

  double evaluate(const Bindings& bindings = {}) const;
  double operator()(double x) const;  // binds the variable `x`

  const std::string& source() const noexcept { return source_; }
  // Free identifiers (excluding pi), sorted.
  std::vector<std::string> variables() const;

  struct Node;

 private:
  Expression(std::string source, std::shared_ptr<const Node> root);

  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace vhs
