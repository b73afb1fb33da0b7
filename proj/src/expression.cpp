#include "vhs/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <set>

#include "vhs/error.hpp"

namespace vhs {

ExpressionParseError::ExpressionParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)),
      position_(position) {}

struct Expression::Node {
  enum class Kind { number, variable, unary_minus, add, sub, mul, div, pow, call };
  Kind kind = Kind::number;
  double value = 0.0;
  std::string name;  // variable or function name
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  Tok kind = Tok::end;
  double value = 0.0;
  std::string text;
  std::size_t column = 0;
};

// Tokenizer over UTF-8 input; columns count code points.
std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t column = 1;
  while (i < src.size()) {
    const unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      ++i;
      ++column;
      continue;
    }
    Token t;
    t.column = column;
    if (std::isdigit(c) || c == '.') {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      const std::string text(src.substr(i, j - i));
      std::size_t used = 0;
      try {
        t.value = std::stod(text, &used);
      } catch (const std::exception&) {
        throw ExpressionParseError("malformed number '" + text + "'", column);
      }
      if (used != text.size()) throw ExpressionParseError("malformed number '" + text + "'", column);
      t.kind = Tok::number;
      t.text = text;
      column += j - i;
      i = j;
    } else if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::ident;
      t.text = std::string(src.substr(i, j - i));
      column += j - i;
      i = j;
    } else if (c == 0xC3 && i + 1 < src.size() &&
               (static_cast<unsigned char>(src[i + 1]) == 0x97 || static_cast<unsigned char>(src[i + 1]) == 0xB7)) {
      t.kind = static_cast<unsigned char>(src[i + 1]) == 0x97 ? Tok::star : Tok::slash;
      i += 2;
      ++column;
    } else if (c == 0xE2 && i + 2 < src.size() && static_cast<unsigned char>(src[i + 1]) == 0x88 &&
               static_cast<unsigned char>(src[i + 2]) == 0x92) {
      t.kind = Tok::minus;
      i += 3;
      ++column;
    } else {
      switch (c) {
        case '+': t.kind = Tok::plus; break;
        case '-': t.kind = Tok::minus; break;
        case '*': t.kind = Tok::star; break;
        case '/': t.kind = Tok::slash; break;
        case '^': t.kind = Tok::caret; break;
        case '(': t.kind = Tok::lparen; break;
        case ')': t.kind = Tok::rparen; break;
        default:
          throw ExpressionParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", column);
      }
      ++i;
      ++column;
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::end;
  end.column = column;
  out.push_back(end);
  return out;
}

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  NodePtr parse() {
    NodePtr root = expr();
    if (peek().kind != Tok::end) throw ExpressionParseError("unexpected token", peek().column);
    return root;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  NodePtr expr() {
    NodePtr lhs = term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      const bool add = next().kind == Tok::plus;
      lhs = make(add ? Node::Kind::add : Node::Kind::sub, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (peek().kind == Tok::star || peek().kind == Tok::slash) {
      const bool mul = next().kind == Tok::star;
      lhs = make(mul ? Node::Kind::mul : Node::Kind::div, lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek().kind == Tok::minus) {
      next();
      return make(Node::Kind::unary_minus, unary());
    }
    if (peek().kind == Tok::plus) {
      next();
      return unary();
    }
    return power();
  }

  // Right-associative; binds tighter than unary minus on its left operand.
  NodePtr power() {
    NodePtr base = primary();
    if (peek().kind == Tok::caret) {
      next();
      return make(Node::Kind::pow, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::number: {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::number;
        n->value = t.value;
        return n;
      }
      case Tok::ident: {
        if (peek().kind == Tok::lparen) {
          if (t.text != "ln" && t.text != "exp" && t.text != "sqrt")
            throw ExpressionParseError("unknown function '" + t.text + "'", t.column);
          next();
          NodePtr arg = expr();
          if (peek().kind != Tok::rparen) throw ExpressionParseError("expected ')'", peek().column);
          next();
          auto n = std::make_shared<Node>();
          n->kind = Node::Kind::call;
          n->name = t.text;
          n->lhs = std::move(arg);
          return n;
        }
        auto n = std::make_shared<Node>();
        if (t.text == "pi") {
          n->kind = Node::Kind::number;
          n->value = std::numbers::pi;
        } else {
          n->kind = Node::Kind::variable;
          n->name = t.text;
        }
        return n;
      }
      case Tok::lparen: {
        NodePtr inner = expr();
        if (peek().kind != Tok::rparen) throw ExpressionParseError("expected ')'", peek().column);
        next();
        return inner;
      }
      case Tok::end:
        throw ExpressionParseError("unexpected end of expression", t.column);
      default:
        throw ExpressionParseError("expected a number, name or '('", t.column);
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, const Bindings& b) {
  switch (n.kind) {
    case Node::Kind::number: return n.value;
    case Node::Kind::variable: {
      auto it = b.find(n.name);
      if (it == b.end()) throw ConfigError("unbound symbol '" + n.name + "'");
      return it->second;
    }
    case Node::Kind::unary_minus: return -eval(*n.lhs, b);
    case Node::Kind::add: return eval(*n.lhs, b) + eval(*n.rhs, b);
    case Node::Kind::sub: return eval(*n.lhs, b) - eval(*n.rhs, b);
    case Node::Kind::mul: return eval(*n.lhs, b) * eval(*n.rhs, b);
    case Node::Kind::div: return eval(*n.lhs, b) / eval(*n.rhs, b);
    case Node::Kind::pow: return std::pow(eval(*n.lhs, b), eval(*n.rhs, b));
    case Node::Kind::call: {
      const double a = eval(*n.lhs, b);
      if (n.name == "ln") return std::log(a);
      if (n.name == "exp") return std::exp(a);
      return std::sqrt(a);
    }
  }
  return std::nan("");
}

void collect(const Node& n, std::set<std::string>& out) {
  if (n.kind == Node::Kind::variable) out.insert(n.name);
  if (n.lhs) collect(*n.lhs, out);
  if (n.rhs) collect(*n.rhs, out);
}

}  // namespace

Expression::Expression(std::string source, std::shared_ptr<const Node> root)
    : source_(std::move(source)), root_(std::move(root)) {}

Expression Expression::parse(std::string_view text) {
  Parser parser(tokenize(text));
  return Expression(std::string(text), parser.parse());
}

double Expression::evaluate(const Bindings& bindings) const { return eval(*root_, bindings); }

double Expression::operator()(double x) const {
  Bindings b;
  b.emplace("x", x);
  return eval(*root_, b);
}

std::vector<std::string> Expression::variables() const {
  std::set<std::string> names;
  collect(*root_, names);
  return {names.begin(), names.end()};
}

}  // namespace vhs
