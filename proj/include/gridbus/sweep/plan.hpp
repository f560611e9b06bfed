#pragma once

// Plan files: a small line-oriented language describing a parameter sweep.
//
//   # comment
//   parameter x integer range 1 3 step 1;
//   parameter y float range 0 1 step 0.5;
//   parameter s text select "a" "b";
//   task main
//     input "data-${x}-${s}.dat" 3
//     length 1000 * x + 250 * y
//     output 0.5
//   endtask
//
// Expansion produces one job per point of the cross product of all
// parameter domains, in odometer order (the first declared parameter varies
// slowest).

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "gridbus/core/format.hpp"
#include "gridbus/core/types.hpp"

namespace gridbus::sweep {

class PlanError : public Error {
 public:
  PlanError(Errc code, int line, const std::string& what)
      : Error(code, "line " + std::to_string(line) + ": " + what), line_(line), message_(what) {}
  int line() const noexcept { return line_; }
  /// The description without the code and line prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  int line_;
  std::string message_;
};

enum class ParamType { Integer, Float, Text };

constexpr std::string_view to_string(ParamType t) {
  switch (t) {
    case ParamType::Integer: return "integer";
    case ParamType::Float: return "float";
    case ParamType::Text: return "text";
  }
  return "?";
}

using Value = std::variant<std::int64_t, double, std::string>;

inline std::string format_value(const Value& v) {
  if (auto i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (auto d = std::get_if<double>(&v)) return format_number(*d);
  return std::get<std::string>(v);
}

inline double numeric(const Value& v) {
  if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
  friend bool operator==(const Range&, const Range&) = default;
};

struct Parameter {
  std::string name;
  ParamType type = ParamType::Integer;
  std::variant<Range, std::vector<Value>> domain;
  int line = 0;

  friend bool operator==(const Parameter& a, const Parameter& b) {
    return a.name == b.name && a.type == b.type && a.domain == b.domain;
  }
};

/// Relative slack applied to the last index of a float range so that decimal
/// steps such as 0.1 reach their upper bound.
inline constexpr double kRangeSlack = 1e-9;

/// Domain members. Range values are generated by index (lo + k * step), never
/// by accumulation.
inline std::vector<Value> domain_values(const Parameter& p) {
  if (auto sel = std::get_if<std::vector<Value>>(&p.domain)) return *sel;
  const Range& r = std::get<Range>(p.domain);
  std::vector<Value> out;
  if (p.type == ParamType::Integer) {
    const auto lo = static_cast<std::int64_t>(r.lo), hi = static_cast<std::int64_t>(r.hi),
               step = static_cast<std::int64_t>(r.step);
    for (std::int64_t v = lo; v <= hi; v += step) out.emplace_back(v);
    return out;
  }
  for (std::int64_t k = 0;; ++k) {
    const double v = r.lo + static_cast<double>(k) * r.step;
    if (v > r.hi + r.step * kRangeSlack) break;
    out.emplace_back(v);
  }
  return out;
}

inline std::size_t domain_size(const Parameter& p) { return domain_values(p).size(); }

// ---------------------------------------------------------------------------
// Length expressions

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { Number, Param, Neg, Add, Sub, Mul, Div };
  Kind kind = Kind::Number;
  double number = 0.0;
  std::string name;
  Expr lhs, rhs;
};

inline bool expr_equal(const Expr& a, const Expr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprNode::Kind::Number: return a->number == b->number;
    case ExprNode::Kind::Param: return a->name == b->name;
    case ExprNode::Kind::Neg: return expr_equal(a->lhs, b->lhs);
    default: return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
  }
}

inline Expr make_number(double v) { return std::make_shared<ExprNode>(ExprNode{ExprNode::Kind::Number, v, {}, {}, {}}); }
inline Expr make_param(std::string n) {
  return std::make_shared<ExprNode>(ExprNode{ExprNode::Kind::Param, 0.0, std::move(n), {}, {}});
}
inline Expr make_unary(Expr e) { return std::make_shared<ExprNode>(ExprNode{ExprNode::Kind::Neg, 0.0, {}, std::move(e), {}}); }
inline Expr make_binary(ExprNode::Kind k, Expr l, Expr r) {
  return std::make_shared<ExprNode>(ExprNode{k, 0.0, {}, std::move(l), std::move(r)});
}

inline void collect_params(const Expr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == ExprNode::Kind::Param) out.insert(e->name);
  collect_params(e->lhs, out);
  collect_params(e->rhs, out);
}

inline double evaluate(const Expr& e, const std::map<std::string, Value>& env) {
  switch (e->kind) {
    case ExprNode::Kind::Number: return e->number;
    case ExprNode::Kind::Param: {
      auto it = env.find(e->name);
      if (it == env.end()) throw Error(Errc::UndeclaredPlaceholder, e->name);
      if (std::holds_alternative<std::string>(it->second)) throw Error(Errc::Arithmetic, "text parameter " + e->name + " in arithmetic");
      return numeric(it->second);
    }
    case ExprNode::Kind::Neg: return -evaluate(e->lhs, env);
    case ExprNode::Kind::Add: return evaluate(e->lhs, env) + evaluate(e->rhs, env);
    case ExprNode::Kind::Sub: return evaluate(e->lhs, env) - evaluate(e->rhs, env);
    case ExprNode::Kind::Mul: return evaluate(e->lhs, env) * evaluate(e->rhs, env);
    case ExprNode::Kind::Div: {
      const double d = evaluate(e->rhs, env);
      if (d == 0.0) throw Error(Errc::Arithmetic, "division by zero");
      return evaluate(e->lhs, env) / d;
    }
  }
  return 0.0;
}

namespace detail {
inline int precedence(const Expr& e) {
  switch (e->kind) {
    case ExprNode::Kind::Add:
    case ExprNode::Kind::Sub: return 1;
    case ExprNode::Kind::Mul:
    case ExprNode::Kind::Div: return 2;
    case ExprNode::Kind::Neg: return 3;
    case ExprNode::Kind::Number: return e->number < 0.0 || std::signbit(e->number) ? 3 : 4;
    case ExprNode::Kind::Param: return 4;
  }
  return 4;
}
}  // namespace detail

/// Canonical text. Parentheses appear exactly where the tree shape needs
/// them, so parsing the output rebuilds the same tree.
inline std::string render_expr(const Expr& e) {
  using K = ExprNode::Kind;
  auto wrap = [](const Expr& child, bool paren) {
    std::string s = render_expr(child);
    return paren ? "(" + s + ")" : s;
  };
  switch (e->kind) {
    case K::Number: return format_number(e->number);
    case K::Param: return e->name;
    case K::Neg: return "-" + wrap(e->lhs, detail::precedence(e->lhs) < 3);
    default: break;
  }
  const int p = detail::precedence(e);
  const char* op = e->kind == K::Add ? " + " : e->kind == K::Sub ? " - " : e->kind == K::Mul ? " * " : " / ";
  return wrap(e->lhs, detail::precedence(e->lhs) < p) + op + wrap(e->rhs, detail::precedence(e->rhs) <= p);
}

// ---------------------------------------------------------------------------
// Plan

struct InputTemplate {
  std::string name_template;
  double size_mb = 0.0;
  friend bool operator==(const InputTemplate&, const InputTemplate&) = default;
};

struct TaskTemplate {
  std::string name = "main";
  Expr length_mi_expr;
  std::vector<InputTemplate> inputs;
  double output_mb = 0.0;

  friend bool operator==(const TaskTemplate& a, const TaskTemplate& b) {
    return a.name == b.name && expr_equal(a.length_mi_expr, b.length_mi_expr) && a.inputs == b.inputs &&
           a.output_mb == b.output_mb;
  }
};

struct Plan {
  std::vector<Parameter> parameters;
  TaskTemplate task;
  friend bool operator==(const Plan&, const Plan&) = default;
};

/// Placeholder names appearing as ${name} in a template.
inline std::vector<std::string> placeholders(std::string_view tmpl) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 1 < tmpl.size(); ++i) {
    if (tmpl[i] == '$' && tmpl[i + 1] == '{') {
      auto close = tmpl.find('}', i + 2);
      if (close == std::string_view::npos) break;
      out.emplace_back(tmpl.substr(i + 2, close - i - 2));
      i = close;
    }
  }
  return out;
}

inline std::string substitute(std::string_view tmpl, const std::map<std::string, Value>& env) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '$' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
      auto close = tmpl.find('}', i + 2);
      if (close != std::string_view::npos) {
        const std::string name(tmpl.substr(i + 2, close - i - 2));
        auto it = env.find(name);
        if (it == env.end()) throw Error(Errc::UndeclaredPlaceholder, name);
        out += format_value(it->second);
        i = close;
        continue;
      }
    }
    out += tmpl[i];
  }
  return out;
}

namespace detail {

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

enum class Tok { Ident, Number, String, Symbol, Newline, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  int line = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> tokens() {
    std::vector<Token> out;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        out.push_back({Tok::Newline, "\n", 0.0, line_});
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        out.push_back({Tok::Ident, std::string(src_.substr(start, pos_ - start)), 0.0, line_});
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        out.push_back(number());
      } else if (c == '"') {
        out.push_back(string());
      } else if (starts_with("\xC3\x97")) {  // U+00D7 multiplication sign
        out.push_back({Tok::Symbol, "*", 0.0, line_});
        pos_ += 2;
      } else if (starts_with("\xE2\x88\x92")) {  // U+2212 minus sign
        out.push_back({Tok::Symbol, "-", 0.0, line_});
        pos_ += 3;
      } else if (std::string_view("+-*/();${}").find(c) != std::string_view::npos) {
        out.push_back({Tok::Symbol, std::string(1, c), 0.0, line_});
        ++pos_;
      } else {
        throw PlanError(Errc::Syntax, line_, std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back({Tok::End, "", 0.0, line_});
    return out;
  }

 private:
  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  Token number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    double v = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size()) throw PlanError(Errc::Syntax, line_, "bad number '" + text + "'");
    return {Tok::Number, text, v, line_};
  }

  Token string() {
    const int line = line_;
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') throw PlanError(Errc::Syntax, line, "unterminated string");
      char c = src_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= src_.size()) throw PlanError(Errc::Syntax, line, "unterminated string");
        c = src_[pos_++];
        if (c != '"' && c != '\\') throw PlanError(Errc::Syntax, line, std::string("unknown escape \\") + c);
      }
      out += c;
    }
    return {Tok::String, out, 0.0, line};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Plan parse() {
    Plan plan;
    bool have_task = false;
    std::map<std::string, int> seen;
    while (true) {
      skip_newlines();
      const Token& t = peek();
      if (t.kind == Tok::End) break;
      if (is_word(t, "parameter")) {
        Parameter p = parameter();
        if (seen.contains(p.name)) throw PlanError(Errc::DuplicateParameter, p.line, "parameter '" + p.name + "' declared twice");
        seen.emplace(p.name, p.line);
        plan.parameters.push_back(std::move(p));
      } else if (is_word(t, "task")) {
        if (have_task) throw PlanError(Errc::Syntax, t.line, "only one task is allowed");
        plan.task = task();
        have_task = true;
      } else {
        throw PlanError(Errc::Syntax, t.line, "expected 'parameter' or 'task', found '" + t.text + "'");
      }
    }
    if (!have_task) throw PlanError(Errc::Syntax, peek().line, "plan has no task");
    resolve(plan);
    return plan;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  static bool is_word(const Token& t, std::string_view w) { return t.kind == Tok::Ident && t.text == w; }
  static bool is_sym(const Token& t, char c) { return t.kind == Tok::Symbol && t.text.size() == 1 && t.text[0] == c; }

  void skip_newlines() {
    while (peek().kind == Tok::Newline) ++pos_;
  }

  // Newlines are insignificant inside parameter statements, which end at ';'.
  const Token& next_significant() {
    skip_newlines();
    return next();
  }

  std::string expect_ident(std::string_view what) {
    const Token& t = next_significant();
    if (t.kind != Tok::Ident) throw PlanError(Errc::Syntax, t.line, "expected " + std::string(what));
    return t.text;
  }

  void expect_word(std::string_view w) {
    const Token& t = next_significant();
    if (!is_word(t, w)) throw PlanError(Errc::Syntax, t.line, "expected '" + std::string(w) + "'");
  }

  double signed_number(bool significant = true) {
    const Token* t = significant ? &next_significant() : &next();
    double sign = 1.0;
    if (is_sym(*t, '-') || is_sym(*t, '+')) {
      sign = is_sym(*t, '-') ? -1.0 : 1.0;
      t = &next();
    }
    if (t->kind != Tok::Number) throw PlanError(Errc::Syntax, t->line, "expected a number");
    return sign * t->number;
  }

  Parameter parameter() {
    Parameter p;
    p.line = next().line;
    p.name = expect_ident("parameter name");
    const std::string type = expect_ident("parameter type");
    if (type == "integer") p.type = ParamType::Integer;
    else if (type == "float") p.type = ParamType::Float;
    else if (type == "text") p.type = ParamType::Text;
    else throw PlanError(Errc::Syntax, p.line, "unknown parameter type '" + type + "'");

    const std::string kind = expect_ident("'range' or 'select'");
    if (kind == "range") {
      if (p.type == ParamType::Text) throw PlanError(Errc::Syntax, p.line, "text parameters take 'select'");
      Range r;
      r.lo = signed_number();
      r.hi = signed_number();
      expect_word("step");
      r.step = signed_number();
      if (p.type == ParamType::Integer && (r.lo != std::floor(r.lo) || r.hi != std::floor(r.hi) || r.step != std::floor(r.step))) {
        throw PlanError(Errc::Syntax, p.line, "integer range needs integral bounds and step");
      }
      if (!(r.step > 0.0)) throw PlanError(Errc::Syntax, p.line, "range step must be positive");
      if (r.lo > r.hi) throw PlanError(Errc::EmptyDomain, p.line, "range of '" + p.name + "' is empty");
      p.domain = r;
    } else if (kind == "select") {
      std::vector<Value> values;
      while (true) {
        skip_newlines();
        const Token& t = peek();
        if (is_sym(t, ';') || t.kind == Tok::End) break;
        if (p.type == ParamType::Text) {
          const Token& s = next();
          if (s.kind != Tok::String) throw PlanError(Errc::Syntax, s.line, "text values must be quoted");
          values.emplace_back(s.text);
        } else {
          const int line = t.line;
          const double v = signed_number();
          if (p.type == ParamType::Integer) {
            if (v != std::floor(v)) throw PlanError(Errc::Syntax, line, "non-integral value for integer parameter");
            values.emplace_back(static_cast<std::int64_t>(v));
          } else {
            values.emplace_back(v);
          }
        }
      }
      if (values.empty()) throw PlanError(Errc::EmptyDomain, p.line, "select list of '" + p.name + "' is empty");
      p.domain = std::move(values);
    } else {
      throw PlanError(Errc::Syntax, p.line, "expected 'range' or 'select'");
    }
    const Token& end = next_significant();
    if (!is_sym(end, ';')) throw PlanError(Errc::Syntax, end.line, "expected ';' after parameter '" + p.name + "'");
    return p;
  }

  void end_of_line() {
    if (is_sym(peek(), ';')) ++pos_;
    const Token& t = peek();
    if (t.kind != Tok::Newline && t.kind != Tok::End) throw PlanError(Errc::Syntax, t.line, "unexpected '" + t.text + "'");
  }

  TaskTemplate task() {
    TaskTemplate task;
    const int task_line = next().line;
    task.name = expect_ident("task name");
    end_of_line();
    bool have_length = false, have_output = false;
    while (true) {
      skip_newlines();
      const Token& t = next();
      if (t.kind == Tok::End) throw PlanError(Errc::Syntax, task_line, "task is missing 'endtask'");
      if (is_word(t, "endtask")) break;
      if (is_word(t, "input")) {
        const Token& s = next();
        if (s.kind != Tok::String) throw PlanError(Errc::Syntax, s.line, "input needs a quoted file name");
        InputTemplate in{s.text, 0.0};
        input_lines_.push_back(s.line);
        in.size_mb = signed_number(false);
        if (!(in.size_mb > 0.0)) throw PlanError(Errc::Syntax, s.line, "input size must be positive");
        task.inputs.push_back(std::move(in));
      } else if (is_word(t, "length")) {
        if (have_length) throw PlanError(Errc::Syntax, t.line, "duplicate 'length'");
        length_line_ = t.line;
        task.length_mi_expr = expression();
        have_length = true;
      } else if (is_word(t, "output")) {
        if (have_output) throw PlanError(Errc::Syntax, t.line, "duplicate 'output'");
        task.output_mb = signed_number(false);
        if (task.output_mb < 0.0) throw PlanError(Errc::Syntax, t.line, "output size must be non-negative");
        have_output = true;
      } else {
        throw PlanError(Errc::Syntax, t.line, "unexpected '" + t.text + "' in task");
      }
      end_of_line();
    }
    end_of_line();
    if (!have_length) throw PlanError(Errc::Syntax, task_line, "task needs a 'length'");
    return task;
  }

  Expr expression() {
    Expr lhs = term();
    while (is_sym(peek(), '+') || is_sym(peek(), '-')) {
      const auto k = is_sym(next(), '+') ? ExprNode::Kind::Add : ExprNode::Kind::Sub;
      lhs = make_binary(k, lhs, term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (is_sym(peek(), '*') || is_sym(peek(), '/')) {
      const auto k = is_sym(next(), '*') ? ExprNode::Kind::Mul : ExprNode::Kind::Div;
      lhs = make_binary(k, lhs, unary());
    }
    return lhs;
  }

  Expr unary() {
    if (is_sym(peek(), '-')) {
      ++pos_;
      Expr inner = unary();
      if (inner->kind == ExprNode::Kind::Number && !std::signbit(inner->number)) return make_number(-inner->number);
      return make_unary(inner);
    }
    if (is_sym(peek(), '+')) {
      ++pos_;
      return unary();
    }
    return primary();
  }

  Expr primary() {
    const Token& t = next();
    if (t.kind == Tok::Number) return make_number(t.number);
    if (t.kind == Tok::Ident) return make_param(t.text);
    if (is_sym(t, '$')) {
      if (!is_sym(next(), '{')) throw PlanError(Errc::Syntax, t.line, "expected '{' after '$'");
      const Token& name = next();
      if (name.kind != Tok::Ident) throw PlanError(Errc::Syntax, t.line, "expected a parameter name");
      if (!is_sym(next(), '}')) throw PlanError(Errc::Syntax, t.line, "expected '}'");
      return make_param(name.text);
    }
    if (is_sym(t, '(')) {
      Expr e = expression();
      if (!is_sym(next(), ')')) throw PlanError(Errc::Syntax, t.line, "expected ')'");
      return e;
    }
    throw PlanError(Errc::Syntax, t.line, "expected a number, parameter or '('");
  }

  void resolve(const Plan& plan) {
    std::map<std::string, const Parameter*> params;
    for (const auto& p : plan.parameters) params.emplace(p.name, &p);
    for (std::size_t i = 0; i < plan.task.inputs.size(); ++i) {
      for (const auto& name : placeholders(plan.task.inputs[i].name_template)) {
        if (!params.contains(name)) {
          throw PlanError(Errc::UndeclaredPlaceholder, input_lines_[i], "'${" + name + "}' is not a declared parameter");
        }
      }
    }
    std::set<std::string> used;
    collect_params(plan.task.length_mi_expr, used);
    for (const auto& name : used) {
      auto it = params.find(name);
      if (it == params.end()) throw PlanError(Errc::UndeclaredPlaceholder, length_line_, "'" + name + "' is not a declared parameter");
      if (it->second->type == ParamType::Text) throw PlanError(Errc::Syntax, length_line_, "text parameter '" + name + "' used in length");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<int> input_lines_;
  int length_line_ = 0;
};

}  // namespace detail

inline Plan parse_plan(std::string_view text) {
  return detail::Parser(detail::Lexer(text).tokens()).parse();
}

/// Canonical text form; parse_plan(render_plan(p)) == p.
inline std::string render_plan(const Plan& plan) {
  std::string out;
  for (const auto& p : plan.parameters) {
    out += "parameter " + p.name + " " + std::string(to_string(p.type));
    if (auto r = std::get_if<Range>(&p.domain)) {
      out += " range " + format_number(r->lo) + " " + format_number(r->hi) + " step " + format_number(r->step);
    } else {
      out += " select";
      for (const auto& v : std::get<std::vector<Value>>(p.domain)) {
        out += " ";
        out += std::holds_alternative<std::string>(v) ? detail::quote(std::get<std::string>(v)) : format_value(v);
      }
    }
    out += ";\n";
  }
  out += "task " + plan.task.name + "\n";
  for (const auto& in : plan.task.inputs) out += "  input " + detail::quote(in.name_template) + " " + format_number(in.size_mb) + "\n";
  out += "  length " + render_expr(plan.task.length_mi_expr) + "\n";
  out += "  output " + format_number(plan.task.output_mb) + "\n";
  out += "endtask\n";
  return out;
}

// ---------------------------------------------------------------------------
// Expansion

struct InputFile {
  std::string name;
  double size_mb = 0.0;
};

struct JobSpec {
  std::size_t index = 0;
  std::vector<std::pair<std::string, Value>> point;
  double length_mi = 0.0;
  std::vector<InputFile> inputs;
  double output_mb = 0.0;
};

struct JobSet {
  std::vector<JobSpec> jobs;

  double total_input_mb() const {
    double sum = 0.0;
    for (const auto& j : jobs)
      for (const auto& in : j.inputs) sum += in.size_mb;
    return sum;
  }
};

inline JobSet expand(const Plan& plan) {
  std::vector<std::vector<Value>> domains;
  domains.reserve(plan.parameters.size());
  for (const auto& p : plan.parameters) {
    domains.push_back(domain_values(p));
    if (domains.back().empty()) throw PlanError(Errc::EmptyDomain, p.line, "parameter '" + p.name + "' has no values");
  }

  JobSet set;
  std::vector<std::size_t> idx(domains.size(), 0);
  for (std::size_t n = 0;; ++n) {
    JobSpec job;
    job.index = n;
    std::map<std::string, Value> env;
    for (std::size_t i = 0; i < domains.size(); ++i) {
      job.point.emplace_back(plan.parameters[i].name, domains[i][idx[i]]);
      env.emplace(plan.parameters[i].name, domains[i][idx[i]]);
    }
    job.length_mi = evaluate(plan.task.length_mi_expr, env);
    if (!std::isfinite(job.length_mi) || !(job.length_mi > 0.0)) {
      throw Error(Errc::Arithmetic, "job " + std::to_string(n) + " has non-positive length " + format_number(job.length_mi));
    }
    for (const auto& in : plan.task.inputs) job.inputs.push_back({substitute(in.name_template, env), in.size_mb});
    job.output_mb = plan.task.output_mb;
    set.jobs.push_back(std::move(job));

    // Odometer: the last parameter turns fastest.
    std::size_t d = domains.size();
    while (d > 0) {
      --d;
      if (++idx[d] < domains[d].size()) break;
      idx[d] = 0;
      if (d == 0) return set;
    }
    if (domains.empty()) return set;
  }
}

}  // namespace gridbus::sweep
