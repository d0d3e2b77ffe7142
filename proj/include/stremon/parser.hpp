#pragma once

#include <cctype>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stremon/formula.hpp"

namespace stremon {

enum class Dialect { Stl, Strel };

inline const char* dialect_to_string(Dialect d) { return d == Dialect::Stl ? "stl" : "strel"; }

inline Dialect dialect_from_string(const std::string& s) {
  if (s == "stl") return Dialect::Stl;
  if (s == "strel") return Dialect::Strel;
  throw std::invalid_argument("unknown dialect '" + s + "' (expected stl or strel)");
}
inline const char* to_string(Dialect d) { return d == Dialect::Stl ? "stl" : "strel"; }

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), line(line_), col(col_) {}
};

namespace detail {

enum class Tok {
  Ident, Number, LBracket, RBracket, LParen, RParen, LBrace, RBrace,
  Comma, Plus, Minus, Star, Ge, Le, End,
};

struct Token {
  Tok kind;
  std::string text;
  double num = 0.0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& cur() const { return cur_; }

  void advance() {
    skip_ws();
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      cur_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        bump();
      cur_.kind = Tok::Ident;
      cur_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      size_t start = pos_;
      int dots = 0;
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '.')) {
        if (src_[pos_] == '.' && ++dots > 1) fail("malformed number", line_, col_);
        bump();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        size_t mark = pos_;
        int mark_line = line_, mark_col = col_;
        bump();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) bump();
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
        } else {
          pos_ = mark;  // trailing 'e' belongs to something else
          line_ = mark_line;
          col_ = mark_col;
        }
      }
      cur_.kind = Tok::Number;
      cur_.text = src_.substr(start, pos_ - start);
      cur_.num = std::strtod(cur_.text.c_str(), nullptr);
      return;
    }
    if (c == '>' || c == '<') {
      if (pos_ + 1 >= src_.size() || src_[pos_ + 1] != '=')
        fail(std::string("strict comparison '") + c +
             "' is not supported; use >= or <=", line_, col_);
      cur_.kind = c == '>' ? Tok::Ge : Tok::Le;
      cur_.text = std::string(1, c) + "=";
      bump();
      bump();
      return;
    }
    Tok k;
    switch (c) {
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case ',': k = Tok::Comma; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      default:
        fail(std::string("unexpected character '") + c + "'", line_, col_);
        return;
    }
    cur_.kind = k;
    cur_.text = std::string(1, c);
    bump();
  }

  [[noreturn]] void fail(const std::string& msg, int line, int col) const {
    std::string out = "parse error at line " + std::to_string(line) + ", col " +
                      std::to_string(col) + ": " + msg;
    size_t start = 0;
    int ln = 1;
    while (ln < line && start < src_.size()) {
      if (src_[start] == '\n') ++ln;
      ++start;
    }
    size_t end = src_.find('\n', start);
    if (end == std::string::npos) end = src_.size();
    out += "\n  " + src_.substr(start, end - start) + "\n  " +
           std::string(col > 0 ? col - 1 : 0, ' ') + "^";
    throw ParseError(out, line, col);
  }

 private:
  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      bump();
  }

  std::string src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token cur_;
};

class Parser {
 public:
  Parser(const std::string& src, Dialect d) : lex_(src), dialect_(d) {}

  FormulaPtr parse() {
    auto f = parse_or();
    if (cur().kind != Tok::End) fail("unexpected trailing input");
    return f;
  }

 private:
  const Token& cur() const { return lex_.cur(); }
  void next() { lex_.advance(); }
  [[noreturn]] void fail(const std::string& msg) const {
    lex_.fail(msg, cur().line, cur().col);
  }
  bool is_kw(const char* kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }
  void expect(Tok k, const char* what) {
    if (cur().kind != k) fail(std::string("expected ") + what);
    next();
  }
  void require_strel(const std::string& op) {
    if (dialect_ != Dialect::Strel)
      fail("spatial operator '" + op + "' requires the strel dialect");
  }

  FormulaPtr parse_or() {
    auto f = parse_and();
    while (is_kw("or")) {
      next();
      f = Formula::disj(f, parse_and());
    }
    return f;
  }

  FormulaPtr parse_and() {
    auto f = parse_until();
    while (is_kw("and")) {
      next();
      f = Formula::conj(f, parse_until());
    }
    return f;
  }

  // 'U' chains associate to the left: a U b U c reads (a U b) U c.
  FormulaPtr parse_until() {
    auto f = parse_spatial();
    while (is_kw("U")) {
      next();
      auto i = parse_time_interval();
      f = Formula::until(i, f, parse_spatial());
    }
    return f;
  }

  FormulaPtr parse_spatial() {
    auto f = parse_unary();
    for (;;) {
      if (is_kw("R")) {
        require_strel("R");
        next();
        auto d = parse_dist_interval();
        f = Formula::reach(d, f, parse_unary());
      } else if (is_kw("surround")) {
        require_strel("surround");
        next();
        expect(Tok::LBracket, "'['");
        double d = parse_bound(false, "a surround bound");
        expect(Tok::RBracket, "']'");
        f = Formula::surround(d, f, parse_unary());
      } else {
        return f;
      }
    }
  }

  FormulaPtr parse_unary() {
    if (is_kw("not")) {
      next();
      return Formula::negation(parse_unary());
    }
    if (is_kw("G")) {
      next();
      auto i = parse_time_interval();
      return Formula::always(i, parse_unary());
    }
    if (is_kw("F")) {
      next();
      auto i = parse_time_interval();
      return Formula::eventually(i, parse_unary());
    }
    if (is_kw("E")) {
      require_strel("E");
      next();
      auto d = parse_dist_interval();
      return Formula::escape(d, parse_unary());
    }
    if (is_kw("somewhere")) {
      require_strel("somewhere");
      next();
      auto d = parse_dist_interval();
      return Formula::somewhere(d, parse_unary());
    }
    if (is_kw("everywhere")) {
      require_strel("everywhere");
      next();
      auto d = parse_dist_interval();
      return Formula::everywhere(d, parse_unary());
    }
    return parse_atom();
  }

  FormulaPtr parse_atom() {
    if (is_kw("true")) {
      next();
      return Formula::truth();
    }
    if (cur().kind == Tok::LParen) {
      // lookahead: a parenthesis may open a formula or a predicate expression
      if (starts_formula_paren()) {
        next();
        auto f = parse_or();
        expect(Tok::RParen, "')'");
        return f;
      }
    }
    return parse_predicate();
  }

  // Distinguish "(s[0] >= 1) and ..." from "(s[0] + 1) * 2 >= 0" by scanning
  // the parenthesized group for a comparison at depth zero inside it.
  bool starts_formula_paren() {
    Lexer probe = lex_;
    int depth = 0;
    for (;;) {
      const Token& t = probe.cur();
      if (t.kind == Tok::End) return true;  // let the formula parser report it
      if (t.kind == Tok::LParen || t.kind == Tok::LBracket || t.kind == Tok::LBrace) ++depth;
      if (t.kind == Tok::RParen || t.kind == Tok::RBracket || t.kind == Tok::RBrace) {
        --depth;
        if (depth == 0) return false;  // group closed before any comparison
      }
      // comparisons and formula keywords never occur inside a predicate
      // expression, at any nesting depth
      if (depth >= 1 && (t.kind == Tok::Ge || t.kind == Tok::Le)) return true;
      if (depth >= 1 && t.kind == Tok::Ident &&
          (t.text == "and" || t.text == "or" || t.text == "not" || t.text == "U" ||
           t.text == "G" || t.text == "F" || t.text == "R" || t.text == "E" ||
           t.text == "true" || t.text == "somewhere" || t.text == "everywhere" ||
           t.text == "surround"))
        return true;
      probe.advance();
    }
  }

  FormulaPtr parse_predicate() {
    auto lhs = parse_pexpr();
    bool ge;
    if (cur().kind == Tok::Ge) {
      ge = true;
    } else if (cur().kind == Tok::Le) {
      ge = false;
    } else {
      fail("expected '>=' or '<=' to finish the predicate");
    }
    next();
    double c = parse_signed_number();
    PredExprPtr h;
    if (ge) {
      h = c == 0.0 ? lhs : PredExpr::binary(ExprKind::Sub, lhs, PredExpr::constant(c));
    } else {
      h = PredExpr::binary(ExprKind::Sub, PredExpr::constant(c), lhs);
    }
    return Formula::pred(std::move(h), next_pred_id_++);
  }

  // ---- predicate expressions ----

  PredExprPtr parse_pexpr() {
    auto e = parse_term();
    for (;;) {
      if (cur().kind == Tok::Plus) {
        next();
        e = PredExpr::binary(ExprKind::Add, e, parse_term());
      } else if (cur().kind == Tok::Minus) {
        next();
        e = PredExpr::binary(ExprKind::Sub, e, parse_term());
      } else {
        return e;
      }
    }
  }

  PredExprPtr parse_term() {
    auto e = parse_factor();
    while (cur().kind == Tok::Star) {
      Token at = cur();
      next();
      auto rhs = parse_factor();
      if (e->kind == ExprKind::Const && rhs->kind == ExprKind::Const) {
        e = PredExpr::constant(e->value * rhs->value);
      } else if (e->kind == ExprKind::Const) {
        e = PredExpr::scale(e->value, rhs);
      } else if (rhs->kind == ExprKind::Const) {
        e = PredExpr::scale(rhs->value, e);
      } else {
        lex_.fail("one side of '*' must be a constant", at.line, at.col);
      }
    }
    return e;
  }

  PredExprPtr parse_factor() {
    if (cur().kind == Tok::Minus) {
      next();
      auto e = parse_factor();
      if (e->kind == ExprKind::Const) return PredExpr::constant(-e->value);
      return PredExpr::scale(-1.0, e);
    }
    if (cur().kind == Tok::Number) {
      double v = cur().num;
      next();
      return PredExpr::constant(v);
    }
    if (cur().kind == Tok::LParen) {
      next();
      auto e = parse_pexpr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (is_kw("s")) {
      next();
      if (cur().kind != Tok::LBracket) fail("expected '[' after 's'");
      next();
      if (cur().kind != Tok::Number || cur().num != std::floor(cur().num) ||
          cur().text.find('.') != std::string::npos)
        fail("state index must be a nonnegative integer");
      int idx = static_cast<int>(cur().num);
      next();
      expect(Tok::RBracket, "']'");
      return PredExpr::state(idx);
    }
    if (is_kw("min") || is_kw("max")) {
      ExprKind k = cur().text == "min" ? ExprKind::Min : ExprKind::Max;
      next();
      auto args = parse_arg_list(2);
      return PredExpr::nary(k, std::move(args));
    }
    if (is_kw("norm2") || is_kw("norminf")) {
      ExprKind k = cur().text == "norm2" ? ExprKind::Norm2 : ExprKind::NormInf;
      next();
      auto args = parse_arg_list(1);
      return PredExpr::nary(k, std::move(args));
    }
    if (is_kw("mindist_inf")) return parse_mindist();
    fail("expected a predicate expression");
  }

  std::vector<PredExprPtr> parse_arg_list(size_t min_args) {
    Token at = cur();
    expect(Tok::LParen, "'('");
    std::vector<PredExprPtr> args;
    args.push_back(parse_pexpr());
    while (cur().kind == Tok::Comma) {
      next();
      args.push_back(parse_pexpr());
    }
    expect(Tok::RParen, "')'");
    if (args.size() < min_args)
      lex_.fail("expected at least " + std::to_string(min_args) + " arguments",
                at.line, at.col);
    return args;
  }

  PredExprPtr parse_mindist() {
    next();  // mindist_inf
    expect(Tok::LParen, "'('");
    if (!is_kw("s")) fail("expected 's' as the first argument of mindist_inf");
    next();
    expect(Tok::Comma, "','");
    expect(Tok::LBrace, "'{'");
    std::vector<std::vector<double>> pts;
    for (;;) {
      Token at = cur();
      expect(Tok::LParen, "'('");
      std::vector<double> p;
      p.push_back(parse_signed_number());
      while (cur().kind == Tok::Comma) {
        next();
        p.push_back(parse_signed_number());
      }
      expect(Tok::RParen, "')'");
      if (!pts.empty() && pts[0].size() != p.size())
        lex_.fail("mindist_inf anchor points must all have the same arity", at.line, at.col);
      pts.push_back(std::move(p));
      if (cur().kind == Tok::Comma) {
        next();
        continue;
      }
      break;
    }
    expect(Tok::RBrace, "'}'");
    expect(Tok::RParen, "')'");
    return PredExpr::mindist_inf(std::move(pts));
  }

  // ---- shared numeric pieces ----

  double parse_signed_number() {
    bool neg = false;
    if (cur().kind == Tok::Minus) {
      neg = true;
      next();
    }
    if (cur().kind != Tok::Number) fail("expected a number");
    double v = cur().num;
    next();
    return neg ? -v : v;
  }

  // A bound inside [..]: a nonnegative number, or 'inf' when allowed.
  double parse_bound(bool inf_ok, const char* where) {
    if (is_kw("inf")) {
      if (!inf_ok)
        fail(std::string(where) + " must be finite; 'inf' is only allowed as a distance upper bound");
      next();
      return kPlusInf;
    }
    if (cur().kind != Tok::Number)
      fail(std::string("expected a number") + (inf_ok ? " or 'inf'" : ""));
    double v = cur().num;
    next();
    return v;
  }

  TimeInterval parse_time_interval() {
    Token at = cur();
    expect(Tok::LBracket, "'['");
    double lo = parse_bound(false, "a time bound");
    expect(Tok::Comma, "','");
    double hi = parse_bound(false, "a time bound");
    expect(Tok::RBracket, "']'");
    if (!(lo <= hi)) lex_.fail("time interval bounds must satisfy lo <= hi", at.line, at.col);
    return {lo, hi};
  }

  DistInterval parse_dist_interval() {
    Token at = cur();
    expect(Tok::LBracket, "'['");
    double lo = parse_bound(false, "a distance lower bound");
    expect(Tok::Comma, "','");
    double hi = parse_bound(true, "");
    expect(Tok::RBracket, "']'");
    if (!(lo <= hi)) lex_.fail("distance interval bounds must satisfy lo <= hi", at.line, at.col);
    return {lo, hi};
  }

  Lexer lex_;
  Dialect dialect_;
  int next_pred_id_ = 0;
};

}  // namespace detail

inline FormulaPtr parse_formula(const std::string& text, Dialect d) {
  detail::Parser p(text, d);
  return p.parse();
}

}  // namespace stremon
