#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fext/ambient.hpp"
#include "fext/galois.hpp"

namespace fext {
namespace hn {

// ---------------------------------------------------------------------------
// Expression grammar: identifiers [a-z][a-z0-9_]*, integer literals, + - * / ^
// and parentheses; ^ binds tightest, then * /, then + -.
// ---------------------------------------------------------------------------

namespace detail {

struct Expr {
  enum Kind { Num, Ref, Add, Sub, Mul, Div, Pow, Neg } kind = Num;
  int64_t num = 0;        // literal value, or the exponent for Pow
  std::string name;       // identifier for Ref
  size_t line = 0, col = 0;
  std::vector<Expr> kids;
};

struct Lexer {
  const std::string& s;
  size_t line;
  size_t pos = 0;   // byte offset into s
  size_t base_col;  // 1-based column of s[0] in the original line

  Lexer(const std::string& text, size_t ln, size_t col0)
      : s(text), line(ln), base_col(col0) {}

  size_t col() const { return base_col + pos; }
  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
};

inline bool ident_start(char c) { return c >= 'a' && c <= 'z'; }
inline bool ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

inline Expr parse_sum(Lexer& lx);

inline Expr parse_primary(Lexer& lx) {
  char c = lx.peek();
  size_t at = lx.col();
  if (c == '(') {
    ++lx.pos;
    Expr e = parse_sum(lx);
    if (lx.peek() != ')') throw ParseError(lx.line, lx.col(), "expected ')'");
    ++lx.pos;
    return e;
  }
  if (c >= '0' && c <= '9') {
    int64_t v = 0;
    while (lx.pos < lx.s.size() && lx.s[lx.pos] >= '0' && lx.s[lx.pos] <= '9') {
      v = v * 10 + (lx.s[lx.pos] - '0');
      if (v > (int64_t(1) << 40)) throw ParseError(lx.line, at, "literal too large");
      ++lx.pos;
    }
    Expr e;
    e.kind = Expr::Num;
    e.num = v;
    e.line = lx.line;
    e.col = at;
    return e;
  }
  if (ident_start(c)) {
    std::string name;
    while (lx.pos < lx.s.size() && ident_char(lx.s[lx.pos])) name += lx.s[lx.pos++];
    Expr e;
    e.kind = Expr::Ref;
    e.name = name;
    e.line = lx.line;
    e.col = at;
    return e;
  }
  throw ParseError(lx.line, at, "expected a value");
}

inline Expr parse_power(Lexer& lx) {
  Expr base = parse_primary(lx);
  if (lx.peek() != '^') return base;
  size_t op_at = lx.col();
  ++lx.pos;
  char c = lx.peek();
  size_t at = lx.col();
  if (c < '0' || c > '9')
    throw ParseError(lx.line, at, "exponent must be an integer literal");
  int64_t v = 0;
  while (lx.pos < lx.s.size() && lx.s[lx.pos] >= '0' && lx.s[lx.pos] <= '9') {
    v = v * 10 + (lx.s[lx.pos] - '0');
    if (v > 4096) throw ParseError(lx.line, at, "exponent too large");
    ++lx.pos;
  }
  if (lx.peek() == '^')
    throw ParseError(lx.line, lx.col(), "chained '^' needs parentheses");
  Expr e;
  e.kind = Expr::Pow;
  e.num = v;
  e.line = lx.line;
  e.col = op_at;
  e.kids.push_back(std::move(base));
  return e;
}

inline Expr parse_unary(Lexer& lx) {
  if (lx.peek() == '-') {
    size_t at = lx.col();
    ++lx.pos;
    Expr e;
    e.kind = Expr::Neg;
    e.line = lx.line;
    e.col = at;
    e.kids.push_back(parse_unary(lx));
    return e;
  }
  return parse_power(lx);
}

inline Expr parse_product(Lexer& lx) {
  Expr e = parse_unary(lx);
  while (true) {
    char c = lx.peek();
    if (c != '*' && c != '/') return e;
    size_t at = lx.col();
    ++lx.pos;
    Expr n;
    n.kind = c == '*' ? Expr::Mul : Expr::Div;
    n.line = lx.line;
    n.col = at;
    n.kids.push_back(std::move(e));
    n.kids.push_back(parse_unary(lx));
    e = std::move(n);
  }
}

inline Expr parse_sum(Lexer& lx) {
  Expr e = parse_product(lx);
  while (true) {
    char c = lx.peek();
    if (c != '+' && c != '-') return e;
    size_t at = lx.col();
    ++lx.pos;
    Expr n;
    n.kind = c == '+' ? Expr::Add : Expr::Sub;
    n.line = lx.line;
    n.col = at;
    n.kids.push_back(std::move(e));
    n.kids.push_back(parse_product(lx));
    e = std::move(n);
  }
}

// parse a full expression occupying `text`, which starts at column col0 of
// the given 1-based line
inline Expr parse_expr(const std::string& text, size_t line, size_t col0) {
  Lexer lx(text, line, col0);
  Expr e = parse_sum(lx);
  if (!lx.done()) throw ParseError(line, lx.col(), "unexpected trailing input");
  return e;
}

inline void validate_idents(const Expr& e, const std::vector<std::string>& names) {
  if (e.kind == Expr::Ref) {
    for (const auto& n : names)
      if (n == e.name) return;
    throw ParseError(e.line, e.col, "unknown identifier '" + e.name + "'");
  }
  for (const auto& k : e.kids) validate_idents(k, names);
}

// Evaluate to a polynomial over F; the resolver maps an identifier to a
// polynomial atom (the indeterminate or an embedded constant).
template <typename F>
PolyF<F> eval_expr(const Expr& e,
                   const std::function<PolyF<F>(const Expr&)>& atom,
                   const F& one) {
  switch (e.kind) {
    case Expr::Num: {
      F v = from_int(one, e.num);
      PolyF<F> r;
      if (!is_zero(v)) r.c.push_back(v);
      return r;
    }
    case Expr::Ref:
      return atom(e);
    case Expr::Add:
      return pf::add(eval_expr(e.kids[0], atom, one), eval_expr(e.kids[1], atom, one));
    case Expr::Sub:
      return pf::sub(eval_expr(e.kids[0], atom, one), eval_expr(e.kids[1], atom, one));
    case Expr::Mul:
      return pf::mul(eval_expr(e.kids[0], atom, one), eval_expr(e.kids[1], atom, one));
    case Expr::Div: {
      PolyF<F> a = eval_expr(e.kids[0], atom, one);
      PolyF<F> b = eval_expr(e.kids[1], atom, one);
      if (b.deg() > 0)
        throw ParseError(e.line, e.col, "division by a non-constant");
      if (b.deg() < 0) throw ParseError(e.line, e.col, "division by zero");
      F inv = inv_of(b.c[0]);
      for (auto& cf : a.c) cf = cf * inv;
      return a;
    }
    case Expr::Pow: {
      PolyF<F> b = eval_expr(e.kids[0], atom, one);
      PolyF<F> r;
      r.c.push_back(one);
      for (int64_t i = 0; i < e.num; ++i) r = pf::mul(r, b);
      return r;
    }
    case Expr::Neg: {
      PolyF<F> a = eval_expr(e.kids[0], atom, one);
      PolyF<F> z;
      return pf::sub(z, a);
    }
  }
  throw AlgebraError("unreachable expression kind");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scenario format: line oriented, '#' comments. Keys:
//   name <ident>
//   base <p> [var ...]
//   step <gen> <minpoly expr in x, base vars, earlier gens>
//   ambient <p> <var ...>
//   ambient_base <expr>          (one defining element per line)
//   ambient_gen <expr>
//   auto <expr>[, <expr> ...]    (declared generator images, one map per line)
//   check <suite>
//   budget seed|samples <n>
//   expect <key> <n>
// ---------------------------------------------------------------------------

struct ScenarioStep {
  std::string gen;
  std::string minpoly;
  size_t line = 0;
  size_t col = 0;  // column where the expression starts
};

struct AmbientBlock {
  bool present = false;
  uint32_t p = 0;
  std::vector<std::string> vars;
  std::vector<std::string> base_exprs, gen_exprs;
  std::vector<size_t> base_lines, base_cols, gen_lines, gen_cols;
};

struct DeclaredAuto {
  std::vector<std::string> images;
  size_t line = 0;
  std::vector<size_t> cols;
};

struct Scenario {
  std::string name = "scenario";
  bool has_base = false;
  uint32_t p = 0;
  std::vector<std::string> vars;
  std::vector<ScenarioStep> steps;
  AmbientBlock ambient;
  std::vector<DeclaredAuto> autos;
  std::vector<std::string> checks;
  uint64_t seed = 0;
  size_t samples = 20;
  std::vector<std::pair<std::string, int64_t>> expect;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "classify",       "triple_agreement",      "filtration_oracle",
      "dct",            "skew",                  "correspondence",
      "normal_correspondence", "pi_correspondence", "conormal",
      "tensor",         "disjoint",              "delta_eq"};
  return names;
}

inline const std::vector<std::string>& expect_keys() {
  static const std::vector<std::string> keys = {
      "rank",        "group_order", "dim_d",     "dim_e",
      "dim_skew_lg", "dim_skew_dg", "dim_sep",   "dim_pi",
      "dim_ldif",    "dim_fixed",   "dim_fixed_dif",
      "is_normal",   "is_b",        "is_g",      "is_d",
      "is_separable", "is_purely_inseparable"};
  return keys;
}

namespace detail {

struct Word {
  std::string text;
  size_t col = 0;
};

inline std::vector<Word> split_words(const std::string& line) {
  std::vector<Word> ws;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    ws.push_back({line.substr(start, i - start), start + 1});
  }
  return ws;
}

inline bool valid_ident(const std::string& s) {
  if (s.empty() || !ident_start(s[0])) return false;
  for (char c : s)
    if (!ident_char(c)) return false;
  return true;
}

inline int64_t parse_int(const Word& w, size_t line) {
  if (w.text.empty()) throw ParseError(line, w.col, "expected an integer");
  for (char c : w.text)
    if (c < '0' || c > '9')
      throw ParseError(line, w.col, "expected an integer");
  if (w.text.size() > 12) throw ParseError(line, w.col, "integer too large");
  return std::stoll(w.text);
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  Scenario s;
  bool saw_name = false;
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }

  for (size_t li = 0; li < lines.size(); ++li) {
    std::string line = lines[li];
    size_t ln = li + 1;
    if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    auto words = detail::split_words(line);
    if (words.empty()) continue;
    const std::string& key = words[0].text;

    auto rest_expr = [&](size_t from_word) -> std::pair<std::string, size_t> {
      if (from_word >= words.size())
        throw ParseError(ln, line.size() + 1, "expected an expression");
      size_t col = words[from_word].col;
      return {line.substr(col - 1), col};
    };

    if (key == "name") {
      if (words.size() != 2 || !detail::valid_ident(words[1].text))
        throw ParseError(ln, words.size() > 1 ? words[1].col : words[0].col,
                         "name expects one identifier");
      if (saw_name) throw ParseError(ln, words[0].col, "duplicate name");
      s.name = words[1].text;
      saw_name = true;
    } else if (key == "base") {
      if (s.has_base || s.ambient.present)
        throw ParseError(ln, words[0].col, "base already declared");
      if (words.size() < 2) throw ParseError(ln, words[0].col, "base expects a prime");
      int64_t p = detail::parse_int(words[1], ln);
      if (p < 2 || !fp::is_prime(uint32_t(p)))
        throw ParseError(ln, words[1].col, "characteristic must be prime");
      s.p = uint32_t(p);
      for (size_t i = 2; i < words.size(); ++i) {
        if (!detail::valid_ident(words[i].text) || words[i].text == "x")
          throw ParseError(ln, words[i].col, "bad variable name");
        for (const auto& v : s.vars)
          if (v == words[i].text)
            throw ParseError(ln, words[i].col, "duplicate variable");
        s.vars.push_back(words[i].text);
      }
      s.has_base = true;
    } else if (key == "step") {
      if (!s.has_base) throw ParseError(ln, words[0].col, "step before base");
      if (words.size() < 3)
        throw ParseError(ln, words[0].col, "step expects a name and an expression");
      const std::string& g = words[1].text;
      if (!detail::valid_ident(g) || g == "x")
        throw ParseError(ln, words[1].col, "bad generator name");
      std::vector<std::string> known = s.vars;
      for (const auto& st : s.steps) known.push_back(st.gen);
      for (const auto& n : known)
        if (n == g) throw ParseError(ln, words[1].col, "duplicate generator name");
      auto [expr, col] = rest_expr(2);
      detail::Expr ast = detail::parse_expr(expr, ln, col);
      known.push_back("x");
      detail::validate_idents(ast, known);
      s.steps.push_back({g, expr, ln, col});
    } else if (key == "ambient") {
      if (s.has_base || s.ambient.present)
        throw ParseError(ln, words[0].col, "base already declared");
      if (words.size() < 3)
        throw ParseError(ln, words[0].col, "ambient expects a prime and variables");
      int64_t p = detail::parse_int(words[1], ln);
      if (p < 2 || !fp::is_prime(uint32_t(p)))
        throw ParseError(ln, words[1].col, "characteristic must be prime");
      s.ambient.present = true;
      s.ambient.p = uint32_t(p);
      // ambient expressions have no step indeterminate, so x is a fine name
      for (size_t i = 2; i < words.size(); ++i) {
        if (!detail::valid_ident(words[i].text))
          throw ParseError(ln, words[i].col, "bad variable name");
        for (const auto& v : s.ambient.vars)
          if (v == words[i].text)
            throw ParseError(ln, words[i].col, "duplicate variable");
        s.ambient.vars.push_back(words[i].text);
      }
    } else if (key == "ambient_base" || key == "ambient_gen") {
      if (!s.ambient.present)
        throw ParseError(ln, words[0].col, key + " before ambient");
      auto [expr, col] = rest_expr(1);
      detail::Expr ast = detail::parse_expr(expr, ln, col);
      detail::validate_idents(ast, s.ambient.vars);
      if (key == "ambient_base") {
        s.ambient.base_exprs.push_back(expr);
        s.ambient.base_lines.push_back(ln);
        s.ambient.base_cols.push_back(col);
      } else {
        s.ambient.gen_exprs.push_back(expr);
        s.ambient.gen_lines.push_back(ln);
        s.ambient.gen_cols.push_back(col);
      }
    } else if (key == "auto") {
      auto [all, col0] = rest_expr(1);
      DeclaredAuto da;
      da.line = ln;
      size_t start = 0, col = col0;
      auto push_piece = [&](const std::string& piece, size_t pcol) {
        detail::Expr ast = detail::parse_expr(piece, ln, pcol);
        da.images.push_back(piece);
        da.cols.push_back(pcol);
        (void)ast;
      };
      for (size_t i = 0; i <= all.size(); ++i) {
        if (i == all.size() || all[i] == ',') {
          push_piece(all.substr(start, i - start), col);
          start = i + 1;
          col = col0 + i + 1;
        }
      }
      s.autos.push_back(std::move(da));
    } else if (key == "check") {
      if (words.size() != 2)
        throw ParseError(ln, words[0].col, "check expects one suite name");
      const std::string& n = words[1].text;
      bool known = false;
      for (const auto& sn : suite_names()) known = known || sn == n;
      if (!known) throw UnknownCheck(n);
      s.checks.push_back(n);
    } else if (key == "budget") {
      if (words.size() != 3)
        throw ParseError(ln, words[0].col, "budget expects a key and a value");
      int64_t v = detail::parse_int(words[2], ln);
      if (words[1].text == "seed")
        s.seed = uint64_t(v);
      else if (words[1].text == "samples")
        s.samples = size_t(v);
      else
        throw ParseError(ln, words[1].col, "unknown budget key '" + words[1].text + "'");
    } else if (key == "expect") {
      if (words.size() != 3)
        throw ParseError(ln, words[0].col, "expect expects a key and a value");
      bool known = false;
      for (const auto& k : expect_keys()) known = known || k == words[1].text;
      if (!known)
        throw ParseError(ln, words[1].col, "unknown expect key '" + words[1].text + "'");
      s.expect.emplace_back(words[1].text, detail::parse_int(words[2], ln));
    } else {
      throw ParseError(ln, words[0].col, "unknown keyword '" + key + "'");
    }
  }

  if (!s.has_base && !s.ambient.present)
    throw ParseError(lines.size() + 1, 1, "scenario declares no base or ambient");
  if (s.ambient.present) {
    if (s.ambient.base_exprs.empty())
      throw ParseError(lines.size() + 1, 1, "ambient block has no ambient_base lines");
    if (s.ambient.gen_exprs.empty())
      throw ParseError(lines.size() + 1, 1, "ambient block has no ambient_gen lines");
  }
  size_t ngens = s.has_base ? s.steps.size() : s.ambient.gen_exprs.size();
  for (const auto& a : s.autos) {
    if (a.images.size() != ngens)
      throw ParseError(a.line, 1, "auto expects one image per generator");
    // identifiers resolve against every generator and base variable
    std::vector<std::string> known = s.has_base ? s.vars : s.ambient.vars;
    if (s.has_base)
      for (const auto& st : s.steps) known.push_back(st.gen);
    for (size_t i = 0; i < a.images.size(); ++i) {
      detail::Expr ast = detail::parse_expr(a.images[i], a.line, a.cols[i]);
      detail::validate_idents(ast, known);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Scenario construction.
// ---------------------------------------------------------------------------

namespace detail {

inline PolyF<TowerElement> step_poly(const TowerPtr& t, const Scenario& s,
                                     const ScenarioStep& st) {
  Expr ast = parse_expr(st.minpoly, st.line, st.col);
  TowerElement one = tow::one_elem(t);
  std::function<PolyF<TowerElement>(const Expr&)> atom =
      [&](const Expr& e) -> PolyF<TowerElement> {
    PolyF<TowerElement> r;
    if (e.name == "x") {
      r.c.push_back(tow::zero_elem(t));
      r.c.push_back(one);
      return r;
    }
    for (size_t i = 0; i < s.vars.size(); ++i)
      if (s.vars[i] == e.name) {
        r.c.push_back(tow::scalar_elem(
            t, RatFunc::variable(s.p, s.vars.size(), i)));
        return r;
      }
    for (size_t i = 0; i < t->st.nsteps(); ++i)
      if (t->st.names[i] == e.name) {
        r.c.push_back(tow::gen_elem(t, i));
        return r;
      }
    throw ParseError(e.line, e.col, "unknown identifier '" + e.name + "'");
  };
  return eval_expr<TowerElement>(ast, atom, one);
}

inline TowerElement const_elem(const TowerPtr& t, const Scenario& s,
                               const std::string& text, size_t line, size_t col) {
  Expr ast = parse_expr(text, line, col);
  TowerElement one = tow::one_elem(t);
  std::function<PolyF<TowerElement>(const Expr&)> atom =
      [&](const Expr& e) -> PolyF<TowerElement> {
    PolyF<TowerElement> r;
    if (e.kind == Expr::Ref && e.name == "x")
      throw ParseError(e.line, e.col, "'x' only appears in step polynomials");
    for (size_t i = 0; i < t->base.vars.size(); ++i)
      if (t->base.vars[i] == e.name) {
        r.c.push_back(tow::scalar_elem(
            t, RatFunc::variable(t->base.p, t->base.vars.size(), i)));
        return r;
      }
    for (size_t i = 0; i < t->st.nsteps(); ++i)
      if (t->st.names[i] == e.name) {
        r.c.push_back(tow::gen_elem(t, i));
        return r;
      }
    throw ParseError(e.line, e.col, "unknown identifier '" + e.name + "'");
  };
  PolyF<TowerElement> v = eval_expr<TowerElement>(ast, atom, one);
  if (v.deg() > 0) throw ParseError(line, col, "expected a constant expression");
  return v.deg() < 0 ? tow::zero_elem(t) : v.c[0];
}

inline RatFunc ambient_value(const Scenario& s, const std::string& text,
                             size_t line, size_t col) {
  Expr ast = parse_expr(text, line, col);
  uint32_t p = s.ambient.p;
  size_t nv = s.ambient.vars.size();
  RatFunc one = RatFunc::constant(p, nv, 1);
  std::function<PolyF<RatFunc>(const Expr&)> atom =
      [&](const Expr& e) -> PolyF<RatFunc> {
    PolyF<RatFunc> r;
    for (size_t i = 0; i < nv; ++i)
      if (s.ambient.vars[i] == e.name) {
        r.c.push_back(RatFunc::variable(p, nv, i));
        return r;
      }
    throw ParseError(e.line, e.col, "unknown identifier '" + e.name + "'");
  };
  PolyF<RatFunc> v = eval_expr<RatFunc>(ast, atom, one);
  if (v.deg() > 0) throw ParseError(line, col, "expected a constant expression");
  return v.deg() < 0 ? RatFunc::zero(p, nv) : v.c[0];
}

}  // namespace detail

struct BuiltScenario {
  TowerPtr tower;
  std::vector<std::vector<TowerElement>> declared_autos;
};

inline BuiltScenario build_scenario(const Scenario& s) {
  BuiltScenario b;
  if (s.has_base) {
    b.tower = tow::start_tower(BaseFieldDesc(s.p, s.vars));
    for (const auto& st : s.steps) {
      PolyF<TowerElement> f = detail::step_poly(b.tower, s, st);
      if (f.deg() < 2)
        throw ParseError(st.line, st.col, "step degree must be at least 2");
      if (!(f.lc() == tow::one_elem(b.tower))) f = pf::monic(f);
      b.tower = tow::extend(b.tower, st.gen, f);
    }
  } else {
    std::vector<RatFunc> base_vals, gen_vals;
    for (size_t i = 0; i < s.ambient.base_exprs.size(); ++i)
      base_vals.push_back(detail::ambient_value(
          s, s.ambient.base_exprs[i], s.ambient.base_lines[i], s.ambient.base_cols[i]));
    for (size_t i = 0; i < s.ambient.gen_exprs.size(); ++i)
      gen_vals.push_back(detail::ambient_value(
          s, s.ambient.gen_exprs[i], s.ambient.gen_lines[i], s.ambient.gen_cols[i]));
    b.tower = amb::from_ambient(s.ambient.p, s.ambient.vars, base_vals, gen_vals).tower;
  }
  for (const auto& a : s.autos) {
    std::vector<TowerElement> imgs;
    for (size_t i = 0; i < a.images.size(); ++i)
      imgs.push_back(detail::const_elem(b.tower, s, a.images[i], a.line, a.cols[i]));
    b.declared_autos.push_back(std::move(imgs));
  }
  return b;
}

// ---------------------------------------------------------------------------
// Check results and reports.
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  std::string status;  // pass | heuristic-pass | fail | skip
  std::string note;    // skip reason or minimized failure witness
  std::vector<std::pair<std::string, int64_t>> dims;
  std::vector<std::pair<std::string, bool>> flags;
  int64_t group_order = -1;
  uint64_t seed = 0;
  int64_t millis = 0;
};

struct Report {
  std::string scenario;
  std::vector<CheckResult> checks;
  bool all_ok() const {
    for (const auto& c : checks)
      if (c.status == "fail") return false;
    return true;
  }
};

namespace detail {

// lazily shared per-scenario computations
struct Context {
  TowerPtr t;
  std::vector<std::vector<TowerElement>> declared;
  uint64_t seed = 0;
  size_t samples = 20;
  const std::vector<std::pair<std::string, int64_t>>* expect = nullptr;

  std::optional<gal::AutGroup> g_;
  std::optional<DiffOpAlgebra> da_;
  std::optional<gal::ClassificationRecord> rec_;

  const gal::AutGroup& group() {
    if (!g_) g_ = gal::automorphism_group(t);
    return *g_;
  }
  const DiffOpAlgebra& diffs() {
    if (!da_) da_ = df::diff_ops(t);
    return *da_;
  }
  const gal::ClassificationRecord& record() {
    if (!rec_) rec_ = gal::classify(t);
    return *rec_;
  }
};

inline void put(CheckResult& r, const std::string& k, int64_t v) {
  r.dims.emplace_back(k, v);
}
inline void put(CheckResult& r, const std::string& k, bool v) {
  r.flags.emplace_back(k, v);
}

inline CheckResult finish(CheckResult r, bool ok, bool heuristic,
                          const std::string& witness = "") {
  if (!ok) {
    r.status = "fail";
    r.note = witness;
  } else {
    r.status = heuristic ? "heuristic-pass" : "pass";
  }
  return r;
}

// sampled intermediate subfields: base, full, one per generator, plus the
// fixed fields of every subgroup when the group is small
inline std::vector<tow::Subfield> sample_subfields(Context& cx, bool with_lattice) {
  std::vector<tow::Subfield> out;
  auto push_unique = [&](tow::Subfield m) {
    for (const auto& o : out)
      if (la::equal(o.space, m.space)) return;
    out.push_back(std::move(m));
  };
  push_unique(tow::subfield_k(cx.t));
  push_unique(tow::subfield_full(cx.t));
  for (size_t i = 0; i < cx.t->st.nsteps(); ++i)
    push_unique(tow::subfield_generated(cx.t, {tow::gen_elem(cx.t, i)}));
  if (with_lattice && cx.group().order() <= 12) {
    for (const auto& h : gal::subgroup_lattice(cx.group()))
      push_unique(gal::fixed_field(cx.group(), h.elems));
  }
  return out;
}

// a reproducible sparse element used for randomized subfield sampling
inline TowerElement random_elem(Context& cx, std::mt19937_64& rng) {
  const TowerPtr& t = cx.t;
  size_t n = t->rank();
  uint32_t p = t->base.p;
  size_t nv = t->base.vars.size();
  auto scalar = [&]() {
    RatFunc v = RatFunc::constant(p, nv, int64_t(rng() % p));
    if (nv > 0 && rng() % 2 == 0) {
      size_t which = rng() % nv;
      v = v + RatFunc::constant(p, nv, int64_t(1 + rng() % (p - 1))) *
                  RatFunc::variable(p, nv, which);
    }
    return v;
  };
  std::vector<RatFunc> coords(n, RatFunc::zero(p, nv));
  size_t terms = 1 + rng() % std::min<size_t>(n, 3);
  for (size_t i = 0; i < terms; ++i) coords[rng() % n] = scalar();
  return tow::elem_from_coords(t, coords);
}

// ---------------------------------------------------------------------------
// Suites.
// ---------------------------------------------------------------------------

inline CheckResult suite_classify(Context& cx) {
  CheckResult r;
  r.name = "classify";
  try {
    const auto& rec = cx.record();
    put(r, "is_separable", rec.is_separable);
    put(r, "is_purely_inseparable", rec.is_purely_inseparable);
    put(r, "is_normal", rec.is_normal);
    put(r, "is_b", rec.is_b);
    put(r, "is_g", rec.is_g);
    put(r, "is_d", rec.is_d);
    put(r, "dim_skew_lg", int64_t(rec.dim_skew_lg));
    put(r, "dim_d", int64_t(rec.dim_d));
    put(r, "dim_skew_dg", int64_t(rec.dim_skew_dg));
    put(r, "dim_e", int64_t(rec.dim_e));
    put(r, "dim_sep", int64_t(rec.sep.dim()));
    put(r, "dim_pi", int64_t(rec.pi.dim()));
    put(r, "dim_ldif", int64_t(rec.ldif.dim()));
    put(r, "dim_fixed", int64_t(rec.fixed.dim()));
    put(r, "dim_fixed_dif", int64_t(rec.fixed_dif.dim()));
    r.group_order = int64_t(rec.group_order);

    // declared automorphisms must appear in the computed group
    for (const auto& want : cx.declared) {
      bool found = false;
      for (const auto& a : cx.group().elems) {
        bool same = a.gen_images.size() == want.size();
        for (size_t i = 0; same && i < want.size(); ++i)
          same = a.gen_images[i] == want[i];
        found = found || same;
      }
      if (!found)
        return finish(std::move(r), false, false,
                      "declared automorphism not found in the computed group");
    }

    // expected-value annotations
    if (cx.expect) {
      auto value_of = [&](const std::string& k) -> int64_t {
        if (k == "rank") return int64_t(cx.t->rank());
        if (k == "group_order") return int64_t(rec.group_order);
        if (k == "dim_d") return int64_t(rec.dim_d);
        if (k == "dim_e") return int64_t(rec.dim_e);
        if (k == "dim_skew_lg") return int64_t(rec.dim_skew_lg);
        if (k == "dim_skew_dg") return int64_t(rec.dim_skew_dg);
        if (k == "dim_sep") return int64_t(rec.sep.dim());
        if (k == "dim_pi") return int64_t(rec.pi.dim());
        if (k == "dim_ldif") return int64_t(rec.ldif.dim());
        if (k == "dim_fixed") return int64_t(rec.fixed.dim());
        if (k == "dim_fixed_dif") return int64_t(rec.fixed_dif.dim());
        if (k == "is_normal") return rec.is_normal ? 1 : 0;
        if (k == "is_b") return rec.is_b ? 1 : 0;
        if (k == "is_g") return rec.is_g ? 1 : 0;
        if (k == "is_d") return rec.is_d ? 1 : 0;
        if (k == "is_separable") return rec.is_separable ? 1 : 0;
        if (k == "is_purely_inseparable") return rec.is_purely_inseparable ? 1 : 0;
        throw AlgebraError("unreachable expect key");
      };
      for (const auto& [k, want] : *cx.expect) {
        int64_t got = value_of(k);
        if (got != want)
          return finish(std::move(r), false, false,
                        "expect " + k + ": got " + std::to_string(got) +
                            ", want " + std::to_string(want));
      }
    }
    return finish(std::move(r), true, rec.heuristic);
  } catch (const InconsistentTheorems& e) {
    return finish(std::move(r), false, false, e.what());
  }
}

inline CheckResult suite_triple_agreement(Context& cx) {
  CheckResult r;
  r.name = "triple_agreement";
  auto sep = df::separable_closure(cx.t);
  auto dpc = df::dplus_constants(cx.diffs());
  auto ldif = df::l_dif(cx.t, cx.diffs());
  put(r, "dim_sep", int64_t(sep.dim()));
  put(r, "dim_dplus_constants", int64_t(dpc.dim()));
  put(r, "dim_ldif", int64_t(ldif.dim()));
  bool ok = la::equal(sep.space, dpc.space) && la::equal(sep.space, ldif.space);
  if (!ok)
    return finish(std::move(r), false, false,
                  "the three subfield routes disagree");
  // dimension law for the operator algebra
  size_t n = cx.t->rank();
  size_t rel = n / ldif.dim();
  bool law = cx.diffs().d.dim() == rel * rel * ldif.dim();
  put(r, "dim_d", int64_t(cx.diffs().d.dim()));
  return finish(std::move(r), law, false,
                law ? "" : "operator algebra dimension law fails");
}

inline CheckResult suite_filtration_oracle(Context& cx) {
  CheckResult r;
  r.name = "filtration_oracle";
  auto d2 = df::diff_ops_by_filtration(cx.t, cx.t->rank());
  const auto& d1 = cx.diffs();
  bool ok = la::equal(d1.d.space, d2.d.space) &&
            la::equal(d1.d_plus, d2.d_plus) && d2.split_ok && d2.left_ideal_ok;
  for (size_t i = 0; i < d2.filtration.size(); ++i)
    put(r, "f" + std::to_string(i), int64_t(d2.filtration[i]));
  put(r, "dim_d", int64_t(d1.d.dim()));
  return finish(std::move(r), ok, false,
                ok ? "" : "filtration build disagrees with the centralizer build");
}

inline CheckResult suite_dct(Context& cx) {
  CheckResult r;
  r.name = "dct";
  r.seed = cx.seed;
  std::mt19937_64 rng(cx.seed);
  auto e = ma::full_endomorphisms(cx.t);
  size_t n = cx.t->rank();
  size_t checked = 0;
  std::vector<int64_t> seen_dims;
  for (size_t i = 0; i < cx.samples; ++i) {
    TowerElement a = random_elem(cx, rng);
    auto m = tow::subfield_generated(cx.t, {a});
    auto alg = ma::centralizer(cx.t, ma::basis_mats(ma::image_of_subfield(m)), e);
    auto dc = ma::double_centralizer_roundtrip(cx.t, alg);
    bool law = alg.dim() * dc.c.dim() == n * n;
    if (!dc.ok || !law)
      return finish(std::move(r), false, false,
                    "double centralizer fails at a subalgebra of dim " +
                        std::to_string(alg.dim()));
    ++checked;
    seen_dims.push_back(int64_t(alg.dim()));
  }
  put(r, "samples", int64_t(checked));
  std::sort(seen_dims.begin(), seen_dims.end());
  seen_dims.erase(std::unique(seen_dims.begin(), seen_dims.end()), seen_dims.end());
  put(r, "distinct_dims", int64_t(seen_dims.size()));
  return finish(std::move(r), true, false);
}

inline CheckResult suite_skew(Context& cx) {
  CheckResult r;
  r.name = "skew";
  const auto& g = cx.group();
  r.group_order = int64_t(g.order());
  size_t n = cx.t->rank();
  auto e = ma::full_endomorphisms(cx.t);
  auto fixed = gal::fixed_field(g);
  auto lg = gal::skew_group_algebra(ma::image_of_field(cx.t), g);
  put(r, "dim_skew_lg", int64_t(lg.r.dim()));
  bool ok = lg.direct && lg.r.dim() == n * g.order();
  auto cfix = ma::centralizer(cx.t, ma::basis_mats(ma::image_of_subfield(fixed)), e);
  ok = ok && la::equal(lg.r.space, cfix.space);
  if (!ok)
    return finish(std::move(r), false, false,
                  "group algebra is not the commutant of the fixed field");
  auto dg = gal::skew_group_algebra(cx.diffs().d, g);
  auto ldif = df::l_dif(cx.t, cx.diffs());
  auto fxd = tow::make_subfield(cx.t, la::meet(fixed.space, ldif.space).basis);
  put(r, "dim_skew_dg", int64_t(dg.r.dim()));
  put(r, "dim_fixed_dif", int64_t(fxd.dim()));
  size_t rel = n / fxd.dim();
  ok = dg.direct && dg.r.dim() == rel * rel * fxd.dim();
  auto cdg = ma::centralizer(cx.t, ma::basis_mats(dg.r), e);
  ok = ok && la::equal(cdg.space, ma::image_of_subfield(fxd).space);
  auto cfxd = ma::centralizer(cx.t, ma::basis_mats(ma::image_of_subfield(fxd)), e);
  ok = ok && la::equal(cfxd.space, dg.r.space);
  return finish(std::move(r), ok, g.heuristic,
                ok ? "" : "operator group algebra identities fail");
}

inline CheckResult suite_correspondence(Context& cx) {
  CheckResult r;
  r.name = "correspondence";
  if (!cx.record().is_normal) {
    r.status = "skip";
    r.note = "tower is not normal over the base";
    return r;
  }
  size_t checked = 0;
  for (const auto& m : sample_subfields(cx, true)) {
    auto rep = gal::correspondence_roundtrip(cx.t, m);
    if (!rep.ok())
      return finish(std::move(r), false, false,
                    "round trip fails at a subfield of dim " +
                        std::to_string(m.dim()));
    ++checked;
  }
  put(r, "subfields", int64_t(checked));
  return finish(std::move(r), true, cx.record().heuristic);
}

inline CheckResult suite_normal_correspondence(Context& cx) {
  CheckResult r;
  r.name = "normal_correspondence";
  if (!cx.record().is_normal) {
    r.status = "skip";
    r.note = "tower is not normal over the base";
    return r;
  }
  size_t checked = 0, non_normal = 0;
  for (const auto& m : sample_subfields(cx, true)) {
    try {
      auto rep = gal::normal_subfield_correspondence(cx.t, m);
      if (!rep.ok())
        return finish(std::move(r), false, false,
                      "factorization fails at a subfield of dim " +
                          std::to_string(m.dim()));
      ++checked;
    } catch (const NotNormalSubfield&) {
      ++non_normal;
    }
  }
  put(r, "subfields", int64_t(checked));
  put(r, "non_normal_skipped", int64_t(non_normal));
  return finish(std::move(r), true, cx.record().heuristic);
}

inline CheckResult suite_pi_correspondence(Context& cx) {
  CheckResult r;
  r.name = "pi_correspondence";
  if (!cx.record().is_purely_inseparable) {
    r.status = "skip";
    r.note = "tower is not purely inseparable over the base";
    return r;
  }
  std::vector<tow::Subfield> ms = sample_subfields(cx, false);
  for (size_t i = 0; i < cx.t->st.nsteps(); ++i) {
    auto gi = tow::gen_elem(cx.t, i);
    auto m = tow::subfield_generated(cx.t, {gi * gi});
    bool dup = false;
    for (const auto& o : ms) dup = dup || la::equal(o.space, m.space);
    if (!dup) ms.push_back(std::move(m));
  }
  size_t checked = 0;
  for (const auto& m : ms) {
    auto rep = gal::pi_correspondence(cx.t, m);
    if (!rep.ok())
      return finish(std::move(r), false, false,
                    "round trip fails at a subfield of dim " +
                        std::to_string(m.dim()));
    ++checked;
  }
  put(r, "subfields", int64_t(checked));
  return finish(std::move(r), true, cx.record().heuristic);
}

inline CheckResult suite_conormal(Context& cx) {
  CheckResult r;
  r.name = "conormal";
  try {
    auto lc = gal::least_conormal(cx.t);
    put(r, "dim_conormal", int64_t(lc.dim()));
    bool ok = la::equal(lc.space, cx.record().fixed_dif.space);
    return finish(std::move(r), ok, cx.record().heuristic,
                  ok ? "" : "least conormal subfield differs from the fixed part");
  } catch (const InconsistentTheorems& e) {
    return finish(std::move(r), false, false, e.what());
  }
}

inline CheckResult suite_tensor(Context& cx) {
  CheckResult r;
  r.name = "tensor";
  const auto& st = cx.t->st;
  size_t nsteps = st.nsteps();
  size_t split = 0;
  for (size_t j = 1; j < nsteps && split == 0; ++j) {
    bool base_coeffs = true;
    for (size_t i = j; i < nsteps && base_coeffs; ++i)
      for (const auto& cf : st.mins[i])
        for (size_t k = 1; k < cf.size(); ++k)
          if (!cf[k].is_zero()) {
            base_coeffs = false;
            break;
          }
    if (base_coeffs) split = j;
  }
  if (nsteps < 2 || split == 0) {
    r.status = "skip";
    r.note = "tower does not factor as a concatenation over the base";
    return r;
  }
  TowerPtr t1 = tow::start_tower(cx.t->base);
  for (size_t i = 0; i < split; ++i) {
    PolyF<TowerElement> f;
    for (const auto& cf : st.mins[i]) f.c.push_back(tow::elem_from_coords(t1, cf));
    t1 = tow::extend(t1, st.names[i], f);
  }
  TowerPtr t2 = tow::start_tower(cx.t->base);
  for (size_t i = split; i < nsteps; ++i) {
    std::vector<RatFunc> cs;
    for (const auto& cf : st.mins[i]) cs.push_back(cf[0]);
    t2 = tow::extend(t2, st.names[i], pf::from_coeffs(std::move(cs)));
  }
  try {
    auto rep = gal::tensor_extension_checks(t1, t2);
    put(r, "dim_d1", int64_t(rep.diffs.dim1));
    put(r, "dim_d2", int64_t(rep.diffs.dim2));
    put(r, "dim_d12", int64_t(rep.diffs.dim12));
    put(r, "g1", int64_t(rep.g1));
    put(r, "g2", int64_t(rep.g2));
    put(r, "g12", int64_t(rep.g12));
    put(r, "dim_dg12", int64_t(rep.dim_dg12));
    bool ok = rep.ok() && rep.g12 == cx.group().order();
    return finish(std::move(r), ok, cx.group().heuristic,
                  ok ? "" : "tensor laws fail across the concatenation");
  } catch (const AlgebraError&) {
    r.status = "skip";
    r.note = "a tensor factor is not normal over the base";
    return r;
  }
}

inline CheckResult suite_disjoint(Context& cx) {
  CheckResult r;
  r.name = "disjoint";
  auto sep = df::separable_closure(cx.t);
  TowerPtr septw = gal::subfield_tower(sep);
  auto gn = gal::automorphism_group(septw);
  bool heur = gn.heuristic;
  if (gn.order() != septw->rank()) {
    r.status = "skip";
    r.note = "separable part is not Galois over the base";
    return r;
  }
  auto pi = df::purely_inseparable_part(cx.t);
  put(r, "dim_pi", int64_t(pi.dim()));
  put(r, "dim_sep", int64_t(sep.dim()));
  bool meets_base =
      la::equal(la::meet(pi.space, sep.space), tow::base_subfield(cx.t).space);
  bool disjoint = tow::is_linearly_disjoint(pi, sep);
  bool ok = meets_base && disjoint;
  // when one factor is nontrivial, intersecting it with itself must refute
  if (sep.dim() > 1) ok = ok && !tow::is_linearly_disjoint(sep, sep);
  // when the composite is everything, the stabilizer restricts isomorphically
  auto comp = tow::compositum(pi, sep);
  if (ok && comp.dim() == cx.t->rank()) {
    const auto& g = cx.group();
    heur = heur || g.heuristic;
    size_t stab = 0;
    for (const auto& a : g.elems) {
      bool fixes = true;
      for (const auto& v : pi.space.basis) {
        auto w = la::mat_vec(a.mat, v);
        for (size_t i = 0; fixes && i < v.size(); ++i)
          fixes = (w[i] - v[i]).is_zero();
      }
      if (fixes) ++stab;
    }
    put(r, "stabilizer", int64_t(stab));
    ok = stab == gn.order();
  }
  return finish(std::move(r), ok, heur,
                ok ? "" : "disjointness criterion fails for the two parts");
}

inline CheckResult suite_delta_eq(Context& cx) {
  CheckResult r;
  r.name = "delta_eq";
  auto delta = df::derivation_algebra(
      cx.t, df::derivations(cx.t, tow::subfield_k(cx.t)));
  const auto& d = cx.diffs().d;
  auto sep = df::separable_closure(cx.t);
  put(r, "dim_delta", int64_t(delta.dim()));
  put(r, "dim_d", int64_t(d.dim()));
  bool contained = la::subspace_leq(delta.space, d.space);
  bool exp1 = true;
  for (size_t i = 0; i < cx.t->st.nsteps(); ++i)
    exp1 = exp1 && tow::subfield_contains(
                       sep, tow::frobenius_elem(tow::gen_elem(cx.t, i), 1));
  put(r, "exponent_le_1", exp1);
  bool equal = delta.dim() == d.dim();
  bool ok = contained && (equal == exp1);
  return finish(std::move(r), ok, false,
                ok ? "" : "derivation algebra criterion disagrees");
}

inline CheckResult run_one(Context& cx, const std::string& name) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  if (name == "classify") r = suite_classify(cx);
  else if (name == "triple_agreement") r = suite_triple_agreement(cx);
  else if (name == "filtration_oracle") r = suite_filtration_oracle(cx);
  else if (name == "dct") r = suite_dct(cx);
  else if (name == "skew") r = suite_skew(cx);
  else if (name == "correspondence") r = suite_correspondence(cx);
  else if (name == "normal_correspondence") r = suite_normal_correspondence(cx);
  else if (name == "pi_correspondence") r = suite_pi_correspondence(cx);
  else if (name == "conormal") r = suite_conormal(cx);
  else if (name == "tensor") r = suite_tensor(cx);
  else if (name == "disjoint") r = suite_disjoint(cx);
  else if (name == "delta_eq") r = suite_delta_eq(cx);
  else throw UnknownCheck(name);
  r.millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - t0)
                 .count();
  return r;
}

}  // namespace detail

inline Report run_checks(const Scenario& s) {
  BuiltScenario b = build_scenario(s);
  detail::Context cx;
  cx.t = b.tower;
  cx.declared = b.declared_autos;
  cx.seed = s.seed;
  cx.samples = s.samples;
  cx.expect = &s.expect;
  Report rep;
  rep.scenario = s.name;
  for (const auto& name : s.checks) {
    CheckResult r = detail::run_one(cx, name);
    r.seed = s.seed;
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Built-in catalog.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string all_checks() {
  std::string s;
  for (const auto& n : suite_names()) s += "check " + n + "\n";
  return s;
}

}  // namespace detail

inline std::vector<Scenario> builtin_catalog() {
  std::vector<std::string> texts;
  const std::string checks = detail::all_checks();

  texts.push_back(
      "name ex0\n"
      "# the field with sixteen elements over its prime field\n"
      "base 2\n"
      "step a x^4+x+1\n"
      "auto a^2\n"
      "expect rank 4\nexpect group_order 4\nexpect dim_e 16\n"
      "expect dim_skew_lg 16\nexpect dim_sep 4\nexpect dim_pi 1\n"
      "expect is_g 1\nexpect is_normal 1\n" +
      checks);

  texts.push_back(
      "name ex1\n"
      "# a square root of t\n"
      "base 2 t\n"
      "step u x^2+t\n"
      "expect rank 2\nexpect group_order 1\nexpect dim_d 4\nexpect dim_e 4\n"
      "expect dim_pi 2\nexpect dim_sep 1\nexpect is_d 1\nexpect is_normal 1\n" +
      checks);

  texts.push_back(
      "name ex2\n"
      "# an Artin-Schreier step\n"
      "base 2 t\n"
      "step s x^2+x+t\n"
      "auto s+1\n"
      "expect rank 2\nexpect group_order 2\nexpect dim_skew_lg 4\n"
      "expect dim_e 4\nexpect dim_d 2\nexpect dim_sep 2\n"
      "expect is_g 1\nexpect is_normal 1\n" +
      checks);

  texts.push_back(
      "name ex3\n"
      "# square root then Artin-Schreier: normal, neither Galois nor purely inseparable\n"
      "base 2 t\n"
      "step u x^2+t\n"
      "step s x^2+x+t\n"
      "auto u, s+1\n"
      "expect rank 4\nexpect group_order 2\nexpect dim_d 8\nexpect dim_e 16\n"
      "expect dim_skew_lg 8\nexpect dim_skew_dg 16\nexpect dim_fixed 2\n"
      "expect dim_ldif 2\nexpect dim_fixed_dif 1\n"
      "expect is_b 1\nexpect is_g 0\nexpect is_d 0\nexpect is_normal 1\n" +
      checks);

  texts.push_back(
      "name ex4\n"
      "# a separable cubic with a single root: not normal\n"
      "base 2 t\n"
      "step y x^3+x+t\n"
      "expect rank 3\nexpect group_order 1\nexpect dim_d 3\nexpect dim_e 9\n"
      "expect dim_fixed 3\nexpect dim_fixed_dif 3\nexpect dim_sep 3\n"
      "expect dim_pi 1\nexpect is_normal 0\nexpect is_b 0\n" +
      checks);

  texts.push_back(
      "name ex5\n"
      "# the exponent-two import with entangled generators\n"
      "ambient 2 x y z\n"
      "ambient_base x^2\n"
      "ambient_base y^2\n"
      "ambient_base z^4\n"
      "ambient_gen z\n"
      "ambient_gen x*z+y\n"
      "budget samples 6\n"
      "expect rank 8\nexpect group_order 1\nexpect dim_d 64\nexpect dim_e 64\n"
      "expect dim_pi 8\nexpect dim_sep 1\nexpect is_d 1\nexpect is_normal 1\n" +
      checks);

  texts.push_back(
      "name ex1p3\n"
      "# a cube root of t in characteristic three\n"
      "base 3 t\n"
      "step r x^3-t\n"
      "expect rank 3\nexpect group_order 1\nexpect dim_d 9\nexpect dim_e 9\n"
      "expect is_d 1\nexpect is_normal 1\n" +
      checks);

  texts.push_back(
      "name ex2p3\n"
      "# an Artin-Schreier step in characteristic three\n"
      "base 3 t\n"
      "step s x^3-x-t\n"
      "auto s+1\n"
      "expect rank 3\nexpect group_order 3\nexpect dim_skew_lg 9\n"
      "expect is_g 1\nexpect is_normal 1\n" +
      checks);

  texts.push_back(
      "name ex6\n"
      "# splitting field of the cubic: the smallest non-abelian group\n"
      "base 2 t\n"
      "step y x^3+x+t\n"
      "step w x^2+y*x+y^2+1\n"
      "expect rank 6\nexpect group_order 6\nexpect dim_e 36\n"
      "expect dim_skew_lg 36\nexpect dim_sep 6\n"
      "expect is_g 1\nexpect is_normal 1\n" +
      checks);

  texts.push_back(
      "name ex7\n"
      "# a constant-coefficient Galois quartic stacked with a square root\n"
      "base 2 t\n"
      "step c x^4+x+1\n"
      "step u x^2+t\n"
      "auto c^2, u\n"
      "budget samples 6\n"
      "expect rank 8\nexpect group_order 4\nexpect dim_d 16\nexpect dim_e 64\n"
      "expect dim_skew_dg 64\nexpect dim_fixed 2\nexpect dim_ldif 4\n"
      "expect dim_fixed_dif 1\nexpect is_b 1\nexpect is_normal 1\n" +
      checks);

  std::vector<Scenario> out;
  for (const auto& t : texts) out.push_back(parse_scenario(t));
  return out;
}

inline std::optional<Scenario> find_builtin(const std::string& name) {
  for (auto& s : builtin_catalog())
    if (s.name == name) return s;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Randomized tower fuzzing.
// ---------------------------------------------------------------------------

struct FuzzBounds {
  uint32_t max_degree = 16;
  size_t max_steps = 3;
  std::vector<uint32_t> primes = {2, 3};
  bool verbose = false;
};

struct DrawnTower {
  TowerPtr t;
  std::string shape;
};

namespace detail {

// Cheap screens against obviously split moduli: a root among the basis
// monomials shifted by prime-field constants (the common collision when a
// drawn constant already has a preimage among the generators), and the root
// finder proper when every coefficient is a base-field scalar.  Reducible
// draws that slip through still get discarded by dynamic evaluation later,
// these screens just avoid paying a whole suite run to find out.
inline bool modulus_looks_split(const TowerPtr& t, const PolyF<TowerElement>& f) {
  uint32_t p = t->base.p;
  size_t nv = t->base.vars.size();
  for (size_t i = 0; i < t->rank(); ++i) {
    std::vector<RatFunc> co(t->rank(), RatFunc::zero(p, nv));
    co[i] = RatFunc::constant(p, nv, 1);
    TowerElement b = tow::elem_from_coords(t, co);
    for (uint32_t j = 0; j < p; ++j) {
      TowerElement cand = b + tow::scalar_elem(t, RatFunc::constant(p, nv, int64_t(j)));
      if (pf::eval(f, cand).is_zero()) return true;
    }
  }
  bool scalar_coeffs = true;
  for (const auto& c : f.c)
    for (size_t i = 1; i < c.coords.size(); ++i)
      if (!c.coords[i].is_zero()) scalar_coeffs = false;
  if (scalar_coeffs) {
    std::vector<RatFunc> cs;
    for (const auto& c : f.c) cs.push_back(c.coords[0]);
    try {
      rt::RootsResult rr = rt::roots_in_field(pf::from_coeffs(std::move(cs)), t);
      if (!rr.roots.empty()) return true;
    } catch (const AlgebraError&) {
      // inconclusive screen; dynamic evaluation backstops later
    }
  }
  return false;
}

}  // namespace detail

// One sample of the fuzz distribution: one to max_steps steps over F_p or
// F_p(t), mixing pure p-th powers, Artin-Schreier steps, and small separable
// polynomials with sparse random coefficients.
inline DrawnTower draw_tower(std::mt19937_64& rng, const FuzzBounds& bounds) {
  uint32_t p = bounds.primes[rng() % bounds.primes.size()];
  size_t nv = rng() % 4 == 0 ? 0 : 1;
  std::string shape = "p=" + std::to_string(p) + (nv ? " base=F_p(t)" : " base=F_p");
  TowerPtr t = tow::start_tower(
      BaseFieldDesc(p, nv ? std::vector<std::string>{"t"} : std::vector<std::string>{}));
  size_t want = 1 + rng() % bounds.max_steps;
  // bias the total degree low with an occasional full-cap tower, so a batch
  // mixes many fast samples with a few slow deep ones
  uint32_t budget = 4 + uint32_t(rng() % 5);
  if (rng() % 8 == 0) {
    budget = bounds.max_degree;
    want = bounds.max_steps;
  }
  budget = std::min(budget, bounds.max_degree);
  uint32_t total = 1;
  auto scalar = [&]() {
    RatFunc v = RatFunc::constant(p, nv, int64_t(rng() % p));
    if (nv > 0 && rng() % 2 == 0)
      v = v + RatFunc::constant(p, nv, int64_t(1 + rng() % (p - 1))) *
                  RatFunc::variable(p, nv, 0);
    return v;
  };
  auto low_elem = [&]() {
    std::vector<RatFunc> coords(t->rank(), RatFunc::zero(p, nv));
    coords[0] = scalar();
    if (t->rank() > 1 && rng() % 2 == 0) coords[1 + rng() % (t->rank() - 1)] = scalar();
    return tow::elem_from_coords(t, coords);
  };
  auto nonzero_low = [&]() {
    TowerElement c = low_elem();
    for (size_t tries = 0; tries < 6 && c.is_zero(); ++tries) c = low_elem();
    return c.is_zero() ? tow::one_elem(t) : c;
  };
  for (size_t st = 0; st < want; ++st) {
    size_t family = rng() % 3;
    uint32_t d = family == 2 ? 2 + uint32_t(rng() % 2) : p;
    if (total * d > budget) break;
    TowerElement one = tow::one_elem(t);
    PolyF<TowerElement> f;
    bool good = false;
    for (size_t tries = 0; tries < 6 && !good; ++tries) {
      if (family == 0) {
        // a pure p-th power splits exactly when c already has a p-th root,
        // and that case never trips dynamic evaluation, so test it exactly
        TowerElement c = nonzero_low();
        if (tow::pe_root_in_tower(c, 1).has_value()) continue;
        f.c.assign(d + 1, tow::zero_elem(t));
        f.c[0] = tow::zero_elem(t) - c;
        f.c[d] = one;
        good = true;
      } else if (family == 1) {
        TowerElement c = nonzero_low();
        f.c.assign(d + 1, tow::zero_elem(t));
        f.c[0] = tow::zero_elem(t) - c;
        f.c[1] = tow::zero_elem(t) - one;
        f.c[d] = one;
        good = !detail::modulus_looks_split(t, f);
      } else {
        f.c.assign(d + 1, tow::zero_elem(t));
        TowerElement a = nonzero_low();
        f.c[0] = nonzero_low();
        f.c[1] = a;
        f.c[d] = one;
        good = !detail::modulus_looks_split(t, f);
      }
    }
    if (!good) break;
    t = tow::extend(t, "g" + std::to_string(st), f);
    total *= d;
    shape += " f" + std::to_string(family) + "d" + std::to_string(d);
  }
  return {std::move(t), std::move(shape)};
}

inline Report fuzz_towers(uint64_t seed, size_t count, FuzzBounds bounds = {}) {
  static const std::vector<std::string> suites = {
      "triple_agreement", "filtration_oracle", "dct", "skew", "classify"};
  std::mt19937_64 rng(seed);
  size_t built = 0, discarded = 0;
  struct Tally {
    size_t pass = 0, heur = 0;
    int64_t millis = 0;
  };
  std::map<std::string, Tally> tallies;
  std::vector<CheckResult> failures;
  std::vector<CheckResult> verbose_rows;
  auto wall_start = std::chrono::steady_clock::now();
  auto elapsed_ms = [](std::chrono::steady_clock::time_point from) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - from)
        .count();
  };

  for (size_t sample = 0; sample < count; ++sample) {
    auto sample_start = std::chrono::steady_clock::now();
    std::string shape;
    try {
      DrawnTower drawn = draw_tower(rng, bounds);
      shape = drawn.shape;
      detail::Context cx;
      cx.t = drawn.t;
      cx.seed = rng();
      cx.samples = 3;
      std::vector<CheckResult> results;
      for (const auto& name : suites) results.push_back(detail::run_one(cx, name));
      ++built;
      for (auto& r : results) {
        auto& tally = tallies[r.name];
        tally.millis += r.millis;
        if (bounds.verbose) {
          CheckResult row = r;
          row.name += "@sample" + std::to_string(sample);
          row.note = shape;
          verbose_rows.push_back(std::move(row));
        }
        if (r.status == "fail") {
          r.name += "@sample" + std::to_string(sample);
          failures.push_back(r);
        } else {
          ++tally.pass;
          if (r.status == "heuristic-pass") ++tally.heur;
        }
      }
    } catch (const AlgebraError& e) {
      // reducible moduli surface as dynamic-evaluation trips somewhere inside
      // a suite; such samples are discarded whole
      bool discardable = dynamic_cast<const ReducibleModulus*>(&e) ||
                         dynamic_cast<const NoGoodSpecialization*>(&e) ||
                         dynamic_cast<const NotAField*>(&e) ||
                         dynamic_cast<const LiftDivergence*>(&e);
      if (!discardable) throw;
      ++discarded;
      if (bounds.verbose) {
        CheckResult row;
        row.name = "discard@sample" + std::to_string(sample);
        row.status = "skip";
        row.note = shape + " :: " + e.what();
        row.millis = elapsed_ms(sample_start);
        verbose_rows.push_back(std::move(row));
      }
    }
  }

  Report rep;
  rep.scenario = "fuzz(seed=" + std::to_string(seed) +
                 ",count=" + std::to_string(count) + ")";
  CheckResult totals;
  totals.name = "samples";
  totals.status = "pass";
  totals.seed = seed;
  detail::put(totals, "requested", int64_t(count));
  detail::put(totals, "built", int64_t(built));
  detail::put(totals, "discarded", int64_t(discarded));
  totals.millis = elapsed_ms(wall_start);
  rep.checks.push_back(std::move(totals));
  for (const auto& name : suites) {
    CheckResult agg;
    agg.name = name;
    agg.seed = seed;
    auto it = tallies.find(name);
    size_t pass = it == tallies.end() ? 0 : it->second.pass;
    size_t heur = it == tallies.end() ? 0 : it->second.heur;
    size_t fail = 0;
    for (const auto& f : failures)
      if (f.name.rfind(name + "@", 0) == 0) ++fail;
    detail::put(agg, "pass", int64_t(pass));
    detail::put(agg, "fail", int64_t(fail));
    agg.millis = it == tallies.end() ? 0 : it->second.millis;
    agg.status = fail ? "fail" : (heur ? "heuristic-pass" : "pass");
    if (fail) agg.note = "see per-sample failures";
    rep.checks.push_back(std::move(agg));
  }
  for (auto& f : failures) rep.checks.push_back(std::move(f));
  for (auto& v : verbose_rows) rep.checks.push_back(std::move(v));
  return rep;
}

// ---------------------------------------------------------------------------
// Report emission.
// ---------------------------------------------------------------------------

inline std::string emit_report(const Report& rep, const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json out;
    out["scenario"] = rep.scenario;
    out["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : rep.checks) {
      nlohmann::ordered_json jc;
      jc["name"] = c.name;
      jc["status"] = c.status;
      nlohmann::ordered_json w;
      nlohmann::ordered_json dims;
      for (const auto& [k, v] : c.dims) dims[k] = v;
      w["dims"] = std::move(dims);
      if (c.group_order >= 0) w["group_order"] = c.group_order;
      nlohmann::ordered_json flags;
      for (const auto& [k, v] : c.flags) flags[k] = v;
      w["flags"] = std::move(flags);
      if (!c.note.empty()) w["note"] = c.note;
      jc["witnesses"] = std::move(w);
      jc["seed"] = c.seed;
      // timing is zeroed in the machine format so reports are reproducible
      jc["millis"] = 0;
      out["checks"].push_back(std::move(jc));
    }
    return out.dump(2) + "\n";
  }
  if (format != "text") throw AlgebraError("unknown report format: " + format);
  std::ostringstream os;
  os << "scenario " << rep.scenario << "\n";
  for (const auto& c : rep.checks) {
    os << "  " << c.name;
    for (size_t i = c.name.size(); i < 24; ++i) os << ' ';
    os << c.status;
    std::string detailstr;
    for (const auto& [k, v] : c.dims)
      detailstr += (detailstr.empty() ? "" : ", ") + k + "=" + std::to_string(v);
    for (const auto& [k, v] : c.flags)
      detailstr += (detailstr.empty() ? "" : ", ") + k + "=" + (v ? "1" : "0");
    if (c.group_order >= 0)
      detailstr += (detailstr.empty() ? "" : ", ") + std::string("|G|=") +
                   std::to_string(c.group_order);
    if (!detailstr.empty()) os << "  (" << detailstr << ")";
    os << "  [" << c.millis << "ms]";
    if (!c.note.empty()) os << "\n" << "    note: " << c.note;
    os << "\n";
  }
  return os.str();
}

}  // namespace hn
}  // namespace fext
