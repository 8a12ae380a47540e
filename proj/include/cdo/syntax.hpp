#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "cdo/error.hpp"
#include "cdo/formula.hpp"
#include "cdo/signature.hpp"

namespace cdo {

// Concrete grammar (whitespace between tokens is ignored):
//
//   formula  = implies ;
//   implies  = or [ "->" implies ] ;
//   or       = and { "|" and } ;
//   and      = scoped { "&" scoped } ;
//   scoped   = unary { "@" context } ;
//   unary    = "!" unary | "[" [ atoms ] "]" unary | primary ;
//   primary  = "(" formula ")" | atom [ "<" atom ] | macro ;
//   macro    = ( "O" | "P" ) "{" "goal" ":" atom ";" "do" ":" atoms "}" "@" context
//            | "leq" "(" side "," side ")" ;
//   side     = [ "[" [ atoms ] "]" ] "@" context ;
//   atoms    = atom { "," atom } ;
//   context  = "{" [ atoms ] "}" ;
//   atom     = word "=" word ;
//
// A `leq` with no bracket on either side is the plain context comparison.

namespace detail {

enum class Tok { Word, Bang, Amp, Bar, Arrow, LBrack, RBrack, LParen, RParen, LBrace, RBrace, Comma, Semi, Colon, Eq, Lt, At, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t column;
};

inline std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    const std::size_t col = i + 1;
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { ++i; continue; }
    if (is_value_char(c)) {
      std::size_t j = i;
      while (j < s.size() && is_value_char(s[j])) ++j;
      out.push_back({Tok::Word, std::string(s.substr(i, j - i)), col});
      i = j;
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::Arrow, "->", col});
      i += 2;
      continue;
    }
    Tok k;
    switch (c) {
      case '!': k = Tok::Bang; break;
      case '&': k = Tok::Amp; break;
      case '|': k = Tok::Bar; break;
      case '[': k = Tok::LBrack; break;
      case ']': k = Tok::RBrack; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case ',': k = Tok::Comma; break;
      case ';': k = Tok::Semi; break;
      case ':': k = Tok::Colon; break;
      case '=': k = Tok::Eq; break;
      case '<': k = Tok::Lt; break;
      case '@': k = Tok::At; break;
      default: throw ParseError(col, std::string("unexpected character '") + c + "'");
    }
    out.push_back({k, std::string(1, c), col});
    ++i;
  }
  out.push_back({Tok::End, "", s.size() + 1});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const Signature& sig) : toks_(lex(text)), sig_(sig) {}

  Formula parse_all() {
    Formula f = implies();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(peek().column, msg); }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const { throw ParseError(t.column, msg); }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what + (peek().kind == Tok::End ? " at end of input" : ", found '" + peek().text + "'"));
    return next();
  }

  Formula implies() {
    Formula lhs = disjunction();
    if (accept(Tok::Arrow)) return mk::implies(lhs, implies());
    return lhs;
  }

  Formula disjunction() {
    Formula acc = conjunction();
    while (accept(Tok::Bar)) acc = mk::disj(acc, conjunction());
    return acc;
  }

  Formula conjunction() {
    Formula acc = scoped();
    while (accept(Tok::Amp)) acc = mk::conj(acc, scoped());
    return acc;
  }

  Formula scoped() {
    Formula f = unary();
    while (accept(Tok::At)) f = mk::at(context(), f);
    return f;
  }

  Formula unary() {
    if (accept(Tok::Bang)) return mk::neg(unary());
    if (peek().kind == Tok::LBrack) {
      Intervention iv = bracket();
      return mk::after(std::move(iv), unary());
    }
    return primary();
  }

  Formula primary() {
    if (accept(Tok::LParen)) {
      Formula f = implies();
      expect(Tok::RParen, "')'");
      return f;
    }
    const Token& t = peek();
    if (t.kind != Tok::Word) fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
    if ((t.text == "O" || t.text == "P") && peek(1).kind == Tok::LBrace) return deontic();
    if (t.text == "leq" && peek(1).kind == Tok::LParen) return comparison();
    Atom a = atom();
    if (accept(Tok::Lt)) return mk::prec(a, atom());
    return mk::atom(a);
  }

  Formula deontic() {
    const bool obligation = next().text == "O";
    expect(Tok::LBrace, "'{'");
    keyword("goal");
    expect(Tok::Colon, "':'");
    Atom goal = atom();
    expect(Tok::Semi, "';'");
    keyword("do");
    expect(Tok::Colon, "':'");
    const Token& start = peek();
    Intervention action = settings(Tok::RBrace);
    if (action.empty()) fail_at(start, "action must set at least one variable");
    expect(Tok::RBrace, "'}'");
    expect(Tok::At, "'@' and a context after the macro");
    Context u = context();
    return obligation ? mk::oblig(goal, std::move(action), std::move(u)) : mk::permit(goal, std::move(action), std::move(u));
  }

  Formula comparison() {
    next();
    expect(Tok::LParen, "'('");
    auto [lb, li, lu] = side();
    expect(Tok::Comma, "','");
    auto [rb, ri, ru] = side();
    expect(Tok::RParen, "')'");
    if (!lb && !rb) return mk::leq(std::move(lu), std::move(ru));
    return mk::leq_post(std::move(li), std::move(lu), std::move(ri), std::move(ru));
  }

  std::tuple<bool, Intervention, Context> side() {
    bool bracketed = false;
    Intervention iv;
    if (peek().kind == Tok::LBrack) {
      bracketed = true;
      iv = bracket();
    }
    expect(Tok::At, "'@'");
    return {bracketed, std::move(iv), context()};
  }

  void keyword(const char* word) {
    if (peek().kind != Tok::Word || peek().text != word) fail(std::string("expected '") + word + "'");
    next();
  }

  Intervention bracket() {
    expect(Tok::LBrack, "'['");
    Intervention iv = settings(Tok::RBrack);
    expect(Tok::RBrack, "']'");
    return iv;
  }

  /// Comma-separated endogenous settings up to (not including) `close`.
  Intervention settings(Tok close) {
    Intervention iv;
    if (peek().kind == close) return iv;
    std::vector<bool> seen(sig_.size(), false);
    do {
      const Token& at = peek();
      Atom a = atom();
      if (sig_.is_exogenous(a.var)) fail_at(at, "cannot intervene on exogenous variable " + sig_.var(a.var).name);
      if (seen[static_cast<std::size_t>(a.var)]) fail_at(at, "variable " + sig_.var(a.var).name + " set twice");
      seen[static_cast<std::size_t>(a.var)] = true;
      iv.settings.push_back(a);
    } while (accept(Tok::Comma));
    return iv;
  }

  Context context() {
    const Token& open = expect(Tok::LBrace, "'{'");
    Context u;
    u.values.assign(sig_.exogenous_count(), kFree);
    if (peek().kind != Tok::RBrace) {
      do {
        const Token& at = peek();
        Atom a = atom();
        if (!sig_.is_exogenous(a.var)) fail_at(at, "context assigns endogenous variable " + sig_.var(a.var).name);
        if (u.values[static_cast<std::size_t>(a.var)] != kFree) fail_at(at, "variable " + sig_.var(a.var).name + " set twice in context");
        u.values[static_cast<std::size_t>(a.var)] = a.value;
      } while (accept(Tok::Comma));
    }
    expect(Tok::RBrace, "'}'");
    for (std::size_t i = 0; i < u.values.size(); ++i)
      if (u.values[i] == kFree) fail_at(open, "context is not total: missing " + sig_.var(static_cast<VarId>(i)).name);
    return u;
  }

  Atom atom() {
    const Token& name = peek();
    if (name.kind != Tok::Word) fail(name.kind == Tok::End ? "expected an atom at end of input" : "expected an atom, found '" + name.text + "'");
    next();
    const VarId v = sig_.find(name.text);
    if (v < 0) fail_at(name, "unknown variable '" + name.text + "'");
    expect(Tok::Eq, "'='");
    const Token& value = peek();
    if (value.kind != Tok::Word) fail("expected a value for " + name.text);
    next();
    const ValueId x = sig_.find_value(v, value.text);
    if (x < 0) fail_at(value, "value '" + value.text + "' is not in the range of " + name.text);
    return {v, x};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Signature& sig_;
};

enum Level { kImplies = 1, kOr, kAnd, kScoped, kUnary, kPrimary };

class Printer {
 public:
  explicit Printer(const Signature& sig) : sig_(sig) {}

  std::string print(const Formula& f, int need) const {
    int level = kPrimary;
    std::string s = render(f, level);
    return level < need ? "(" + s + ")" : s;
  }

 private:
  std::string render(const Formula& f, int& level) const {
    return std::visit(
        overloaded{
            [&](const AtomF& x) { level = kPrimary; return sig_.atom_string(x.atom); },
            [&](const NotF& x) -> std::string {
              if (const auto* a = x.sub.as<AndF>()) {
                const auto* l = a->left.as<NotF>();
                const auto* r = a->right.as<NotF>();
                if (l && r) {
                  level = kOr;
                  return print(l->sub, kOr) + " | " + print(r->sub, kAnd);
                }
                if (r) {
                  level = kImplies;
                  return print(a->left, kOr) + " -> " + print(r->sub, kImplies);
                }
              }
              level = kUnary;
              return "!" + print(x.sub, kUnary);
            },
            [&](const AndF& x) {
              level = kAnd;
              return print(x.left, kAnd) + " & " + print(x.right, kScoped);
            },
            [&](const InterveneF& x) {
              level = kUnary;
              return sig_.intervention_string(x.iv) + print(x.body, kUnary);
            },
            [&](const PrecF& x) {
              level = kScoped;  // bracketed under prefixes for readability
              return sig_.atom_string(x.lower) + " < " + sig_.atom_string(x.higher);
            },
            [&](const AtContextF& x) {
              level = kScoped;
              return print(x.body, kScoped) + " @ " + sig_.context_string(x.ctx);
            },
            [&](const LeqCtxF& x) {
              level = kPrimary;
              return "leq(@" + sig_.context_string(x.lhs) + ", @" + sig_.context_string(x.rhs) + ")";
            },
            [&](const LeqPostF& x) {
              level = kPrimary;
              return "leq(" + sig_.intervention_string(x.lhs_iv) + " @ " + sig_.context_string(x.lhs) + ", " +
                     sig_.intervention_string(x.rhs_iv) + " @ " + sig_.context_string(x.rhs) + ")";
            },
            [&](const ObligF& x) { level = kPrimary; return deontic("O", x.goal, x.action, x.ctx); },
            [&](const PermitF& x) { level = kPrimary; return deontic("P", x.goal, x.action, x.ctx); },
        },
        f.node().v);
  }

  std::string deontic(const char* op, Atom goal, const Intervention& action, const Context& u) const {
    std::string acts = sig_.intervention_string(action);
    acts = acts.substr(1, acts.size() - 2);
    return std::string(op) + "{goal: " + sig_.atom_string(goal) + "; do: " + acts + "} @ " + sig_.context_string(u);
  }

  const Signature& sig_;
};

}  // namespace detail

/// Parses and type-checks `text` against `sig`. Throws ParseError with a column.
inline Formula parse(std::string_view text, const Signature& sig) { return detail::Parser(text, sig).parse_all(); }

/// Canonical text; parse(print(f)) == f.
inline std::string print(const Formula& f, const Signature& sig) { return detail::Printer(sig).print(f, detail::kImplies); }

/// Every variable occurring in an atom, intervention, priority atom or context of `f`.
inline std::set<VarId> variables_of(const Formula& f) {
  std::set<VarId> out;
  auto add_ctx = [&](const Context& u) {
    for (std::size_t i = 0; i < u.values.size(); ++i) out.insert(static_cast<VarId>(i));
  };
  auto add_iv = [&](const Intervention& iv) {
    for (Atom a : iv.settings) out.insert(a.var);
  };
  auto walk = [&](auto&& self, const Formula& g) -> void {
    std::visit(overloaded{
                   [&](const AtomF& x) { out.insert(x.atom.var); },
                   [&](const NotF& x) { self(self, x.sub); },
                   [&](const AndF& x) { self(self, x.left); self(self, x.right); },
                   [&](const InterveneF& x) { add_iv(x.iv); self(self, x.body); },
                   [&](const PrecF& x) { out.insert(x.lower.var); out.insert(x.higher.var); },
                   [&](const AtContextF& x) { add_ctx(x.ctx); self(self, x.body); },
                   [&](const LeqCtxF& x) { add_ctx(x.lhs); add_ctx(x.rhs); },
                   [&](const LeqPostF& x) { add_iv(x.lhs_iv); add_iv(x.rhs_iv); add_ctx(x.lhs); add_ctx(x.rhs); },
                   [&](const ObligF& x) { out.insert(x.goal.var); add_iv(x.action); add_ctx(x.ctx); },
                   [&](const PermitF& x) { out.insert(x.goal.var); add_iv(x.action); add_ctx(x.ctx); },
               },
               g.node().v);
  };
  walk(walk, f);
  return out;
}

/// Atoms occurring on either side of a priority subformula.
inline std::set<Atom> priority_atoms(const Formula& f) {
  std::set<Atom> out;
  auto walk = [&](auto&& self, const Formula& g) -> void {
    std::visit(overloaded{
                   [&](const NotF& x) { self(self, x.sub); },
                   [&](const AndF& x) { self(self, x.left); self(self, x.right); },
                   [&](const InterveneF& x) { self(self, x.body); },
                   [&](const AtContextF& x) { self(self, x.body); },
                   [&](const PrecF& x) { out.insert(x.lower); out.insert(x.higher); },
                   [](const auto&) {},
               },
               g.node().v);
  };
  walk(walk, f);
  return out;
}

}  // namespace cdo
