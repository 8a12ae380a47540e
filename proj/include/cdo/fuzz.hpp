#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cdo/formula.hpp"
#include "cdo/random.hpp"
#include "cdo/semantics.hpp"
#include "cdo/signature.hpp"
#include "cdo/syntax.hpp"

namespace cdo {

struct SchemaReport {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  /// Printed form of the first falsified instance.
  std::string example;
};

struct FuzzReport {
  std::vector<SchemaReport> schemata;
  std::size_t models = 0;

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& s : schemata) n += s.failures;
    return n;
  }
  const SchemaReport* find(const std::string& name) const {
    for (const auto& s : schemata)
      if (s.name == name) return &s;
    return nullptr;
  }
};

struct FuzzOptions {
  std::size_t models = 100;
  std::size_t instances = 100;
  std::uint64_t seed = 1;
  /// Depth of the random subformulas plugged into schemata.
  int depth = 2;
};

namespace detail {

using SchemaFn = std::function<Formula(const CausalDeonticModel&, gen::Rng&)>;

struct Schema {
  std::string name;
  SchemaFn make;
};

inline Formula sub(const CausalDeonticModel& m, gen::Rng& rng, int depth) {
  gen::FormulaParams p;
  p.prec_atoms = m.priority().domain;
  if (p.prec_atoms.empty()) p.prec = false;
  return gen::formula(m.signature(), rng, depth, p);
}

/// Random propositional formula over `k` placeholders that is true under every valuation.
inline Formula tautology(gen::Rng& rng, const std::vector<Formula>& slots) {
  struct Skel {
    int kind;  // 0 slot, 1 not, 2 and
    std::size_t slot;
    std::shared_ptr<Skel> l, r;
  };
  std::function<std::shared_ptr<Skel>(int)> build = [&](int d) {
    auto s = std::make_shared<Skel>();
    if (d == 0 || gen::coin(rng, 0.25)) {
      s->kind = 0;
      s->slot = gen::below(rng, slots.size());
    } else if (gen::coin(rng, 0.4)) {
      s->kind = 1;
      s->l = build(d - 1);
    } else {
      s->kind = 2;
      s->l = build(d - 1);
      s->r = build(d - 1);
    }
    return s;
  };
  std::function<bool(const Skel&, unsigned)> value = [&](const Skel& s, unsigned bits) -> bool {
    switch (s.kind) {
      case 0: return (bits >> s.slot) & 1u;
      case 1: return !value(*s.l, bits);
      default: return value(*s.l, bits) && value(*s.r, bits);
    }
  };
  std::function<Formula(const Skel&)> render = [&](const Skel& s) -> Formula {
    switch (s.kind) {
      case 0: return slots[s.slot];
      case 1: return mk::neg(render(*s.l));
      default: return mk::conj(render(*s.l), render(*s.r));
    }
  };
  for (int attempt = 0; attempt < 400; ++attempt) {
    auto s = build(4);
    bool taut = true;
    for (unsigned bits = 0; bits < (1u << slots.size()) && taut; ++bits) taut = value(*s, bits);
    if (taut) return render(*s);
  }
  // (a -> b) -> (!b -> !a)
  const Formula& a = slots[0];
  const Formula& b = slots[1 % slots.size()];
  return mk::implies(mk::implies(a, b), mk::implies(mk::neg(b), mk::neg(a)));
}

/// Y ⇝ Z: some setting of the other endogenous variables lets Y change Z.
inline Formula influences(const Signature& sig, VarId y, VarId z) {
  std::vector<VarId> others;
  for (VarId v : sig.endogenous())
    if (v != y && v != z) others.push_back(v);
  std::vector<Formula> cases;
  for (std::size_t mask = 0; mask < (std::size_t{1} << others.size()); ++mask) {
    std::vector<VarId> w;
    for (std::size_t i = 0; i < others.size(); ++i)
      if (mask >> i & 1u) w.push_back(others[i]);
    Intervention base;
    for (VarId v : w) base.settings.push_back({v, 0});
    while (true) {
      for (std::size_t y1 = 0; y1 < sig.range_size(y); ++y1)
        for (std::size_t y2 = 0; y2 < sig.range_size(y); ++y2)
          for (std::size_t z1 = 0; z1 < sig.range_size(z); ++z1)
            for (std::size_t z2 = 0; z2 < sig.range_size(z); ++z2) {
              if (y1 == y2 || z1 == z2) continue;
              Intervention a = base, b = base;
              a.settings.push_back({y, static_cast<ValueId>(y1)});
              b.settings.push_back({y, static_cast<ValueId>(y2)});
              cases.push_back(mk::conj(mk::after(a.canonical(), mk::atom({z, static_cast<ValueId>(z2)})),
                                       mk::after(b.canonical(), mk::atom({z, static_cast<ValueId>(z1)}))));
            }
      std::size_t i = base.settings.size();
      bool carry = true;
      while (carry && i > 0) {
        --i;
        auto& s = base.settings[i];
        if (static_cast<std::size_t>(++s.value) < sig.range_size(s.var)) carry = false;
        else s.value = 0;
      }
      if (carry) break;
    }
  }
  return mk::any_of(cases, mk::falsum(sig));
}

inline Intervention endogenous_iv(const Signature& sig, gen::Rng& rng) { return gen::intervention(sig, rng, 2); }

inline std::vector<Schema> schemata() {
  using M = const CausalDeonticModel&;
  using R = gen::Rng&;
  std::vector<Schema> out;
  out.push_back({"P", [](M m, R rng) {
                   std::vector<Formula> slots;
                   for (int i = 0; i < 3; ++i) slots.push_back(sub(m, rng, 2));
                   return tautology(rng, slots);
                 }});
  out.push_back({"A1", [](M m, R rng) {
                   const auto& sig = m.signature();
                   const Intervention x = endogenous_iv(sig, rng);
                   const auto y = static_cast<VarId>(gen::below(rng, sig.size()));
                   const auto n = sig.range_size(y);
                   if (n < 2) return mk::verum(sig);
                   const auto a = static_cast<ValueId>(gen::below(rng, n));
                   const auto b = static_cast<ValueId>((static_cast<std::size_t>(a) + 1 + gen::below(rng, n - 1)) % n);
                   return mk::implies(mk::after(x, mk::atom({y, a})), mk::neg(mk::after(x, mk::atom({y, b}))));
                 }});
  out.push_back({"A2", [](M m, R rng) {
                   const auto& sig = m.signature();
                   const Intervention x = endogenous_iv(sig, rng);
                   const auto y = static_cast<VarId>(gen::below(rng, sig.size()));
                   std::vector<Formula> cases;
                   for (std::size_t v = 0; v < sig.range_size(y); ++v) cases.push_back(mk::after(x, mk::atom({y, static_cast<ValueId>(v)})));
                   return mk::any_of(cases, mk::falsum(sig));
                 }});
  out.push_back({"A3", [](M m, R rng) {
                   const auto& sig = m.signature();
                   const Atom ya = gen::endogenous_atom(sig, rng);
                   Intervention x;
                   for (Atom s : endogenous_iv(sig, rng).settings)
                     if (s.var != ya.var) x.settings.push_back(s);
                   const Atom z = gen::atom(sig, rng);
                   Intervention xy = x;
                   xy.settings.push_back(ya);
                   return mk::implies(mk::conj(mk::after(x, mk::atom(ya)), mk::after(x, mk::atom(z))),
                                      mk::after(xy.canonical(), mk::atom(z)));
                 }});
  out.push_back({"A4", [](M m, R rng) {
                   const auto& sig = m.signature();
                   Intervention x = gen::intervention(sig, rng, 3, 1);
                   const Atom y = x.settings[gen::below(rng, x.settings.size())];
                   return mk::after(x, mk::atom(y));
                 }});
  out.push_back({"A5", [](M m, R rng) {
                   const auto& sig = m.signature();
                   auto endo = sig.endogenous();
                   std::shuffle(endo.begin(), endo.end(), rng);
                   const std::size_t k = 1 + gen::below(rng, std::max<std::size_t>(1, std::min<std::size_t>(3, endo.size() - 1)));
                   if (endo.size() < 2) return mk::verum(sig);
                   std::vector<Formula> chain;
                   for (std::size_t i = 0; i < k; ++i) chain.push_back(influences(sig, endo[i], endo[i + 1]));
                   return mk::implies(mk::all_of(chain, mk::verum(sig)), mk::neg(influences(sig, endo[k], endo[0])));
                 }});
  out.push_back({"A_not", [](M m, R rng) {
                   const Intervention x = endogenous_iv(m.signature(), rng);
                   const Formula f = sub(m, rng, 2);
                   return mk::iff(mk::after(x, mk::neg(f)), mk::neg(mk::after(x, f)));
                 }});
  out.push_back({"A_and", [](M m, R rng) {
                   const Intervention x = endogenous_iv(m.signature(), rng);
                   const Formula f = sub(m, rng, 2), g = sub(m, rng, 2);
                   return mk::iff(mk::after(x, mk::conj(f, g)), mk::conj(mk::after(x, f), mk::after(x, g)));
                 }});
  out.push_back({"A_nested", [](M m, R rng) {
                   const auto& sig = m.signature();
                   const Intervention x = endogenous_iv(sig, rng), y = endogenous_iv(sig, rng);
                   const Formula f = sub(m, rng, 2);
                   Intervention merged;
                   for (Atom s : x.settings)
                     if (std::none_of(y.settings.begin(), y.settings.end(), [&](Atom t) { return t.var == s.var; })) merged.settings.push_back(s);
                   for (Atom t : y.settings) merged.settings.push_back(t);
                   return mk::iff(mk::after(x, mk::after(y, f)), mk::after(merged.canonical(), f));
                 }});
  auto prec_atom = [](M m, R rng) {
    const auto& d = m.priority().domain;
    return d.empty() || gen::coin(rng, 0.2) ? gen::atom(m.signature(), rng) : d[gen::below(rng, d.size())];
  };
  out.push_back({"Asym", [prec_atom](M m, R rng) {
                   const Atom a = prec_atom(m, rng), b = prec_atom(m, rng);
                   return mk::implies(mk::prec(a, b), mk::neg(mk::prec(b, a)));
                 }});
  out.push_back({"Trans", [prec_atom](M m, R rng) {
                   const Atom a = prec_atom(m, rng), b = prec_atom(m, rng), c = prec_atom(m, rng);
                   return mk::implies(mk::conj(mk::prec(a, b), mk::prec(b, c)), mk::prec(a, c));
                 }});
  out.push_back({"G_and", [](M m, R rng) {
                   const Context u = gen::context(m.signature(), rng);
                   const Formula f = sub(m, rng, 2), g = sub(m, rng, 2);
                   return mk::iff(mk::at(u, mk::conj(f, g)), mk::conj(mk::at(u, f), mk::at(u, g)));
                 }});
  out.push_back({"G_not", [](M m, R rng) {
                   const Context u = gen::context(m.signature(), rng);
                   const Formula f = sub(m, rng, 2);
                   return mk::iff(mk::neg(mk::at(u, f)), mk::at(u, mk::neg(f)));
                 }});
  out.push_back({"G_u", [](M m, R rng) {
                   const Context u = gen::context(m.signature(), rng), u2 = gen::context(m.signature(), rng);
                   const Formula f = sub(m, rng, 2);
                   return mk::iff(mk::at(u2, mk::at(u, f)), mk::at(u, f));
                 }});
  out.push_back({"G_iv", [](M m, R rng) {
                   const Context u = gen::context(m.signature(), rng);
                   const Intervention x = endogenous_iv(m.signature(), rng);
                   const Formula f = sub(m, rng, 2);
                   return mk::iff(mk::at(u, mk::after(x, f)), mk::after(x, mk::at(u, f)));
                 }});
  auto context_formula = [](const Signature& sig, const Context& u) {
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < u.values.size(); ++i) parts.push_back(mk::atom({static_cast<VarId>(i), u.values[i]}));
    return mk::all_of(parts, mk::verum(sig));
  };
  out.push_back({"Self", [context_formula](M m, R rng) {
                   const Context u = gen::context(m.signature(), rng);
                   return mk::at(u, context_formula(m.signature(), u));
                 }});
  out.push_back({"Incl", [context_formula](M m, R rng) {
                   const Context u = gen::context(m.signature(), rng);
                   const Formula f = sub(m, rng, 2);
                   return mk::implies(mk::conj(context_formula(m.signature(), u), f), mk::at(u, f));
                 }});
  return out;
}

}  // namespace detail

/// Names of the axiom schemata checked by fuzz_axioms, in report order.
inline std::vector<std::string> axiom_names() {
  std::vector<std::string> out;
  for (const auto& s : detail::schemata()) out.push_back(s.name);
  return out;
}

/// Evaluates random instances of every axiom schema, plus modus ponens and
/// both necessitation forms, on random models over `sig`.
inline FuzzReport fuzz_axioms(std::shared_ptr<const Signature> sig, const FuzzOptions& opts = {}) {
  gen::Rng rng(opts.seed);
  std::vector<CausalDeonticModel> models;
  for (std::size_t i = 0; i < std::max<std::size_t>(1, opts.models); ++i) models.push_back(gen::model(sig, rng));
  const auto schemata = detail::schemata();
  FuzzReport report;
  report.models = models.size();
  auto record = [&](SchemaReport& rep, const CausalDeonticModel& m, const Formula& f) {
    ++rep.instances;
    if (!eval(m, f)) {
      if (rep.failures++ == 0) rep.example = print(f, *sig);
    }
  };
  for (const auto& s : schemata) {
    SchemaReport rep{s.name, 0, 0, {}};
    for (std::size_t i = 0; i < opts.instances; ++i) {
      const auto& m = models[i % models.size()];
      record(rep, m, s.make(m, rng));
    }
    report.schemata.push_back(std::move(rep));
  }
  SchemaReport mp{"MP", 0, 0, {}}, nec_iv{"Nec_iv", 0, 0, {}}, nec_ctx{"Nec_ctx", 0, 0, {}};
  for (std::size_t i = 0; i < opts.instances; ++i) {
    const auto& m = models[i % models.size()];
    const Formula a = detail::sub(m, rng, opts.depth), b = detail::sub(m, rng, opts.depth);
    if (eval(m, a) && eval(m, mk::implies(a, b))) record(mp, m, b);
    const Formula theta = schemata[gen::below(rng, schemata.size())].make(m, rng);
    record(nec_iv, m, mk::after(gen::intervention(*sig, rng, 2, 1), theta));
    record(nec_ctx, m, mk::at(gen::context(*sig, rng), theta));
  }
  report.schemata.push_back(std::move(mp));
  report.schemata.push_back(std::move(nec_iv));
  report.schemata.push_back(std::move(nec_ctx));
  return report;
}

}  // namespace cdo
