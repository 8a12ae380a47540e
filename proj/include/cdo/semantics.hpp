#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cdo/error.hpp"
#include "cdo/formula.hpp"
#include "cdo/model.hpp"
#include "cdo/priority.hpp"
#include "cdo/signature.hpp"

namespace cdo {

/// ⟨𝒮, ℱ, P, 𝒜⟩. The priority ordering is stored closed.
class CausalDeonticModel {
 public:
  /// Closes `priority`; throws PriorityCycleError or ModelError on a bad ordering.
  CausalDeonticModel(CausalModel causal, const PriorityOrdering& priority)
      : causal_(std::move(causal)), priority_(closure(priority, &causal_.signature())) {
    for (Atom a : priority_.domain)
      if (!causal_.signature().in_range(a.var, a.value)) throw ModelError("priority atom outside the signature");
  }

  const CausalModel& causal() const { return causal_; }
  const Signature& signature() const { return causal_.signature(); }
  const FunctionSet& functions() const { return causal_.functions(); }
  const Assignment& actual() const { return causal_.actual(); }
  const PriorityOrdering& priority() const { return priority_; }

  /// Same functions and ordering, actual world re-solved in context `u`.
  CausalDeonticModel at_context(const Context& u) const {
    return CausalDeonticModel(CausalModel(causal_.functions_ptr(), u), priority_, Closed{});
  }

  /// Intervened model; the ordering is carried over unchanged.
  CausalDeonticModel intervened(const Intervention& iv) const {
    return CausalDeonticModel(intervene(causal_, iv), priority_, Closed{});
  }

  friend bool operator==(const CausalDeonticModel& a, const CausalDeonticModel& b) {
    return a.causal_ == b.causal_ && a.priority_ == b.priority_;
  }

 private:
  struct Closed {};
  CausalDeonticModel(CausalModel causal, PriorityOrdering closed, Closed)
      : causal_(std::move(causal)), priority_(std::move(closed)) {}

  CausalModel causal_;
  PriorityOrdering priority_;
};

/// Strong Kleene truth values; Unknown only arises with partial providers.
enum class Truth : std::uint8_t { False, True, Unknown };

inline Truth truth(bool b) { return b ? Truth::True : Truth::False; }
inline Truth operator!(Truth t) {
  return t == Truth::Unknown ? t : (t == Truth::True ? Truth::False : Truth::True);
}

/// Why an instrumental obligation or permission fails.
enum class DeonticFailure { None, GoalAlreadyHolds, ActionMissesGoal, Dominated };

struct DeonticVerdict {
  bool holds = false;
  DeonticFailure failure = DeonticFailure::None;
  /// On Dominated: the first goal-reaching alternative that the action does not weakly beat.
  std::optional<Intervention> alternative;
  /// World reached by the action in the given context.
  Assignment outcome;
};

/// Provider over a concrete model: every world is known.
class ModelWorlds {
 public:
  explicit ModelWorlds(const CausalDeonticModel& m) : m_(m) {}

  const Signature& signature() const { return m_.signature(); }
  const PriorityOrdering* ordering() const { return &m_.priority(); }

  std::optional<Assignment> world(const Forced& forced, ContextId c) {
    auto key = std::make_pair(forced, c);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Assignment a = solve(m_.functions(), m_.signature().context(c), forced);
    cache_.emplace(std::move(key), a);
    return a;
  }

  ValueId value(const Forced& forced, ContextId c, VarId v) { return (*world(forced, c))[v]; }

  Truth prec(Atom lower, Atom higher) const { return truth(m_.priority().precedes(lower, higher)); }

 private:
  const CausalDeonticModel& m_;
  std::map<std::pair<Forced, ContextId>, Assignment> cache_;
};

/// Evaluates formulas against a world provider.
///
/// A provider supplies `signature()`, `value(forced, ctx, var)` (kFree when
/// unknown), `prec(lower, higher)`, and for macros `world(forced, ctx)` and
/// `ordering()`.
template <class Provider>
class Evaluator {
 public:
  explicit Evaluator(Provider& p) : p_(p), sig_(p.signature()) {}

  Truth eval(const Formula& f, const Forced& forced, ContextId ctx) {
    return std::visit(
        overloaded{
            [&](const AtomF& x) {
              const ValueId v = p_.value(forced, ctx, x.atom.var);
              return v == kFree ? Truth::Unknown : truth(v == x.atom.value);
            },
            [&](const NotF& x) { return !eval(x.sub, forced, ctx); },
            [&](const AndF& x) {
              const Truth l = eval(x.left, forced, ctx);
              if (l == Truth::False) return l;
              const Truth r = eval(x.right, forced, ctx);
              if (r == Truth::False) return r;
              return l == Truth::True && r == Truth::True ? Truth::True : Truth::Unknown;
            },
            [&](const InterveneF& x) { return eval(x.body, compose(forced, x.iv), ctx); },
            [&](const PrecF& x) { return p_.prec(x.lower, x.higher); },
            [&](const AtContextF& x) { return eval(x.body, forced, sig_.context_id(x.ctx)); },
            [&](const LeqCtxF& x) {
              return compare(forced, Intervention{}, sig_.context_id(x.lhs), Intervention{}, sig_.context_id(x.rhs));
            },
            [&](const LeqPostF& x) {
              return compare(forced, x.lhs_iv, sig_.context_id(x.lhs), x.rhs_iv, sig_.context_id(x.rhs));
            },
            [&](const ObligF& x) {
              auto v = verdict(forced, x.goal, x.action, sig_.context_id(x.ctx), false);
              return v ? truth(v->holds) : Truth::Unknown;
            },
            [&](const PermitF& x) {
              auto v = verdict(forced, x.goal, x.action, sig_.context_id(x.ctx), true);
              return v ? truth(v->holds) : Truth::Unknown;
            },
        },
        f.node().v);
  }

  /// Native decision of an obligation (or permission) under `forced`; nullopt
  /// if some needed world is unknown to the provider.
  std::optional<DeonticVerdict> verdict(const Forced& forced, Atom goal, const Intervention& action, ContextId ctx,
                                        bool permission) {
    const PriorityOrdering& order = ordering();
    DeonticVerdict out;
    auto here = p_.world(forced, ctx);
    auto done = p_.world(compose(forced, action), ctx);
    if (!here || !done) return std::nullopt;
    out.outcome = *done;
    if (here->satisfies(goal)) {
      out.failure = DeonticFailure::GoalAlreadyHolds;
      return out;
    }
    if (!done->satisfies(goal)) {
      out.failure = DeonticFailure::ActionMissesGoal;
      return out;
    }
    const auto alternatives = permission ? same_variable_alternatives(action) : every_intervention();
    for (const Intervention& alt : alternatives) {
      auto reached = p_.world(compose(forced, alt), ctx);
      if (!reached) return std::nullopt;
      if (!reached->satisfies(goal)) continue;
      if (!ideal_leq(order, *reached, *done)) {
        out.failure = DeonticFailure::Dominated;
        out.alternative = alt;
        return out;
      }
    }
    out.holds = true;
    return out;
  }

 private:
  const PriorityOrdering& ordering() const {
    const PriorityOrdering* o = p_.ordering();
    if (!o) throw std::logic_error("provider cannot evaluate comparison macros; expand them first");
    return *o;
  }

  Truth compare(const Forced& forced, const Intervention& i1, ContextId c1, const Intervention& i2, ContextId c2) {
    const PriorityOrdering& order = ordering();
    auto a = p_.world(compose(forced, i1), c1);
    auto b = p_.world(compose(forced, i2), c2);
    if (!a || !b) return Truth::Unknown;
    return truth(ideal_leq(order, *a, *b));
  }

  const std::vector<Intervention>& every_intervention() {
    if (!all_) all_ = all_interventions(sig_);
    return *all_;
  }

  std::vector<Intervention> same_variable_alternatives(const Intervention& action) const {
    std::vector<Intervention> out;
    Intervention cur = action;
    for (auto& s : cur.settings) s.value = 0;
    while (true) {
      out.push_back(cur);
      std::size_t i = cur.settings.size();
      while (i > 0) {
        --i;
        auto& s = cur.settings[i];
        if (static_cast<std::size_t>(++s.value) < sig_.range_size(s.var)) break;
        s.value = 0;
        if (i == 0) return out;
      }
      if (cur.settings.empty()) return out;
    }
  }

  Provider& p_;
  const Signature& sig_;
  std::optional<std::vector<Intervention>> all_;
};

/// M ⊨ φ. Macros are decided natively.
inline bool eval(const CausalDeonticModel& m, const Formula& f) {
  ModelWorlds worlds(m);
  Evaluator ev(worlds);
  const Truth t = ev.eval(f, no_forcing(m.signature()), m.signature().context_id(m.causal().context()));
  return t == Truth::True;
}

/// Decides O(goal : action) in context `u`, with a witness either way.
inline DeonticVerdict check_obligation(const CausalDeonticModel& m, Atom goal, const Intervention& action,
                                       const Context& u) {
  m.signature().check_intervention(action);
  ModelWorlds worlds(m);
  Evaluator ev(worlds);
  return *ev.verdict(no_forcing(m.signature()), goal, action, m.signature().context_id(u), false);
}

/// Decides P(goal : action) in context `u`, with a witness either way.
inline DeonticVerdict check_permission(const CausalDeonticModel& m, Atom goal, const Intervention& action,
                                       const Context& u) {
  m.signature().check_intervention(action);
  ModelWorlds worlds(m);
  Evaluator ev(worlds);
  return *ev.verdict(no_forcing(m.signature()), goal, action, m.signature().context_id(u), true);
}

/// Throws ModelError if any atom, intervention or context of `f` does not fit `sig`.
inline void typecheck(const Formula& f, const Signature& sig) {
  auto atom = [&](Atom a) {
    if (!sig.in_range(a.var, a.value)) throw ModelError("formula atom does not fit the signature");
  };
  auto ctx = [&](const Context& u) {
    if (u.values.size() != sig.exogenous_count()) throw ModelError("formula context is not total");
    for (std::size_t i = 0; i < u.values.size(); ++i) atom({static_cast<VarId>(i), u.values[i]});
  };
  auto walk = [&](auto&& self, const Formula& g) -> void {
    std::visit(overloaded{
                   [&](const AtomF& x) { atom(x.atom); },
                   [&](const NotF& x) { self(self, x.sub); },
                   [&](const AndF& x) { self(self, x.left); self(self, x.right); },
                   [&](const InterveneF& x) { sig.check_intervention(x.iv); self(self, x.body); },
                   [&](const PrecF& x) { atom(x.lower); atom(x.higher); },
                   [&](const AtContextF& x) { ctx(x.ctx); self(self, x.body); },
                   [&](const LeqCtxF& x) { ctx(x.lhs); ctx(x.rhs); },
                   [&](const LeqPostF& x) {
                     sig.check_intervention(x.lhs_iv);
                     sig.check_intervention(x.rhs_iv);
                     ctx(x.lhs);
                     ctx(x.rhs);
                   },
                   [&](const ObligF& x) { atom(x.goal); sig.check_intervention(x.action); ctx(x.ctx); },
                   [&](const PermitF& x) { atom(x.goal); sig.check_intervention(x.action); ctx(x.ctx); },
               },
               g.node().v);
  };
  walk(walk, f);
}

}  // namespace cdo
