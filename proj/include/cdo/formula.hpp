#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "cdo/signature.hpp"

namespace cdo {

struct FormulaNode;

/// Immutable formula of the deontic-causal language. Cheap to copy: the
/// node tree is shared.
class Formula {
 public:
  Formula() = default;
  explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}

  const FormulaNode& node() const { return *node_; }
  const FormulaNode* get() const { return node_.get(); }
  explicit operator bool() const { return node_ != nullptr; }

  template <class T>
  const T* as() const;

  template <class T>
  bool is() const { return as<T>() != nullptr; }

 private:
  std::shared_ptr<const FormulaNode> node_;
};

struct AtomF {
  Atom atom;
};
struct NotF {
  Formula sub;
};
struct AndF {
  Formula left, right;
};
/// [X⃗=x⃗]φ
struct InterveneF {
  Intervention iv;
  Formula body;
};
/// X=x ≺ Y=y: Y=y has higher priority than X=x.
struct PrecF {
  Atom lower, higher;
};
/// φ^u
struct AtContextF {
  Context ctx;
  Formula body;
};
/// The world at `rhs` is at least as good as the world at `lhs`.
struct LeqCtxF {
  Context lhs, rhs;
};
/// The outcome of `rhs_iv` at `rhs` is at least as good as that of `lhs_iv` at `lhs`.
struct LeqPostF {
  Intervention lhs_iv;
  Context lhs;
  Intervention rhs_iv;
  Context rhs;
};
/// Instrumental obligation: to reach `goal` in context `ctx`, do `action`.
struct ObligF {
  Atom goal;
  Intervention action;
  Context ctx;
};
/// Instrumental permission: to reach `goal` in context `ctx`, `action` may be done.
struct PermitF {
  Atom goal;
  Intervention action;
  Context ctx;
};

struct FormulaNode {
  std::variant<AtomF, NotF, AndF, InterveneF, PrecF, AtContextF, LeqCtxF, LeqPostF, ObligF, PermitF> v;
};

template <class T>
const T* Formula::as() const {
  return node_ ? std::get_if<T>(&node_->v) : nullptr;
}

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

inline bool is_macro(const Formula& f) {
  return f.is<LeqCtxF>() || f.is<LeqPostF>() || f.is<ObligF>() || f.is<PermitF>();
}

/// Structural equality.
inline bool operator==(const Formula& a, const Formula& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a.node().v.index() != b.node().v.index()) return false;
  return std::visit(
      overloaded{
          [&](const AtomF& x) { return x.atom == b.as<AtomF>()->atom; },
          [&](const NotF& x) { return x.sub == b.as<NotF>()->sub; },
          [&](const AndF& x) { return x.left == b.as<AndF>()->left && x.right == b.as<AndF>()->right; },
          [&](const InterveneF& x) { return x.iv == b.as<InterveneF>()->iv && x.body == b.as<InterveneF>()->body; },
          [&](const PrecF& x) { return x.lower == b.as<PrecF>()->lower && x.higher == b.as<PrecF>()->higher; },
          [&](const AtContextF& x) { return x.ctx == b.as<AtContextF>()->ctx && x.body == b.as<AtContextF>()->body; },
          [&](const LeqCtxF& x) { return x.lhs == b.as<LeqCtxF>()->lhs && x.rhs == b.as<LeqCtxF>()->rhs; },
          [&](const LeqPostF& x) {
            const auto* y = b.as<LeqPostF>();
            return x.lhs_iv == y->lhs_iv && x.lhs == y->lhs && x.rhs_iv == y->rhs_iv && x.rhs == y->rhs;
          },
          [&](const ObligF& x) {
            const auto* y = b.as<ObligF>();
            return x.goal == y->goal && x.action == y->action && x.ctx == y->ctx;
          },
          [&](const PermitF& x) {
            const auto* y = b.as<PermitF>();
            return x.goal == y->goal && x.action == y->action && x.ctx == y->ctx;
          },
      },
      a.node().v);
}

inline bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

/// Formula constructors. `|`, `->` and `<->` are sugar over `!` and `&`.
namespace mk {

template <class T>
Formula make(T node) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{std::move(node)}));
}

inline Formula atom(Atom a) { return make(AtomF{a}); }
inline Formula neg(Formula f) { return make(NotF{std::move(f)}); }
inline Formula conj(Formula a, Formula b) { return make(AndF{std::move(a), std::move(b)}); }
inline Formula disj(Formula a, Formula b) { return neg(conj(neg(std::move(a)), neg(std::move(b)))); }
inline Formula implies(Formula a, Formula b) { return neg(conj(std::move(a), neg(std::move(b)))); }
inline Formula iff(Formula a, Formula b) { return conj(implies(a, b), implies(b, a)); }
inline Formula after(Intervention iv, Formula f) { return make(InterveneF{std::move(iv), std::move(f)}); }
inline Formula prec(Atom lower, Atom higher) { return make(PrecF{lower, higher}); }
inline Formula at(Context u, Formula f) { return make(AtContextF{std::move(u), std::move(f)}); }
inline Formula leq(Context u, Context u2) { return make(LeqCtxF{std::move(u), std::move(u2)}); }
inline Formula leq_post(Intervention i1, Context u, Intervention i2, Context u2) {
  return make(LeqPostF{std::move(i1), std::move(u), std::move(i2), std::move(u2)});
}
inline Formula oblig(Atom goal, Intervention action, Context u) { return make(ObligF{goal, std::move(action), std::move(u)}); }
inline Formula permit(Atom goal, Intervention action, Context u) { return make(PermitF{goal, std::move(action), std::move(u)}); }

/// Left-folded conjunction; `empty` is returned for no operands.
inline Formula all_of(const std::vector<Formula>& fs, const Formula& empty) {
  if (fs.empty()) return empty;
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
  return acc;
}

/// Left-folded disjunction; `empty` is returned for no operands.
inline Formula any_of(const std::vector<Formula>& fs, const Formula& empty) {
  if (fs.empty()) return empty;
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
  return acc;
}

/// A core-language tautology over the signature's first endogenous atom.
inline Formula verum(const Signature& sig) {
  Formula a = atom({sig.endogenous().front(), 0});
  return neg(conj(a, neg(a)));
}
inline Formula falsum(const Signature& sig) { return neg(verum(sig)); }

}  // namespace mk

/// Number of nodes, counting shared subtrees once per occurrence.
inline std::size_t formula_size(const Formula& f) {
  return std::visit(overloaded{
                        [](const NotF& x) { return 1 + formula_size(x.sub); },
                        [](const AndF& x) { return 1 + formula_size(x.left) + formula_size(x.right); },
                        [](const InterveneF& x) { return 1 + formula_size(x.body); },
                        [](const AtContextF& x) { return 1 + formula_size(x.body); },
                        [](const auto&) -> std::size_t { return 1; },
                    },
                    f.node().v);
}

/// True iff no macro node occurs in `f`.
inline bool macro_free(const Formula& f) {
  return std::visit(overloaded{
                        [](const NotF& x) { return macro_free(x.sub); },
                        [](const AndF& x) { return macro_free(x.left) && macro_free(x.right); },
                        [](const InterveneF& x) { return macro_free(x.body); },
                        [](const AtContextF& x) { return macro_free(x.body); },
                        [](const AtomF&) { return true; },
                        [](const PrecF&) { return true; },
                        [](const auto&) { return false; },
                    },
                    f.node().v);
}

}  // namespace cdo
