#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "cdo/error.hpp"
#include "cdo/formula.hpp"
#include "cdo/semantics.hpp"
#include "cdo/signature.hpp"

namespace cdo {

inline constexpr std::size_t kDefaultExpansionCap = 20'000'000;

namespace detail {

class Expander {
 public:
  Expander(const Signature& sig, std::vector<Atom> domain, std::size_t cap)
      : sig_(sig), domain_(std::move(domain)), cap_(cap) {}

  Formula run(const Formula& f) {
    return std::visit(
        overloaded{
            [&](const AtomF&) { return f; },
            [&](const PrecF&) { return f; },
            [&](const NotF& x) {
              Formula s = run(x.sub);
              return s.get() == x.sub.get() ? f : count(mk::neg(s));
            },
            [&](const AndF& x) {
              Formula l = run(x.left), r = run(x.right);
              return l.get() == x.left.get() && r.get() == x.right.get() ? f : count(mk::conj(l, r));
            },
            [&](const InterveneF& x) {
              Formula b = run(x.body);
              return b.get() == x.body.get() ? f : count(mk::after(x.iv, b));
            },
            [&](const AtContextF& x) {
              Formula b = run(x.body);
              return b.get() == x.body.get() ? f : count(mk::at(x.ctx, b));
            },
            [&](const LeqCtxF& x) { return comparison({}, x.lhs, {}, x.rhs); },
            [&](const LeqPostF& x) { return comparison(x.lhs_iv, x.lhs, x.rhs_iv, x.rhs); },
            [&](const ObligF& x) { return deontic(x.goal, x.action, x.ctx, all_interventions(sig_)); },
            [&](const PermitF& x) { return deontic(x.goal, x.action, x.ctx, same_variables(x.action)); },
        },
        f.node().v);
  }

 private:
  Formula count(Formula f) {
    if (++made_ > cap_)
      throw CapExceeded("macro expansion exceeded the cap of " + std::to_string(cap_) + " nodes");
    return f;
  }

  /// (iv a)^u, leaving out an empty intervention.
  Formula observe(const Intervention& iv, const Context& u, Atom a) {
    Formula body = count(mk::atom(a));
    if (!iv.empty()) body = count(mk::after(iv, body));
    return count(mk::at(u, body));
  }

  Formula conj(Formula a, Formula b) { return count(mk::conj(std::move(a), std::move(b))); }
  Formula neg(Formula a) { return count(mk::neg(std::move(a))); }
  Formula implies(Formula a, Formula b) { return neg(conj(std::move(a), neg(std::move(b)))); }
  Formula disj(Formula a, Formula b) { return neg(conj(neg(std::move(a)), neg(std::move(b)))); }

  Formula fold(const std::vector<Formula>& fs, bool conjunctive) {
    if (fs.empty()) return conjunctive ? mk::verum(sig_) : mk::falsum(sig_);
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = conjunctive ? conj(acc, fs[i]) : disj(acc, fs[i]);
    return acc;
  }

  // world(i2,u2) is at least as good as world(i1,u1) over the domain
  Formula comparison(const Intervention& i1, const Context& u1, const Intervention& i2, const Context& u2) {
    std::vector<Formula> lhs, rhs;
    for (Atom a : domain_) {
      lhs.push_back(observe(i1, u1, a));
      rhs.push_back(observe(i2, u2, a));
    }
    std::vector<Formula> kept;
    for (std::size_t k = 0; k < domain_.size(); ++k) kept.push_back(implies(lhs[k], rhs[k]));
    std::vector<Formula> witnesses;
    for (std::size_t y = 0; y < domain_.size(); ++y) {
      std::vector<Formula> outranked;
      for (std::size_t z = 0; z < domain_.size(); ++z)
        outranked.push_back(implies(conj(lhs[z], neg(rhs[z])), count(mk::prec(domain_[z], domain_[y]))));
      witnesses.push_back(conj(conj(rhs[y], neg(lhs[y])), fold(outranked, true)));
    }
    return disj(fold(kept, true), fold(witnesses, false));
  }

  Formula deontic(Atom goal, const Intervention& action, const Context& u, const std::vector<Intervention>& alternatives) {
    Formula not_yet = count(mk::at(u, neg(count(mk::atom(goal)))));
    Formula reaches = observe(action, u, goal);
    std::vector<Formula> no_better;
    for (const Intervention& alt : alternatives)
      no_better.push_back(implies(observe(alt, u, goal), comparison(alt, u, action, u)));
    return conj(conj(not_yet, reaches), fold(no_better, true));
  }

  std::vector<Intervention> same_variables(const Intervention& action) const {
    std::vector<Intervention> out;
    Intervention cur = action;
    for (auto& s : cur.settings) s.value = 0;
    while (true) {
      out.push_back(cur);
      std::size_t i = cur.settings.size();
      bool carry = true;
      while (carry && i > 0) {
        --i;
        auto& s = cur.settings[i];
        if (static_cast<std::size_t>(++s.value) < sig_.range_size(s.var)) carry = false;
        else s.value = 0;
      }
      if (carry) return out;
    }
  }

  const Signature& sig_;
  std::vector<Atom> domain_;
  std::size_t cap_;
  std::size_t made_ = 0;
};

}  // namespace detail

/// Rewrites every macro into the core language, comparing worlds over the
/// atoms in `domain`. Throws CapExceeded once more than `cap` nodes are built.
inline Formula expand(const Formula& f, const Signature& sig, const std::vector<Atom>& domain,
                      std::size_t cap = kDefaultExpansionCap) {
  return detail::Expander(sig, domain, cap).run(f);
}

/// Expansion over every atom of the signature.
inline Formula expand(const Formula& f, const Signature& sig, std::size_t cap = kDefaultExpansionCap) {
  return expand(f, sig, sig.all_atoms(), cap);
}

/// Expansion over the priority domain of `m`, so that eval(m, f) == eval(m, expand(f, m)).
inline Formula expand(const Formula& f, const CausalDeonticModel& m, std::size_t cap = kDefaultExpansionCap) {
  return expand(f, m.signature(), m.priority().domain, cap);
}

}  // namespace cdo
