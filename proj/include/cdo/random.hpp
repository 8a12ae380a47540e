#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cdo/formula.hpp"
#include "cdo/model.hpp"
#include "cdo/priority.hpp"
#include "cdo/semantics.hpp"
#include "cdo/signature.hpp"

namespace cdo::gen {

using Rng = std::mt19937_64;

inline std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

/// Binary signature with exogenous U1..Un and endogenous X1..Xm.
inline std::shared_ptr<const Signature> binary_signature(std::size_t exo, std::size_t endo) {
  std::vector<std::pair<std::string, std::vector<std::string>>> u, v;
  for (std::size_t i = 1; i <= exo; ++i) u.push_back({"U" + std::to_string(i), {"0", "1"}});
  for (std::size_t i = 1; i <= endo; ++i) v.push_back({"X" + std::to_string(i), {"0", "1"}});
  return std::make_shared<const Signature>(std::move(u), std::move(v));
}

inline Atom atom(const Signature& sig, Rng& rng) {
  const auto v = static_cast<VarId>(below(rng, sig.size()));
  return {v, static_cast<ValueId>(below(rng, sig.range_size(v)))};
}

inline Atom endogenous_atom(const Signature& sig, Rng& rng) {
  const auto endo = sig.endogenous();
  const VarId v = endo[below(rng, endo.size())];
  return {v, static_cast<ValueId>(below(rng, sig.range_size(v)))};
}

inline Context context(const Signature& sig, Rng& rng) { return sig.context(below(rng, sig.context_count())); }

/// Random intervention on up to `max_size` distinct endogenous variables.
inline Intervention intervention(const Signature& sig, Rng& rng, std::size_t max_size, std::size_t min_size = 0) {
  auto endo = sig.endogenous();
  std::shuffle(endo.begin(), endo.end(), rng);
  const std::size_t hi = std::min(max_size, endo.size());
  const std::size_t n = std::min(hi, min_size) + below(rng, hi - std::min(hi, min_size) + 1);
  Intervention iv;
  for (std::size_t i = 0; i < n; ++i)
    iv.settings.push_back({endo[i], static_cast<ValueId>(below(rng, sig.range_size(endo[i])))});
  return iv.canonical();
}

struct ModelParams {
  /// Chance that an earlier variable becomes a parent.
  double edge = 0.5;
  /// Upper bound on the number of atoms the priority talks about.
  std::size_t priority_atoms = 5;
  /// Chance of an edge between two atoms consistent with a hidden ranking.
  double priority_edge = 0.4;
};

/// Random acyclic model with a random strict partial order.
inline CausalDeonticModel model(std::shared_ptr<const Signature> sig, Rng& rng, const ModelParams& params = {}) {
  auto order = sig->endogenous();
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<StructuralFunction> fns(sig->size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    StructuralFunction f;
    for (VarId u : sig->exogenous())
      if (coin(rng, params.edge)) f.parents.push_back(u);
    for (std::size_t j = 0; j < i; ++j)
      if (coin(rng, params.edge)) f.parents.push_back(order[j]);
    std::size_t rows = 1;
    for (VarId p : f.parents) rows *= sig->range_size(p);
    for (std::size_t r = 0; r < rows; ++r) f.table.push_back(static_cast<ValueId>(below(rng, sig->range_size(order[i]))));
    fns[static_cast<std::size_t>(order[i])] = std::move(f);
  }
  auto atoms = sig->all_atoms();
  std::shuffle(atoms.begin(), atoms.end(), rng);
  atoms.resize(std::min(atoms.size(), below(rng, params.priority_atoms + 1)));
  PriorityOrdering p;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if (coin(rng, params.priority_edge)) p.edges.insert({atoms[i], atoms[j]});
  p.domain = atoms;
  std::sort(p.domain.begin(), p.domain.end());
  auto fset = std::make_shared<const FunctionSet>(sig, std::move(fns));
  return CausalDeonticModel(CausalModel(fset, context(*sig, rng)), p);
}

struct FormulaParams {
  std::size_t max_intervention = 2;
  bool prec = true;
  bool contexts = true;
  bool macros = false;
  /// Priority atoms are drawn from here when nonempty.
  std::vector<Atom> prec_atoms;
};

inline Formula formula(const Signature& sig, Rng& rng, int depth, const FormulaParams& params = {}) {
  auto prec_atom = [&] { return params.prec_atoms.empty() ? atom(sig, rng) : params.prec_atoms[below(rng, params.prec_atoms.size())]; };
  if (depth <= 0 || coin(rng, 0.2)) {
    if (params.prec && coin(rng, 0.15)) return mk::prec(prec_atom(), prec_atom());
    if (params.macros && coin(rng, 0.1)) {
      switch (below(rng, 4)) {
        case 0: return mk::leq(context(sig, rng), context(sig, rng));
        case 1:
          return mk::leq_post(intervention(sig, rng, params.max_intervention), context(sig, rng),
                              intervention(sig, rng, params.max_intervention), context(sig, rng));
        case 2: return mk::oblig(atom(sig, rng), intervention(sig, rng, params.max_intervention, 1), context(sig, rng));
        default: return mk::permit(atom(sig, rng), intervention(sig, rng, params.max_intervention, 1), context(sig, rng));
      }
    }
    return mk::atom(atom(sig, rng));
  }
  switch (below(rng, params.contexts ? 6 : 5)) {
    case 0: return mk::neg(formula(sig, rng, depth - 1, params));
    case 1: return mk::conj(formula(sig, rng, depth - 1, params), formula(sig, rng, depth - 1, params));
    case 2: return mk::disj(formula(sig, rng, depth - 1, params), formula(sig, rng, depth - 1, params));
    case 3: return mk::implies(formula(sig, rng, depth - 1, params), formula(sig, rng, depth - 1, params));
    case 4: return mk::after(intervention(sig, rng, params.max_intervention, 1), formula(sig, rng, depth - 1, params));
    default: return mk::at(context(sig, rng), formula(sig, rng, depth - 1, params));
  }
}

}  // namespace cdo::gen
