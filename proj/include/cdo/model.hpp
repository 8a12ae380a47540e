#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cdo/error.hpp"
#include "cdo/signature.hpp"

namespace cdo {

/// A structural equation given as an explicit table over declared parents.
///
/// Row index is mixed radix over the parents' ranges, first parent most
/// significant. Missing rows hold kFree.
struct StructuralFunction {
  std::vector<VarId> parents;
  std::vector<ValueId> table;

  static StructuralFunction constant(ValueId v) { return {{}, {v}}; }

  bool is_constant() const { return parents.empty(); }

  friend bool operator==(const StructuralFunction&, const StructuralFunction&) = default;
};

/// Per-variable forced values (kFree where the structural function applies).
using Forced = std::vector<ValueId>;

inline Forced no_forcing(const Signature& sig) { return Forced(sig.size(), kFree); }

/// Overrides `base` with the settings of `iv`.
inline Forced compose(Forced base, const Intervention& iv) {
  for (Atom a : iv.settings) base[static_cast<std::size_t>(a.var)] = a.value;
  return base;
}

/// The forced settings as a canonical (variable-sorted) intervention.
inline Intervention to_intervention(const Forced& f) {
  Intervention iv;
  for (std::size_t v = 0; v < f.size(); ++v)
    if (f[v] != kFree) iv.settings.push_back({static_cast<VarId>(v), f[v]});
  return iv;
}

/// The set ℱ: one structural function per endogenous variable.
///
/// Semantic parents (declared parents the table actually depends on) and a
/// topological order over them are computed once at construction.
class FunctionSet {
 public:
  /// `functions` is indexed by VarId; entries for exogenous variables are ignored.
  /// Throws ModelError if a parent id is unknown or a table has the wrong size.
  FunctionSet(std::shared_ptr<const Signature> sig, std::vector<StructuralFunction> functions)
      : sig_(std::move(sig)), fns_(std::move(functions)) {
    fns_.resize(sig_->size());
    semantic_.resize(sig_->size());
    for (VarId x : sig_->endogenous()) {
      const auto& f = fns_[static_cast<std::size_t>(x)];
      std::size_t rows = 1;
      for (VarId p : f.parents) {
        if (p < 0 || static_cast<std::size_t>(p) >= sig_->size())
          throw ModelError("unknown parent in function of " + sig_->var(x).name);
        rows *= sig_->range_size(p);
      }
      if (f.table.size() != rows)
        throw ModelError("table of " + sig_->var(x).name + " has " + std::to_string(f.table.size()) +
                         " rows, expected " + std::to_string(rows));
      semantic_[static_cast<std::size_t>(x)] = compute_semantic_parents(f);
    }
    order_ = topological_order();
  }

  const Signature& signature() const { return *sig_; }
  const std::shared_ptr<const Signature>& signature_ptr() const { return sig_; }
  const StructuralFunction& function(VarId x) const { return fns_.at(static_cast<std::size_t>(x)); }
  const std::vector<StructuralFunction>& functions() const { return fns_; }

  /// Parents whose value changes the output for some row.
  const std::vector<VarId>& semantic_parents(VarId x) const { return semantic_.at(static_cast<std::size_t>(x)); }

  bool acyclic() const { return order_.has_value(); }

  /// Endogenous variables in dependency order; throws CycleError if cyclic.
  const std::vector<VarId>& order() const {
    if (!order_) throw CycleError("structural functions are cyclic");
    return *order_;
  }

  /// Table row of `f` for the parent values in `values`.
  std::size_t row_index(const StructuralFunction& f, const std::vector<ValueId>& values) const {
    std::size_t row = 0;
    for (VarId p : f.parents) row = row * sig_->range_size(p) + static_cast<std::size_t>(values[static_cast<std::size_t>(p)]);
    return row;
  }

  /// Copy with each intervened variable's function replaced by a constant.
  FunctionSet intervened(const Intervention& iv) const {
    sig_->check_intervention(iv);
    auto fns = fns_;
    for (Atom a : iv.settings) fns[static_cast<std::size_t>(a.var)] = StructuralFunction::constant(a.value);
    return FunctionSet(sig_, std::move(fns));
  }

  /// Endogenous variables lying on some dependency cycle (including self loops).
  std::vector<VarId> cyclic_variables() const {
    std::vector<VarId> out;
    const auto n = sig_->size();
    for (VarId x : sig_->endogenous()) {
      // x is cyclic iff x reaches itself
      std::vector<bool> seen(n, false);
      std::vector<VarId> stack(semantic_[static_cast<std::size_t>(x)].begin(), semantic_[static_cast<std::size_t>(x)].end());
      bool found = false;
      while (!stack.empty() && !found) {
        VarId y = stack.back();
        stack.pop_back();
        if (y == x) found = true;
        if (seen[static_cast<std::size_t>(y)]) continue;
        seen[static_cast<std::size_t>(y)] = true;
        for (VarId z : semantic_[static_cast<std::size_t>(y)]) stack.push_back(z);
      }
      if (found) out.push_back(x);
    }
    return out;
  }

 private:
  std::vector<VarId> compute_semantic_parents(const StructuralFunction& f) const {
    std::vector<VarId> out;
    const std::size_t k = f.parents.size();
    // stride of parent i in the row index
    std::vector<std::size_t> stride(k, 1);
    for (std::size_t i = k; i-- > 1;) stride[i - 1] = stride[i] * sig_->range_size(f.parents[i]);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t r = sig_->range_size(f.parents[i]);
      bool depends = false;
      for (std::size_t row = 0; row < f.table.size() && !depends; ++row) {
        const std::size_t digit = (row / stride[i]) % r;
        if (digit != 0) continue;
        const ValueId base = f.table[row];
        for (std::size_t d = 1; d < r && !depends; ++d) {
          const ValueId other = f.table[row + d * stride[i]];
          if (base != kFree && other != kFree && base != other) depends = true;
        }
        // rows with a missing base entry: compare the remaining values pairwise
        if (!depends && base == kFree) {
          ValueId seen = kFree;
          for (std::size_t d = 1; d < r; ++d) {
            const ValueId other = f.table[row + d * stride[i]];
            if (other == kFree) continue;
            if (seen != kFree && seen != other) depends = true;
            seen = other;
          }
        }
      }
      if (depends && std::find(out.begin(), out.end(), f.parents[i]) == out.end()) out.push_back(f.parents[i]);
    }
    return out;
  }

  std::optional<std::vector<VarId>> topological_order() const {
    const auto endo = sig_->endogenous();
    std::vector<int> indegree(sig_->size(), 0);
    std::vector<std::vector<VarId>> children(sig_->size());
    for (VarId x : endo)
      for (VarId p : semantic_[static_cast<std::size_t>(x)]) {
        if (sig_->is_exogenous(p)) continue;
        ++indegree[static_cast<std::size_t>(x)];
        children[static_cast<std::size_t>(p)].push_back(x);
      }
    // Kahn's algorithm with a min-heap on VarId for a deterministic order
    std::set<VarId> ready;
    for (VarId x : endo)
      if (indegree[static_cast<std::size_t>(x)] == 0) ready.insert(x);
    std::vector<VarId> out;
    while (!ready.empty()) {
      VarId x = *ready.begin();
      ready.erase(ready.begin());
      out.push_back(x);
      for (VarId c : children[static_cast<std::size_t>(x)])
        if (--indegree[static_cast<std::size_t>(c)] == 0) ready.insert(c);
    }
    if (out.size() != endo.size()) return std::nullopt;
    return out;
  }

  std::shared_ptr<const Signature> sig_;
  std::vector<StructuralFunction> fns_;
  std::vector<std::vector<VarId>> semantic_;
  std::optional<std::vector<VarId>> order_;
};

/// Computes the unique solution of `fns` (with `forced` overriding) in context `u`.
///
/// Throws CycleError on cyclic functions and ModelError on a missing table row.
inline Assignment solve(const FunctionSet& fns, const Context& u, const Forced& forced) {
  const Signature& sig = fns.signature();
  if (u.values.size() != sig.exogenous_count()) throw ModelError("context is not total over the exogenous variables");
  Assignment a;
  a.values.assign(sig.size(), 0);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (!sig.in_range(static_cast<VarId>(i), u.values[i])) throw ModelError("context value out of range");
    a.values[i] = u.values[i];
  }
  for (VarId x : fns.order()) {
    const auto xi = static_cast<std::size_t>(x);
    if (!forced.empty() && forced[xi] != kFree) {
      a.values[xi] = forced[xi];
      continue;
    }
    const auto& f = fns.function(x);
    const ValueId v = f.table[fns.row_index(f, a.values)];
    if (v == kFree) throw ModelError("missing table row for " + sig.var(x).name);
    a.values[xi] = v;
  }
  return a;
}

inline Assignment solve(const FunctionSet& fns, const Context& u) { return solve(fns, u, Forced{}); }

/// W^ℱ: the solution for every context, in context order.
inline std::vector<Assignment> all_worlds(const FunctionSet& fns) {
  std::vector<Assignment> out;
  const auto& sig = fns.signature();
  for (ContextId c = 0; c < sig.context_count(); ++c) out.push_back(solve(fns, sig.context(c)));
  return out;
}

/// True iff `a` satisfies every structural equation of `fns`.
inline bool complies(const FunctionSet& fns, const Assignment& a) {
  const auto& sig = fns.signature();
  if (a.values.size() != sig.size()) return false;
  for (std::size_t v = 0; v < sig.size(); ++v)
    if (!sig.in_range(static_cast<VarId>(v), a.values[v])) return false;
  for (VarId x : sig.endogenous()) {
    const auto& f = fns.function(x);
    if (f.table[fns.row_index(f, a.values)] != a[x]) return false;
  }
  return true;
}

inline Context context_of(const Signature& sig, const Assignment& a) {
  return Context{std::vector<ValueId>(a.values.begin(), a.values.begin() + static_cast<std::ptrdiff_t>(sig.exogenous_count()))};
}

/// ⟨𝒮, ℱ, 𝒜⟩. Immutable; copies share the signature and function set.
class CausalModel {
 public:
  CausalModel(std::shared_ptr<const FunctionSet> fns, Assignment actual)
      : fns_(std::move(fns)), actual_(std::move(actual)) {}

  /// Model whose actual assignment is the solution in context `u`.
  CausalModel(std::shared_ptr<const FunctionSet> fns, const Context& u)
      : fns_(std::move(fns)), actual_(solve(*fns_, u)) {}

  const Signature& signature() const { return fns_->signature(); }
  const FunctionSet& functions() const { return *fns_; }
  const std::shared_ptr<const FunctionSet>& functions_ptr() const { return fns_; }
  const Assignment& actual() const { return actual_; }
  Context context() const { return context_of(signature(), actual_); }

  friend bool operator==(const CausalModel& a, const CausalModel& b) {
    return a.signature() == b.signature() && a.functions().functions() == b.functions().functions() &&
           a.actual_ == b.actual_;
  }

 private:
  std::shared_ptr<const FunctionSet> fns_;
  Assignment actual_;
};

/// Model after forcing `iv`: intervened variables get constant functions and
/// the actual assignment is re-solved with the exogenous values kept.
inline CausalModel intervene(const CausalModel& m, const Intervention& iv) {
  auto fns = std::make_shared<const FunctionSet>(m.functions().intervened(iv));
  return CausalModel(fns, m.context());
}

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

/// Lists every violated model invariant. Never throws.
inline ValidationReport validate(const CausalModel& m) {
  ValidationReport rep;
  const auto& sig = m.signature();
  const auto& fns = m.functions();
  for (const auto& v : sig.vars())
    if (v.range.size() == 1) rep.warnings.push_back("variable " + v.name + " has a singleton range");
  for (VarId x : sig.endogenous()) {
    const auto& f = fns.function(x);
    const auto& name = sig.var(x).name;
    std::size_t missing = 0;
    for (ValueId out : f.table) {
      if (out == kFree) ++missing;
      else if (!sig.in_range(x, out)) rep.errors.push_back("function of " + name + " has an output outside its range");
    }
    if (missing)
      rep.errors.push_back("function of " + name + " is not total: " + std::to_string(missing) + " missing row(s)");
    for (VarId p : f.parents)
      if (p == x) rep.warnings.push_back("function of " + name + " declares itself as a parent");
  }
  for (VarId x : fns.cyclic_variables())
    rep.errors.push_back("acyclicity violated: " + sig.var(x).name + " depends on itself through the structural functions");
  const auto& a = m.actual();
  bool total = a.values.size() == sig.size();
  for (std::size_t v = 0; total && v < sig.size(); ++v)
    if (!sig.in_range(static_cast<VarId>(v), a.values[v])) total = false;
  if (!total) rep.errors.push_back("actual assignment is not a total in-range valuation");
  else if (rep.errors.empty() && !complies(fns, a))
    rep.errors.push_back("actual assignment does not comply with the structural functions");
  return rep;
}

}  // namespace cdo
