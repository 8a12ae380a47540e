#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cdo/error.hpp"
#include "cdo/expand.hpp"
#include "cdo/formula.hpp"
#include "cdo/model.hpp"
#include "cdo/priority.hpp"
#include "cdo/semantics.hpp"
#include "cdo/signature.hpp"
#include "cdo/syntax.hpp"

namespace cdo {

// ---------------------------------------------------------------------------
// Signature reduction

/// S_φ: one exogenous variable U* ranging over all exogenous valuations of
/// the original signature, plus the variables mentioned in φ.
///
/// Mentioned exogenous variables stay in the reduced signature as endogenous
/// variables pinned to the matching component of U*, so they keep ignoring
/// interventions exactly as they did before reduction.
struct ReducedSignature {
  std::shared_ptr<const Signature> original;
  std::shared_ptr<const Signature> reduced;
  /// Original id -> reduced id, or -1 if the variable was dropped.
  std::vector<VarId> to_reduced;
  /// Reduced id -> original id; U* maps to -1.
  std::vector<VarId> to_original;

  VarId u_star() const { return 0; }
  bool pinned(VarId reduced_var) const {
    const VarId o = to_original.at(static_cast<std::size_t>(reduced_var));
    return o >= 0 && original->is_exogenous(o);
  }
  /// Original-context index encoded by a U* value.
  ContextId original_context(ValueId u_star_value) const { return static_cast<ContextId>(u_star_value); }
  Context reduced_context(const Context& original_ctx) const {
    return Context{{static_cast<ValueId>(original->context_id(original_ctx))}};
  }
  /// Reduced variables that came from endogenous variables.
  std::vector<VarId> free_variables() const {
    std::vector<VarId> out;
    for (VarId v : reduced->endogenous())
      if (!pinned(v)) out.push_back(v);
    return out;
  }
};

/// Builds S_φ for the variables mentioned in `f`.
inline ReducedSignature reduce(const Formula& f, std::shared_ptr<const Signature> sig) {
  const auto mentioned = variables_of(f);
  ReducedSignature rs;
  rs.original = sig;
  const std::size_t k = sig->context_count();
  std::vector<std::string> tuples;
  for (ContextId c = 0; c < k; ++c) {
    const Context u = sig->context(c);
    std::string t;
    for (std::size_t i = 0; i < u.values.size(); ++i) t += (i ? "_" : "") + sig->value_name(static_cast<VarId>(i), u.values[i]);
    tuples.push_back(t.empty() ? "u" : t);
  }
  if (std::set<std::string>(tuples.begin(), tuples.end()).size() != tuples.size())
    for (ContextId c = 0; c < k; ++c) tuples[c] = "u" + std::to_string(c);
  std::string ustar = "U_star";
  while (sig->find(ustar) >= 0) ustar += "_";

  std::vector<std::pair<std::string, std::vector<std::string>>> endo;
  rs.to_reduced.assign(sig->size(), -1);
  rs.to_original.push_back(-1);
  for (VarId v : mentioned) {  // std::set iterates exogenous ids first
    rs.to_reduced[static_cast<std::size_t>(v)] = static_cast<VarId>(rs.to_original.size());
    rs.to_original.push_back(v);
    endo.emplace_back(sig->var(v).name, sig->var(v).range);
  }
  rs.reduced = std::make_shared<const Signature>(std::vector<std::pair<std::string, std::vector<std::string>>>{{ustar, tuples}},
                                                 std::move(endo));
  return rs;
}

/// Rewrites `f` from the original signature onto S_φ.
inline Formula translate(const Formula& f, const ReducedSignature& rs) {
  auto atom = [&](Atom a) {
    const VarId r = rs.to_reduced.at(static_cast<std::size_t>(a.var));
    if (r < 0) throw ModelError("formula mentions a variable outside the reduced signature");
    return Atom{r, a.value};
  };
  auto iv = [&](const Intervention& i) {
    Intervention out;
    for (Atom a : i.settings) out.settings.push_back(atom(a));
    return out;
  };
  auto ctx = [&](const Context& u) { return rs.reduced_context(u); };
  auto go = [&](auto&& self, const Formula& g) -> Formula {
    return std::visit(
        overloaded{
            [&](const AtomF& x) { return mk::atom(atom(x.atom)); },
            [&](const NotF& x) { return mk::neg(self(self, x.sub)); },
            [&](const AndF& x) { return mk::conj(self(self, x.left), self(self, x.right)); },
            [&](const InterveneF& x) { return mk::after(iv(x.iv), self(self, x.body)); },
            [&](const PrecF& x) { return mk::prec(atom(x.lower), atom(x.higher)); },
            [&](const AtContextF& x) { return mk::at(ctx(x.ctx), self(self, x.body)); },
            [&](const LeqCtxF& x) { return mk::leq(ctx(x.lhs), ctx(x.rhs)); },
            [&](const LeqPostF& x) { return mk::leq_post(iv(x.lhs_iv), ctx(x.lhs), iv(x.rhs_iv), ctx(x.rhs)); },
            [&](const ObligF& x) { return mk::oblig(atom(x.goal), iv(x.action), ctx(x.ctx)); },
            [&](const PermitF& x) { return mk::permit(atom(x.goal), iv(x.action), ctx(x.ctx)); },
        },
        g.node().v);
  };
  return go(go, f);
}

// ---------------------------------------------------------------------------
// Search space and certificates

/// The variables a certificate talks about. `pinned[v]`, when nonempty, gives
/// v's value per context: such variables ignore every other variable.
struct SearchSpace {
  std::shared_ptr<const Signature> sig;
  std::vector<std::vector<ValueId>> pinned;
  /// Endogenous variables whose functions are guessed.
  std::vector<VarId> free;

  bool is_pinned(VarId v) const { return !pinned[static_cast<std::size_t>(v)].empty(); }
};

/// Search directly over a signature.
inline SearchSpace full_space(std::shared_ptr<const Signature> sig) {
  SearchSpace sp;
  sp.pinned.resize(sig->size());
  sp.free = sig->endogenous();
  sp.sig = std::move(sig);
  return sp;
}

/// Search over S_φ with the originally exogenous variables pinned to U*.
inline SearchSpace reduced_space(const ReducedSignature& rs) {
  SearchSpace sp;
  sp.sig = rs.reduced;
  sp.pinned.resize(rs.reduced->size());
  const std::size_t k = rs.original->context_count();
  for (VarId v : rs.reduced->endogenous()) {
    if (!rs.pinned(v)) {
      sp.free.push_back(v);
      continue;
    }
    const VarId o = rs.to_original[static_cast<std::size_t>(v)];
    for (ContextId c = 0; c < k; ++c) sp.pinned[static_cast<std::size_t>(v)].push_back(rs.original->context(c).values[static_cast<std::size_t>(o)]);
  }
  return sp;
}

/// The effective interventions under which `f` (macro-free) inspects a
/// world, nested brackets composed, always including the empty one.
inline std::vector<Intervention> relevant_interventions(const Formula& f, const Signature& sig) {
  std::set<Intervention> out{Intervention{}};
  auto walk = [&](auto&& self, const Formula& g, const Forced& forced) -> void {
    std::visit(overloaded{
                   [&](const NotF& x) { self(self, x.sub, forced); },
                   [&](const AndF& x) { self(self, x.left, forced); self(self, x.right, forced); },
                   [&](const InterveneF& x) {
                     Forced inner = compose(forced, x.iv);
                     out.insert(to_intervention(inner));
                     self(self, x.body, inner);
                   },
                   [&](const AtContextF& x) { self(self, x.body, forced); },
                   [&](const AtomF&) {},
                   [&](const PrecF&) {},
                   [](const auto&) { throw ModelError("relevant_interventions expects a macro-free formula"); },
               },
               g.node().v);
  };
  walk(walk, f, no_forcing(sig));
  return {out.begin(), out.end()};
}

/// Relevant interventions of `f` after macro expansion over all atoms.
inline std::vector<Intervention> relevant_interventions_expanded(const Formula& f, const Signature& sig,
                                                                 std::size_t cap = kDefaultExpansionCap) {
  return relevant_interventions(expand(f, sig, cap), sig);
}

/// A guessed witness for satisfiability, checkable in polynomial time.
struct Certificate {
  /// Guessed variables, each depending only on the context and earlier ones.
  std::vector<VarId> order;
  ContextId actual = 0;
  /// Canonical interventions R, including the empty one.
  std::vector<Intervention> interventions;
  /// solutions[r][c]: claimed world after interventions[r] in context c.
  std::vector<std::vector<Assignment>> solutions;
  /// Priority edges (lower, higher) over the priority atoms of the formula.
  std::vector<std::pair<Atom, Atom>> priority;

  std::size_t size() const {
    std::size_t n = order.size() + priority.size() + interventions.size();
    for (const auto& row : solutions)
      for (const auto& a : row) n += a.values.size();
    return n;
  }
};

namespace detail {

/// Worlds read off a certificate's claimed solutions.
class CertificateWorlds {
 public:
  CertificateWorlds(const Signature& sig, const Certificate& cert, const PriorityOrdering& closed)
      : sig_(sig), cert_(cert), closed_(closed) {
    for (std::size_t r = 0; r < cert.interventions.size(); ++r) index_.emplace(cert.interventions[r], r);
  }

  const Signature& signature() const { return sig_; }
  const PriorityOrdering* ordering() const { return &closed_; }

  std::optional<Assignment> world(const Forced& forced, ContextId c) {
    auto it = index_.find(to_intervention(forced));
    if (it == index_.end()) throw ModelError("certificate lacks a solution for intervention " + sig_.intervention_string(to_intervention(forced)));
    return cert_.solutions[it->second].at(c);
  }
  ValueId value(const Forced& forced, ContextId c, VarId v) { return (*world(forced, c))[v]; }
  Truth prec(Atom lo, Atom hi) const { return truth(closed_.precedes(lo, hi)); }

 private:
  const Signature& sig_;
  const Certificate& cert_;
  const PriorityOrdering& closed_;
  std::map<Intervention, std::size_t> index_;
};

}  // namespace detail

/// Verifies a certificate for the macro-free formula `core` over `space`.
///
/// Returns true iff the claimed solutions respect forcing and pinning, agree
/// with one function per guessed variable of the context and the earlier
/// variables, the priority edges close to a strict partial order over the
/// formula's priority atoms, and `core` holds. Throws ModelError on a
/// malformed certificate.
inline bool check_certificate(const Formula& core, const SearchSpace& space, const Certificate& cert) {
  const Signature& sig = *space.sig;
  const std::size_t k = sig.context_count();
  {
    auto a = cert.order, b = space.free;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw ModelError("certificate order is not a permutation of the guessed variables");
  }
  if (cert.actual >= k) throw ModelError("certificate actual context out of range");
  if (cert.solutions.size() != cert.interventions.size()) throw ModelError("certificate solution table has the wrong shape");
  for (const Intervention& r : relevant_interventions(core, sig))
    if (std::find(cert.interventions.begin(), cert.interventions.end(), r) == cert.interventions.end())
      throw ModelError("certificate misses relevant intervention " + sig.intervention_string(r));

  for (std::size_t r = 0; r < cert.interventions.size(); ++r) {
    const Intervention& iv = cert.interventions[r];
    sig.check_intervention(iv);
    if (cert.solutions[r].size() != k) throw ModelError("certificate solution table has the wrong shape");
    for (ContextId c = 0; c < k; ++c) {
      const Assignment& a = cert.solutions[r][c];
      if (a.values.size() != sig.size()) throw ModelError("certificate solution has the wrong length");
      for (std::size_t v = 0; v < sig.size(); ++v)
        if (!sig.in_range(static_cast<VarId>(v), a.values[v])) return false;
      const Context u = sig.context(c);
      for (std::size_t i = 0; i < u.values.size(); ++i)
        if (a.values[i] != u.values[i]) return false;
      for (Atom s : iv.settings)
        if (a[s.var] != s.value) return false;
      for (std::size_t v = 0; v < sig.size(); ++v)
        if (space.is_pinned(static_cast<VarId>(v)) && a.values[v] != space.pinned[v][c]) return false;
    }
  }

  // functional dependence along the order
  for (std::size_t pos = 0; pos < cert.order.size(); ++pos) {
    const VarId x = cert.order[pos];
    std::map<std::pair<ContextId, std::vector<ValueId>>, ValueId> seen;
    for (std::size_t r = 0; r < cert.interventions.size(); ++r) {
      const Intervention& iv = cert.interventions[r];
      if (std::any_of(iv.settings.begin(), iv.settings.end(), [&](Atom s) { return s.var == x; })) continue;
      for (ContextId c = 0; c < k; ++c) {
        const Assignment& a = cert.solutions[r][c];
        std::vector<ValueId> prefix;
        for (std::size_t q = 0; q < pos; ++q) prefix.push_back(a[cert.order[q]]);
        auto [it, inserted] = seen.emplace(std::make_pair(c, std::move(prefix)), a[x]);
        if (!inserted && it->second != a[x]) return false;
      }
    }
  }

  const auto atoms = priority_atoms(core);
  for (const auto& [lo, hi] : cert.priority)
    if (!atoms.count(lo) || !atoms.count(hi)) throw ModelError("certificate priority edge outside the formula's priority atoms");
  PriorityOrdering closed;
  try {
    closed = closure(PriorityOrdering::from_edges(cert.priority));
  } catch (const PriorityCycleError&) {
    return false;
  }
  detail::CertificateWorlds worlds(sig, cert, closed);
  Evaluator ev(worlds);
  return ev.eval(core, no_forcing(sig), cert.actual) == Truth::True;
}

// ---------------------------------------------------------------------------
// Certificate search

enum class SatStatus { Sat, Unsat, Budget };

struct SearchOptions {
  /// Maximum search nodes per (order, actual context) slice.
  std::size_t budget = 2'000'000;
  /// Maximum number of slices; more is reported as Budget without searching.
  std::size_t max_slices = 1'000'000;
  std::size_t expansion_cap = kDefaultExpansionCap;
  unsigned workers = 1;
  /// Shuffle the slice order with this seed instead of the canonical order.
  std::optional<std::uint64_t> seed;
  /// Search over S_φ (true) or directly over the given signature (false).
  bool reduce = true;
};

struct SatResult {
  SatStatus status = SatStatus::Unsat;
  /// Witness over the original signature when status is Sat.
  std::optional<CausalDeonticModel> witness;
  std::optional<Certificate> certificate;
  /// Space the certificate lives in, and the macro-free formula it certifies.
  std::optional<SearchSpace> space;
  Formula core;
  std::optional<ReducedSignature> reduced;
  std::size_t nodes = 0;
  std::string note;
};

namespace detail {

struct BudgetHit {};

/// Partial model: function table entries and priority pairs are decided on
/// demand; anything undecided evaluates to Unknown.
class LazyWorlds {
 public:
  static constexpr ValueId kUnset = -2;

  LazyWorlds(const SearchSpace& sp, std::vector<VarId> order, std::vector<Atom> prec_atoms)
      : sp_(sp), sig_(*sp.sig), order_(std::move(order)), atoms_(std::move(prec_atoms)) {
    const std::size_t n = sig_.size();
    pos_.assign(n, -1);
    for (std::size_t i = 0; i < order_.size(); ++i) pos_[static_cast<std::size_t>(order_[i])] = static_cast<int>(i);
    table_.resize(n);
    const std::size_t k = sig_.context_count();
    std::size_t prod = 1;
    for (VarId x : order_) {
      if (prod > (std::size_t{1} << 24) / std::max<std::size_t>(k, 1))
        throw CapExceeded("function table for " + sig_.var(x).name + " is too large to search");
      table_[static_cast<std::size_t>(x)].assign(k * prod, kFree);
      prod *= sig_.range_size(x);
    }
    for (ContextId c = 0; c < k; ++c) contexts_.push_back(sig_.context(c));
    const std::size_t m = atoms_.size();
    decided_.assign(m, std::vector<int>(m, -1));
    reach_.assign(m, std::vector<bool>(m, false));
  }

  const Signature& signature() const { return sig_; }
  const PriorityOrdering* ordering() const { return nullptr; }

  void begin_pass() {
    memo_.clear();
    pending_ = Pending{};
  }

  ValueId value(const Forced& forced, ContextId c, VarId v) {
    const auto vi = static_cast<std::size_t>(v);
    if (sig_.is_exogenous(v)) return contexts_[c].values[vi];
    if (sp_.is_pinned(v)) return sp_.pinned[vi][c];
    if (forced[vi] != kFree) return forced[vi];
    auto& w = memo(forced, c);
    if (w[vi] != kUnset) return w[vi];
    std::size_t key = c;
    for (int q = 0; q < pos_[vi]; ++q) {
      const VarId e = order_[static_cast<std::size_t>(q)];
      const ValueId ev = value(forced, c, e);
      if (ev == kFree) {
        memo(forced, c)[vi] = kFree;
        return kFree;
      }
      key = key * sig_.range_size(e) + static_cast<std::size_t>(ev);
    }
    const ValueId out = table_[vi][key];
    if (out == kFree && pending_.kind == Pending::None) pending_ = Pending{Pending::Entry, v, key, {}, {}};
    memo(forced, c)[vi] = out;
    return out;
  }

  std::optional<Assignment> world(const Forced& forced, ContextId c) {
    Assignment a;
    a.values.resize(sig_.size());
    for (std::size_t v = 0; v < sig_.size(); ++v) {
      a.values[v] = value(forced, c, static_cast<VarId>(v));
      if (a.values[v] == kFree) return std::nullopt;
    }
    return a;
  }

  Truth prec(Atom lo, Atom hi) {
    const auto i = atom_index(lo), j = atom_index(hi);
    if (i == j) return Truth::False;
    if (reach_[i][j]) return Truth::True;
    if (reach_[j][i] || decided_[i][j] == 0) return Truth::False;
    if (pending_.kind == Pending::None) pending_ = Pending{Pending::Prec, 0, 0, lo, hi};
    return Truth::Unknown;
  }

  struct Pending {
    enum Kind { None, Entry, Prec } kind = None;
    VarId var = 0;
    std::size_t key = 0;
    Atom lo, hi;
  };
  const Pending& pending() const { return pending_; }

  void set_entry(VarId v, std::size_t key, ValueId x) { table_[static_cast<std::size_t>(v)][key] = x; }

  /// Decides lo ≪ hi; returns false if the decisions no longer close to a strict partial order.
  bool set_prec(Atom lo, Atom hi, int value) {
    decided_[atom_index(lo)][atom_index(hi)] = value;
    return recompute_reach();
  }
  void unset_prec(Atom lo, Atom hi) {
    decided_[atom_index(lo)][atom_index(hi)] = -1;
    recompute_reach();
  }

  /// Complete world with undecided entries fixed to the first value.
  Assignment complete_world(const Forced& forced, ContextId c) {
    Assignment a;
    a.values.assign(sig_.size(), 0);
    for (std::size_t v = 0; v < sig_.size(); ++v) {
      const VarId var = static_cast<VarId>(v);
      if (sig_.is_exogenous(var)) a.values[v] = contexts_[c].values[v];
      else if (sp_.is_pinned(var)) a.values[v] = sp_.pinned[v][c];
    }
    for (VarId x : order_) {
      const auto xi = static_cast<std::size_t>(x);
      if (forced[xi] != kFree) {
        a.values[xi] = forced[xi];
        continue;
      }
      std::size_t key = c;
      for (int q = 0; q < pos_[xi]; ++q) {
        const VarId e = order_[static_cast<std::size_t>(q)];
        key = key * sig_.range_size(e) + static_cast<std::size_t>(a[e]);
      }
      if (table_[xi][key] == kFree) table_[xi][key] = 0;
      a.values[xi] = table_[xi][key];
    }
    return a;
  }

  const std::vector<ValueId>& table(VarId x) const { return table_[static_cast<std::size_t>(x)]; }
  const std::vector<VarId>& order() const { return order_; }

  std::vector<std::pair<Atom, Atom>> priority_edges() const {
    std::vector<std::pair<Atom, Atom>> out;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      for (std::size_t j = 0; j < atoms_.size(); ++j)
        if (reach_[i][j]) out.emplace_back(atoms_[i], atoms_[j]);
    return out;
  }

 private:
  std::vector<ValueId>& memo(const Forced& forced, ContextId c) {
    auto it = memo_.find({forced, c});
    if (it == memo_.end()) it = memo_.emplace(std::make_pair(forced, c), std::vector<ValueId>(sig_.size(), kUnset)).first;
    return it->second;
  }

  std::size_t atom_index(Atom a) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
    return static_cast<std::size_t>(it - atoms_.begin());
  }

  bool recompute_reach() {
    const std::size_t m = atoms_.size();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) reach_[i][j] = decided_[i][j] == 1;
    for (std::size_t q = 0; q < m; ++q)
      for (std::size_t i = 0; i < m; ++i)
        if (reach_[i][q])
          for (std::size_t j = 0; j < m; ++j)
            if (reach_[q][j]) reach_[i][j] = true;
    for (std::size_t i = 0; i < m; ++i) {
      if (reach_[i][i]) return false;
      for (std::size_t j = 0; j < m; ++j)
        if (decided_[i][j] == 0 && reach_[i][j]) return false;
    }
    return true;
  }

  const SearchSpace& sp_;
  const Signature& sig_;
  std::vector<VarId> order_;
  std::vector<Atom> atoms_;
  std::vector<int> pos_;
  std::vector<std::vector<ValueId>> table_;
  std::vector<Context> contexts_;
  std::vector<std::vector<int>> decided_;
  std::vector<std::vector<bool>> reach_;
  std::map<std::pair<Forced, ContextId>, std::vector<ValueId>> memo_;
  Pending pending_;
};

struct SliceOutcome {
  SatStatus status = SatStatus::Unsat;
  std::optional<Certificate> certificate;
  std::size_t nodes = 0;
};

/// Depth-first search for one variable order and actual context.
inline SliceOutcome search_slice(const Formula& core, const SearchSpace& sp, const std::vector<VarId>& order,
                                 ContextId actual, const std::vector<Atom>& prec_atoms,
                                 const std::vector<Intervention>& relevant, std::size_t budget) {
  LazyWorlds lw(sp, order, prec_atoms);
  Evaluator ev(lw);
  const Forced none = no_forcing(*sp.sig);
  SliceOutcome out;
  auto dfs = [&](auto&& self) -> bool {
    if (++out.nodes > budget) throw BudgetHit{};
    lw.begin_pass();
    const Truth t = ev.eval(core, none, actual);
    if (t == Truth::True) return true;
    if (t == Truth::False) return false;
    const auto p = lw.pending();
    if (p.kind == LazyWorlds::Pending::Entry) {
      for (std::size_t x = 0; x < sp.sig->range_size(p.var); ++x) {
        lw.set_entry(p.var, p.key, static_cast<ValueId>(x));
        if (self(self)) return true;
      }
      lw.set_entry(p.var, p.key, kFree);
      return false;
    }
    if (p.kind == LazyWorlds::Pending::Prec) {
      for (int v = 0; v < 2; ++v) {
        if (lw.set_prec(p.lo, p.hi, v) && self(self)) return true;
        lw.unset_prec(p.lo, p.hi);
      }
      return false;
    }
    throw std::logic_error("unknown verdict without a pending decision");
  };
  try {
    if (!dfs(dfs)) return out;
  } catch (const BudgetHit&) {
    out.status = SatStatus::Budget;
    return out;
  }
  out.status = SatStatus::Sat;
  Certificate cert;
  cert.order = order;
  cert.actual = actual;
  cert.interventions = relevant;
  for (const Intervention& r : relevant) {
    std::vector<Assignment> row;
    const Forced f = compose(none, r);
    for (ContextId c = 0; c < sp.sig->context_count(); ++c) row.push_back(lw.complete_world(f, c));
    cert.solutions.push_back(std::move(row));
  }
  cert.priority = lw.priority_edges();
  out.certificate = std::move(cert);
  return out;
}

/// Fills a function table over `parents` from a rule on parent values.
template <class Rule>
StructuralFunction tabulate(const Signature& sig, std::vector<VarId> parents, Rule rule) {
  StructuralFunction f;
  f.parents = std::move(parents);
  std::size_t rows = 1;
  for (VarId p : f.parents) rows *= sig.range_size(p);
  f.table.resize(rows);
  std::vector<ValueId> digits(f.parents.size());
  for (std::size_t row = 0; row < rows; ++row) {
    std::size_t r = row;
    for (std::size_t i = f.parents.size(); i-- > 0;) {
      digits[i] = static_cast<ValueId>(r % sig.range_size(f.parents[i]));
      r /= sig.range_size(f.parents[i]);
    }
    f.table[row] = rule(digits);
  }
  return f;
}

}  // namespace detail

/// Concrete model over `space` realizing a certificate: each guessed
/// variable reads the context and the variables before it in the order.
inline CausalDeonticModel model_from_certificate(const SearchSpace& space, const Certificate& cert,
                                                 std::optional<std::vector<Atom>> domain = std::nullopt) {
  const Signature& sig = *space.sig;
  const std::size_t k = sig.context_count();
  std::vector<StructuralFunction> fns(sig.size());
  const auto exo = sig.exogenous();
  // (var, context, earlier values) -> value, from every unforced claimed solution
  std::vector<std::map<std::pair<ContextId, std::vector<ValueId>>, ValueId>> dep(sig.size());
  for (std::size_t pos = 0; pos < cert.order.size(); ++pos) {
    const VarId x = cert.order[pos];
    for (std::size_t r = 0; r < cert.interventions.size(); ++r) {
      const auto& iv = cert.interventions[r];
      if (std::any_of(iv.settings.begin(), iv.settings.end(), [&](Atom s) { return s.var == x; })) continue;
      for (ContextId c = 0; c < k; ++c) {
        std::vector<ValueId> prefix;
        for (std::size_t q = 0; q < pos; ++q) prefix.push_back(cert.solutions[r][c][cert.order[q]]);
        dep[static_cast<std::size_t>(x)].emplace(std::make_pair(c, prefix), cert.solutions[r][c][x]);
      }
    }
  }
  for (std::size_t pos = 0; pos < cert.order.size(); ++pos) {
    const VarId x = cert.order[pos];
    std::vector<VarId> parents = exo;
    parents.insert(parents.end(), cert.order.begin(), cert.order.begin() + static_cast<std::ptrdiff_t>(pos));
    fns[static_cast<std::size_t>(x)] = detail::tabulate(sig, parents, [&](const std::vector<ValueId>& d) {
      Context u{std::vector<ValueId>(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(exo.size()))};
      std::vector<ValueId> prefix(d.begin() + static_cast<std::ptrdiff_t>(exo.size()), d.end());
      const auto& m = dep[static_cast<std::size_t>(x)];
      auto it = m.find({sig.context_id(u), prefix});
      return it == m.end() ? ValueId{0} : it->second;
    });
  }
  for (VarId v : sig.endogenous()) {
    if (!space.is_pinned(v)) continue;
    fns[static_cast<std::size_t>(v)] = detail::tabulate(sig, exo, [&](const std::vector<ValueId>& d) {
      return space.pinned[static_cast<std::size_t>(v)][sig.context_id(Context{d})];
    });
  }
  auto fset = std::make_shared<const FunctionSet>(space.sig, std::move(fns));
  PriorityOrdering p = PriorityOrdering::from_edges(cert.priority);
  if (domain) {
    p.domain = *domain;
    std::sort(p.domain.begin(), p.domain.end());
  }
  return CausalDeonticModel(CausalModel(fset, sig.context(cert.actual)), p);
}

/// Model over the original signature realizing a model over S_φ. Dropped
/// endogenous variables become constants.
inline CausalDeonticModel lift(const CausalDeonticModel& m, const ReducedSignature& rs,
                               std::optional<std::vector<Atom>> domain = std::nullopt) {
  const Signature& orig = *rs.original;
  const Signature& red = *rs.reduced;
  const auto exo = orig.exogenous();
  std::vector<StructuralFunction> fns(orig.size());
  for (VarId x : orig.endogenous()) {
    const VarId rx = rs.to_reduced[static_cast<std::size_t>(x)];
    if (rx < 0) {
      fns[static_cast<std::size_t>(x)] = StructuralFunction::constant(0);
      continue;
    }
    const auto& rf = m.functions().function(rx);
    std::vector<VarId> parents = exo;
    for (VarId rp : rf.parents)
      if (rp != rs.u_star()) {
        const VarId op = rs.to_original[static_cast<std::size_t>(rp)];
        if (!orig.is_exogenous(op)) parents.push_back(op);
      }
    fns[static_cast<std::size_t>(x)] = detail::tabulate(orig, parents, [&](const std::vector<ValueId>& d) {
      Context u{std::vector<ValueId>(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(exo.size()))};
      const ContextId uid = orig.context_id(u);
      std::vector<ValueId> vals(red.size(), 0);
      vals[static_cast<std::size_t>(rs.u_star())] = static_cast<ValueId>(uid);
      for (std::size_t i = 0; i < orig.exogenous_count(); ++i) {
        const VarId r = rs.to_reduced[i];
        if (r >= 0) vals[static_cast<std::size_t>(r)] = u.values[i];
      }
      std::size_t j = exo.size();
      for (VarId rp : rf.parents)
        if (rp != rs.u_star() && !orig.is_exogenous(rs.to_original[static_cast<std::size_t>(rp)]))
          vals[static_cast<std::size_t>(rp)] = d[j++];
      return rf.table[m.functions().row_index(rf, vals)];
    });
  }
  auto back = [&](Atom a) { return Atom{rs.to_original[static_cast<std::size_t>(a.var)], a.value}; };
  std::vector<std::pair<Atom, Atom>> edges;
  for (const auto& [lo, hi] : m.priority().edges) edges.emplace_back(back(lo), back(hi));
  PriorityOrdering p = PriorityOrdering::from_edges(edges);
  if (domain) p.domain = *domain;
  else {
    p.domain.clear();
    for (Atom a : m.priority().domain) p.domain.push_back(back(a));
  }
  std::sort(p.domain.begin(), p.domain.end());
  auto fset = std::make_shared<const FunctionSet>(rs.original, std::move(fns));
  const ContextId actual = static_cast<ContextId>(m.actual()[rs.u_star()]);
  return CausalDeonticModel(CausalModel(fset, orig.context(actual)), p);
}

/// Model over S_φ that agrees with `m` on every formula over the mentioned
/// variables: each kept variable's function composes through the dropped
/// ones by solving `m` with the earlier kept variables forced.
inline CausalDeonticModel project(const CausalDeonticModel& m, const ReducedSignature& rs) {
  const Signature& orig = *rs.original;
  const Signature& red = *rs.reduced;
  std::vector<VarId> kept;  // reduced ids of free variables, in m's dependency order
  for (VarId x : m.functions().order())
    if (rs.to_reduced[static_cast<std::size_t>(x)] >= 0) kept.push_back(rs.to_reduced[static_cast<std::size_t>(x)]);
  std::vector<StructuralFunction> fns(red.size());
  for (std::size_t pos = 0; pos < kept.size(); ++pos) {
    const VarId rx = kept[pos];
    std::vector<VarId> parents{rs.u_star()};
    parents.insert(parents.end(), kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(pos));
    fns[static_cast<std::size_t>(rx)] = detail::tabulate(red, parents, [&](const std::vector<ValueId>& d) {
      Forced forced = no_forcing(orig);
      for (std::size_t i = 1; i < d.size(); ++i) forced[static_cast<std::size_t>(rs.to_original[static_cast<std::size_t>(parents[i])])] = d[i];
      const Assignment a = solve(m.functions(), orig.context(static_cast<ContextId>(d[0])), forced);
      return a[rs.to_original[static_cast<std::size_t>(rx)]];
    });
  }
  for (VarId v : red.endogenous())
    if (rs.pinned(v)) {
      const VarId o = rs.to_original[static_cast<std::size_t>(v)];
      fns[static_cast<std::size_t>(v)] = detail::tabulate(red, {rs.u_star()}, [&](const std::vector<ValueId>& d) {
        return orig.context(static_cast<ContextId>(d[0])).values[static_cast<std::size_t>(o)];
      });
    }
  std::vector<std::pair<Atom, Atom>> edges;
  auto fwd = [&](Atom a) { return Atom{rs.to_reduced[static_cast<std::size_t>(a.var)], a.value}; };
  for (const auto& [lo, hi] : m.priority().edges)
    if (rs.to_reduced[static_cast<std::size_t>(lo.var)] >= 0 && rs.to_reduced[static_cast<std::size_t>(hi.var)] >= 0)
      edges.emplace_back(fwd(lo), fwd(hi));
  PriorityOrdering p = PriorityOrdering::from_edges(edges);
  auto fset = std::make_shared<const FunctionSet>(rs.reduced, std::move(fns));
  const ContextId actual = orig.context_id(m.causal().context());
  return CausalDeonticModel(CausalModel(fset, red.context(actual)), p);
}

/// Decides satisfiability of `f` over the causal deontic models on `sig`.
///
/// Macros are expanded over all atoms, the formula is moved onto S_φ (unless
/// `opts.reduce` is false), and certificates are searched slice by slice:
/// one slice per (variable order, actual context). The first satisfiable
/// slice in slice order wins regardless of the worker count; Budget is only
/// reported when no slice found a witness and some slice ran out of budget.
inline SatResult sat(const Formula& f, std::shared_ptr<const Signature> sig, const SearchOptions& opts = {}) {
  typecheck(f, *sig);
  SatResult res;
  const bool had_macros = !macro_free(f);
  const Formula core_orig = expand(f, *sig, opts.expansion_cap);
  std::optional<ReducedSignature> rs;
  SearchSpace space;
  Formula core;
  if (opts.reduce) {
    rs = reduce(core_orig, sig);
    space = reduced_space(*rs);
    core = translate(core_orig, *rs);
  } else {
    space = full_space(sig);
    core = core_orig;
  }
  const auto atom_set = priority_atoms(core);
  const std::vector<Atom> prec_atoms(atom_set.begin(), atom_set.end());
  const auto relevant = relevant_interventions(core, *space.sig);
  const std::size_t k = space.sig->context_count();

  std::vector<std::vector<VarId>> orders;
  {
    std::vector<VarId> perm = space.free;
    std::sort(perm.begin(), perm.end());
    do {
      orders.push_back(perm);
      if (orders.size() * k > opts.max_slices) {
        res.status = SatStatus::Budget;
        res.note = "more than " + std::to_string(opts.max_slices) + " search slices";
        return res;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  std::vector<std::pair<std::size_t, ContextId>> slices;
  for (std::size_t o = 0; o < orders.size(); ++o)
    for (ContextId c = 0; c < k; ++c) slices.emplace_back(o, c);
  if (opts.seed) {
    std::mt19937_64 rng(*opts.seed);
    std::shuffle(slices.begin(), slices.end(), rng);
  }

  std::vector<detail::SliceOutcome> outcomes(slices.size());
  std::vector<bool> done(slices.size(), false);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_sat{slices.size()};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < slices.size(); i = next++) {
        if (i > first_sat.load()) continue;
        const auto& [o, c] = slices[i];
        outcomes[i] = detail::search_slice(core, space, orders[o], c, prec_atoms, relevant, opts.budget);
        if (outcomes[i].status == SatStatus::Sat) {
          std::size_t cur = first_sat.load();
          while (i < cur && !first_sat.compare_exchange_weak(cur, i)) {}
        }
      }
    } catch (...) {
      std::lock_guard lock(err_mu);
      if (!err) err = std::current_exception();
    }
  };
  const unsigned workers = std::max(1u, opts.workers);
  if (workers == 1) worker();
  else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);

  const std::size_t win = first_sat.load();
  for (std::size_t i = 0; i < slices.size() && i <= win; ++i) res.nodes += outcomes[i].nodes;
  if (win < slices.size()) {
    res.status = SatStatus::Sat;
    res.certificate = outcomes[win].certificate;
    if (!check_certificate(core, space, *res.certificate))
      throw std::logic_error("internal error: search produced a certificate that does not check");
    std::optional<std::vector<Atom>> domain;
    if (had_macros) domain = sig->all_atoms();
    const CausalDeonticModel local = model_from_certificate(space, *res.certificate);
    res.witness = rs ? lift(local, *rs, domain) : model_from_certificate(space, *res.certificate, domain);
  } else {
    res.status = std::any_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.status == SatStatus::Budget; })
                     ? SatStatus::Budget
                     : SatStatus::Unsat;
    if (res.status == SatStatus::Budget) res.note = "search budget of " + std::to_string(opts.budget) + " nodes per slice exhausted";
  }
  res.space = space;
  res.core = core;
  res.reduced = rs;
  return res;
}

enum class Validity { Valid, Invalid, Budget };

struct ValidResult {
  Validity status = Validity::Valid;
  /// A model falsifying the formula when Invalid.
  std::optional<CausalDeonticModel> countermodel;
  std::string note;
};

/// φ is valid iff ¬φ is unsatisfiable.
inline ValidResult valid(const Formula& f, std::shared_ptr<const Signature> sig, const SearchOptions& opts = {}) {
  SatResult r = sat(mk::neg(f), std::move(sig), opts);
  ValidResult out;
  out.note = r.note;
  switch (r.status) {
    case SatStatus::Unsat: out.status = Validity::Valid; break;
    case SatStatus::Sat:
      out.status = Validity::Invalid;
      out.countermodel = std::move(r.witness);
      break;
    case SatStatus::Budget: out.status = Validity::Budget; break;
  }
  return out;
}

}  // namespace cdo
