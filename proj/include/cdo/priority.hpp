#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cdo/error.hpp"
#include "cdo/model.hpp"
#include "cdo/signature.hpp"

namespace cdo {

/// ⟨Φ, ≪⟩: a set of atoms and an importance relation over them.
/// An edge (a, b) reads a ≪ b, i.e. b is strictly more important than a.
struct PriorityOrdering {
  std::vector<Atom> domain;
  std::set<std::pair<Atom, Atom>> edges;

  /// Ordering whose domain is the set of edge endpoints.
  static PriorityOrdering from_edges(const std::vector<std::pair<Atom, Atom>>& edges) {
    PriorityOrdering p;
    for (const auto& e : edges) {
      p.edges.insert(e);
      p.domain.push_back(e.first);
      p.domain.push_back(e.second);
    }
    std::sort(p.domain.begin(), p.domain.end());
    p.domain.erase(std::unique(p.domain.begin(), p.domain.end()), p.domain.end());
    return p;
  }

  bool precedes(Atom lo, Atom hi) const { return edges.count({lo, hi}) != 0; }
  bool in_domain(Atom a) const { return std::binary_search(domain.begin(), domain.end(), a); }

  friend bool operator==(const PriorityOrdering&, const PriorityOrdering&) = default;
};

namespace detail {

inline std::string describe_cycle(const std::vector<Atom>& cycle, const Signature* sig) {
  std::string s;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (i) s += " << ";
    s += sig ? sig->atom_string(cycle[i]) : ("#" + std::to_string(cycle[i].var) + "=" + std::to_string(cycle[i].value));
  }
  return s;
}

}  // namespace detail

/// Transitive closure of `p`. Throws PriorityCycleError naming a cycle if the
/// closure is not a strict partial order, and ModelError if an edge endpoint
/// is outside the domain.
inline PriorityOrdering closure(const PriorityOrdering& p, const Signature* sig = nullptr) {
  PriorityOrdering out;
  out.domain = p.domain;
  std::sort(out.domain.begin(), out.domain.end());
  out.domain.erase(std::unique(out.domain.begin(), out.domain.end()), out.domain.end());
  const auto& dom = out.domain;
  const std::size_t n = dom.size();
  auto index = [&](Atom a) -> std::size_t {
    auto it = std::lower_bound(dom.begin(), dom.end(), a);
    if (it == dom.end() || *it != a)
      throw ModelError("priority edge endpoint " + (sig ? sig->atom_string(a) : std::string("?")) + " is not in the domain");
    return static_cast<std::size_t>(it - dom.begin());
  };
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& [lo, hi] : p.edges) {
    auto i = index(lo), j = index(hi);
    reach[i][j] = true;
    succ[i].push_back(j);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!reach[i][i]) continue;
    // recover one cycle through i by BFS over the original edges
    std::vector<std::size_t> parent(n, n);
    std::vector<std::size_t> queue{i};
    std::vector<bool> seen(n, false);
    std::size_t last = n;
    for (std::size_t q = 0; q < queue.size() && last == n; ++q) {
      for (std::size_t j : succ[queue[q]]) {
        if (j == i) { last = queue[q]; break; }
        if (seen[j]) continue;
        seen[j] = true;
        parent[j] = queue[q];
        queue.push_back(j);
      }
    }
    std::vector<Atom> cycle;
    for (std::size_t v = last; v != i && v != n; v = parent[v]) cycle.push_back(dom[v]);
    cycle.push_back(dom[i]);
    std::reverse(cycle.begin(), cycle.end());
    cycle.push_back(dom[i]);
    throw PriorityCycleError("priority edges contain a cycle: " + detail::describe_cycle(cycle, sig));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j]) out.edges.insert({dom[i], dom[j]});
  return out;
}

/// A ≤_P A′ over the domain of `p`, which is expected to be closed.
///
/// Holds iff every domain atom true in A is true in A′, or some atom Y=y true
/// only in A′ outranks every atom true only in A.
inline bool ideal_leq(const PriorityOrdering& p, const Assignment& a, const Assignment& b) {
  std::vector<Atom> only_a, only_b;
  for (Atom x : p.domain) {
    const bool in_a = a.satisfies(x), in_b = b.satisfies(x);
    if (in_a && !in_b) only_a.push_back(x);
    else if (in_b && !in_a) only_b.push_back(x);
  }
  if (only_a.empty()) return true;
  return std::any_of(only_b.begin(), only_b.end(), [&](Atom y) {
    return std::all_of(only_a.begin(), only_a.end(), [&](Atom z) { return p.precedes(z, y); });
  });
}

/// A <_P A′: A ≤_P A′ and not A′ ≤_P A.
inline bool ideal_less(const PriorityOrdering& p, const Assignment& a, const Assignment& b) {
  return ideal_leq(p, a, b) && !ideal_leq(p, b, a);
}

/// Worlds with no strictly better world in `worlds`. Throws on empty input.
inline std::vector<Assignment> maxima(const PriorityOrdering& p, const std::vector<Assignment>& worlds) {
  if (worlds.empty()) throw ModelError("maxima of an empty world set");
  std::vector<Assignment> out;
  for (const auto& a : worlds)
    if (std::none_of(worlds.begin(), worlds.end(), [&](const Assignment& b) { return ideal_less(p, a, b); }))
      out.push_back(a);
  return out;
}

/// Worlds with no strictly worse world in `worlds`. Throws on empty input.
inline std::vector<Assignment> minima(const PriorityOrdering& p, const std::vector<Assignment>& worlds) {
  if (worlds.empty()) throw ModelError("minima of an empty world set");
  std::vector<Assignment> out;
  for (const auto& a : worlds)
    if (std::none_of(worlds.begin(), worlds.end(), [&](const Assignment& b) { return ideal_less(p, b, a); }))
      out.push_back(a);
  return out;
}

/// The ≤_P relation on a world set with mutually related worlds collapsed.
struct OrderStructure {
  /// Classes of world indices, listed from the top of the order down.
  std::vector<std::vector<std::size_t>> classes;
  /// Hasse edges between classes: (lower class, upper class).
  std::vector<std::pair<std::size_t, std::size_t>> covers;
  std::vector<std::size_t> max_worlds;
  std::vector<std::size_t> min_worlds;
};

/// Collapses strongly connected components of ≤_P, then keeps the covering
/// edges of the strict order between the components.
inline OrderStructure order_structure(const PriorityOrdering& p, const std::vector<Assignment>& worlds) {
  const std::size_t n = worlds.size();
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) leq[i][j] = ideal_leq(p, worlds[i], worlds[j]);
  // reachability along ≤ edges
  auto reach = leq;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  std::vector<std::size_t> comp(n, n);
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] != n) continue;
    comp[i] = classes.size();
    classes.push_back({i});
    for (std::size_t j = i + 1; j < n; ++j)
      if (comp[j] == n && reach[i][j] && reach[j][i]) {
        comp[j] = comp[i];
        classes.back().push_back(j);
      }
  }
  const std::size_t c = classes.size();
  std::vector<std::vector<bool>> below(c, std::vector<bool>(c, false));  // below[a][b]: a under b
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (comp[i] != comp[j] && reach[i][j]) below[comp[i]][comp[j]] = true;
  // order classes from the top: by number of classes strictly above
  std::vector<std::size_t> rank(c);
  for (std::size_t a = 0; a < c; ++a) rank[a] = static_cast<std::size_t>(std::count(below[a].begin(), below[a].end(), true));
  std::vector<std::size_t> perm(c);
  for (std::size_t a = 0; a < c; ++a) perm[a] = a;
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
  std::vector<std::size_t> pos(c);
  for (std::size_t k = 0; k < c; ++k) pos[perm[k]] = k;

  OrderStructure out;
  for (std::size_t k = 0; k < c; ++k) out.classes.push_back(classes[perm[k]]);
  for (std::size_t a = 0; a < c; ++a)
    for (std::size_t b = 0; b < c; ++b) {
      if (!below[a][b]) continue;
      bool covered = true;
      for (std::size_t m = 0; m < c && covered; ++m)
        if (below[a][m] && below[m][b]) covered = false;
      if (covered) out.covers.push_back({pos[a], pos[b]});
    }
  std::sort(out.covers.begin(), out.covers.end());
  for (std::size_t i = 0; i < n; ++i) {
    bool top = true, bottom = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (ideal_less(p, worlds[i], worlds[j])) top = false;
      if (ideal_less(p, worlds[j], worlds[i])) bottom = false;
    }
    if (top) out.max_worlds.push_back(i);
    if (bottom) out.min_worlds.push_back(i);
  }
  return out;
}

/// Compares the outcome of `first` in context `u` with the outcome of
/// `second` in context `u2`: true iff the former is ≤_P the latter.
inline bool post_intervention_leq(const CausalModel& m, const PriorityOrdering& p, const Intervention& first,
                                  const Context& u, const Intervention& second, const Context& u2) {
  const auto a1 = intervene(CausalModel(m.functions_ptr(), u), first).actual();
  const auto a2 = intervene(CausalModel(m.functions_ptr(), u2), second).actual();
  return ideal_leq(p, a1, a2);
}

}  // namespace cdo
