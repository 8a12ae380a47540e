#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cdo/error.hpp"

namespace cdo {

using VarId = int;
using ValueId = int;
using ContextId = std::size_t;

/// Marks a variable that is not forced by an intervention, or an unknown value.
inline constexpr ValueId kFree = -1;

struct Variable {
  std::string name;
  std::vector<std::string> range;
  bool exogenous = false;
};

/// An atom `X=x` with both sides resolved against a signature.
struct Atom {
  VarId var = 0;
  ValueId value = 0;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

/// A total valuation of all variables, indexed by VarId.
struct Assignment {
  std::vector<ValueId> values;

  ValueId operator[](VarId v) const { return values[static_cast<std::size_t>(v)]; }
  bool satisfies(Atom a) const { return (*this)[a.var] == a.value; }

  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// A total valuation of the exogenous variables, in declaration order.
struct Context {
  std::vector<ValueId> values;

  friend auto operator<=>(const Context&, const Context&) = default;
};

/// An ordered list of `X=x` settings on endogenous variables.
struct Intervention {
  std::vector<Atom> settings;

  bool empty() const { return settings.empty(); }
  std::size_t size() const { return settings.size(); }

  /// Same settings sorted by variable.
  Intervention canonical() const {
    Intervention out = *this;
    std::sort(out.settings.begin(), out.settings.end());
    return out;
  }

  friend auto operator<=>(const Intervention&, const Intervention&) = default;
};

namespace detail {

inline bool is_ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
inline bool is_value_char(char c) { return is_ident_char(c); }

inline bool valid_variable_name(std::string_view s) {
  return !s.empty() && is_ident_start(s.front()) &&
         std::all_of(s.begin(), s.end(), is_ident_char);
}

inline bool valid_value_token(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_value_char);
}

}  // namespace detail

/// Exogenous and endogenous variables with finite ranges.
///
/// Exogenous variables take ids `0 .. exogenous_count()-1`, endogenous ones
/// follow. Values are opaque tokens ordered by declaration.
class Signature {
 public:
  Signature() = default;

  /// Builds a signature; throws ModelError on an ill-formed declaration.
  Signature(std::vector<std::pair<std::string, std::vector<std::string>>> exogenous,
            std::vector<std::pair<std::string, std::vector<std::string>>> endogenous) {
    num_exogenous_ = exogenous.size();
    for (auto& [name, range] : exogenous) add(std::move(name), std::move(range), true);
    for (auto& [name, range] : endogenous) add(std::move(name), std::move(range), false);
    if (endogenous_count() == 0) throw ModelError("signature has no endogenous variables");
    atom_offset_.resize(vars_.size() + 1, 0);
    for (std::size_t i = 0; i < vars_.size(); ++i)
      atom_offset_[i + 1] = atom_offset_[i] + vars_[i].range.size();
  }

  std::size_t size() const { return vars_.size(); }
  std::size_t exogenous_count() const { return num_exogenous_; }
  std::size_t endogenous_count() const { return vars_.size() - num_exogenous_; }

  const Variable& var(VarId v) const { return vars_.at(static_cast<std::size_t>(v)); }
  const std::vector<Variable>& vars() const { return vars_; }
  bool is_exogenous(VarId v) const { return static_cast<std::size_t>(v) < num_exogenous_; }
  std::size_t range_size(VarId v) const { return var(v).range.size(); }

  std::vector<VarId> exogenous() const { return ids(0, num_exogenous_); }
  std::vector<VarId> endogenous() const { return ids(num_exogenous_, vars_.size()); }

  /// Variable id by name, or -1.
  VarId find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? -1 : it->second;
  }

  VarId id(std::string_view name) const {
    VarId v = find(name);
    if (v < 0) throw ModelError("unknown variable '" + std::string(name) + "'");
    return v;
  }

  /// Value id by token, or -1.
  ValueId find_value(VarId v, std::string_view token) const {
    const auto& r = var(v).range;
    auto it = std::find(r.begin(), r.end(), token);
    return it == r.end() ? -1 : static_cast<ValueId>(it - r.begin());
  }

  ValueId value_id(VarId v, std::string_view token) const {
    ValueId x = find_value(v, token);
    if (x < 0)
      throw ModelError("value '" + std::string(token) + "' not in range of " + var(v).name);
    return x;
  }

  bool in_range(VarId v, ValueId x) const {
    return v >= 0 && static_cast<std::size_t>(v) < vars_.size() && x >= 0 &&
           static_cast<std::size_t>(x) < range_size(v);
  }

  const std::string& value_name(VarId v, ValueId x) const { return var(v).range.at(static_cast<std::size_t>(x)); }

  Atom atom(std::string_view name, std::string_view token) const {
    VarId v = id(name);
    return {v, value_id(v, token)};
  }

  std::string atom_string(Atom a) const { return var(a.var).name + "=" + value_name(a.var, a.value); }

  /// Dense index of an atom in `0 .. atom_count()-1`.
  std::size_t atom_index(Atom a) const { return atom_offset_[static_cast<std::size_t>(a.var)] + static_cast<std::size_t>(a.value); }
  std::size_t atom_count() const { return atom_offset_.empty() ? 0 : atom_offset_.back(); }

  std::vector<Atom> all_atoms() const {
    std::vector<Atom> out;
    for (std::size_t v = 0; v < vars_.size(); ++v)
      for (std::size_t x = 0; x < vars_[v].range.size(); ++x)
        out.push_back({static_cast<VarId>(v), static_cast<ValueId>(x)});
    return out;
  }

  /// Number of exogenous valuations; 1 when there are no exogenous variables.
  std::size_t context_count() const {
    std::size_t n = 1;
    for (std::size_t v = 0; v < num_exogenous_; ++v) n *= vars_[v].range.size();
    return n;
  }

  /// Contexts are numbered in mixed radix, first exogenous variable most significant.
  Context context(ContextId id) const {
    Context c;
    c.values.assign(num_exogenous_, 0);
    for (std::size_t i = num_exogenous_; i-- > 0;) {
      auto r = vars_[i].range.size();
      c.values[i] = static_cast<ValueId>(id % r);
      id /= r;
    }
    return c;
  }

  ContextId context_id(const Context& c) const {
    ContextId id = 0;
    for (std::size_t i = 0; i < num_exogenous_; ++i) id = id * vars_[i].range.size() + static_cast<std::size_t>(c.values.at(i));
    return id;
  }

  std::string context_string(const Context& c) const {
    std::string s = "{";
    for (std::size_t i = 0; i < c.values.size(); ++i) {
      if (i) s += ",";
      s += atom_string({static_cast<VarId>(i), c.values[i]});
    }
    return s + "}";
  }

  std::string intervention_string(const Intervention& iv) const {
    std::string s = "[";
    for (std::size_t i = 0; i < iv.settings.size(); ++i) {
      if (i) s += ",";
      s += atom_string(iv.settings[i]);
    }
    return s + "]";
  }

  std::string assignment_string(const Assignment& a) const {
    std::string s;
    for (std::size_t v = 0; v < a.values.size(); ++v) {
      if (v) s += ",";
      s += atom_string({static_cast<VarId>(v), a.values[v]});
    }
    return s;
  }

  /// Throws ModelError unless the intervention targets distinct endogenous
  /// variables with in-range values.
  void check_intervention(const Intervention& iv) const {
    std::vector<bool> seen(vars_.size(), false);
    for (Atom a : iv.settings) {
      if (a.var < 0 || static_cast<std::size_t>(a.var) >= vars_.size()) throw ModelError("intervention on unknown variable");
      if (is_exogenous(a.var)) throw ModelError("cannot intervene on exogenous variable " + var(a.var).name);
      if (!in_range(a.var, a.value)) throw ModelError("intervention value out of range for " + var(a.var).name);
      if (seen[static_cast<std::size_t>(a.var)]) throw ModelError("variable " + var(a.var).name + " set twice in intervention");
      seen[static_cast<std::size_t>(a.var)] = true;
    }
  }

  /// Enumerates every intervention on the endogenous variables (including the
  /// empty one): subsets in increasing size, then lexicographic.
  std::size_t intervention_count() const {
    std::size_t n = 1;
    for (std::size_t v = num_exogenous_; v < vars_.size(); ++v) n *= vars_[v].range.size() + 1;
    return n;
  }

  friend bool operator==(const Signature& a, const Signature& b) {
    return a.num_exogenous_ == b.num_exogenous_ && a.vars_.size() == b.vars_.size() &&
           std::equal(a.vars_.begin(), a.vars_.end(), b.vars_.begin(), [](const Variable& x, const Variable& y) {
             return x.name == y.name && x.range == y.range && x.exogenous == y.exogenous;
           });
  }

 private:
  void add(std::string name, std::vector<std::string> range, bool exo) {
    if (!detail::valid_variable_name(name)) throw ModelError("invalid variable name '" + name + "'");
    if (index_.count(name)) throw ModelError("variable '" + name + "' declared twice");
    if (range.empty()) throw ModelError("variable '" + name + "' has an empty range");
    for (std::size_t i = 0; i < range.size(); ++i) {
      if (!detail::valid_value_token(range[i]))
        throw ModelError("invalid value token '" + range[i] + "' for " + name);
      if (std::find(range.begin(), range.begin() + static_cast<std::ptrdiff_t>(i), range[i]) != range.begin() + static_cast<std::ptrdiff_t>(i))
        throw ModelError("value '" + range[i] + "' repeated in range of " + name);
    }
    index_.emplace(name, static_cast<VarId>(vars_.size()));
    vars_.push_back({std::move(name), std::move(range), exo});
  }

  std::vector<VarId> ids(std::size_t lo, std::size_t hi) const {
    std::vector<VarId> out(hi - lo);
    std::iota(out.begin(), out.end(), static_cast<VarId>(lo));
    return out;
  }

  std::vector<Variable> vars_;
  std::size_t num_exogenous_ = 0;
  std::unordered_map<std::string, VarId> index_;
  std::vector<std::size_t> atom_offset_;
};

/// Every intervention over the endogenous variables of `sig`, the empty one
/// first, then by number of variables, then lexicographically.
inline std::vector<Intervention> all_interventions(const Signature& sig) {
  auto endo = sig.endogenous();
  std::vector<Intervention> out;
  const std::size_t n = endo.size();
  for (std::size_t k = 0; k <= n; ++k) {
    // choose k variables (lexicographic combinations), then all value vectors
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      std::vector<ValueId> vals(k, 0);
      while (true) {
        Intervention iv;
        for (std::size_t i = 0; i < k; ++i) iv.settings.push_back({endo[pick[i]], vals[i]});
        out.push_back(std::move(iv));
        std::size_t i = k;
        while (i > 0) {
          --i;
          if (static_cast<std::size_t>(++vals[i]) < sig.range_size(endo[pick[i]])) break;
          vals[i] = 0;
          if (i == 0) { i = k + 1; break; }
        }
        if (k == 0 || i == k + 1) break;
      }
      std::size_t j = k;
      while (j > 0 && pick[j - 1] == n - k + (j - 1)) --j;
      if (j == 0) break;
      ++pick[j - 1];
      for (std::size_t t = j; t < k; ++t) pick[t] = pick[t - 1] + 1;
    }
  }
  return out;
}

}  // namespace cdo
