#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cdo/error.hpp"
#include "cdo/model.hpp"
#include "cdo/priority.hpp"
#include "cdo/semantics.hpp"
#include "cdo/signature.hpp"

// Model file (JSON object; any other key is rejected):
//
//   "exogenous":  [name, ...]
//   "endogenous": [name, ...]
//   "ranges":     {name: [value, ...], ...}           values are strings or integers
//   "functions":  {name: {"parents": [name, ...],
//                         "table": [[[parent value, ...], output], ...]}, ...}
//   "priority":   [["X=x", "Y=y"], ...]                 lower atom first
//   "domain":     ["X=x", ...]                          optional; defaults to the
//                                                       endpoints of "priority"
//   "context":    {name: value, ...}                    the actual exogenous valuation
//
// A signature file holds only the first three keys; the remaining model keys
// are accepted and ignored when a model file is read as a signature.

namespace cdo {

using json = nlohmann::json;

namespace detail {

inline std::string token(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  throw ModelError(where + ": expected a string or integer value");
}

inline void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ModelError(where + ": expected an object");
  for (const auto& [k, _] : obj.items())
    if (!allowed.count(k)) throw ModelError(where + ": unknown key '" + k + "'");
}

inline std::vector<std::string> names(const json& doc, const char* key) {
  std::vector<std::string> out;
  if (!doc.contains(key)) return out;
  if (!doc[key].is_array()) throw ModelError(std::string("'") + key + "' must be an array of names");
  for (const auto& n : doc[key]) {
    if (!n.is_string()) throw ModelError(std::string("'") + key + "' must be an array of names");
    out.push_back(n.get<std::string>());
  }
  return out;
}

inline Atom parse_atom_text(const Signature& sig, const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos) throw ModelError("atom '" + text + "' is not of the form X=x");
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    return s;
  };
  return sig.atom(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
}

inline const std::set<std::string>& model_keys() {
  static const std::set<std::string> keys{"exogenous", "endogenous", "ranges", "functions", "priority", "domain", "context"};
  return keys;
}

}  // namespace detail

/// Signature from a signature or model document.
inline std::shared_ptr<const Signature> signature_from_json(const json& doc) {
  detail::check_keys(doc, detail::model_keys(), "signature");
  if (!doc.contains("endogenous")) throw ModelError("signature: missing 'endogenous'");
  if (!doc.contains("ranges") || !doc["ranges"].is_object()) throw ModelError("signature: missing 'ranges' object");
  const json& ranges = doc["ranges"];
  auto decl = [&](const std::vector<std::string>& ns) {
    std::vector<std::pair<std::string, std::vector<std::string>>> out;
    for (const auto& n : ns) {
      if (!ranges.contains(n)) throw ModelError("signature: no range for '" + n + "'");
      const json& r = ranges[n];
      if (!r.is_array()) throw ModelError("signature: range of '" + n + "' must be an array");
      std::vector<std::string> vals;
      for (const auto& v : r) vals.push_back(detail::token(v, "range of " + n));
      out.emplace_back(n, std::move(vals));
    }
    return out;
  };
  auto exo = detail::names(doc, "exogenous");
  auto endo = detail::names(doc, "endogenous");
  for (const auto& [k, _] : ranges.items())
    if (std::find(exo.begin(), exo.end(), k) == exo.end() && std::find(endo.begin(), endo.end(), k) == endo.end())
      throw ModelError("signature: range given for undeclared variable '" + k + "'");
  return std::make_shared<const Signature>(decl(exo), decl(endo));
}

/// A model document after structural parsing; `report` lists invariant
/// violations (empty when the model is usable).
struct ModelFile {
  std::shared_ptr<const Signature> signature;
  std::optional<CausalModel> causal;
  PriorityOrdering priority;
  ValidationReport report;

  /// The validated model; throws ModelError listing every problem otherwise.
  CausalDeonticModel model() const {
    if (!report.ok() || !causal) {
      std::string msg = "invalid model:";
      for (const auto& e : report.errors) msg += "\n  " + e;
      throw ModelError(msg);
    }
    return CausalDeonticModel(*causal, priority);
  }
};

/// Parses a model document. Malformed structure throws ModelError; semantic
/// problems (cycles, partial tables, bad priority) go into the report.
inline ModelFile model_from_json(const json& doc) {
  ModelFile out;
  out.signature = signature_from_json(doc);
  const Signature& sig = *out.signature;

  std::vector<StructuralFunction> fns(sig.size());
  const json functions = doc.value("functions", json::object());
  if (!functions.is_object()) throw ModelError("functions: expected an object");
  for (VarId x : sig.endogenous()) {
    const std::string& name = sig.var(x).name;
    if (!functions.contains(name)) throw ModelError("functions: no function for '" + name + "'");
    const json& fj = functions[name];
    detail::check_keys(fj, {"parents", "table"}, "function of " + name);
    StructuralFunction f;
    for (const auto& p : detail::names(fj, "parents")) f.parents.push_back(sig.id(p));
    std::size_t rows = 1;
    for (VarId p : f.parents) rows *= sig.range_size(p);
    f.table.assign(rows, kFree);
    if (!fj.contains("table") || !fj["table"].is_array()) throw ModelError("function of " + name + ": missing 'table' array");
    for (const auto& row : fj["table"]) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_array())
        throw ModelError("function of " + name + ": each row must be [[parent values...], output]");
      if (row[0].size() != f.parents.size())
        throw ModelError("function of " + name + ": row has " + std::to_string(row[0].size()) + " parent values, expected " +
                         std::to_string(f.parents.size()));
      std::size_t idx = 0;
      for (std::size_t i = 0; i < f.parents.size(); ++i)
        idx = idx * sig.range_size(f.parents[i]) +
              static_cast<std::size_t>(sig.value_id(f.parents[i], detail::token(row[0][i], "function of " + name)));
      const ValueId outv = sig.value_id(x, detail::token(row[1], "function of " + name));
      if (f.table[idx] != kFree) throw ModelError("function of " + name + ": duplicate row");
      f.table[idx] = outv;
    }
    fns[static_cast<std::size_t>(x)] = std::move(f);
  }
  for (const auto& [k, _] : functions.items()) {
    VarId v = sig.find(k);
    if (v < 0 || sig.is_exogenous(v)) throw ModelError("functions: '" + k + "' is not an endogenous variable");
  }
  auto fset = std::make_shared<const FunctionSet>(out.signature, std::move(fns));

  Context u;
  const json ctx = doc.value("context", json::object());
  if (!ctx.is_object()) throw ModelError("context: expected an object");
  u.values.assign(sig.exogenous_count(), kFree);
  for (const auto& [k, v] : ctx.items()) {
    VarId var = sig.id(k);
    if (!sig.is_exogenous(var)) throw ModelError("context: '" + k + "' is not exogenous");
    u.values[static_cast<std::size_t>(var)] = sig.value_id(var, detail::token(v, "context"));
  }
  for (std::size_t i = 0; i < u.values.size(); ++i)
    if (u.values[i] == kFree) throw ModelError("context: missing value for '" + sig.var(static_cast<VarId>(i)).name + "'");

  std::vector<std::pair<Atom, Atom>> edges;
  if (doc.contains("priority")) {
    if (!doc["priority"].is_array()) throw ModelError("priority: expected an array of [lower, higher] pairs");
    for (const auto& e : doc["priority"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
        throw ModelError("priority: each edge must be [\"X=x\", \"Y=y\"]");
      edges.emplace_back(detail::parse_atom_text(sig, e[0].get<std::string>()),
                         detail::parse_atom_text(sig, e[1].get<std::string>()));
    }
  }
  out.priority = PriorityOrdering::from_edges(edges);
  if (doc.contains("domain")) {
    if (!doc["domain"].is_array()) throw ModelError("domain: expected an array of atoms");
    out.priority.domain.clear();
    for (const auto& a : doc["domain"]) {
      if (!a.is_string()) throw ModelError("domain: expected an array of atoms");
      out.priority.domain.push_back(detail::parse_atom_text(sig, a.get<std::string>()));
    }
    std::sort(out.priority.domain.begin(), out.priority.domain.end());
    out.priority.domain.erase(std::unique(out.priority.domain.begin(), out.priority.domain.end()), out.priority.domain.end());
  }

  if (fset->acyclic() && std::none_of(fset->functions().begin(), fset->functions().end(), [](const StructuralFunction& f) {
        return std::find(f.table.begin(), f.table.end(), kFree) != f.table.end();
      })) {
    out.causal.emplace(fset, u);
  } else {
    Assignment a;
    a.values.assign(sig.size(), 0);
    std::copy(u.values.begin(), u.values.end(), a.values.begin());
    out.causal.emplace(fset, a);
  }
  out.report = validate(*out.causal);
  try {
    closure(out.priority, &sig);
  } catch (const ModelError& e) {
    out.report.errors.push_back(e.what());
  }
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelError("'" + path + "' is not valid JSON: " + e.what());
  }
}

/// Loads and validates a model file; throws ModelError on any problem.
inline CausalDeonticModel load_model(const std::string& path) { return model_from_json(read_json_file(path)).model(); }

inline std::shared_ptr<const Signature> load_signature(const std::string& path) {
  return signature_from_json(read_json_file(path));
}

inline json signature_to_json(const Signature& sig) {
  json doc;
  doc["exogenous"] = json::array();
  doc["endogenous"] = json::array();
  doc["ranges"] = json::object();
  for (const auto& v : sig.vars()) {
    doc[v.exogenous ? "exogenous" : "endogenous"].push_back(v.name);
    doc["ranges"][v.name] = v.range;
  }
  return doc;
}

/// Model document in the format read by model_from_json.
inline json model_to_json(const CausalDeonticModel& m) {
  const Signature& sig = m.signature();
  json doc = signature_to_json(sig);
  doc["functions"] = json::object();
  for (VarId x : sig.endogenous()) {
    const auto& f = m.functions().function(x);
    json fj;
    fj["parents"] = json::array();
    for (VarId p : f.parents) fj["parents"].push_back(sig.var(p).name);
    fj["table"] = json::array();
    std::vector<ValueId> digits(f.parents.size(), 0);
    for (std::size_t row = 0; row < f.table.size(); ++row) {
      std::size_t r = row;
      for (std::size_t i = f.parents.size(); i-- > 0;) {
        digits[i] = static_cast<ValueId>(r % sig.range_size(f.parents[i]));
        r /= sig.range_size(f.parents[i]);
      }
      json in = json::array();
      for (std::size_t i = 0; i < f.parents.size(); ++i) in.push_back(sig.value_name(f.parents[i], digits[i]));
      fj["table"].push_back(json::array({in, sig.value_name(x, f.table[row])}));
    }
    doc["functions"][sig.var(x).name] = fj;
  }
  doc["priority"] = json::array();
  for (const auto& [lo, hi] : m.priority().edges)
    doc["priority"].push_back(json::array({sig.atom_string(lo), sig.atom_string(hi)}));
  std::set<Atom> endpoints;
  for (const auto& [lo, hi] : m.priority().edges) {
    endpoints.insert(lo);
    endpoints.insert(hi);
  }
  if (std::vector<Atom>(endpoints.begin(), endpoints.end()) != m.priority().domain) {
    doc["domain"] = json::array();
    for (Atom a : m.priority().domain) doc["domain"].push_back(sig.atom_string(a));
  }
  doc["context"] = json::object();
  const Context u = m.causal().context();
  for (std::size_t i = 0; i < u.values.size(); ++i)
    doc["context"][sig.var(static_cast<VarId>(i)).name] = sig.value_name(static_cast<VarId>(i), u.values[i]);
  return doc;
}

}  // namespace cdo
