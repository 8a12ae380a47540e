#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cdo/cdo.hpp"

namespace cdo::testing {

inline CausalDeonticModel weightloss() {
  static const CausalDeonticModel m = load_model(std::string(CDO_EXAMPLES) + "/weightloss.json");
  return m;
}

inline std::shared_ptr<const Signature> weightloss_signature() { return weightloss().functions().signature_ptr(); }

/// Assignment built from "X=v,..." text; must name every variable.
inline Assignment assignment(const Signature& sig, const std::string& text) {
  Assignment a;
  a.values.assign(sig.size(), kFree);
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string part = text.substr(start, end - start);
    const auto eq = part.find('=');
    const Atom at = sig.atom(part.substr(0, eq), part.substr(eq + 1));
    a.values[static_cast<std::size_t>(at.var)] = at.value;
    start = end + 1;
  }
  return a;
}

inline Atom atom(const Signature& sig, const std::string& text) {
  const auto eq = text.find('=');
  return sig.atom(text.substr(0, eq), text.substr(eq + 1));
}

inline Intervention iv(const Signature& sig, const std::vector<std::string>& atoms) {
  Intervention out;
  for (const auto& a : atoms) out.settings.push_back(atom(sig, a));
  return out.canonical();
}

inline Context ctx(const Signature& sig, const std::string& text) {
  Context u;
  u.values.assign(sig.exogenous_count(), kFree);
  if (text.empty()) return u;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const Atom a = atom(sig, text.substr(start, end - start));
    u.values[static_cast<std::size_t>(a.var)] = a.value;
    start = end + 1;
  }
  return u;
}

/// Actual world of `m` moved to the given context.
inline Assignment world(const CausalDeonticModel& m, const std::string& ctxt) {
  return m.at_context(ctx(m.signature(), ctxt)).actual();
}

}  // namespace cdo::testing
