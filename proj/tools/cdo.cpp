// cdo: command-line front end for causal deontic models.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdo/cdo.hpp"

namespace {

enum Exit { kOk = 0, kNegative = 1, kInputError = 2, kBudget = 3 };

struct Config {
  std::string model;
  std::string signature;
  std::string formula;
  std::string batch;
  std::string format = "human";
  bool witness = false;
  std::size_t expansion_cap = cdo::kDefaultExpansionCap;
  std::size_t budget = cdo::SearchOptions{}.budget;
  std::uint64_t seed = 1;
  bool seeded = false;
  std::size_t trials = 100;
  unsigned jobs = 1;
};

struct Query {
  std::size_t line = 0;
  std::string text;
};

/// Tracks the exit status over a run: errors beat budget, budget beats negatives.
struct Outcome {
  bool error = false, budget = false, negative = false;
  int code() const { return error ? kInputError : budget ? kBudget : negative ? kNegative : kOk; }
};

bool lines_mode(const Config& c) { return c.format == "lines"; }

void emit(const cdo::json& record) { std::cout << record.dump() << '\n'; }

std::vector<Query> queries(const Config& c) {
  if (c.formula.empty() == c.batch.empty()) throw CLI::ValidationError("give exactly one of --formula and --batch");
  if (!c.formula.empty()) return {{0, c.formula}};
  std::ifstream in(c.batch);
  if (!in) throw cdo::ModelError("cannot open '" + c.batch + "'");
  std::vector<Query> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.push_back({n, line.substr(first, last - first + 1)});
  }
  return out;
}

std::string where(const Query& q) { return q.line ? "line " + std::to_string(q.line) + ", " : ""; }

/// Reports a per-query error; parse errors get a caret under the column.
void report_error(const Config& c, const Query& q, const std::exception& e, Outcome& out) {
  out.error = true;
  if (lines_mode(c)) {
    cdo::json r{{"formula", q.text}, {"result", "error"}, {"error", e.what()}};
    if (q.line) r["line"] = q.line;
    if (auto* pe = dynamic_cast<const cdo::ParseError*>(&e)) r["column"] = pe->column();
    emit(r);
    return;
  }
  std::cerr << "error: " << where(q) << e.what() << '\n';
  if (auto* pe = dynamic_cast<const cdo::ParseError*>(&e)) {
    std::cerr << "  " << q.text << "\n  " << std::string(pe->column() > 0 ? pe->column() - 1 : 0, ' ') << "^\n";
  }
}

void print_warnings(const Config& c, const cdo::ValidationReport& rep) {
  if (lines_mode(c)) return;
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
}

cdo::CausalDeonticModel load_model(const Config& c) {
  if (c.model.empty()) throw CLI::ValidationError("this command needs --model");
  cdo::ModelFile file = cdo::model_from_json(cdo::read_json_file(c.model));
  print_warnings(c, file.report);
  return file.model();
}

std::shared_ptr<const cdo::Signature> load_signature(const Config& c) {
  if (!c.signature.empty() && !c.model.empty()) throw CLI::ValidationError("give only one of --signature and --model");
  if (!c.signature.empty()) return cdo::load_signature(c.signature);
  if (!c.model.empty()) return cdo::load_signature(c.model);
  throw CLI::ValidationError("this command needs --signature or --model");
}

std::string describe(const cdo::Signature& sig, const cdo::DeonticVerdict& v, cdo::Atom goal,
                     const cdo::Intervention& action, const cdo::Context& u) {
  switch (v.failure) {
    case cdo::DeonticFailure::None:
      return sig.intervention_string(action) + " reaches {" + sig.assignment_string(v.outcome) + "}";
    case cdo::DeonticFailure::GoalAlreadyHolds:
      return sig.atom_string(goal) + " already holds in " + sig.context_string(u);
    case cdo::DeonticFailure::ActionMissesGoal:
      return sig.intervention_string(action) + " does not bring about " + sig.atom_string(goal);
    case cdo::DeonticFailure::Dominated:
      return sig.intervention_string(*v.alternative) + " dominates";
  }
  return {};
}

std::optional<std::string> deontic_witness(const cdo::CausalDeonticModel& m, const cdo::Formula& f) {
  if (auto* o = f.as<cdo::ObligF>())
    return describe(m.signature(), cdo::check_obligation(m, o->goal, o->action, o->ctx), o->goal, o->action, o->ctx);
  if (auto* p = f.as<cdo::PermitF>())
    return describe(m.signature(), cdo::check_permission(m, p->goal, p->action, p->ctx), p->goal, p->action, p->ctx);
  return std::nullopt;
}

int cmd_check(const Config& c) {
  const auto qs = queries(c);
  const auto m = load_model(c);
  Outcome out;
  for (const Query& q : qs) {
    try {
      const cdo::Formula f = cdo::parse(q.text, m.signature());
      const bool holds = cdo::eval(m, f);
      out.negative |= !holds;
      std::optional<std::string> w;
      if (c.witness) w = deontic_witness(m, f);
      if (lines_mode(c)) {
        cdo::json r{{"formula", q.text}, {"result", holds ? "true" : "false"}};
        if (q.line) r["line"] = q.line;
        if (w) r["witness"] = *w;
        emit(r);
      } else {
        std::cout << (holds ? "true" : "false");
        if (q.line) std::cout << "  " << q.text;
        std::cout << '\n';
        if (w) std::cout << "witness: " << *w << '\n';
      }
    } catch (const cdo::Error& e) {
      report_error(c, q, e, out);
    }
  }
  return out.code();
}

int cmd_order(const Config& c) {
  const auto m = load_model(c);
  const auto& sig = m.signature();
  const auto worlds = cdo::all_worlds(m.functions());
  const auto s = cdo::order_structure(m.priority(), worlds);
  auto name = [](std::size_t i) { return "w" + std::to_string(i + 1); };
  if (lines_mode(c)) {
    cdo::json r;
    r["worlds"] = cdo::json::array();
    for (const auto& w : worlds) r["worlds"].push_back(sig.assignment_string(w));
    auto names = [&](const std::vector<std::size_t>& ids) {
      cdo::json a = cdo::json::array();
      for (auto i : ids) a.push_back(name(i));
      return a;
    };
    r["classes"] = cdo::json::array();
    for (const auto& cl : s.classes) r["classes"].push_back(names(cl));
    r["covers"] = cdo::json::array();
    for (const auto& [lo, hi] : s.covers) r["covers"].push_back({lo + 1, hi + 1});
    r["max"] = names(s.max_worlds);
    r["min"] = names(s.min_worlds);
    emit(r);
    return kOk;
  }
  auto list = [&](const std::vector<std::size_t>& ids) {
    std::string t;
    for (auto i : ids) t += (t.empty() ? "" : " ") + name(i);
    return t;
  };
  std::cout << "worlds:\n";
  for (std::size_t i = 0; i < worlds.size(); ++i) std::cout << "  " << name(i) << " {" << sig.assignment_string(worlds[i]) << "}" << '\n';
  std::cout << "classes (top first):\n";
  for (std::size_t k = 0; k < s.classes.size(); ++k) std::cout << "  " << k + 1 << ": " << list(s.classes[k]) << '\n';
  std::cout << "covers:\n";
  for (const auto& [lo, hi] : s.covers) std::cout << "  " << lo + 1 << " < " << hi + 1 << '\n';
  std::cout << "max: " << list(s.max_worlds) << "\nmin: " << list(s.min_worlds) << '\n';
  return kOk;
}

cdo::SearchOptions search_options(const Config& c) {
  cdo::SearchOptions o;
  o.budget = c.budget;
  o.expansion_cap = c.expansion_cap;
  o.workers = c.jobs;
  if (c.seeded) o.seed = c.seed;
  return o;
}

int cmd_sat(const Config& c) {
  const auto qs = queries(c);
  const auto sig = load_signature(c);
  Outcome out;
  for (const Query& q : qs) {
    try {
      const cdo::Formula f = cdo::parse(q.text, *sig);
      const auto r = cdo::sat(f, sig, search_options(c));
      const char* verdict = r.status == cdo::SatStatus::Sat ? "SAT" : r.status == cdo::SatStatus::Unsat ? "UNSAT" : "BUDGET";
      out.negative |= r.status == cdo::SatStatus::Unsat;
      out.budget |= r.status == cdo::SatStatus::Budget;
      if (lines_mode(c)) {
        cdo::json rec{{"formula", q.text}, {"result", verdict}};
        if (q.line) rec["line"] = q.line;
        if (r.witness) rec["model"] = cdo::model_to_json(*r.witness);
        if (!r.note.empty()) rec["note"] = r.note;
        emit(rec);
      } else {
        if (q.line) std::cout << "# " << q.text << '\n';
        std::cout << verdict << '\n';
        if (r.witness) std::cout << cdo::model_to_json(*r.witness).dump(2) << '\n';
        if (!r.note.empty()) std::cerr << "note: " << r.note << '\n';
      }
    } catch (const cdo::CapExceeded& e) {
      out.budget = true;
      if (lines_mode(c)) emit({{"formula", q.text}, {"result", "BUDGET"}, {"note", e.what()}});
      else std::cout << "BUDGET\n", std::cerr << "note: " << e.what() << '\n';
    } catch (const cdo::Error& e) {
      report_error(c, q, e, out);
    }
  }
  return out.code();
}

int cmd_valid(const Config& c) {
  const auto qs = queries(c);
  const auto sig = load_signature(c);
  Outcome out;
  for (const Query& q : qs) {
    try {
      const cdo::Formula f = cdo::parse(q.text, *sig);
      const auto r = cdo::valid(f, sig, search_options(c));
      const char* verdict = r.status == cdo::Validity::Valid ? "valid" : r.status == cdo::Validity::Invalid ? "invalid" : "BUDGET";
      out.negative |= r.status == cdo::Validity::Invalid;
      out.budget |= r.status == cdo::Validity::Budget;
      if (lines_mode(c)) {
        cdo::json rec{{"formula", q.text}, {"result", verdict}};
        if (q.line) rec["line"] = q.line;
        if (c.witness && r.countermodel) rec["countermodel"] = cdo::model_to_json(*r.countermodel);
        emit(rec);
      } else {
        std::cout << verdict;
        if (q.line) std::cout << "  " << q.text;
        std::cout << '\n';
        if (c.witness && r.countermodel) std::cout << cdo::model_to_json(*r.countermodel).dump(2) << '\n';
        if (!r.note.empty()) std::cerr << "note: " << r.note << '\n';
      }
    } catch (const cdo::CapExceeded& e) {
      out.budget = true;
      if (lines_mode(c)) emit({{"formula", q.text}, {"result", "BUDGET"}, {"note", e.what()}});
      else std::cout << "BUDGET\n", std::cerr << "note: " << e.what() << '\n';
    } catch (const cdo::Error& e) {
      report_error(c, q, e, out);
    }
  }
  return out.code();
}

int cmd_expand(const Config& c) {
  const auto qs = queries(c);
  std::optional<cdo::CausalDeonticModel> m;
  std::shared_ptr<const cdo::Signature> sig;
  if (!c.model.empty() && c.signature.empty()) {
    m = load_model(c);
    sig = m->functions().signature_ptr();
  } else {
    sig = load_signature(c);
  }
  Outcome out;
  for (const Query& q : qs) {
    try {
      const cdo::Formula f = cdo::parse(q.text, *sig);
      const cdo::Formula g = m ? cdo::expand(f, *m, c.expansion_cap) : cdo::expand(f, *sig, c.expansion_cap);
      const std::string text = cdo::print(g, *sig);
      if (lines_mode(c)) {
        cdo::json rec{{"formula", q.text}, {"result", text}, {"size", cdo::formula_size(g)}};
        if (q.line) rec["line"] = q.line;
        emit(rec);
      } else {
        std::cout << text << '\n';
      }
    } catch (const cdo::CapExceeded& e) {
      out.budget = true;
      if (lines_mode(c)) emit({{"formula", q.text}, {"result", "BUDGET"}, {"note", e.what()}});
      else std::cerr << "error: " << where(q) << e.what() << '\n';
    } catch (const cdo::Error& e) {
      report_error(c, q, e, out);
    }
  }
  return out.code();
}

int cmd_fuzz(const Config& c) {
  const auto sig = load_signature(c);
  cdo::FuzzOptions o;
  o.models = c.trials;
  o.instances = c.trials;
  o.seed = c.seed;
  const auto rep = cdo::fuzz_axioms(sig, o);
  for (const auto& s : rep.schemata) {
    if (lines_mode(c)) {
      cdo::json rec{{"schema", s.name}, {"instances", s.instances}, {"passes", s.instances - s.failures}, {"failures", s.failures}};
      if (s.failures) rec["example"] = s.example;
      emit(rec);
    } else {
      std::cout << s.name << ": " << s.instances - s.failures << "/" << s.instances << " passed\n";
      if (s.failures) std::cout << "  falsified: " << s.example << '\n';
    }
  }
  if (!lines_mode(c)) std::cout << "models: " << rep.models << ", failures: " << rep.failures() << '\n';
  return rep.failures() ? kNegative : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning about instrumental obligation in causal deontic models"};
  app.require_subcommand(1);
  Config c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"human", "lines"}));
    sub->add_option("--seed", c.seed, "Random seed")->each([&](const std::string&) { c.seeded = true; });
  };
  auto add_query = [&](CLI::App* sub) {
    sub->add_option("-f,--formula", c.formula, "Formula to process");
    sub->add_option("--batch", c.batch, "File with one formula per line ('#' starts a comment line)");
    sub->add_option("--expansion-cap", c.expansion_cap, "Maximum nodes built by macro expansion")->check(CLI::PositiveNumber);
  };

  auto* check = app.add_subcommand("check", "Evaluate formulas in a model");
  check->add_option("-m,--model", c.model, "Model file")->required();
  check->add_flag("--witness", c.witness, "Explain obligation and permission verdicts");
  add_query(check);
  add_common(check);

  auto* order = app.add_subcommand("order", "Print the ideal ordering of the model's worlds");
  order->add_option("-m,--model", c.model, "Model file")->required();
  add_common(order);

  for (auto* sub : {app.add_subcommand("sat", "Decide satisfiability"), app.add_subcommand("valid", "Decide validity")}) {
    sub->add_option("-s,--signature", c.signature, "Signature file");
    sub->add_option("-m,--model", c.model, "Model file (its signature is used)");
    sub->add_option("--budget", c.budget, "Search nodes per slice")->check(CLI::PositiveNumber);
    sub->add_option("-j,--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--witness", c.witness, "Print countermodels");
    add_query(sub);
    add_common(sub);
  }

  auto* expand = app.add_subcommand("expand", "Rewrite macros into the core language");
  expand->add_option("-m,--model", c.model, "Model file (comparisons range over its priority domain)");
  expand->add_option("-s,--signature", c.signature, "Signature file (comparisons range over all atoms)");
  add_query(expand);
  add_common(expand);

  auto* fuzz = app.add_subcommand("fuzz", "Check the axioms on random models");
  fuzz->add_option("-s,--signature", c.signature, "Signature file");
  fuzz->add_option("-m,--model", c.model, "Model file (its signature is used)");
  fuzz->add_option("--trials", c.trials, "Random models, and instances per schema")->check(CLI::PositiveNumber);
  add_common(fuzz);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "check") return cmd_check(c);
    if (cmd == "order") return cmd_order(c);
    if (cmd == "sat") return cmd_sat(c);
    if (cmd == "valid") return cmd_valid(c);
    if (cmd == "expand") return cmd_expand(c);
    return cmd_fuzz(c);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const cdo::CapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
}
