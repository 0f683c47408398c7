// peuf: command-line front end for the validity checker.
//
// Exit status: 0 valid (or success), 1 invalid (or a bench mismatch), 2 error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "peuf/peuf.hpp"

using nlohmann::json;
using namespace peuf;

namespace {

constexpr int kValid = 0;
constexpr int kInvalid = 1;
constexpr int kError = 2;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

json names(const ExprStore& s, const std::vector<SymbolId>& ids) {
  json a = json::array();
  for (SymbolId id : ids) a.push_back(s.symbols[id].name);
  return a;
}

json interpretation_json(const Interpretation& i) {
  json out = json::object();
  for (const auto& [name, table] : i.tables) {
    if (table.entries.size() == 1 && table.entries.begin()->first.empty()) {
      out[name] = table.entries.begin()->second;
      continue;
    }
    json t = json::array();
    for (const auto& [args, v] : table.entries) t.push_back({{"args", args}, {"value", v}});
    out[name] = {{"entries", t}, {"otherwise", table.otherwise}};
  }
  return out;
}

json counts_json(const OracleCounts& c) {
  json j = {{"consistent", c.consistent}, {"maximallyDiverse", c.maximallyDiverse}};
  j["rawPartitions"] = c.rawPartitions ? json(*c.rawPartitions) : json(nullptr);
  return j;
}

json verdict_json(const ExprStore& s, const Verdict& v) {
  json j = {{"method", method_name(v.method)},
            {"verdict", v.valid ? "valid" : "invalid"},
            {"seconds", v.seconds}};
  if (v.method != Method::Oracle) {
    j["gVars"] = v.gVars;
    j["pVars"] = v.pVars;
    j["propositionalVars"] = v.propositionalVars;
    j["cnf"] = {{"vars", v.cnfVars}, {"clauses", v.cnfClauses}};
    j["solver"] = {{"decisions", v.stats.decisions},
                   {"conflicts", v.stats.conflicts},
                   {"propagations", v.stats.propagations}};
  }
  if (v.method == Method::Pairwise) {
    j["eVars"] = v.eVars;
    j["eVarsUsed"] = v.eVarsUsed;
    j["transitivityConstraints"] = v.constraintCount;
  }
  if (v.method != Method::Oracle) {
    j["varCounts"] = {{"propositional", v.propositionalVars}, {"eVars", v.eVars}};
    j["constraintCount"] = v.constraintCount;
  }
  if (v.restriction) j["restriction"] = restriction_name(*v.restriction);
  if (v.counts) j["counts"] = counts_json(*v.counts);
  if (v.countermodel) {
    json blocks = json::array();
    for (const auto& b : v.countermodel->blocks) {
      json blk = json::array();
      for (ExprId t : b) blk.push_back(to_sexpr(s, t));
      blocks.push_back(blk);
    }
    j["countermodel"] = {{"interpretation", interpretation_json(v.countermodel->interpretation)},
                         {"blocks", blocks},
                         {"replayed", v.countermodel->replayed}};
  }
  return j;
}

std::string verdict_line(const Verdict& v) {
  std::ostringstream out;
  out << std::left << std::setw(9) << method_name(v.method) << (v.valid ? "valid  " : "invalid");
  if (v.method == Method::Bitvec) out << "  props=" << v.propositionalVars;
  if (v.method == Method::Pairwise) out << "  e-vars=" << v.eVars << "  transitivity=" << v.constraintCount;
  if (v.method != Method::Oracle) out << "  cnf=" << v.cnfVars << "/" << v.cnfClauses;
  if (v.restriction) out << "  restriction=" << restriction_name(*v.restriction);
  if (v.counts) out << "  consistent=" << v.counts->consistent << "  diverse=" << v.counts->maximallyDiverse;
  out << "  " << std::fixed << std::setprecision(4) << v.seconds << "s";
  return out.str();
}

struct Common {
  std::string input = "-";
  std::string output;
  std::size_t guard = default_guard();
};

int cmd_decide(const Common& c, const std::string& method, bool noTransitivity, bool asJson) {
  ExprStore s;
  ExprId f = parse(s, read_input(c.input));
  std::vector<Method> methods;
  if (method == "all") methods = {Method::Bitvec, Method::Pairwise, Method::Oracle};
  else if (auto m = parse_method(method)) methods = {*m};
  else throw CLI::ValidationError("--method", "unknown method '" + method + "'");

  json results = json::array();
  std::vector<Verdict> verdicts;
  for (Method m : methods) {
    DecideOptions opt;
    opt.method = m;
    opt.transitivity = !noTransitivity;
    opt.oracle.guard = c.guard;
    verdicts.push_back(decide_validity(s, f, opt));
    if (asJson) results.push_back(verdict_json(s, verdicts.back()));
    else std::cout << verdict_line(verdicts.back()) << "\n";
  }
  bool agree = true;
  for (const Verdict& v : verdicts) agree &= v.valid == verdicts.front().valid;
  if (asJson) std::cout << (results.size() == 1 ? results[0] : results).dump(2) << "\n";
  if (!agree) {
    std::cerr << "error: methods disagree\n";
    return kError;
  }
  if (!asJson && !verdicts.front().valid)
    for (const Verdict& v : verdicts)
      if (v.countermodel) {
        std::cout << "countermodel (" << method_name(v.method) << ", "
                  << (v.countermodel->replayed ? "confirmed" : "NOT confirmed") << "):\n";
        for (const auto& [name, t] : v.countermodel->interpretation.tables) {
          std::cout << "  " << name;
          if (t.entries.size() == 1 && t.entries.begin()->first.empty()) {
            std::cout << " = " << t.entries.begin()->second << "\n";
            continue;
          }
          std::cout << ":";
          for (const auto& [args, val] : t.entries) {
            std::cout << " (";
            for (std::size_t i = 0; i < args.size(); ++i) std::cout << (i ? " " : "") << args[i];
            std::cout << ")->" << val;
          }
          std::cout << " else " << t.otherwise << "\n";
        }
        break;
      }
  return verdicts.front().valid ? kValid : kInvalid;
}

int cmd_classify(const Common& c, bool dot) {
  ExprStore s;
  ExprId f = parse(s, read_input(c.input));
  ExprId nnf = to_nnf(s, f);
  PolarityReport r = classify(s, nnf);
  if (dot) {
    write_output(c.output, to_dot(s, nnf));
    return kValid;
  }
  json j = {{"nnf", to_sexpr(s, nnf)},
            {"gFunctions", names(s, r.gFuncs)},
            {"pFunctions", names(s, r.pFuncs)},
            {"negativeFormulas", r.negFormulas.size()},
            {"negativeTerms", r.negTerms.size()},
            {"peuf", peuf_accepts(s, nnf, r)}};
  json negTerms = json::array();
  for (ExprId t : r.negTerms) negTerms.push_back(to_sexpr(s, t));
  j["negativeTermList"] = negTerms;
  json formulaIds = json::array(), termIds = json::array();
  for (ExprId e : r.negFormulas) formulaIds.push_back(idx(e));
  for (ExprId e : r.negTerms) termIds.push_back(idx(e));
  j["negativeFormulaIds"] = formulaIds;
  j["negativeTermIds"] = termIds;
  write_output(c.output, j.dump(2) + "\n");
  return kValid;
}

json trace_json(const ExprStore& s, const std::vector<SymbolTrace>& trace) {
  json out = json::array();
  for (const SymbolTrace& t : trace) {
    json terms = json::array();
    for (std::size_t i = 0; i < t.terms.size(); ++i) {
      json row = {{"index", i + 1},
                  {"term", to_sexpr(s, t.terms[i])},
                  {"fresh", s.symbols[t.fresh[i]].name}};
      if (i < t.replacements.size()) row["replacement"] = to_sexpr(s, t.replacements[i]);
      terms.push_back(row);
    }
    out.push_back({{"symbol", s.symbols[t.symbol].name},
                   {"kind", t.predicate ? "predicate" : "function"},
                   {"polarity", t.polarity == Polarity::G ? "g" : t.polarity == Polarity::P ? "p" : "unclassified"},
                   {"applications", terms}});
  }
  return out;
}

int cmd_eliminate(const Common& c, bool ackermann, const std::string& format) {
  ExprStore s;
  ExprId f = parse(s, read_input(c.input));
  ExprId nnf = to_nnf(s, f);
  if (ackermann) {
    AckermannResult r = ackermann_eliminate(s, nnf);
    if (format == "json")
      write_output(c.output, json{{"formula", to_sexpr(s, r.formula)},
                                  {"body", to_sexpr(s, r.body)},
                                  {"constraints", to_sexpr(s, r.constraints)},
                                  {"trace", trace_json(s, r.trace)}}
                                     .dump(2) +
                                 "\n");
    else if (format == "dot") write_output(c.output, to_dot(s, r.formula));
    else write_output(c.output, to_document(s, r.formula));
    return kValid;
  }
  PolarityReport report = classify(s, nnf);
  EliminationResult r = eliminate_all(s, nnf, report);
  if (format == "json")
    write_output(c.output, json{{"fStar", to_sexpr(s, r.fStar)},
                                {"gVars", names(s, r.sigmaGStar)},
                                {"pVars", names(s, r.sigmaPStar)},
                                {"trace", trace_json(s, r.trace)}}
                                   .dump(2) +
                               "\n");
  else if (format == "dot") write_output(c.output, to_dot(s, r.fStar));
  else write_output(c.output, to_document(s, r.fStar));
  return kValid;
}

int cmd_encode(const Common& c, const std::string& encoding, bool noTransitivity, const std::string& format) {
  ExprStore s;
  ExprId f = parse(s, read_input(c.input));
  auto m = parse_method(encoding);
  if (!m || *m == Method::Oracle) throw CLI::ValidationError("--encode", "expected bitvec or pairwise");
  Reduction r = reduce(s, f, *m, !noTransitivity);
  if (format == "dimacs") {
    write_output(c.output, to_dimacs(r.cnf));
  } else if (format == "prefix") {
    std::string text = to_prefix(r.props, r.formula) + "\n";
    if (r.range != r.props.mk_true()) text = "range " + to_prefix(r.props, r.range) + "\n" + text;
    for (const TransitivityConstraint& t : r.transitivity)
      text += "transitivity " + to_prefix(r.props, constraint_formula(r.props, t)) + "\n";
    write_output(c.output, text);
  } else {
    json j = {{"encoding", method_name(*m)},
              {"fStar", to_sexpr(s, r.elim.fStar)},
              {"gVars", names(s, r.elim.sigmaGStar)},
              {"pVars", names(s, r.elim.sigmaPStar)},
              {"propositionalVars", r.props.num_vars()},
              {"formula", to_prefix(r.props, r.formula)},
              {"cnf", {{"vars", r.cnf.numVars}, {"clauses", r.cnf.clauses.size()}}}};
    if (r.bitvec) {
      json pat = json::object();
      for (SymbolId v : r.bitvec->gVars) pat[s.symbols[v].name] = pattern_string(r.props, r.bitvec->bits.at(v));
      for (SymbolId v : r.bitvec->pVars) pat[s.symbols[v].name] = pattern_string(r.props, r.bitvec->bits.at(v));
      j["width"] = r.bitvec->width;
      j["patterns"] = pat;
      j["range"] = to_prefix(r.props, r.range);
    }
    if (r.pairwise) {
      json ev = json::array();
      for (const auto& [key, p] : r.pairwise->eVars) ev.push_back(r.props.var_name(r.props.node(p).var));
      j["N"] = r.pairwise->N;
      j["M"] = r.pairwise->M;
      j["eVars"] = ev;
      j["eVarsUsed"] = r.pairwise->usedEVars;
      json tc = json::array();
      for (const TransitivityConstraint& t : r.transitivity)
        tc.push_back(to_prefix(r.props, constraint_formula(r.props, t)));
      j["transitivity"] = tc;
    }
    write_output(c.output, j.dump(2) + "\n");
  }
  return kValid;
}

int cmd_oracle(const Common& c, bool exhaustive) {
  ExprStore s;
  ExprId f = parse(s, read_input(c.input));
  OracleOptions opt;
  opt.guard = c.guard;
  opt.exhaustive = exhaustive;
  OracleReport r = oracle_report(s, f, opt);
  json j = {{"terms", function_application_terms(s, f).size()},
            {"counts", counts_json(r.counts)},
            {"validAll", r.validAll},
            {"validMaximallyDiverse", r.validDiverse}};
  if (r.witness) {
    json blocks = json::array();
    for (const auto& b : r.witness->blocks()) {
      json blk = json::array();
      for (ExprId t : b) blk.push_back(to_sexpr(s, t));
      blocks.push_back(blk);
    }
    j["witness"] = {{"blocks", blocks}, {"interpretation", interpretation_json(r.witness->interpretation)}};
  }
  write_output(c.output, j.dump(2) + "\n");
  return r.validAll ? kValid : kInvalid;
}

int cmd_gen_pipeline(const std::string& output, int stages, const std::string& classes, const std::string& bug, int n,
                     const std::string& memory) {
  PipelineSpec spec;
  spec.stages = stages;
  spec.classes.clear();
  std::stringstream ss(classes);
  for (std::string item; std::getline(ss, item, ',');) {
    auto cl = parse_class(item);
    if (!cl) throw CLI::ValidationError("--classes", "unknown instruction class '" + item + "'");
    if (!spec.has(*cl)) spec.classes.push_back(*cl);
  }
  auto b = parse_bug(bug);
  if (!b) throw CLI::ValidationError("--bug", "unknown bug '" + bug + "'");
  spec.bug = *b;
  if (memory == "history") spec.memory = MemoryModel::WriteHistory;
  else if (memory != "abstract") throw CLI::ValidationError("--memory", "expected abstract or history");
  ExprStore s;
  ExprId f = correctness_formula(s, spec, n);
  std::ostringstream doc;
  doc << "; " << stages << "-stage pipeline, classes " << classes << ", bug " << bug_name(spec.bug) << ", n=" << n
      << "\n"
      << to_document(s, f);
  write_output(output, doc.str());
  return kValid;
}

// The fixed example formula followed by a seeded random corpus.
int cmd_bench(std::uint64_t seed, std::size_t count, std::size_t guard, bool asJson) {
  struct Row {
    std::string name;
    std::string text;
  };
  std::vector<Row> rows{{"example", "(or (not (= x y)) (= (h (g x) (g (g x))) (h (g y) (g (g x)))))"}};
  FormulaGenerator gen(seed);
  for (std::size_t i = 0; i < count; ++i) {
    ExprStore s;
    rows.push_back({"random-" + std::to_string(i), to_sexpr(s, gen.next(s))});
  }
  json out = json::array();
  std::size_t mismatches = 0;
  if (!asJson) {
    std::cout << "# seed " << seed << ", " << count << " random formulas\n";
    std::cout << std::left << std::setw(12) << "formula" << std::setw(10) << "method" << std::setw(9) << "verdict"
              << std::setw(7) << "g" << std::setw(7) << "p" << std::setw(8) << "props" << std::setw(8) << "e-vars"
              << std::setw(10) << "cnf-vars" << std::setw(12) << "cnf-clauses"
              << "seconds\n";
  }
  for (const Row& row : rows) {
    ExprStore s;
    ExprId f = parse(s, row.text);
    std::vector<Verdict> vs;
    for (Method m : {Method::Bitvec, Method::Pairwise, Method::Oracle}) {
      DecideOptions opt;
      opt.method = m;
      opt.oracle.guard = guard;
      vs.push_back(decide_validity(s, f, opt));
    }
    bool agree = vs[0].valid == vs[1].valid && vs[1].valid == vs[2].valid;
    mismatches += !agree;
    for (const Verdict& v : vs) {
      if (asJson) {
        json j = verdict_json(s, v);
        j.erase("countermodel");
        j["formula"] = row.name;
        j["agree"] = agree;
        out.push_back(j);
        continue;
      }
      std::cout << std::left << std::setw(12) << row.name << std::setw(10) << method_name(v.method) << std::setw(9)
                << (v.valid ? "valid" : "invalid") << std::setw(7) << v.gVars << std::setw(7) << v.pVars
                << std::setw(8) << v.propositionalVars << std::setw(8) << v.eVars << std::setw(10) << v.cnfVars
                << std::setw(12) << v.cnfClauses << std::fixed << std::setprecision(5) << v.seconds
                << (agree ? "" : "  MISMATCH") << "\n";
    }
  }
  if (asJson) std::cout << json{{"seed", seed}, {"count", count}, {"mismatches", mismatches}, {"rows", out}}.dump(2)
                        << "\n";
  else std::cout << "# mismatches: " << mismatches << "\n";
  return mismatches ? kInvalid : kValid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Validity checking for equality with uninterpreted functions"};
  app.require_subcommand(1);
  Common common;

  auto addInput = [&](CLI::App* sub) {
    sub->add_option("input", common.input, "Formula file, '-' for stdin")->default_val("-");
    sub->add_option("-o,--output", common.output, "Output file (default stdout)");
  };
  auto addGuard = [&](CLI::App* sub) {
    sub->add_option("--guard", common.guard, "Oracle size guard in application terms")->default_val(common.guard);
  };

  std::string method = "pairwise";
  bool noTransitivity = false, asJson = false;
  auto* decide = app.add_subcommand("decide", "Decide validity");
  addInput(decide);
  addGuard(decide);
  decide->add_option("-m,--method", method, "bitvec, pairwise, oracle or all")->default_val("pairwise");
  decide->add_flag("--no-transitivity", noTransitivity, "Omit transitivity constraints (pairwise)");
  decide->add_flag("--json", asJson, "JSON output");

  bool dot = false;
  auto* classifyCmd = app.add_subcommand("classify", "Report g- and p-function symbols");
  addInput(classifyCmd);
  classifyCmd->add_flag("--dot", dot, "Emit the NNF DAG as Graphviz");

  bool ackermann = false;
  std::string format = "text";
  auto* eliminate = app.add_subcommand("eliminate", "Remove function and predicate applications");
  addInput(eliminate);
  eliminate->add_flag("--ackermann", ackermann, "Ackermann constraints instead of nested ITEs");
  eliminate->add_option("--format", format, "text, json or dot")->check(CLI::IsMember({"text", "json", "dot"}));

  std::string encoding = "pairwise";
  std::string encFormat = "json";
  auto* encode = app.add_subcommand("encode", "Propositional encoding");
  addInput(encode);
  encode->add_option("--encode", encoding, "bitvec or pairwise")->check(CLI::IsMember({"bitvec", "pairwise"}));
  encode->add_flag("--no-transitivity", noTransitivity, "Omit transitivity constraints");
  encode->add_option("--format", encFormat, "dimacs, prefix or json")
      ->check(CLI::IsMember({"dimacs", "prefix", "json"}));

  bool exhaustive = false;
  auto* oracle = app.add_subcommand("oracle", "Enumerate partitionings of the application terms");
  addInput(oracle);
  addGuard(oracle);
  oracle->add_flag("--exhaustive", exhaustive, "Visit every raw partition");

  int stages = 3, n = 1;
  std::string classes = "alu", bug = "none", memory = "abstract", pipeOut;
  auto* gen = app.add_subcommand("gen-pipeline", "Emit a pipeline correctness formula");
  gen->add_option("--stages", stages, "3 or 5")->check(CLI::IsMember({3, 5}));
  gen->add_option("--classes", classes, "Comma-separated: alu,load,store,branch,jump");
  gen->add_option("--bug", bug, "none, no-bypass, wrong-mux-polarity, stale-PC-on-branch");
  gen->add_option("-n", n, "Instructions fetched")->check(CLI::Range(0, 3));
  gen->add_option("--memory", memory, "abstract or history");
  gen->add_option("-o,--output", pipeOut, "Output file (default stdout)");

  std::uint64_t seed = 1;
  std::size_t count = 100;
  auto* bench = app.add_subcommand("bench", "Cross-check all methods on a random corpus");
  addGuard(bench);
  bench->add_option("--seed", seed, "Generator seed");
  bench->add_option("--count", count, "Random formulas");
  bench->add_flag("--json", asJson, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kError;
  }

  try {
    if (*decide) return cmd_decide(common, method, noTransitivity, asJson);
    if (*classifyCmd) return cmd_classify(common, dot);
    if (*eliminate) return cmd_eliminate(common, ackermann, format);
    if (*encode) return cmd_encode(common, encoding, noTransitivity, encFormat);
    if (*oracle) return cmd_oracle(common, exhaustive);
    if (*gen) return cmd_gen_pipeline(pipeOut, stages, classes, bug, n, memory);
    if (*bench) return cmd_bench(seed, count, common.guard, asJson);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kError;
}
