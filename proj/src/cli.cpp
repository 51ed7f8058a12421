#include "slc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace slc {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Options {
  std::string spec;
  std::string program;
  std::string entry;
  int unfold_depth = 1;
  bool spec_only = false;
  double timeout = 60.0;
  int solver_depth = SolverConfig{}.unfold_depth;
  std::string int_domain = "-64:63";
  std::size_t max_nodes = 100000;
  std::size_t max_iterations = 10000;
  bool seed_defaults = false;
  std::string out = "slc-out";
  std::string report = "text";
  std::string infeasible;
  bool exhaustive = false;
  bool random_baseline = false;
  std::uint64_t rng_seed = 1;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& dir, const std::string& name, const std::string& content) {
  fs::path tmp = dir / ("." + name + ".tmp");
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw std::runtime_error("cannot write " + tmp.string());
    o << content;
    if (!o.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, dir / name);
}

std::pair<std::int32_t, std::int32_t> parse_domain(const std::string& s) {
  auto colon = s.find(':', 1);
  try {
    if (colon == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    long lo = std::stol(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(s);
    std::string rest = s.substr(colon + 1);
    long hi = std::stol(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
    if (lo > hi || lo < INT32_MIN || hi > INT32_MAX) throw std::invalid_argument(s);
    return {static_cast<std::int32_t>(lo), static_cast<std::int32_t>(hi)};
  } catch (const std::logic_error&) {
    throw UsageError("--int-domain expects LO:HI with LO <= HI, got '" + s + "'");
  }
}

ojson value_json(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Null:
      return nullptr;
    case Value::Kind::Int:
      return v.num;
    case Value::Kind::Bool:
      return v.num != 0;
    case Value::Kind::Addr:
      return ojson{{"ref", "o" + std::to_string(v.addr)}};
  }
  return nullptr;
}

std::string kind_name(RunOutcome::Kind k) {
  switch (k) {
    case RunOutcome::Kind::Ok:
      return "ok";
    case RunOutcome::Kind::AssertionViolation:
      return "assertion-violation";
    case RunOutcome::Kind::RuntimeError:
      return "runtime-error";
    case RunOutcome::Kind::BudgetExceeded:
      return "budget-exceeded";
  }
  return "?";
}

ojson outcome_json(const RunOutcome& o) {
  ojson j{{"kind", kind_name(o.kind)}};
  if (o.kind == RunOutcome::Kind::RuntimeError) j["error"] = to_string(o.error);
  if (o.pc >= 0) j["at"] = o.proc + ":" + std::to_string(o.pc);
  return j;
}

std::string cover_mark(bool cov, bool inf) {
  if (inf) return cov ? "infeasible-covered" : "infeasible";
  return cov ? "covered" : "missed";
}

ojson coverage_json(const CoverageReport& r) {
  ojson procs = ojson::array();
  for (const auto& p : r.procs) {
    ojson rows = ojson::array();
    for (const auto& w : p.rows) {
      rows.push_back({{"pc", w.pc},
                      {"then", cover_mark(w.then_covered, w.then_infeasible)},
                      {"else", cover_mark(w.else_covered, w.else_infeasible)}});
    }
    procs.push_back({{"name", p.proc},
                     {"branches", p.branches},
                     {"infeasible", p.infeasible},
                     {"covered", p.covered},
                     {"rows", rows}});
  }
  ojson contradicted = ojson::array();
  for (const auto& b : r.contradicted) contradicted.push_back(to_string(b));
  return {{"branches", r.branches},
          {"infeasible", r.infeasible},
          {"feasible", r.feasible()},
          {"covered", r.covered},
          {"percent", r.percent()},
          {"tests", r.tests},
          {"valid_tests", r.valid_tests},
          {"solver_calls", {{"spec", r.spec_solver_calls}, {"concolic", r.concolic_solver_calls}}},
          {"unresolved", r.unresolved},
          {"pruned", r.pruned},
          {"procedures", procs},
          {"contradicted", contradicted}};
}

// Runs each test on a fresh tree; the tree records which branches they take.
ConstraintTree replay(const std::vector<TestInput>& tests, const Program& p, const SpecFile& defs, const Formula& pre,
                      const RunConfig& cfg, std::vector<RunOutcome>* outcomes) {
  const Procedure* entry = p.find_proc(p.entry);
  ConstraintTree tree(pre, entry->params, p.entry);
  for (const auto& t : tests) {
    auto r = run_test(t, p, defs, tree, cfg);
    if (outcomes) outcomes->push_back(r.outcome);
  }
  return tree;
}

int pipeline(const Options& o, std::ostream& out, std::ostream& err) {
  using Clock = std::chrono::steady_clock;
  auto seconds = [](Clock::time_point a, Clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
  const auto t0 = Clock::now();

  if (o.unfold_depth < 0) throw UsageError("--unfold-depth must be non-negative");
  if (o.solver_depth < 0) throw UsageError("--solver-depth must be non-negative");
  if (o.timeout <= 0) throw UsageError("--timeout must be positive");
  if (o.report != "text" && o.report != "json") throw UsageError("--report must be text or json");
  auto [lo, hi] = parse_domain(o.int_domain);

  SpecFile spec = parse_spec(read_file(o.spec));
  Program prog = parse_program(read_file(o.program), spec.data);
  set_entry(prog, o.entry);
  const Formula* pre = spec.find_pre(o.entry);
  if (!pre) throw ValidationError("the specification has no precondition for '" + o.entry + "'");
  const Procedure* entry = prog.find_proc(o.entry);

  std::set<BranchId> infeasible;
  std::string ann = o.infeasible;
  if (ann.empty()) {
    fs::path guess = fs::path(o.program).replace_extension(".infeasible");
    if (fs::exists(guess)) ann = guess.string();
  }
  if (!ann.empty()) {
    try {
      infeasible = parse_infeasible(read_file(ann));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(ann + ": " + e.what());
    }
  }

  reset_fresh_counter();
  SolverConfig scfg;
  scfg.unfold_depth = o.solver_depth;
  scfg.int_lo = lo;
  scfg.int_hi = hi;
  scfg.time_limit = std::min(scfg.time_limit, o.timeout);
  RunConfig rcfg;
  rcfg.max_nodes = o.max_nodes;

  GenResult gen = gen_from_spec(pre->disjuncts, o.unfold_depth, spec, entry->params, scfg);
  const auto t1 = Clock::now();
  std::vector<std::string> log = gen.log;
  std::vector<TestInput> seeds = gen.tests;
  if (o.seed_defaults) {
    TestInput d;
    for (const auto& prm : entry->params) d.bindings.emplace_back(prm.name, Value::default_for(prm.type));
    d.provenance = "defaults";
    if (std::none_of(seeds.begin(), seeds.end(), [&](const TestInput& s) { return s.same_input(d); })) {
      seeds.push_back(d);
    }
  }

  std::vector<TestInput> tests;
  std::vector<RunOutcome> outcomes;
  ConstraintTree tree(*pre, entry->params, prog.entry);
  ExploreStats stats;
  if (o.spec_only) {
    tests = seeds;
    tree = replay(tests, prog, spec, *pre, rcfg, &outcomes);
  } else {
    if (seeds.empty()) {
      throw ValidationError("phase one produced no input to start from; raise --unfold-depth or pass --seed-defaults");
    }
    ExploreConfig ecfg;
    ecfg.solver = scfg;
    ecfg.run = rcfg;
    ecfg.time_limit = std::max(0.0, o.timeout - seconds(t0, t1));
    ecfg.max_iterations = o.max_iterations;
    if (!o.exhaustive) {
      ecfg.goal = [&](const ConstraintTree& t) { return all_feasible_covered(prog, t, infeasible); };
    }
    ExploreResult ex = explore(prog, spec, *pre, seeds, ecfg);
    for (const auto& e : ex.tests) {
      tests.push_back(e.input);
      outcomes.push_back(e.outcome);
    }
    log.insert(log.end(), ex.log.begin(), ex.log.end());
    tree = std::move(ex.tree);
    stats = ex.stats;
  }
  const auto t2 = Clock::now();

  std::vector<bool> valid;
  for (const auto& t : tests) valid.push_back(satisfies(t, *pre, spec));
  CoverageReport report = measure_coverage(prog, tree, infeasible);
  report.tests = tests.size();
  report.valid_tests = static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
  report.spec_solver_calls = gen.stats.solver_calls;
  report.concolic_solver_calls = stats.solver_calls;

  ojson cov{{"entry", o.entry},
            {"mode", o.spec_only ? "spec-only" : "concolic"},
            {"unfold_depth", o.unfold_depth},
            {"goal_reached", stats.goal_reached},
            {"budget_exhausted", stats.budget_exhausted}};
  cov.update(coverage_json(report));
  ojson infeasible_list = ojson::array();
  for (const auto& b : infeasible) infeasible_list.push_back(to_string(b));
  cov["infeasible_branches"] = infeasible_list;

  std::string text = "entry " + o.entry + " (" + (o.spec_only ? "spec-only" : "concolic") + ")\n" + to_text(report);
  if (stats.budget_exhausted) text += "\nbudget exhausted before every feasible branch was covered\n";

  fs::path dir(o.out);
  fs::create_directories(dir);
  std::string suite_text;
  if (o.random_baseline) {
    BaselineConfig bcfg;
    bcfg.seed = o.rng_seed;
    auto base = random_scalar_baseline(tests, bcfg);
    std::vector<RunOutcome> bout;
    ConstraintTree btree = replay(base, prog, spec, *pre, rcfg, &bout);
    std::vector<bool> bvalid;
    for (const auto& t : base) bvalid.push_back(satisfies(t, *pre, spec));
    CoverageReport br = measure_coverage(prog, btree, infeasible);
    br.tests = base.size();
    br.valid_tests = static_cast<std::size_t>(std::count(bvalid.begin(), bvalid.end(), true));
    ojson bj{{"rng_seed", o.rng_seed}};
    bj.update(coverage_json(br));
    cov["baseline"] = bj;
    text += "\nrandom-scalar baseline (seed " + std::to_string(o.rng_seed) + ")\n" + to_text(br);
    write_atomic(dir, "baseline_suite.json", suite_json(base, bout, bvalid, prog, spec));
  }

  write_atomic(dir, "suite.json", suite_json(tests, outcomes, valid, prog, spec));
  write_atomic(dir, "coverage.json", cov.dump(2) + "\n");
  write_atomic(dir, "coverage.txt", text);
  write_atomic(dir, "tree.dot", to_dot(tree));
  std::string log_text;
  for (const auto& l : log) log_text += l + "\n";
  write_atomic(dir, "log.txt", log_text);
  const auto t3 = Clock::now();
  ojson timing{{"spec_seconds", seconds(t0, t1)},
               {"concolic_seconds", o.spec_only ? 0.0 : seconds(t1, t2)},
               {"total_seconds", seconds(t0, t3)}};
  write_atomic(dir, "timing.json", timing.dump(2) + "\n");

  out << (o.report == "json" ? cov.dump(2) + "\n" : text);
  if (stats.budget_exhausted) {
    err << "slc: budget exhausted; partial results written to " << dir.string() << "\n";
    return kExitBudget;
  }
  return kExitOk;
}

}  // namespace

std::string suite_json(const std::vector<TestInput>& tests, const std::vector<RunOutcome>& outcomes,
                       const std::vector<bool>& valid, const Program& p, const SpecFile& defs) {
  ojson arr = ojson::array();
  for (std::size_t i = 0; i < tests.size(); ++i) {
    TestInput t = canonicalize(tests[i]);
    ojson steps = ojson::array();
    for (const auto& [addr, obj] : t.store) {
      steps.push_back({{"op", "new"}, {"obj", "o" + std::to_string(addr)}, {"type", obj.type}});
    }
    for (const auto& [addr, obj] : t.store) {
      const DataDef* d = defs.find_data(obj.type);
      if (!d) d = p.find_data(obj.type);
      for (std::size_t k = 0; k < obj.slots.size(); ++k) {
        std::string field = d && k < d->fields.size() ? d->fields[k].name : std::to_string(k);
        steps.push_back({{"op", "set"},
                         {"obj", "o" + std::to_string(addr)},
                         {"field", field},
                         {"value", value_json(obj.slots[k])}});
      }
    }
    for (const auto& [name, v] : t.bindings) steps.push_back({{"op", "bind"}, {"param", name}, {"value", value_json(v)}});
    steps.push_back({{"op", "call"}, {"proc", p.entry}});
    ojson j{{"id", i}, {"provenance", tests[i].provenance}};
    if (i < valid.size()) j["valid"] = static_cast<bool>(valid[i]);
    if (i < outcomes.size()) j["outcome"] = outcome_json(outcomes[i]);
    j["steps"] = steps;
    arr.push_back(j);
  }
  ojson doc{{"entry", p.entry}, {"tests", arr}};
  return doc.dump(2) + "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Concolic test generation for heap-manipulating programs", "slc"};
  app.add_option("--spec", o.spec, "Specification file (.sl)")->required();
  app.add_option("--program", o.program, "Program file (.ir)")->required();
  app.add_option("--entry", o.entry, "Procedure under test")->required();
  app.add_option("--unfold-depth", o.unfold_depth, "Unfolding depth for input generation")->capture_default_str();
  app.add_flag("--spec-only", o.spec_only, "Stop after input generation from the precondition");
  app.add_option("--timeout", o.timeout, "Wall-clock budget in seconds")->capture_default_str();
  app.add_option("--solver-depth", o.solver_depth, "Nesting bound for predicate unfolding in the solver")
      ->capture_default_str();
  app.add_option("--int-domain", o.int_domain, "Integer search range LO:HI (write --int-domain=-64:63)")
      ->capture_default_str();
  app.add_option("--max-nodes", o.max_nodes, "Constraint-tree size budget")->capture_default_str();
  app.add_option("--max-iterations", o.max_iterations, "Exploration iteration budget")->capture_default_str();
  app.add_flag("--seed-defaults", o.seed_defaults, "Also seed with all parameters at their default values");
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--report", o.report, "Report printed on stdout")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_option("--infeasible", o.infeasible,
                 "Branch annotation file (default: the program path with .infeasible, if present)");
  app.add_flag("--exhaustive", o.exhaustive, "Keep exploring after every feasible branch is covered");
  app.add_flag("--random-baseline", o.random_baseline, "Also run the random-scalar baseline on the suite's shapes");
  app.add_option("--rng-seed", o.rng_seed, "Seed of the random-scalar baseline")->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "slc: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitError;
  }

  try {
    return pipeline(o, out, err);
  } catch (const UsageError& e) {
    err << "slc: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "slc: parse error: " << e.what() << "\n";
  } catch (const ValidationError& e) {
    err << "slc: invalid input: " << e.what() << "\n";
  } catch (const StructuralError& e) {
    err << "slc: invalid input: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    err << "slc: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace slc
