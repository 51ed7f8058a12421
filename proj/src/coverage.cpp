#include "slc/coverage.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace slc {

std::string to_string(const BranchId& b) {
  return b.proc + ":" + std::to_string(b.pc) + (b.then ? ":T" : ":F");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::set<BranchId> parse_infeasible(std::string_view text) {
  std::set<BranchId> out;
  int lineno = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (auto c = line.find("//"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;
    auto bad = [&] {
      return std::invalid_argument("line " + std::to_string(lineno) + ": expected proc:pc:T|F, got '" +
                                   std::string(line) + "'");
    };
    auto c1 = line.find(':');
    auto c2 = line.rfind(':');
    if (c1 == std::string_view::npos || c1 == c2 || c1 == 0) throw bad();
    std::string_view pc = line.substr(c1 + 1, c2 - c1 - 1);
    std::string_view side = line.substr(c2 + 1);
    if (pc.empty() || !std::all_of(pc.begin(), pc.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) throw bad();
    if (side != "T" && side != "F") throw bad();
    out.insert({std::string(line.substr(0, c1)), std::stoi(std::string(pc)), side == "T"});
  }
  return out;
}

std::vector<BranchId> all_branches(const Program& p) {
  std::vector<BranchId> out;
  for (const auto& proc : p.procs) {
    for (std::size_t i = 0; i < proc.body.size(); ++i) {
      if (proc.body[i].kind != Stmt::Kind::If) continue;
      out.push_back({proc.name, static_cast<int>(i), true});
      out.push_back({proc.name, static_cast<int>(i), false});
    }
  }
  return out;
}

std::set<BranchId> covered_branches(const ConstraintTree& t) {
  std::set<BranchId> out;
  for (const auto& n : t.nodes()) {
    if (n.branch == TreeNode::Branch::None || !n.explored) continue;
    const TreeNode& cond = t.node(n.parent);
    out.insert({cond.proc, cond.pc, n.branch == TreeNode::Branch::Then});
  }
  return out;
}

double CoverageReport::percent() const {
  if (feasible() == 0) return 100.0;
  return 100.0 * static_cast<double>(covered) / static_cast<double>(feasible());
}

CoverageReport measure_coverage(const Program& p, const std::set<BranchId>& covered,
                                 const std::set<BranchId>& infeasible) {
  CoverageReport r;
  for (const auto& proc : p.procs) {
    ProcCoverage pc;
    pc.proc = proc.name;
    for (std::size_t i = 0; i < proc.body.size(); ++i) {
      if (proc.body[i].kind != Stmt::Kind::If) continue;
      BranchRow row;
      row.pc = static_cast<int>(i);
      BranchId t{proc.name, row.pc, true};
      BranchId e{proc.name, row.pc, false};
      row.then_covered = covered.count(t) > 0;
      row.else_covered = covered.count(e) > 0;
      row.then_infeasible = infeasible.count(t) > 0;
      row.else_infeasible = infeasible.count(e) > 0;
      for (auto [id, cov, inf] : {std::tuple{t, row.then_covered, row.then_infeasible},
                                  std::tuple{e, row.else_covered, row.else_infeasible}}) {
        ++pc.branches;
        if (inf) {
          ++pc.infeasible;
          if (cov) r.contradicted.push_back(id);
        } else if (cov) {
          ++pc.covered;
        }
      }
      pc.rows.push_back(row);
    }
    r.branches += pc.branches;
    r.infeasible += pc.infeasible;
    r.covered += pc.covered;
    r.procs.push_back(std::move(pc));
  }
  return r;
}

CoverageReport measure_coverage(const Program& p, const ConstraintTree& t, const std::set<BranchId>& infeasible) {
  CoverageReport r = measure_coverage(p, covered_branches(t), infeasible);
  for (const auto& n : t.nodes()) {
    if (n.state == TreeNode::State::Parked) ++r.unresolved;
    if (n.state == TreeNode::State::Pruned) ++r.pruned;
  }
  return r;
}

bool all_feasible_covered(const Program& p, const ConstraintTree& t, const std::set<BranchId>& infeasible) {
  auto cov = covered_branches(t);
  for (const auto& b : all_branches(p)) {
    if (!infeasible.count(b) && !cov.count(b)) return false;
  }
  return true;
}

std::string to_text(const CoverageReport& r) {
  std::ostringstream os;
  char pct[32];
  std::snprintf(pct, sizeof pct, "%.2f", r.percent());
  os << "branches " << r.branches << ", infeasible " << r.infeasible << ", covered " << r.covered << "/"
     << r.feasible() << " (" << pct << "%)\n";
  os << "tests " << r.tests << ", valid " << r.valid_tests << "\n";
  os << "solver calls: spec " << r.spec_solver_calls << ", concolic " << r.concolic_solver_calls << "\n";
  os << "unresolved nodes " << r.unresolved << ", pruned nodes " << r.pruned << "\n";
  auto mark = [](bool cov, bool inf) { return inf ? (cov ? "infeasible!" : "infeasible") : (cov ? "covered" : "MISSED"); };
  for (const auto& pc : r.procs) {
    os << "\n" << pc.proc << ": " << pc.covered << "/" << (pc.branches - pc.infeasible) << " feasible covered\n";
    for (const auto& row : pc.rows) {
      os << "  " << row.pc << "  then " << mark(row.then_covered, row.then_infeasible) << ", else "
         << mark(row.else_covered, row.else_infeasible) << "\n";
    }
  }
  for (const auto& b : r.contradicted) os << "\nwarning: " << to_string(b) << " is annotated infeasible but covered\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Baseline

namespace {

// Rejection sampling keeps the draws identical across standard libraries.
std::int32_t draw(std::mt19937_64& g, std::int32_t lo, std::int32_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % span;
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return static_cast<std::int32_t>(static_cast<std::int64_t>(lo) + static_cast<std::int64_t>(x % span));
}

void redraw(Value& v, std::mt19937_64& g, const BaselineConfig& cfg) {
  if (v.kind == Value::Kind::Int) v = Value::integer(draw(g, cfg.lo, cfg.hi));
  else if (v.kind == Value::Kind::Bool) v = Value::boolean(draw(g, 0, 1) == 1);
}

}  // namespace

std::vector<TestInput> random_scalar_baseline(const std::vector<TestInput>& templates, const BaselineConfig& cfg) {
  if (cfg.lo > cfg.hi) throw std::invalid_argument("empty baseline range");
  std::mt19937_64 g(cfg.seed);
  std::vector<TestInput> out;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    TestInput t = templates[i];
    for (auto& [name, v] : t.bindings) redraw(v, g, cfg);
    for (auto& [addr, obj] : t.store) {
      for (auto& v : obj.slots) redraw(v, g, cfg);
    }
    t.provenance = "random baseline #" + std::to_string(i);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace slc
