// Command-line driver: type checking, type equivalence, reduction,
// exact outcome distributions, and DOT reduction graphs.
//
// Exit codes: 0 success, 1 negative equivalence answer, 2 type error,
// 3 parse error, 4 step/node budget hit before the answer was complete.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lpl/gen.hpp"
#include "lpl/prob.hpp"
#include "lpl/rewrite.hpp"
#include "lpl/syntax.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNo = 1;
constexpr int kExitType = 2;
constexpr int kExitParse = 3;
constexpr int kExitTruncated = 4;

// A source argument is either a path to a .lpl file or inline program text.
std::string slurp(const std::string& src) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(src, ec)) {
    std::ifstream in(src);
    if (!in) throw std::runtime_error("cannot read file: " + src);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  return src;
}

lpl::Term load_term(const std::string& src) {
  lpl::Program p = lpl::parse_program(slurp(src));
  if (!p.main)
    throw lpl::ParseError(1, 1, "program has no term to evaluate");
  return *p.main;
}

int report_type_error(const lpl::TypeError& e) {
  std::cerr << "type error: " << lpl::to_string(e.code) << " at `"
            << lpl::print_term(e.at) << "`";
  if (e.subject) std::cerr << " (subject: " << lpl::print_canonical(*e.subject);
  if (e.other) std::cerr << ", other: " << lpl::print_canonical(*e.other);
  if (e.subject) std::cerr << ")";
  std::cerr << "\n";
  return kExitType;
}

int report_parse_error(const lpl::ParseError& e) {
  std::cerr << e.what() << "\n";
  return kExitParse;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

lpl::Strategy parse_strategy(const std::string& name) {
  return name == "in" ? lpl::Strategy::InnermostFirst
                      : lpl::Strategy::LeftmostOutermost;
}

int cmd_check(const std::string& src) {
  lpl::Term t = load_term(src);
  lpl::CanonicalType ty = lpl::infer(t);
  std::cout << ": " << lpl::print_canonical(ty) << "\n";
  return kExitOk;
}

int cmd_equiv(const std::string& a, const std::string& b) {
  lpl::Type ta = lpl::parse_type(a);
  lpl::Type tb = lpl::parse_type(b);
  if (lpl::type_equiv(ta, tb)) {
    std::cout << "yes\n";
    return kExitOk;
  }
  std::cout << "no\n";
  return kExitNo;
}

int cmd_reduce(const std::string& src, std::size_t max_steps, bool all) {
  lpl::Term t = load_term(src);
  if (all) {
    lpl::NormalFormsResult res = lpl::normal_forms(t, max_steps);
    std::size_t stuck = 0;
    for (const lpl::StructuralNF& nf : res.forms) {
      std::cout << lpl::print_term(nf.rep()) << "\n";
      if (lpl::contains_projection(nf.rep())) ++stuck;
    }
    if (stuck > 0)
      std::cerr << "note: " << stuck
                << " stuck normal form(s): a projection is waiting on a term "
                   "that offers no candidate\n";
    if (!res.complete) {
      std::cerr << "truncated: step budget " << max_steps
                << " exhausted before the reduction space was covered\n";
      return kExitTruncated;
    }
    return kExitOk;
  }
  lpl::StructuralNF cur = lpl::structural_normalize(t);
  bool nondet = false;
  std::size_t steps = 0;
  for (;;) {
    auto next = lpl::strategy_step(cur, lpl::Strategy::LeftmostOutermost);
    if (!next) break;
    if (steps == max_steps) {
      std::cout << lpl::print_term(cur.rep()) << "\n";
      std::cerr << "truncated: step budget " << max_steps
                << " exhausted before a normal form\n";
      return kExitTruncated;
    }
    if (next->size() > 1) nondet = true;
    cur = (*next)[0].second;  // candidates come pre-sorted; take the first
    ++steps;
  }
  std::cout << lpl::print_term(cur.rep()) << "\n";
  if (lpl::contains_projection(cur.rep()))
    std::cerr << "note: normal form is stuck (projection without candidate)\n";
  if (nondet)
    std::cerr << "note: non-deterministic projection choices were resolved to "
                 "the first candidate; other outcomes exist (use --all)\n";
  return kExitOk;
}

int cmd_dist(const std::string& src, const std::string& strategy,
             std::size_t max_steps) {
  lpl::Term t = load_term(src);
  lpl::Strategy strat = parse_strategy(strategy);
  lpl::Distribution d = lpl::distribution(t, strat, max_steps);
  std::cout << lpl::format_distribution(d);
  if (!lpl::distribution_is_exact(t, strat, max_steps)) {
    std::cerr << "truncated: step budget " << max_steps
              << " exhausted; residual includes cut-off paths\n";
    return kExitTruncated;
  }
  return kExitOk;
}

int cmd_graph(const std::string& src, std::size_t max_nodes) {
  lpl::Term t = load_term(src);
  lpl::ReductionGraph g = lpl::build_graph(t, max_nodes);
  std::cout << "digraph reduction {\n";
  std::cout << "  node [shape=box];\n";
  bool truncated = false;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    std::cout << "  n" << i << " [label=\"" << dot_escape(lpl::print_term(n.term.rep()))
              << "\"";
    if (n.status == lpl::NodeStatus::NormalForm) std::cout << " peripheries=2";
    if (n.stuck) std::cout << " style=dashed";
    if (n.status == lpl::NodeStatus::BudgetTruncated) {
      std::cout << " style=dotted";
      truncated = true;
    }
    std::cout << "];\n";
  }
  for (const auto& e : g.edges) {
    std::cout << "  n" << e.from << " -> n" << e.to << " [label=\"";
    switch (e.label.rule) {
      case lpl::RuleKind::Beta: std::cout << "beta"; break;
      case lpl::RuleKind::TypeBeta: std::cout << "tbeta"; break;
      case lpl::RuleKind::Pi:
        std::cout << "pi 1/" << e.label.candidate_count;
        break;
    }
    std::cout << "\"];\n";
  }
  std::cout << "}\n";
  if (truncated) {
    std::cerr << "truncated: node budget " << max_nodes
              << " hit; some successors are missing\n";
    return kExitTruncated;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicitly typed lambda calculus with non-deterministic "
               "projection: checking, reduction, and exact distributions"};
  app.require_subcommand(1);

  std::string src, src_b, strategy = "lo";
  std::size_t max_steps = 10000, max_nodes = 100;
  bool all = false;

  CLI::App* check = app.add_subcommand("check", "Infer and print the canonical type");
  check->add_option("source", src, "Path to a .lpl file, or inline program text")
      ->required();

  CLI::App* equiv = app.add_subcommand("equiv", "Decide type equivalence");
  equiv->add_option("type_a", src, "First type")->required();
  equiv->add_option("type_b", src_b, "Second type")->required();

  CLI::App* reduce = app.add_subcommand("reduce", "Reduce to normal form(s)");
  reduce->add_option("source", src, "Path to a .lpl file, or inline program text")
      ->required();
  reduce->add_option("--max-steps", max_steps, "Exploration budget");
  reduce->add_flag("--all", all, "Enumerate every reachable normal form");

  CLI::App* dist = app.add_subcommand(
      "dist", "Exact probability of each outcome under a reduction strategy");
  dist->add_option("source", src, "Path to a .lpl file, or inline program text")
      ->required();
  dist->add_option("--strategy", strategy, "Redex selection strategy")
      ->check(CLI::IsMember({"lo", "in"}));
  dist->add_option("--max-steps", max_steps, "Expansion budget");

  CLI::App* graph = app.add_subcommand("graph", "Emit the reduction graph as DOT");
  graph->add_option("source", src, "Path to a .lpl file, or inline program text")
      ->required();
  graph->add_option("--max-nodes", max_nodes, "Node budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(src);
    if (equiv->parsed()) return cmd_equiv(src, src_b);
    if (reduce->parsed()) return cmd_reduce(src, max_steps, all);
    if (dist->parsed()) return cmd_dist(src, strategy, max_steps);
    if (graph->parsed()) return cmd_graph(src, max_nodes);
  } catch (const lpl::TypeError& e) {
    return report_type_error(e);
  } catch (const lpl::ParseError& e) {
    return report_parse_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;  // input could not be read or understood
  }
  return kExitOk;
}
