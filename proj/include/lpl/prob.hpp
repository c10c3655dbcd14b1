#pragma once
// Exact probability of reaching each normal form when a fixed strategy picks
// the redex position and a firing projection chooses uniformly among its
// candidate sub-multisets.  Path probabilities multiply; masses per terminal
// sum.  Mass on paths cut by the step budget, caught in a cycle, or ending in
// a stuck projection is reported as residual, so total mass is always
// exactly 1.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lpl/rational.hpp"
#include "lpl/rewrite.hpp"
#include "lpl/syntax.hpp"

namespace lpl {

struct Distribution {
  std::vector<std::pair<StructuralNF, Rational>> mass;  // sorted by term order
  Rational residual;

  Rational total() const {
    Rational t = residual;
    for (const auto& [nf, p] : mass) t += p;
    return t;
  }
};

namespace detail {

struct ProbOutcome {
  std::map<std::string, std::pair<StructuralNF, Rational>> mass;
  Rational residual;
  bool final = true;  // false when budget or a cycle cut this subtree
};

struct ProbSolver {
  Strategy strat;
  std::size_t budget;
  std::map<std::string, ProbOutcome> memo;
  std::set<std::string> on_stack;

  ProbOutcome solve(const StructuralNF& nf) {
    auto hit = memo.find(nf.key());
    if (hit != memo.end()) return hit->second;
    if (on_stack.count(nf.key())) {
      ProbOutcome cyc;
      cyc.residual = 1;
      cyc.final = false;
      return cyc;
    }
    auto steps_opt = strategy_step(nf, strat);
    if (!steps_opt) {
      ProbOutcome leaf;
      if (contains_projection(nf.rep()))
        leaf.residual = 1;  // stuck: counted as residual, still final
      else
        leaf.mass.emplace(nf.key(), std::make_pair(nf, Rational(1)));
      memo.emplace(nf.key(), leaf);
      return leaf;
    }
    if (budget == 0) {
      ProbOutcome cut;
      cut.residual = 1;
      cut.final = false;
      return cut;
    }
    --budget;
    auto& steps = *steps_opt;
    Rational p = Rational(1) / Rational(static_cast<long long>(steps.size()));
    ProbOutcome out;
    on_stack.insert(nf.key());
    for (auto& [label, succ] : steps) {
      (void)label;
      ProbOutcome sub = solve(succ);
      if (!sub.final) out.final = false;
      out.residual += p * sub.residual;
      for (auto& [k, nfp] : sub.mass) {
        auto it = out.mass.find(k);
        if (it == out.mass.end())
          out.mass.emplace(k, std::make_pair(nfp.first, p * nfp.second));
        else
          it->second.second += p * nfp.second;
      }
    }
    on_stack.erase(nf.key());
    if (out.final) memo.emplace(nf.key(), out);
    return out;
  }
};

}  // namespace detail

// Precondition: r well typed (checked inside structural_normalize).
inline Distribution distribution(const Term& r,
                                 Strategy strat = Strategy::LeftmostOutermost,
                                 std::size_t max_steps = 10000) {
  detail::ProbSolver solver;
  solver.strat = strat;
  solver.budget = max_steps;
  detail::ProbOutcome out = solver.solve(structural_normalize(r));
  Distribution d;
  d.residual = out.residual;
  for (auto& [k, nfp] : out.mass) {
    (void)k;
    d.mass.emplace_back(nfp.first, nfp.second);
  }
  // std::map iteration is already key-sorted; keep it explicit anyway.
  std::sort(d.mass.begin(), d.mass.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return d;
}

// Did the computation use up its budget or hit a cycle?  True when the
// distribution is exact and stable under larger budgets.
inline bool distribution_is_exact(const Term& r, Strategy strat,
                                  std::size_t max_steps) {
  detail::ProbSolver solver;
  solver.strat = strat;
  solver.budget = max_steps;
  return solver.solve(structural_normalize(r)).final;
}

// One line per outcome, probability TAB pretty term, sorted by term order,
// then a residual line.  Integral probabilities print without "/1".
inline std::string format_distribution(const Distribution& d) {
  std::string out;
  for (const auto& [nf, p] : d.mass) {
    out += p.str();
    out += '\t';
    out += print_term(nf.rep());
    out += '\n';
  }
  out += "residual\t" + d.residual.str() + "\n";
  return out;
}

struct StrategyComparison {
  struct Disagreement {
    std::size_t first, second;  // indices into the strategy list
    std::string where;          // pretty term, or "residual"
    Rational lhs, rhs;
  };
  std::vector<Distribution> distributions;  // one per strategy, same order
  std::vector<Disagreement> disagreements;
  bool agree() const { return disagreements.empty(); }
};

inline StrategyComparison compare_strategies(const Term& r,
                                             const std::vector<Strategy>& strategies,
                                             std::size_t max_steps = 10000) {
  StrategyComparison rep;
  for (Strategy s : strategies) rep.distributions.push_back(distribution(r, s, max_steps));
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    for (std::size_t j = i + 1; j < strategies.size(); ++j) {
      const Distribution& a = rep.distributions[i];
      const Distribution& b = rep.distributions[j];
      std::map<std::string, std::pair<const StructuralNF*, std::pair<Rational, Rational>>> merged;
      for (const auto& [nf, p] : a.mass)
        merged[nf.key()] = {&nf, {p, Rational(0)}};
      for (const auto& [nf, p] : b.mass) {
        auto it = merged.find(nf.key());
        if (it == merged.end())
          merged[nf.key()] = {&nf, {Rational(0), p}};
        else
          it->second.second.second = p;
      }
      for (auto& [k, entry] : merged) {
        (void)k;
        if (entry.second.first != entry.second.second)
          rep.disagreements.push_back({i, j, print_term(entry.first->rep()),
                                       entry.second.first, entry.second.second});
      }
      if (a.residual != b.residual)
        rep.disagreements.push_back({i, j, "residual", a.residual, b.residual});
    }
  }
  return rep;
}

}  // namespace lpl
