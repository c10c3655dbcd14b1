#pragma once
// Reduction.
//
// The symmetric structural rules (commutativity and associativity of +,
// distribution of + out of application heads and lambda bodies, and the
// projection/application exchange) are treated as a congruence and replaced
// by a canonical representative:
//
//   sums are flattened, sorted, left-nested
//   (r + s) t        becomes  r t + s t
//   \x:A. (r + s)    becomes  (\x:A. r) + (\x:A. s)
//   pi[A->B](r) s    becomes  pi[B](r s)     when r's type factors over A
//
// Proper reduction steps on top of that:
//
//   (\x:A. r) s      beta
//   (/\X. r) {A}     type beta
//   pi[A](r1+...+rn) projection: any strict non-empty sub-multiset of the
//                    summands whose combined type is exactly A
//
// enumerate_steps closes reduction under all contexts; build_graph follows
// one strategy position per node, branching over projection candidates.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpl/term.hpp"
#include "lpl/typer.hpp"

namespace lpl {

struct NormalizeStats {
  std::size_t rule_steps = 0;  // structural rule firings at a root
};

namespace detail {

inline void flatten_summands(const Term& t, std::vector<Term>& out) {
  if (t.kind() == TermKind::Sum) {
    flatten_summands(t.left(), out);
    flatten_summands(t.right(), out);
  } else {
    out.push_back(t);
  }
}

// Left-nested sum of parts in the given order.
inline Term rebuild_sum(const std::vector<Term>& parts) {
  Term acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = Term::sum(acc, parts[i]);
  return acc;
}

inline std::vector<Term> sort_by_key(std::vector<Term> parts) {
  std::vector<std::pair<std::string, Term>> keyed;
  keyed.reserve(parts.size());
  for (Term& p : parts) keyed.emplace_back(term_key(p), std::move(p));
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Term> out;
  out.reserve(keyed.size());
  for (auto& kp : keyed) out.push_back(std::move(kp.second));
  return out;
}

struct Normalizer {
  NormalizeStats stats;
  std::size_t hard_cap;

  void count() {
    if (++stats.rule_steps > hard_cap)
      throw std::logic_error("structural_normalize: step cap exceeded");
  }

  Term norm(const Term& t) {
    switch (t.kind()) {
      case TermKind::Var:
        return t;
      case TermKind::Lam: {
        Term b = norm(t.body());
        if (b.kind() == TermKind::Sum) {
          count();
          std::vector<Term> parts;
          flatten_summands(b, parts);
          for (Term& p : parts) p = Term::lam(t.binder(), p);
          return rebuild_sum(sort_by_key(std::move(parts)));
        }
        return Term::lam(t.binder(), b);
      }
      case TermKind::App: {
        Term f = norm(t.fun());
        Term a = norm(t.arg());
        if (f.kind() == TermKind::Sum) {
          count();
          std::vector<Term> parts;
          flatten_summands(f, parts);
          for (Term& p : parts) p = app_root(p, a);
          return rebuild_sum(sort_by_key(std::move(parts)));
        }
        return app_root(f, a);
      }
      case TermKind::Sum: {
        std::vector<Term> parts;
        flatten_summands(norm(t.left()), parts);
        flatten_summands(norm(t.right()), parts);
        return rebuild_sum(sort_by_key(std::move(parts)));
      }
      case TermKind::Proj:
        return Term::proj(t.proj_target(), norm(t.body()));
      case TermKind::TLam:
        return Term::tlam(t.tbinder(), norm(t.body()));
      case TermKind::TApp:
        return Term::tapp(norm(t.fun()), t.targ());
    }
    throw std::logic_error("norm: bad kind");
  }

  // f and a are normalized, f is not a sum.  Applies the projection
  // exchange at the root when its side condition holds.
  Term app_root(const Term& f, const Term& a) {
    if (f.kind() == TermKind::Proj) {
      CanonicalType s = infer(a);
      auto cod = factor_arrow(canonicalize(f.proj_target()), s);
      auto whole = factor_arrow(infer(f.body()), s);
      if (cod && whole && conj_remainder(*whole, *cod)) {
        count();
        return norm(Term::proj(read_back(*cod), Term::app(f.body(), a)));
      }
    }
    return Term::app(f, a);
  }
};

}  // namespace detail

// A term in structural normal form; identity and order are those of the
// canonical key (alpha-conversion and type equivalence quotiented away).
class StructuralNF {
public:
  StructuralNF() = default;

  const Term& rep() const { return rep_; }
  const std::vector<Term>& summands() const { return summands_; }
  const std::string& key() const { return key_; }

  friend bool operator==(const StructuralNF& x, const StructuralNF& y) {
    return x.key_ == y.key_;
  }
  friend bool operator!=(const StructuralNF& x, const StructuralNF& y) {
    return x.key_ != y.key_;
  }
  friend bool operator<(const StructuralNF& x, const StructuralNF& y) {
    return x.key_ < y.key_;
  }

private:
  friend StructuralNF structural_normalize(const Term&, NormalizeStats*);
  Term rep_;
  std::vector<Term> summands_;
  std::string key_;
};

// Precondition: t is well typed (checked here; TypeError propagates).
inline StructuralNF structural_normalize(const Term& t,
                                         NormalizeStats* stats = nullptr) {
  infer(t);
  detail::Normalizer n;
  std::size_t sz = term_size(t);
  n.hard_cap = 100 * sz * sz + 1000;
  StructuralNF nf;
  nf.rep_ = n.norm(t);
  nf.key_ = term_key(nf.rep_);
  detail::flatten_summands(nf.rep_, nf.summands_);
  if (stats) *stats = n.stats;
  return nf;
}

inline bool contains_projection(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var: return false;
    case TermKind::Lam: return contains_projection(t.body());
    case TermKind::App:
      return contains_projection(t.fun()) || contains_projection(t.arg());
    case TermKind::Sum:
      return contains_projection(t.left()) || contains_projection(t.right());
    case TermKind::Proj: return true;
    case TermKind::TLam: return contains_projection(t.body());
    case TermKind::TApp: return contains_projection(t.fun());
  }
  return false;
}

// ---------------------------------------------------------------- candidates

struct PiCandidate {
  std::vector<Term> members;  // sorted; a strict non-empty sub-multiset
};

// All distinct sub-multisets N of the summands with combined type exactly
// target and {} != N != summands, in a deterministic sorted order.
// Duplicates among the summands collapse: equal terms are interchangeable.
inline std::vector<PiCandidate> pi_candidates(const CanonicalType& target,
                                              const std::vector<Term>& summands) {
  // Group equal summands.
  struct Group {
    std::string key;
    Term rep;
    std::size_t count = 0;
    CanonicalType type;
  };
  std::vector<Group> groups;
  {
    std::vector<std::pair<std::string, Term>> keyed;
    for (const Term& s : summands) keyed.emplace_back(term_key(s), s);
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& kp : keyed) {
      if (!groups.empty() && groups.back().key == kp.first) {
        ++groups.back().count;
      } else {
        Group g;
        g.key = kp.first;
        g.rep = kp.second;
        g.count = 1;
        g.type = infer(kp.second);
        groups.push_back(std::move(g));
      }
    }
  }

  std::size_t combos = 1;
  for (const Group& g : groups) {
    combos *= g.count + 1;
    if (combos > (std::size_t(1) << 20))
      throw std::logic_error("pi_candidates: too many sub-multisets");
  }

  std::size_t total = summands.size();
  std::vector<std::size_t> take(groups.size(), 0);
  std::vector<PiCandidate> out;
  for (;;) {
    // Advance the odometer.
    std::size_t i = 0;
    while (i < groups.size() && take[i] == groups[i].count) {
      take[i] = 0;
      ++i;
    }
    if (i == groups.size()) break;
    ++take[i];

    std::size_t picked = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) picked += take[g];
    if (picked == 0 || picked == total) continue;  // strict, non-empty

    // Combined type of the selection.
    std::vector<Prime> primes;
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (std::size_t c = 0; c < take[g]; ++c)
        for (const Prime& p : groups[g].type.primes()) primes.push_back(p);
    if (CanonicalType::from(std::move(primes)) != target) continue;

    PiCandidate cand;
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (std::size_t c = 0; c < take[g]; ++c) cand.members.push_back(groups[g].rep);
    out.push_back(std::move(cand));
  }

  // Sorted order: lexicographic on the member key sequences.
  auto keys_of = [](const PiCandidate& c) {
    std::vector<std::string> ks;
    for (const Term& m : c.members) ks.push_back(term_key(m));
    return ks;
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const PiCandidate& x, const PiCandidate& y) {
                     return keys_of(x) < keys_of(y);
                   });
  return out;
}

// ---------------------------------------------------------------- steps

enum class RuleKind { Beta, TypeBeta, Pi };

struct StepLabel {
  RuleKind rule;
  std::vector<int> position;       // child indices from the root
  std::vector<Term> choice;        // Pi: the selected sub-multiset
  std::size_t candidate_count = 1; // Pi: how many candidates were available
};

namespace detail {

inline Term replace_at(const Term& t, const std::vector<int>& path,
                       std::size_t depth, const Term& repl) {
  if (depth == path.size()) return repl;
  int c = path[depth];
  switch (t.kind()) {
    case TermKind::Lam:
      return Term::lam(t.binder(), replace_at(t.body(), path, depth + 1, repl));
    case TermKind::App:
      return c == 0 ? Term::app(replace_at(t.fun(), path, depth + 1, repl), t.arg())
                    : Term::app(t.fun(), replace_at(t.arg(), path, depth + 1, repl));
    case TermKind::Sum:
      return c == 0 ? Term::sum(replace_at(t.left(), path, depth + 1, repl), t.right())
                    : Term::sum(t.left(), replace_at(t.right(), path, depth + 1, repl));
    case TermKind::Proj:
      return Term::proj(t.proj_target(), replace_at(t.body(), path, depth + 1, repl));
    case TermKind::TLam:
      return Term::tlam(t.tbinder(), replace_at(t.body(), path, depth + 1, repl));
    case TermKind::TApp:
      return Term::tapp(replace_at(t.fun(), path, depth + 1, repl), t.targ());
    case TermKind::Var:
      break;
  }
  throw std::logic_error("replace_at: path into a leaf");
}

struct FoundStep {
  StepLabel label;
  Term contractum;  // replaces the subterm at label.position
};

// All redex firings at this node, in candidate order for projections.
inline void node_steps(const Term& t, const std::vector<int>& path,
                       std::vector<FoundStep>& out) {
  switch (t.kind()) {
    case TermKind::App:
      if (t.fun().kind() == TermKind::Lam) {
        FoundStep s;
        s.label = StepLabel{RuleKind::Beta, path, {}, 1};
        s.contractum = subst_term(t.fun().body(), t.fun().binder(), t.arg());
        out.push_back(std::move(s));
      }
      return;
    case TermKind::TApp:
      if (t.fun().kind() == TermKind::TLam) {
        FoundStep s;
        s.label = StepLabel{RuleKind::TypeBeta, path, {}, 1};
        s.contractum =
            subst_type_in_term(t.fun().body(), t.fun().tbinder(), t.targ());
        out.push_back(std::move(s));
      }
      return;
    case TermKind::Proj: {
      std::vector<Term> parts;
      flatten_summands(t.body(), parts);
      auto cands = pi_candidates(canonicalize(t.proj_target()), parts);
      for (const PiCandidate& c : cands) {
        FoundStep s;
        s.label = StepLabel{RuleKind::Pi, path, c.members, cands.size()};
        s.contractum = rebuild_sum(c.members);
        out.push_back(std::move(s));
      }
      return;
    }
    default:
      return;
  }
}

template <typename Fn>
inline void walk_preorder(const Term& t, std::vector<int>& path, Fn&& fn) {
  fn(t, path);
  auto down = [&](int c, const Term& child) {
    path.push_back(c);
    walk_preorder(child, path, fn);
    path.pop_back();
  };
  switch (t.kind()) {
    case TermKind::Var: return;
    case TermKind::Lam: down(0, t.body()); return;
    case TermKind::App: down(0, t.fun()); down(1, t.arg()); return;
    case TermKind::Sum: down(0, t.left()); down(1, t.right()); return;
    case TermKind::Proj: down(0, t.body()); return;
    case TermKind::TLam: down(0, t.body()); return;
    case TermKind::TApp: down(0, t.fun()); return;
  }
}

template <typename Fn>
inline void walk_postorder(const Term& t, std::vector<int>& path, Fn&& fn) {
  auto down = [&](int c, const Term& child) {
    path.push_back(c);
    walk_postorder(child, path, fn);
    path.pop_back();
  };
  switch (t.kind()) {
    case TermKind::Var: break;
    case TermKind::Lam: down(0, t.body()); break;
    case TermKind::App: down(0, t.fun()); down(1, t.arg()); break;
    case TermKind::Sum: down(0, t.left()); down(1, t.right()); break;
    case TermKind::Proj: down(0, t.body()); break;
    case TermKind::TLam: down(0, t.body()); break;
    case TermKind::TApp: down(0, t.fun()); break;
  }
  fn(t, path);
}

}  // namespace detail

// Every one-step successor under full congruence closure, re-normalized and
// deduplicated (first label wins for a repeated result).
inline std::vector<std::pair<StepLabel, StructuralNF>> enumerate_steps(
    const StructuralNF& nf) {
  std::vector<detail::FoundStep> found;
  std::vector<int> path;
  detail::walk_preorder(nf.rep(), path, [&](const Term& t, const std::vector<int>& p) {
    detail::node_steps(t, p, found);
  });
  std::vector<std::pair<StepLabel, StructuralNF>> out;
  std::map<std::string, bool> seen;
  for (const detail::FoundStep& s : found) {
    Term next = detail::replace_at(nf.rep(), s.label.position, 0, s.contractum);
    StructuralNF succ = structural_normalize(next);
    if (seen.emplace(succ.key(), true).second)
      out.emplace_back(s.label, std::move(succ));
  }
  return out;
}

// ---------------------------------------------------------------- closure

struct NormalFormsResult {
  std::vector<StructuralNF> forms;  // sorted
  bool complete = true;             // false: budget ran out first
};

inline NormalFormsResult normal_forms(const Term& t,
                                      std::size_t max_steps = 10000) {
  NormalFormsResult res;
  StructuralNF root = structural_normalize(t);
  std::deque<StructuralNF> queue{root};
  std::map<std::string, bool> seen{{root.key(), true}};
  std::size_t expanded = 0;
  while (!queue.empty()) {
    if (expanded == max_steps) {
      res.complete = false;
      break;
    }
    StructuralNF cur = std::move(queue.front());
    queue.pop_front();
    ++expanded;
    auto steps = enumerate_steps(cur);
    if (steps.empty()) {
      res.forms.push_back(std::move(cur));
      continue;
    }
    for (auto& [label, succ] : steps) {
      (void)label;
      if (seen.emplace(succ.key(), true).second) queue.push_back(std::move(succ));
    }
  }
  std::sort(res.forms.begin(), res.forms.end());
  return res;
}

// ---------------------------------------------------------------- graphs

enum class Strategy { LeftmostOutermost, InnermostFirst };

// The redex the strategy fires next: for projections all candidates at the
// chosen position (the non-deterministic branch), otherwise one step.
inline std::optional<std::vector<std::pair<StepLabel, StructuralNF>>>
strategy_step(const StructuralNF& nf, Strategy strat) {
  std::optional<std::vector<detail::FoundStep>> chosen;
  std::vector<int> path;
  auto visit = [&](const Term& t, const std::vector<int>& p) {
    if (chosen) return;
    std::vector<detail::FoundStep> here;
    detail::node_steps(t, p, here);
    if (!here.empty()) chosen = std::move(here);
  };
  if (strat == Strategy::LeftmostOutermost)
    detail::walk_preorder(nf.rep(), path, visit);
  else
    detail::walk_postorder(nf.rep(), path, visit);
  if (!chosen) return std::nullopt;
  std::vector<std::pair<StepLabel, StructuralNF>> out;
  for (const detail::FoundStep& s : *chosen) {
    Term next = detail::replace_at(nf.rep(), s.label.position, 0, s.contractum);
    out.emplace_back(s.label, structural_normalize(next));
  }
  return out;
}

enum class NodeStatus { NormalForm, Expanded, BudgetTruncated };

struct ReductionGraph {
  struct Node {
    StructuralNF term;
    NodeStatus status = NodeStatus::Expanded;
    bool stuck = false;  // normal form that still contains a projection
  };
  struct Edge {
    std::size_t from, to;
    StepLabel label;
  };
  std::vector<Node> nodes;  // breadth-first discovery order; root first
  std::vector<Edge> edges;
};

// Breadth-first exploration following one strategy position per node.
inline ReductionGraph build_graph(const Term& t, std::size_t max_nodes = 100,
                                  Strategy strat = Strategy::LeftmostOutermost) {
  ReductionGraph g;
  std::map<std::string, std::size_t> index;
  auto add_node = [&](StructuralNF nf) {
    std::size_t id = g.nodes.size();
    index.emplace(nf.key(), id);
    g.nodes.push_back(ReductionGraph::Node{std::move(nf), NodeStatus::Expanded, false});
    return id;
  };
  add_node(structural_normalize(t));
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    auto steps = strategy_step(g.nodes[i].term, strat);
    if (!steps) {
      g.nodes[i].status = NodeStatus::NormalForm;
      g.nodes[i].stuck = contains_projection(g.nodes[i].term.rep());
      continue;
    }
    bool truncated = false;
    for (auto& [label, succ] : *steps) {
      auto it = index.find(succ.key());
      std::size_t to;
      if (it != index.end()) {
        to = it->second;
      } else if (g.nodes.size() < max_nodes) {
        to = add_node(std::move(succ));
      } else {
        truncated = true;
        continue;
      }
      g.edges.push_back(ReductionGraph::Edge{i, to, label});
    }
    if (truncated) g.nodes[i].status = NodeStatus::BudgetTruncated;
  }
  return g;
}

}  // namespace lpl
