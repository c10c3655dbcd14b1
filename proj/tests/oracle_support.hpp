#pragma once
// Independent oracles and harness helpers for the test suite.
//
// The equivalence oracle here never touches the library's canonicalizer: it
// decides equivalence by breadth-first closure over the three isomorphism
// axioms applied one step at a time, under congruence, in both directions.
// The declarative typer on top of it re-derives typing judgements from the
// inference rules with an explicit equivalence rule, again without the
// canonical-form machinery.  Agreement between these oracles and the library
// is what the property suites check.

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "lpl/gen.hpp"
#include "lpl/rewrite.hpp"
#include "lpl/syntax.hpp"
#include "lpl/term.hpp"
#include "lpl/type.hpp"
#include "lpl/typer.hpp"

namespace oracle {

using lpl::Term;
using lpl::TermKind;
using lpl::Type;
using lpl::TypeKind;
using lpl::TypedVar;

// ---------------------------------------------------------------- spelling

// Injective spelling of a type with de Bruijn binders; independent of the
// library's printers and canonicalizer.
inline void okey_into(const Type& t, std::vector<std::string>& env, std::string& out) {
  switch (t.kind()) {
    case TypeKind::Var: {
      for (std::size_t i = env.size(); i-- > 0;) {
        if (env[i] == t.name()) {
          out += "%" + std::to_string(env.size() - 1 - i);
          return;
        }
      }
      out += t.name();
      return;
    }
    case TypeKind::Arrow:
      out += "(";
      okey_into(t.domain(), env, out);
      out += ">";
      okey_into(t.codomain(), env, out);
      out += ")";
      return;
    case TypeKind::Conj:
      out += "(";
      okey_into(t.left(), env, out);
      out += "&";
      okey_into(t.right(), env, out);
      out += ")";
      return;
    case TypeKind::Forall:
      out += "(@";
      env.push_back(t.binder());
      okey_into(t.body(), env, out);
      env.pop_back();
      out += ")";
      return;
  }
}

inline std::string okey(const Type& t) {
  std::vector<std::string> env;
  std::string out;
  okey_into(t, env, out);
  return out;
}

// ---------------------------------------------------------------- axioms

// Every type reachable by ONE application of one isomorphism axiom at one
// position, in either direction:
//   comm    A&B           <->  B&A
//   assoc   (A&B)&C       <->  A&(B&C)
//   dist    A->(B&C)      <->  (A->B)&(A->C)
inline void type_axiom_neighbors_into(const Type& t, std::vector<Type>& out) {
  if (t.kind() == TypeKind::Conj) {
    Type l = t.left(), r = t.right();
    out.push_back(Type::conj(r, l));  // comm
    if (l.kind() == TypeKind::Conj)   // assoc, left to right
      out.push_back(Type::conj(l.left(), Type::conj(l.right(), r)));
    if (r.kind() == TypeKind::Conj)   // assoc, right to left
      out.push_back(Type::conj(Type::conj(l, r.left()), r.right()));
    if (l.kind() == TypeKind::Arrow && r.kind() == TypeKind::Arrow &&
        lpl::structurally_equal(l.domain(), r.domain()))  // dist, folding
      out.push_back(
          Type::arrow(l.domain(), Type::conj(l.codomain(), r.codomain())));
  }
  if (t.kind() == TypeKind::Arrow && t.codomain().kind() == TypeKind::Conj) {
    Type d = t.domain(), c = t.codomain();  // dist, unfolding
    out.push_back(Type::conj(Type::arrow(d, c.left()), Type::arrow(d, c.right())));
  }
  // Congruence: rewrite inside one child.
  auto descend = [&](const Type& child, auto rebuild) {
    std::vector<Type> sub;
    type_axiom_neighbors_into(child, sub);
    for (const Type& s : sub) out.push_back(rebuild(s));
  };
  switch (t.kind()) {
    case TypeKind::Var:
      return;
    case TypeKind::Arrow:
      descend(t.domain(), [&](const Type& s) { return Type::arrow(s, t.codomain()); });
      descend(t.codomain(), [&](const Type& s) { return Type::arrow(t.domain(), s); });
      return;
    case TypeKind::Conj:
      descend(t.left(), [&](const Type& s) { return Type::conj(s, t.right()); });
      descend(t.right(), [&](const Type& s) { return Type::conj(t.left(), s); });
      return;
    case TypeKind::Forall:
      descend(t.body(), [&](const Type& s) { return Type::forall(t.binder(), s); });
      return;
  }
}

inline std::vector<Type> type_axiom_neighbors(const Type& t) {
  std::vector<Type> out;
  type_axiom_neighbors_into(t, out);
  return out;
}

// ------------------------------------------------------- equivalence oracle

// Partition of types into equivalence classes by breadth-first closure over
// the axioms.  Two types are equivalent iff their closures meet; closures
// are finite because folding steps shrink and unfolding steps are bounded by
// the fully distributed form.
class TypeClassOracle {
public:
  explicit TypeClassOracle(std::size_t max_class_nodes = 200000)
      : cap_(max_class_nodes) {}

  int class_of(const Type& t) {
    std::string k = okey(t);
    auto it = cls_.find(k);
    if (it != cls_.end()) return it->second;

    std::vector<Type> frontier{t};
    std::map<std::string, Type> seen{{k, t}};
    while (!frontier.empty()) {
      std::vector<Type> next;
      for (const Type& cur : frontier) {
        for (const Type& n : type_axiom_neighbors(cur)) {
          std::string nk = okey(n);
          auto known = cls_.find(nk);
          if (known != cls_.end()) {
            // Met an already-classified type: same class, already complete.
            for (auto& [mk, mt] : seen) {
              (void)mt;
              cls_.emplace(mk, known->second);
            }
            return known->second;
          }
          if (seen.emplace(nk, n).second) next.push_back(n);
        }
      }
      if (seen.size() > cap_)
        throw std::runtime_error("TypeClassOracle: class closure exceeded cap");
      frontier = std::move(next);
    }
    int id = static_cast<int>(members_.size());
    members_.emplace_back();
    for (auto& [mk, mt] : seen) {
      cls_.emplace(mk, id);
      members_[id].push_back(mt);
    }
    return id;
  }

  bool equivalent(const Type& a, const Type& b) { return class_of(a) == class_of(b); }

  // All spellings in the class, deduplicated (okey order).
  const std::vector<Type>& members(int id) const { return members_[id]; }

  const Type& rep(int id) const { return members_[id].front(); }

private:
  std::size_t cap_;
  std::map<std::string, int> cls_;
  std::vector<std::vector<Type>> members_;
};

// All arrow/conjunction types over the given variables with size <= max_size.
inline std::vector<Type> enumerate_types(std::size_t max_size,
                                         const std::vector<std::string>& vars) {
  std::vector<std::vector<Type>> by_size(max_size + 1);
  for (std::size_t n = 1; n <= max_size; ++n) {
    if (n == 1) {
      for (const std::string& v : vars) by_size[1].push_back(Type::var(v));
      continue;
    }
    for (std::size_t l = 1; l + 2 <= n; ++l) {
      std::size_t r = n - 1 - l;
      for (const Type& a : by_size[l])
        for (const Type& b : by_size[r]) {
          by_size[n].push_back(Type::arrow(a, b));
          by_size[n].push_back(Type::conj(a, b));
        }
    }
  }
  std::vector<Type> all;
  for (auto& bucket : by_size)
    for (const Type& t : bucket) all.push_back(t);
  return all;
}

// ------------------------------------------------------- declarative typer

// Free type variables of a type, respecting its own binders; independent of
// the library's free_type_vars.
inline void type_fvs_into(const Type& t, std::vector<std::string>& bound,
                          std::set<std::string>& out) {
  switch (t.kind()) {
    case TypeKind::Var: {
      for (const std::string& b : bound)
        if (b == t.name()) return;
      out.insert(t.name());
      return;
    }
    case TypeKind::Arrow:
      type_fvs_into(t.domain(), bound, out);
      type_fvs_into(t.codomain(), bound, out);
      return;
    case TypeKind::Conj:
      type_fvs_into(t.left(), bound, out);
      type_fvs_into(t.right(), bound, out);
      return;
    case TypeKind::Forall:
      bound.push_back(t.binder());
      type_fvs_into(t.body(), bound, out);
      bound.pop_back();
      return;
  }
}

inline std::set<std::string> type_fvs(const Type& t) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  type_fvs_into(t, bound, out);
  return out;
}

// Re-derives typing from the declarative rules: each rule as stated, plus an
// explicit equivalence rule realized by working with whole equivalence
// classes.  Returns the set of derivable classes (empty = no derivation).
// Unique typing predicts at most one element.
class DeclarativeTyper {
public:
  explicit DeclarativeTyper(TypeClassOracle& o) : oracle_(o) {}

  std::set<int> derive(const Term& t) {
    switch (t.kind()) {
      case TermKind::Var:
        return {oracle_.class_of(t.var().ann)};
      case TermKind::Lam: {
        std::set<int> out;
        for (int c : derive(t.body()))
          out.insert(oracle_.class_of(Type::arrow(t.binder().ann, oracle_.rep(c))));
        return out;
      }
      case TermKind::App: {
        std::set<int> funs = derive(t.fun());
        std::set<int> args = derive(t.arg());
        std::set<int> out;
        for (int fc : funs)
          for (const Type& m : oracle_.members(fc))
            if (m.kind() == TypeKind::Arrow &&
                args.count(oracle_.class_of(m.domain())))
              out.insert(oracle_.class_of(m.codomain()));
        return out;
      }
      case TermKind::Sum: {
        std::set<int> out;
        for (int a : derive(t.left()))
          for (int b : derive(t.right()))
            out.insert(oracle_.class_of(Type::conj(oracle_.rep(a), oracle_.rep(b))));
        return out;
      }
      case TermKind::Proj: {
        int want = oracle_.class_of(t.proj_target());
        for (int c : derive(t.body()))
          for (const Type& m : oracle_.members(c))
            if (m.kind() == TypeKind::Conj &&
                oracle_.class_of(m.left()) == want)
              return {want};
        return {};
      }
      case TermKind::TLam: {
        if (escapes(t.body(), t.tbinder())) return {};
        std::set<int> out;
        for (int c : derive(t.body()))
          out.insert(oracle_.class_of(Type::forall(t.tbinder(), oracle_.rep(c))));
        return out;
      }
      case TermKind::TApp: {
        std::set<int> out;
        for (int fc : derive(t.fun()))
          for (const Type& m : oracle_.members(fc))
            if (m.kind() == TypeKind::Forall)
              out.insert(oracle_.class_of(
                  lpl::subst_type(m.body(), m.binder(), t.targ())));
        return out;
      }
    }
    return {};
  }

private:
  // Does binder x occur free in the annotation of any variable free in t?
  // Variable binding identity is (name, annotation up to equivalence).
  bool escapes(const Term& t, const std::string& x) {
    std::vector<TypedVar> bound;
    return escapes_rec(t, x, bound);
  }

  bool escapes_rec(const Term& t, const std::string& x, std::vector<TypedVar>& bound) {
    switch (t.kind()) {
      case TermKind::Var: {
        for (const TypedVar& b : bound)
          if (b.name == t.var().name && oracle_.equivalent(b.ann, t.var().ann))
            return false;
        return type_fvs(t.var().ann).count(x) > 0;
      }
      case TermKind::Lam: {
        bound.push_back(t.binder());
        bool r = escapes_rec(t.body(), x, bound);
        bound.pop_back();
        return r;
      }
      case TermKind::App:
        return escapes_rec(t.fun(), x, bound) || escapes_rec(t.arg(), x, bound);
      case TermKind::Sum:
        return escapes_rec(t.left(), x, bound) || escapes_rec(t.right(), x, bound);
      case TermKind::Proj:
        return escapes_rec(t.body(), x, bound);
      case TermKind::TLam:
        return escapes_rec(t.body(), x, bound);
      case TermKind::TApp:
        return escapes_rec(t.fun(), x, bound);
    }
    return false;
  }

  TypeClassOracle& oracle_;
};

// ------------------------------------------------------- term-level axioms

// Every term reachable by ONE application of one structural-congruence axiom
// at one position, either direction, with the typing side conditions of the
// projection/application exchange respected.  Inputs must be well typed.
inline void term_axiom_apps_into(const Term& t,
                                 std::vector<std::pair<std::string, Term>>& out) {
  using lpl::CanonicalType;
  if (t.kind() == TermKind::Sum) {
    Term l = t.left(), r = t.right();
    out.emplace_back("comm", Term::sum(r, l));
    if (l.kind() == TermKind::Sum)
      out.emplace_back("assoc>", Term::sum(l.left(), Term::sum(l.right(), r)));
    if (r.kind() == TermKind::Sum)
      out.emplace_back("assoc<", Term::sum(Term::sum(l, r.left()), r.right()));
    if (l.kind() == TermKind::App && r.kind() == TermKind::App &&
        lpl::structurally_equal(l.arg(), r.arg()))
      out.emplace_back("distapp<",
                       Term::app(Term::sum(l.fun(), r.fun()), l.arg()));
    if (l.kind() == TermKind::Lam && r.kind() == TermKind::Lam &&
        l.binder().name == r.binder().name &&
        lpl::structurally_equal(l.binder().ann, r.binder().ann))
      out.emplace_back("distlam<",
                       Term::lam(l.binder(), Term::sum(l.body(), r.body())));
  }
  if (t.kind() == TermKind::App && t.fun().kind() == TermKind::Sum)
    out.emplace_back("distapp>",
                     Term::sum(Term::app(t.fun().left(), t.arg()),
                               Term::app(t.fun().right(), t.arg())));
  if (t.kind() == TermKind::Lam && t.body().kind() == TermKind::Sum)
    out.emplace_back("distlam>",
                     Term::sum(Term::lam(t.binder(), t.body().left()),
                               Term::lam(t.binder(), t.body().right())));
  if (t.kind() == TermKind::App && t.fun().kind() == TermKind::Proj) {
    // pi-exchange, projection outward:  pi[S->B](r) s  ->  pi[B](r s)
    const Term& p = t.fun();
    lpl::CanonicalType argty = lpl::infer(t.arg());
    auto cod = lpl::factor_arrow(lpl::canonicalize(p.proj_target()), argty);
    auto whole = lpl::factor_arrow(lpl::infer(p.body()), argty);
    if (cod && whole && lpl::conj_remainder(*whole, *cod))
      out.emplace_back("piapp>", Term::proj(lpl::read_back(*cod),
                                            Term::app(p.body(), t.arg())));
  }
  if (t.kind() == TermKind::Proj && t.body().kind() == TermKind::App) {
    // pi-exchange, projection inward:  pi[B](r s)  ->  pi[S->B](r) s
    const Term& app = t.body();
    lpl::CanonicalType argty = lpl::infer(app.arg());
    lpl::CanonicalType target = lpl::canonicalize(t.proj_target());
    std::vector<lpl::Prime> arrows;
    for (const lpl::Prime& pr : target.primes())
      arrows.push_back(lpl::Prime::arrow(argty, pr));
    lpl::CanonicalType lifted = lpl::CanonicalType::from(std::move(arrows));
    if (lpl::conj_remainder(lpl::infer(app.fun()), lifted))
      out.emplace_back("piapp<", Term::app(Term::proj(lpl::read_back(lifted),
                                                      app.fun()),
                                           app.arg()));
  }
  // Congruence: rewrite inside one child.
  auto descend = [&](const Term& child, auto rebuild) {
    std::vector<std::pair<std::string, Term>> sub;
    term_axiom_apps_into(child, sub);
    for (auto& [d, s] : sub) out.emplace_back(d, rebuild(s));
  };
  switch (t.kind()) {
    case TermKind::Var:
      return;
    case TermKind::Lam:
      descend(t.body(), [&](const Term& s) { return Term::lam(t.binder(), s); });
      return;
    case TermKind::App:
      descend(t.fun(), [&](const Term& s) { return Term::app(s, t.arg()); });
      descend(t.arg(), [&](const Term& s) { return Term::app(t.fun(), s); });
      return;
    case TermKind::Sum:
      descend(t.left(), [&](const Term& s) { return Term::sum(s, t.right()); });
      descend(t.right(), [&](const Term& s) { return Term::sum(t.left(), s); });
      return;
    case TermKind::Proj:
      descend(t.body(), [&](const Term& s) { return Term::proj(t.proj_target(), s); });
      return;
    case TermKind::TLam:
      descend(t.body(), [&](const Term& s) { return Term::tlam(t.tbinder(), s); });
      return;
    case TermKind::TApp:
      descend(t.fun(), [&](const Term& s) { return Term::tapp(s, t.targ()); });
      return;
  }
}

inline std::vector<std::pair<std::string, Term>> term_axiom_applications(const Term& t) {
  std::vector<std::pair<std::string, Term>> out;
  term_axiom_apps_into(t, out);
  return out;
}

// ------------------------------------------------------- alpha renaming

// Renames a type variable in a type; `to` must be fresh for the type.
inline Type rename_tvar(const Type& t, const std::string& from, const std::string& to) {
  switch (t.kind()) {
    case TypeKind::Var:
      return t.name() == from ? Type::var(to) : t;
    case TypeKind::Arrow:
      return Type::arrow(rename_tvar(t.domain(), from, to),
                         rename_tvar(t.codomain(), from, to));
    case TypeKind::Conj:
      return Type::conj(rename_tvar(t.left(), from, to),
                        rename_tvar(t.right(), from, to));
    case TypeKind::Forall:
      if (t.binder() == from) return t;  // shadowed inside
      return Type::forall(t.binder(), rename_tvar(t.body(), from, to));
  }
  return t;
}

// Systematically renames every term binder and every type-abstraction binder
// to a fresh name.  Assumes binder names are unique in the input (true for
// generated terms); independent of the library's substitution.
struct AlphaRenamer {
  int counter = 0;
  std::map<std::string, std::string> vmap;   // term binder renames
  std::map<std::string, std::string> tmap;   // type binder renames

  Type fix_type(const Type& ty) {
    Type cur = ty;
    for (const auto& [from, to] : tmap) cur = rename_tvar(cur, from, to);
    return cur;
  }

  Term rename(const Term& t) {
    switch (t.kind()) {
      case TermKind::Var: {
        auto it = vmap.find(t.var().name);
        std::string name = it == vmap.end() ? t.var().name : it->second;
        return Term::var(name, fix_type(t.var().ann));
      }
      case TermKind::Lam: {
        std::string fresh = t.binder().name + "_r" + std::to_string(++counter);
        vmap[t.binder().name] = fresh;
        TypedVar nb{fresh, fix_type(t.binder().ann)};
        Term body = rename(t.body());
        vmap.erase(t.binder().name);
        return Term::lam(nb, body);
      }
      case TermKind::App:
        return Term::app(rename(t.fun()), rename(t.arg()));
      case TermKind::Sum:
        return Term::sum(rename(t.left()), rename(t.right()));
      case TermKind::Proj:
        return Term::proj(fix_type(t.proj_target()), rename(t.body()));
      case TermKind::TLam: {
        std::string fresh = "R" + std::to_string(++counter);
        tmap[t.tbinder()] = fresh;
        Term body = rename(t.body());
        tmap.erase(t.tbinder());
        return Term::tlam(fresh, body);
      }
      case TermKind::TApp:
        return Term::tapp(rename(t.fun()), fix_type(t.targ()));
    }
    return t;
  }
};

inline Term alpha_rename_term(const Term& t) {
  AlphaRenamer r;
  return r.rename(t);
}

// ------------------------------------------------------- DOT validation

struct DotShape {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::vector<std::string> edge_labels;
};

// Structural check of the driver's DOT output: declared digraph, node
// statements before use, well-formed attribute lists, balanced braces.
inline std::optional<DotShape> validate_dot(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "digraph reduction {") return std::nullopt;
  static const std::regex node_re(
      R"re(  n(\d+) \[label="((?:\\.|[^"\\])*)"( peripheries=2)?( style=(?:dashed|dotted))?\];)re");
  static const std::regex edge_re(
      R"re(  n(\d+) -> n(\d+) \[label="((?:\\.|[^"\\])*)"\];)re");
  DotShape shape;
  std::set<long> declared;
  bool closed = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "}") {
      closed = true;
      break;
    }
    if (line == "  node [shape=box];") continue;
    std::smatch m;
    if (std::regex_match(line, m, node_re)) {
      long id = std::stol(m[1]);
      if (!declared.insert(id).second) return std::nullopt;  // duplicate
      ++shape.nodes;
      continue;
    }
    if (std::regex_match(line, m, edge_re)) {
      if (!declared.count(std::stol(m[1])) || !declared.count(std::stol(m[2])))
        return std::nullopt;  // edge before declaration
      ++shape.edges;
      shape.edge_labels.push_back(m[3]);
      continue;
    }
    return std::nullopt;  // unrecognized statement
  }
  if (!closed) return std::nullopt;
  return shape;
}

// ------------------------------------------------------- CLI harness

struct CliResult {
  int status = -1;
  std::string out;
  std::string err;
};

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'')
      q += "'\\''";
    else
      q += c;
  }
  return q + "'";
}

inline std::string slurp_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) return {};
  std::string data;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) data.append(buf, n);
  std::fclose(f);
  return data;
}

// Runs the driver binary with the given (already quoted where needed)
// argument string; captures stdout, stderr, and the exit status.
inline CliResult run_cli(const std::string& args) {
  static int serial = 0;
  std::string base = "/tmp/lpl_cli_" + std::to_string(getpid()) + "_" +
                     std::to_string(++serial);
  std::string out_path = base + ".out", err_path = base + ".err";
  std::string cmd = shell_quote(LPL_BIN) + " " + args + " >" +
                    shell_quote(out_path) + " 2>" + shell_quote(err_path);
  int rc = std::system(cmd.c_str());
  CliResult res;
  if (rc != -1 && WIFEXITED(rc)) res.status = WEXITSTATUS(rc);
  res.out = slurp_file(out_path);
  res.err = slurp_file(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return res;
}

}  // namespace oracle
