#pragma once
// Terms.
//
//   x:A  |  \x:A. r  |  r s  |  r + s  |  pi[A](r)  |  /\X. r  |  r {A}
//
// Every variable carries a type annotation, and the identity of a variable
// is the pair (name, canonical form of its annotation): x:A&B and x:B&A are
// the same variable, x:A and x:B are different variables even under the
// same binder name.

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpl/type.hpp"

namespace lpl {

struct TypedVar {
  std::string name;
  Type ann;

  CanonicalType canon() const { return canonicalize(ann); }
};

// Identity comparison: name plus annotation modulo equivalence.
inline bool same_var(const TypedVar& x, const TypedVar& y) {
  return x.name == y.name && canonicalize(x.ann) == canonicalize(y.ann);
}

enum class TermKind { Var, Lam, App, Sum, Proj, TLam, TApp };

class Term;

struct TermNode {
  TermKind kind;
  TypedVar var;          // Var: the occurrence; Lam: the binder
  std::string tbinder;   // TLam: bound type variable
  Type ty;               // Proj: target; TApp: argument
  std::shared_ptr<const TermNode> a;  // Lam/Proj/TLam: body; App: function;
                                      // Sum: left; TApp: function
  std::shared_ptr<const TermNode> b;  // App: argument; Sum: right
};

class Term {
public:
  Term() = default;

  static Term var(TypedVar v) {
    TermNode n;
    n.kind = TermKind::Var;
    n.var = std::move(v);
    return make(std::move(n));
  }
  static Term var(std::string name, Type ann) {
    return var(TypedVar{std::move(name), std::move(ann)});
  }
  static Term lam(TypedVar binder, Term body) {
    TermNode n;
    n.kind = TermKind::Lam;
    n.var = std::move(binder);
    n.a = body.n_;
    return make(std::move(n));
  }
  static Term app(Term f, Term arg) {
    TermNode n;
    n.kind = TermKind::App;
    n.a = f.n_;
    n.b = arg.n_;
    return make(std::move(n));
  }
  static Term sum(Term l, Term r) {
    TermNode n;
    n.kind = TermKind::Sum;
    n.a = l.n_;
    n.b = r.n_;
    return make(std::move(n));
  }
  static Term proj(Type target, Term body) {
    TermNode n;
    n.kind = TermKind::Proj;
    n.ty = std::move(target);
    n.a = body.n_;
    return make(std::move(n));
  }
  static Term tlam(std::string binder, Term body) {
    TermNode n;
    n.kind = TermKind::TLam;
    n.tbinder = std::move(binder);
    n.a = body.n_;
    return make(std::move(n));
  }
  static Term tapp(Term f, Type arg) {
    TermNode n;
    n.kind = TermKind::TApp;
    n.ty = std::move(arg);
    n.a = f.n_;
    return make(std::move(n));
  }

  TermKind kind() const { return n_->kind; }
  const TypedVar& var() const { return n_->var; }      // Var occurrence
  const TypedVar& binder() const { return n_->var; }   // Lam binder
  const std::string& tbinder() const { return n_->tbinder; }  // TLam
  const Type& proj_target() const { return n_->ty; }   // Proj
  const Type& targ() const { return n_->ty; }          // TApp
  Term body() const { return Term(n_->a); }            // Lam/Proj/TLam
  Term fun() const { return Term(n_->a); }             // App/TApp
  Term arg() const { return Term(n_->b); }             // App
  Term left() const { return Term(n_->a); }            // Sum
  Term right() const { return Term(n_->b); }           // Sum

  bool valid() const { return n_ != nullptr; }
  const TermNode* node() const { return n_.get(); }

private:
  explicit Term(std::shared_ptr<const TermNode> n) : n_(std::move(n)) {}
  static Term make(TermNode n) {
    return Term(std::make_shared<const TermNode>(std::move(n)));
  }
  std::shared_ptr<const TermNode> n_;
};

inline std::size_t term_size(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var: return 1;
    case TermKind::Lam: return 1 + term_size(t.body());
    case TermKind::App: return 1 + term_size(t.fun()) + term_size(t.arg());
    case TermKind::Sum: return 1 + term_size(t.left()) + term_size(t.right());
    case TermKind::Proj: return 1 + term_size(t.body());
    case TermKind::TLam: return 1 + term_size(t.body());
    case TermKind::TApp: return 1 + term_size(t.fun());
  }
  return 0;
}

// Exact tree equality, annotations and binder names included.
inline bool structurally_equal(const Term& x, const Term& y) {
  if (x.node() == y.node()) return true;
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case TermKind::Var:
      return x.var().name == y.var().name &&
             structurally_equal(x.var().ann, y.var().ann);
    case TermKind::Lam:
      return x.binder().name == y.binder().name &&
             structurally_equal(x.binder().ann, y.binder().ann) &&
             structurally_equal(x.body(), y.body());
    case TermKind::App:
      return structurally_equal(x.fun(), y.fun()) &&
             structurally_equal(x.arg(), y.arg());
    case TermKind::Sum:
      return structurally_equal(x.left(), y.left()) &&
             structurally_equal(x.right(), y.right());
    case TermKind::Proj:
      return structurally_equal(x.proj_target(), y.proj_target()) &&
             structurally_equal(x.body(), y.body());
    case TermKind::TLam:
      return x.tbinder() == y.tbinder() &&
             structurally_equal(x.body(), y.body());
    case TermKind::TApp:
      return structurally_equal(x.fun(), y.fun()) &&
             structurally_equal(x.targ(), y.targ());
  }
  return false;
}

// ---------------------------------------------------------------- free vars

// Ordered by identity: name, then canonical annotation.
struct VarOrder {
  bool operator()(const TypedVar& x, const TypedVar& y) const {
    if (x.name != y.name) return x.name < y.name;
    return compare_canonical(canonicalize(x.ann), canonicalize(y.ann)) < 0;
  }
};

using VarSet = std::set<TypedVar, VarOrder>;

namespace detail {

inline void free_vars_into(const Term& t, std::vector<TypedVar>& binders,
                           VarSet& out) {
  switch (t.kind()) {
    case TermKind::Var: {
      for (std::size_t i = binders.size(); i-- > 0;)
        if (same_var(binders[i], t.var())) return;  // bound
      out.insert(t.var());
      return;
    }
    case TermKind::Lam:
      binders.push_back(t.binder());
      free_vars_into(t.body(), binders, out);
      binders.pop_back();
      return;
    case TermKind::App:
      free_vars_into(t.fun(), binders, out);
      free_vars_into(t.arg(), binders, out);
      return;
    case TermKind::Sum:
      free_vars_into(t.left(), binders, out);
      free_vars_into(t.right(), binders, out);
      return;
    case TermKind::Proj:
      free_vars_into(t.body(), binders, out);
      return;
    case TermKind::TLam:
      free_vars_into(t.body(), binders, out);
      return;
    case TermKind::TApp:
      free_vars_into(t.fun(), binders, out);
      return;
  }
}

}  // namespace detail

inline VarSet free_vars(const Term& t) {
  std::vector<TypedVar> binders;
  VarSet out;
  detail::free_vars_into(t, binders, out);
  return out;
}

// The context of a term: canonical types of its free variables, deduplicated
// and sorted.
inline std::vector<CanonicalType> type_env(const Term& t) {
  std::vector<CanonicalType> out;
  for (const TypedVar& v : free_vars(t)) out.push_back(canonicalize(v.ann));
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return compare_canonical(x, y) < 0;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Type variable names free in any annotation of the term, respecting
// type-abstraction binders.  (Term binders do not bind type variables.)
namespace detail {

inline void term_free_type_vars_into(const Term& t, std::set<std::string>& bound,
                                     std::set<std::string>& out) {
  auto add_type = [&](const Type& ty) {
    for (const auto& n : free_type_vars(ty))
      if (!bound.count(n)) out.insert(n);
  };
  switch (t.kind()) {
    case TermKind::Var: add_type(t.var().ann); return;
    case TermKind::Lam:
      add_type(t.binder().ann);
      term_free_type_vars_into(t.body(), bound, out);
      return;
    case TermKind::App:
      term_free_type_vars_into(t.fun(), bound, out);
      term_free_type_vars_into(t.arg(), bound, out);
      return;
    case TermKind::Sum:
      term_free_type_vars_into(t.left(), bound, out);
      term_free_type_vars_into(t.right(), bound, out);
      return;
    case TermKind::Proj:
      add_type(t.proj_target());
      term_free_type_vars_into(t.body(), bound, out);
      return;
    case TermKind::TLam: {
      bool fresh = bound.insert(t.tbinder()).second;
      term_free_type_vars_into(t.body(), bound, out);
      if (fresh) bound.erase(t.tbinder());
      return;
    }
    case TermKind::TApp:
      add_type(t.targ());
      term_free_type_vars_into(t.fun(), bound, out);
      return;
  }
}

}  // namespace detail

inline std::set<std::string> term_free_type_vars(const Term& t) {
  std::set<std::string> bound, out;
  detail::term_free_type_vars_into(t, bound, out);
  return out;
}

inline std::string fresh_term_name(const std::string& base,
                                   const std::set<std::string>& avoid) {
  std::string cand = base;
  while (avoid.count(cand)) cand += "'";
  return cand;
}

// ---------------------------------------------------------------- subst

// r[s/x]: replace free occurrences of the variable x (identity match) by s.
// Binders that would capture a free variable of s are renamed.
inline Term subst_term(const Term& r, const TypedVar& x, const Term& s) {
  switch (r.kind()) {
    case TermKind::Var:
      return same_var(r.var(), x) ? s : r;
    case TermKind::Lam: {
      if (same_var(r.binder(), x)) return r;  // shadowed
      // Capture check: does s have a free variable this binder would bind?
      bool capture = false;
      for (const TypedVar& v : free_vars(s))
        if (same_var(v, r.binder())) { capture = true; break; }
      if (capture) {
        std::set<std::string> avoid;
        for (const TypedVar& v : free_vars(s)) avoid.insert(v.name);
        for (const TypedVar& v : free_vars(r.body())) avoid.insert(v.name);
        avoid.insert(x.name);
        TypedVar nb{fresh_term_name(r.binder().name, avoid), r.binder().ann};
        Term body = subst_term(r.body(), r.binder(), Term::var(nb));
        return Term::lam(nb, subst_term(body, x, s));
      }
      return Term::lam(r.binder(), subst_term(r.body(), x, s));
    }
    case TermKind::App:
      return Term::app(subst_term(r.fun(), x, s), subst_term(r.arg(), x, s));
    case TermKind::Sum:
      return Term::sum(subst_term(r.left(), x, s), subst_term(r.right(), x, s));
    case TermKind::Proj:
      return Term::proj(r.proj_target(), subst_term(r.body(), x, s));
    case TermKind::TLam:
      return Term::tlam(r.tbinder(), subst_term(r.body(), x, s));
    case TermKind::TApp:
      return Term::tapp(subst_term(r.fun(), x, s), r.targ());
  }
  throw std::logic_error("subst_term: bad kind");
}

// r[B/X]: substitute a type for a type variable in every annotation.
// /\ binders that would capture a free variable of B are renamed.
inline Term subst_type_in_term(const Term& r, const std::string& x, const Type& b) {
  switch (r.kind()) {
    case TermKind::Var:
      return Term::var(r.var().name, subst_type(r.var().ann, x, b));
    case TermKind::Lam:
      return Term::lam(TypedVar{r.binder().name, subst_type(r.binder().ann, x, b)},
                       subst_type_in_term(r.body(), x, b));
    case TermKind::App:
      return Term::app(subst_type_in_term(r.fun(), x, b),
                       subst_type_in_term(r.arg(), x, b));
    case TermKind::Sum:
      return Term::sum(subst_type_in_term(r.left(), x, b),
                       subst_type_in_term(r.right(), x, b));
    case TermKind::Proj:
      return Term::proj(subst_type(r.proj_target(), x, b),
                        subst_type_in_term(r.body(), x, b));
    case TermKind::TLam: {
      if (r.tbinder() == x) return r;  // shadowed
      std::set<std::string> fvb = free_type_vars(b);
      if (fvb.count(r.tbinder())) {
        std::set<std::string> avoid = fvb;
        for (const auto& n : term_free_type_vars(r.body())) avoid.insert(n);
        avoid.insert(x);
        std::string fresh = fresh_type_name(r.tbinder(), avoid);
        Term body = subst_type_in_term(r.body(), r.tbinder(), Type::var(fresh));
        return Term::tlam(fresh, subst_type_in_term(body, x, b));
      }
      return Term::tlam(r.tbinder(), subst_type_in_term(r.body(), x, b));
    }
    case TermKind::TApp:
      return Term::tapp(subst_type_in_term(r.fun(), x, b),
                        subst_type(r.targ(), x, b));
  }
  throw std::logic_error("subst_type_in_term: bad kind");
}

// ---------------------------------------------------------------- term key

// Canonical text encoding of a term modulo alpha-conversion and type
// equivalence: term binders become de Bruijn indices, /\ binders are renamed
// to reserved depth-indexed names, annotations are canonicalized.  Two terms
// get equal keys iff they are alpha-convertible with equivalent annotations.
// Byte order of keys doubles as the total structural order on terms.
namespace detail {

// Rename every /\ binder to "%<depth>".  "%" cannot occur in source names,
// so the result is alpha-canonical in its type binders.
inline Term canonical_tlam_rename(const Term& t, int depth) {
  switch (t.kind()) {
    case TermKind::Var: return t;
    case TermKind::Lam:
      return Term::lam(t.binder(), canonical_tlam_rename(t.body(), depth));
    case TermKind::App:
      return Term::app(canonical_tlam_rename(t.fun(), depth),
                       canonical_tlam_rename(t.arg(), depth));
    case TermKind::Sum:
      return Term::sum(canonical_tlam_rename(t.left(), depth),
                       canonical_tlam_rename(t.right(), depth));
    case TermKind::Proj:
      return Term::proj(t.proj_target(), canonical_tlam_rename(t.body(), depth));
    case TermKind::TLam: {
      std::string nm = "%" + std::to_string(depth);
      Term body = subst_type_in_term(t.body(), t.tbinder(), Type::var(nm));
      return Term::tlam(nm, canonical_tlam_rename(body, depth + 1));
    }
    case TermKind::TApp:
      return Term::tapp(canonical_tlam_rename(t.fun(), depth), t.targ());
  }
  throw std::logic_error("canonical_tlam_rename: bad kind");
}

struct KeyBinder {
  std::string name;
  CanonicalType ann;
};

inline void term_key_into(const Term& t, std::vector<KeyBinder>& binders,
                          std::string& out) {
  switch (t.kind()) {
    case TermKind::Var: {
      CanonicalType c = canonicalize(t.var().ann);
      for (std::size_t i = binders.size(); i-- > 0;) {
        if (binders[i].name == t.var().name &&
            compare_canonical(binders[i].ann, c) == 0) {
          out += 'b';
          out += std::to_string(binders.size() - 1 - i);
          out += ';';
          return;
        }
      }
      out += "f[";
      out += t.var().name;
      out += ']';
      type_key_into(c, out);
      return;
    }
    case TermKind::Lam: {
      CanonicalType c = canonicalize(t.binder().ann);
      out += 'l';
      type_key_into(c, out);
      out += '(';
      binders.push_back(KeyBinder{t.binder().name, c});
      term_key_into(t.body(), binders, out);
      binders.pop_back();
      out += ')';
      return;
    }
    case TermKind::App:
      out += "a(";
      term_key_into(t.fun(), binders, out);
      out += ")(";
      term_key_into(t.arg(), binders, out);
      out += ')';
      return;
    case TermKind::Sum:
      out += "s(";
      term_key_into(t.left(), binders, out);
      out += ")(";
      term_key_into(t.right(), binders, out);
      out += ')';
      return;
    case TermKind::Proj:
      out += 'p';
      type_key_into(canonicalize(t.proj_target()), out);
      out += '(';
      term_key_into(t.body(), binders, out);
      out += ')';
      return;
    case TermKind::TLam:
      out += "t(";
      term_key_into(t.body(), binders, out);
      out += ')';
      return;
    case TermKind::TApp:
      out += "y(";
      term_key_into(t.fun(), binders, out);
      out += ')';
      type_key_into(canonicalize(t.targ()), out);
      return;
  }
}

}  // namespace detail

inline std::string term_key(const Term& t) {
  Term canon = detail::canonical_tlam_rename(t, 0);
  std::vector<detail::KeyBinder> binders;
  std::string out;
  detail::term_key_into(canon, binders, out);
  return out;
}

// Alpha-convertibility with annotations compared modulo type equivalence.
inline bool alpha_eq(const Term& x, const Term& y) {
  return term_key(x) == term_key(y);
}

}  // namespace lpl
