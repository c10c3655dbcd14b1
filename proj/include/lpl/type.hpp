#pragma once
// Surface types and their canonical forms.
//
// Surface grammar:   X  |  A -> B  |  A & B  |  forall X. A
//
// Two surface types are interchangeable when one can be rewritten into the
// other with the three equations
//
//     A & B            =  B & A
//     (A & B) & C      =  A & (B & C)
//     A -> (B & C)     =  (A -> B) & (A -> C)
//
// applied anywhere.  A canonical form quotients by exactly these: it is the
// sorted multiset of prime factors of a type, where arrows have been
// distributed over conjunctive codomains and forall-bound variables are de
// Bruijn indices (so alpha-variants coincide).  Conjunction is not
// idempotent: A & A keeps two copies of the prime A.

#include <algorithm>
#include <cassert>
#include <memory>
#include <optional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lpl {

// ---------------------------------------------------------------- surface

enum class TypeKind { Var, Arrow, Conj, Forall };

class Type;

struct TypeNode {
  TypeKind kind;
  std::string name;              // Var: variable; Forall: binder
  std::shared_ptr<const TypeNode> a;  // Arrow: domain; Conj: left; Forall: body
  std::shared_ptr<const TypeNode> b;  // Arrow: codomain; Conj: right
};

// Immutable handle to a shared type tree.
class Type {
public:
  Type() = default;

  static Type var(std::string name) {
    return Type(std::make_shared<const TypeNode>(
        TypeNode{TypeKind::Var, std::move(name), nullptr, nullptr}));
  }
  static Type arrow(Type dom, Type cod) {
    return Type(std::make_shared<const TypeNode>(
        TypeNode{TypeKind::Arrow, "", dom.n_, cod.n_}));
  }
  static Type conj(Type l, Type r) {
    return Type(std::make_shared<const TypeNode>(
        TypeNode{TypeKind::Conj, "", l.n_, r.n_}));
  }
  static Type forall(std::string binder, Type body) {
    return Type(std::make_shared<const TypeNode>(
        TypeNode{TypeKind::Forall, std::move(binder), body.n_, nullptr}));
  }

  TypeKind kind() const { return n_->kind; }
  const std::string& name() const { return n_->name; }    // Var
  const std::string& binder() const { return n_->name; }  // Forall
  Type domain() const { return Type(n_->a); }             // Arrow
  Type codomain() const { return Type(n_->b); }           // Arrow
  Type left() const { return Type(n_->a); }               // Conj
  Type right() const { return Type(n_->b); }              // Conj
  Type body() const { return Type(n_->a); }               // Forall

  bool valid() const { return n_ != nullptr; }
  const TypeNode* node() const { return n_.get(); }

private:
  explicit Type(std::shared_ptr<const TypeNode> n) : n_(std::move(n)) {}
  std::shared_ptr<const TypeNode> n_;
};

inline std::size_t type_size(const Type& t) {
  switch (t.kind()) {
    case TypeKind::Var: return 1;
    case TypeKind::Arrow: return 1 + type_size(t.domain()) + type_size(t.codomain());
    case TypeKind::Conj: return 1 + type_size(t.left()) + type_size(t.right());
    case TypeKind::Forall: return 1 + type_size(t.body());
  }
  return 0;
}

// Exact tree equality, names included.  (Equivalence modulo the three
// equations is type_equiv below; alpha-insensitive identity goes through
// canonicalize.)
inline bool structurally_equal(const Type& x, const Type& y) {
  if (x.node() == y.node()) return true;
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case TypeKind::Var: return x.name() == y.name();
    case TypeKind::Arrow:
      return structurally_equal(x.domain(), y.domain()) &&
             structurally_equal(x.codomain(), y.codomain());
    case TypeKind::Conj:
      return structurally_equal(x.left(), y.left()) &&
             structurally_equal(x.right(), y.right());
    case TypeKind::Forall:
      return x.binder() == y.binder() &&
             structurally_equal(x.body(), y.body());
  }
  return false;
}

// Free type variables, respecting forall binders.
inline void free_type_vars_into(const Type& t, std::set<std::string>& out,
                                std::set<std::string>& bound) {
  switch (t.kind()) {
    case TypeKind::Var:
      if (!bound.count(t.name())) out.insert(t.name());
      return;
    case TypeKind::Arrow:
      free_type_vars_into(t.domain(), out, bound);
      free_type_vars_into(t.codomain(), out, bound);
      return;
    case TypeKind::Conj:
      free_type_vars_into(t.left(), out, bound);
      free_type_vars_into(t.right(), out, bound);
      return;
    case TypeKind::Forall: {
      bool fresh = bound.insert(t.binder()).second;
      free_type_vars_into(t.body(), out, bound);
      if (fresh) bound.erase(t.binder());
      return;
    }
  }
}

inline std::set<std::string> free_type_vars(const Type& t) {
  std::set<std::string> out, bound;
  free_type_vars_into(t, out, bound);
  return out;
}

inline std::string fresh_type_name(const std::string& base,
                                   const std::set<std::string>& avoid) {
  std::string cand = base;
  while (avoid.count(cand)) cand += "'";
  return cand;
}

// Capture-avoiding substitution a[b/x].
inline Type subst_type(const Type& a, const std::string& x, const Type& b) {
  switch (a.kind()) {
    case TypeKind::Var:
      return a.name() == x ? b : a;
    case TypeKind::Arrow:
      return Type::arrow(subst_type(a.domain(), x, b),
                         subst_type(a.codomain(), x, b));
    case TypeKind::Conj:
      return Type::conj(subst_type(a.left(), x, b),
                        subst_type(a.right(), x, b));
    case TypeKind::Forall: {
      if (a.binder() == x) return a;  // shadowed
      std::set<std::string> fvb = free_type_vars(b);
      if (fvb.count(a.binder())) {
        // Binder would capture a free variable of b: rename it first.
        std::set<std::string> avoid = fvb;
        for (const auto& n : free_type_vars(a.body())) avoid.insert(n);
        avoid.insert(x);
        std::string fresh = fresh_type_name(a.binder(), avoid);
        Type body = subst_type(a.body(), a.binder(), Type::var(fresh));
        return Type::forall(fresh, subst_type(body, x, b));
      }
      return Type::forall(a.binder(), subst_type(a.body(), x, b));
    }
  }
  throw std::logic_error("subst_type: bad kind");
}

// ---------------------------------------------------------------- canonical

enum class PrimeKind { Var, Arrow, Forall };

class Prime;
class CanonicalType;
int compare_canonical(const Prime& x, const Prime& y);
int compare_canonical(const CanonicalType& x, const CanonicalType& y);

// Sorted non-empty multiset of primes.  Duplicates are meaningful.
class CanonicalType {
public:
  CanonicalType() = default;
  static CanonicalType from(std::vector<Prime> primes);  // sorts

  const std::vector<Prime>& primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }
  bool valid() const { return !primes_.empty(); }

private:
  std::vector<Prime> primes_;
};

struct PrimeNode {
  PrimeKind kind;
  // Var: either a free name or a de Bruijn index for a forall binder.
  bool bound = false;
  int index = -1;
  std::string name;
  CanonicalType arg;  // Arrow: domain; Forall: body
  std::shared_ptr<const PrimeNode> cod;  // Arrow: codomain (prime)
};

class Prime {
public:
  Prime() = default;

  static Prime free_var(std::string name) {
    PrimeNode n;
    n.kind = PrimeKind::Var;
    n.bound = false;
    n.name = std::move(name);
    return Prime(std::make_shared<const PrimeNode>(std::move(n)));
  }
  static Prime bound_var(int index) {
    PrimeNode n;
    n.kind = PrimeKind::Var;
    n.bound = true;
    n.index = index;
    return Prime(std::make_shared<const PrimeNode>(std::move(n)));
  }
  static Prime arrow(CanonicalType dom, Prime cod) {
    PrimeNode n;
    n.kind = PrimeKind::Arrow;
    n.arg = std::move(dom);
    n.cod = cod.n_;
    return Prime(std::make_shared<const PrimeNode>(std::move(n)));
  }
  static Prime forall(CanonicalType body) {
    PrimeNode n;
    n.kind = PrimeKind::Forall;
    n.arg = std::move(body);
    return Prime(std::make_shared<const PrimeNode>(std::move(n)));
  }

  PrimeKind kind() const { return n_->kind; }
  bool is_bound() const { return n_->bound; }        // Var
  int index() const { return n_->index; }            // Var, bound
  const std::string& name() const { return n_->name; }  // Var, free
  const CanonicalType& domain() const { return n_->arg; }  // Arrow
  Prime codomain() const { return Prime(n_->cod); }        // Arrow
  const CanonicalType& body() const { return n_->arg; }    // Forall
  bool valid() const { return n_ != nullptr; }

private:
  explicit Prime(std::shared_ptr<const PrimeNode> n) : n_(std::move(n)) {}
  std::shared_ptr<const PrimeNode> n_;
};

inline CanonicalType CanonicalType::from(std::vector<Prime> primes) {
  assert(!primes.empty());
  std::stable_sort(primes.begin(), primes.end(),
                   [](const Prime& x, const Prime& y) {
                     return compare_canonical(x, y) < 0;
                   });
  CanonicalType c;
  c.primes_ = std::move(primes);
  return c;
}

// Total order on primes: Var < Arrow < Forall; bound indices sort before
// free names; then lexicographic on contents.
inline int compare_canonical(const Prime& x, const Prime& y) {
  auto rank = [](const Prime& p) {
    switch (p.kind()) {
      case PrimeKind::Var: return 0;
      case PrimeKind::Arrow: return 1;
      case PrimeKind::Forall: return 2;
    }
    return 3;
  };
  if (rank(x) != rank(y)) return rank(x) < rank(y) ? -1 : 1;
  switch (x.kind()) {
    case PrimeKind::Var: {
      if (x.is_bound() != y.is_bound()) return x.is_bound() ? -1 : 1;
      if (x.is_bound()) {
        if (x.index() != y.index()) return x.index() < y.index() ? -1 : 1;
        return 0;
      }
      int c = x.name().compare(y.name());
      return c < 0 ? -1 : c > 0 ? 1 : 0;
    }
    case PrimeKind::Arrow: {
      int c = compare_canonical(x.domain(), y.domain());
      if (c != 0) return c;
      return compare_canonical(x.codomain(), y.codomain());
    }
    case PrimeKind::Forall:
      return compare_canonical(x.body(), y.body());
  }
  return 0;
}

// Lexicographic on the sorted prime sequences, shorter first on a tie.
inline int compare_canonical(const CanonicalType& x, const CanonicalType& y) {
  std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = compare_canonical(x.primes()[i], y.primes()[i]);
    if (c != 0) return c;
  }
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  return 0;
}

inline bool operator==(const CanonicalType& x, const CanonicalType& y) {
  return compare_canonical(x, y) == 0;
}
inline bool operator!=(const CanonicalType& x, const CanonicalType& y) {
  return !(x == y);
}
inline bool operator==(const Prime& x, const Prime& y) {
  return compare_canonical(x, y) == 0;
}

namespace detail {

// Environment: names of enclosing forall binders, innermost last.
inline void canonicalize_into(const Type& t, std::vector<std::string>& binders,
                              std::vector<Prime>& out) {
  switch (t.kind()) {
    case TypeKind::Var: {
      // Innermost binder wins; index 0 is the nearest forall.
      for (std::size_t i = binders.size(); i-- > 0;) {
        if (binders[i] == t.name()) {
          out.push_back(Prime::bound_var(int(binders.size() - 1 - i)));
          return;
        }
      }
      out.push_back(Prime::free_var(t.name()));
      return;
    }
    case TypeKind::Conj:
      canonicalize_into(t.left(), binders, out);
      canonicalize_into(t.right(), binders, out);
      return;
    case TypeKind::Arrow: {
      std::vector<Prime> dom, cod;
      canonicalize_into(t.domain(), binders, dom);
      canonicalize_into(t.codomain(), binders, cod);
      CanonicalType d = CanonicalType::from(std::move(dom));
      // Distribute the arrow over each prime of the codomain.
      for (const Prime& p : cod) out.push_back(Prime::arrow(d, p));
      return;
    }
    case TypeKind::Forall: {
      std::vector<Prime> body;
      binders.push_back(t.binder());
      canonicalize_into(t.body(), binders, body);
      binders.pop_back();
      // The body stays one multiset; a forall is never split.
      out.push_back(Prime::forall(CanonicalType::from(std::move(body))));
      return;
    }
  }
}

}  // namespace detail

inline CanonicalType canonicalize(const Type& t) {
  std::vector<std::string> binders;
  std::vector<Prime> out;
  detail::canonicalize_into(t, binders, out);
  return CanonicalType::from(std::move(out));
}

inline bool type_equiv(const Type& a, const Type& b) {
  return canonicalize(a) == canonicalize(b);
}

// If every prime of c is an arrow with domain exactly dom, the multiset of
// codomains; otherwise nothing.
inline std::optional<CanonicalType> factor_arrow(const CanonicalType& c,
                                                 const CanonicalType& dom) {
  std::vector<Prime> cods;
  cods.reserve(c.size());
  for (const Prime& p : c.primes()) {
    if (p.kind() != PrimeKind::Arrow) return std::nullopt;
    if (compare_canonical(p.domain(), dom) != 0) return std::nullopt;
    cods.push_back(p.codomain());
  }
  return CanonicalType::from(std::move(cods));
}

// If a is a strict sub-multiset of c, the difference c minus a; otherwise
// nothing.  Strict: the difference is never empty.
inline std::optional<CanonicalType> conj_remainder(const CanonicalType& c,
                                                   const CanonicalType& a) {
  if (a.size() >= c.size()) return std::nullopt;
  std::vector<Prime> rest;
  std::size_t i = 0, j = 0;
  while (i < c.size() && j < a.size()) {
    int cmp = compare_canonical(c.primes()[i], a.primes()[j]);
    if (cmp < 0) {
      rest.push_back(c.primes()[i]);
      ++i;
    } else if (cmp == 0) {
      ++i;
      ++j;
    } else {
      return std::nullopt;  // a has a prime c lacks
    }
  }
  if (j < a.size()) return std::nullopt;
  for (; i < c.size(); ++i) rest.push_back(c.primes()[i]);
  assert(!rest.empty());
  return CanonicalType::from(std::move(rest));
}

// Multiset union of two canonical types (the type of a sum).
inline CanonicalType conj_union(const CanonicalType& x, const CanonicalType& y) {
  std::vector<Prime> all = x.primes();
  all.insert(all.end(), y.primes().begin(), y.primes().end());
  return CanonicalType::from(std::move(all));
}

// Free variable names occurring in a canonical type (bound indices skipped).
inline void free_names_into(const CanonicalType& c, std::set<std::string>& out);

inline void free_names_into(const Prime& p, std::set<std::string>& out) {
  switch (p.kind()) {
    case PrimeKind::Var:
      if (!p.is_bound()) out.insert(p.name());
      return;
    case PrimeKind::Arrow:
      free_names_into(p.domain(), out);
      free_names_into(p.codomain(), out);
      return;
    case PrimeKind::Forall:
      free_names_into(p.body(), out);
      return;
  }
}

inline void free_names_into(const CanonicalType& c, std::set<std::string>& out) {
  for (const Prime& p : c.primes()) free_names_into(p, out);
}

inline std::set<std::string> free_names(const CanonicalType& c) {
  std::set<std::string> out;
  free_names_into(c, out);
  return out;
}

namespace detail {

struct ReadBack {
  std::set<std::string> used;
  int counter = 0;

  std::string next_binder() {
    for (;;) {
      std::string cand = counter == 0 ? "X" : "X" + std::to_string(counter);
      ++counter;
      if (!used.count(cand)) {
        used.insert(cand);
        return cand;
      }
    }
  }

  Type prime(const Prime& p, std::vector<std::string>& binders) {
    switch (p.kind()) {
      case PrimeKind::Var:
        if (p.is_bound()) {
          assert(p.index() < int(binders.size()));
          return Type::var(binders[binders.size() - 1 - p.index()]);
        }
        return Type::var(p.name());
      case PrimeKind::Arrow:
        return Type::arrow(canon(p.domain(), binders), prime(p.codomain(), binders));
      case PrimeKind::Forall: {
        std::string b = next_binder();
        binders.push_back(b);
        Type body = canon(p.body(), binders);
        binders.pop_back();
        return Type::forall(b, body);
      }
    }
    throw std::logic_error("read_back: bad prime");
  }

  // Right-nested conjunction of the primes in sorted order.
  Type canon(const CanonicalType& c, std::vector<std::string>& binders) {
    Type acc = prime(c.primes().back(), binders);
    for (std::size_t i = c.size() - 1; i-- > 0;)
      acc = Type::conj(prime(c.primes()[i], binders), acc);
    return acc;
  }
};

}  // namespace detail

// Surface spelling of a canonical type: right-nested sorted conjunction,
// forall binders given fresh names.
inline Type read_back(const CanonicalType& c) {
  detail::ReadBack rb;
  rb.used = free_names(c);
  std::vector<std::string> binders;
  return rb.canon(c, binders);
}

// Injective text encoding of a canonical type; used as a map key and inside
// term keys.  Not for display.
inline void type_key_into(const CanonicalType& c, std::string& out);

inline void type_key_into(const Prime& p, std::string& out) {
  switch (p.kind()) {
    case PrimeKind::Var:
      if (p.is_bound()) {
        out += 'i';
        out += std::to_string(p.index());
        out += ';';
      } else {
        out += "v[";
        out += p.name();
        out += ']';
      }
      return;
    case PrimeKind::Arrow:
      out += "A(";
      type_key_into(p.domain(), out);
      out += ")(";
      type_key_into(p.codomain(), out);
      out += ')';
      return;
    case PrimeKind::Forall:
      out += "F(";
      type_key_into(p.body(), out);
      out += ')';
      return;
  }
}

inline void type_key_into(const CanonicalType& c, std::string& out) {
  out += 'C';
  out += std::to_string(c.size());
  out += '[';
  for (const Prime& p : c.primes()) type_key_into(p, out);
  out += ']';
}

inline std::string type_key(const CanonicalType& c) {
  std::string out;
  type_key_into(c, out);
  return out;
}

}  // namespace lpl
