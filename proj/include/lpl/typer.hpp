#pragma once
// Type checking.
//
// The declarative system has a free-standing equivalence rule; here it is
// internalized by working on canonical forms throughout, which makes
// checking syntax-directed.  A term either has a unique canonical type or
// fails with one of five stable error codes.
//
//   variable      x:A            has type A
//   abstraction   \x:A. r        has type A -> B      where r has B
//   application   r s            has type B           where r factors as
//                                                     arrows A -> B over the
//                                                     type A of s
//   sum           r + s         has type A & B        (multiset union)
//   projection    pi[A](r)      has type A            if A is a strict
//                                                     sub-multiset of r's type
//   type abstr.   /\X. r        has type forall X. A  if X is not free in
//                                                     the context of r
//   type appl.    r {B}         has type A[B/X]       where r has forall X. A

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "lpl/term.hpp"
#include "lpl/type.hpp"

namespace lpl {

enum class TypeErrorCode {
  NotAnArrow,                 // application head has a non-arrow prime
  DomainMismatch,             // arrows, but domains don't match the argument
  NotAConjunctionContaining,  // projection target is not a strict part
  EscapingTypeVariable,       // /\ binder occurs free in the context
  NotUniversal,               // type application head is not a single forall
};

inline const char* to_string(TypeErrorCode c) {
  switch (c) {
    case TypeErrorCode::NotAnArrow: return "NotAnArrow";
    case TypeErrorCode::DomainMismatch: return "DomainMismatch";
    case TypeErrorCode::NotAConjunctionContaining: return "NotAConjunctionContaining";
    case TypeErrorCode::EscapingTypeVariable: return "EscapingTypeVariable";
    case TypeErrorCode::NotUniversal: return "NotUniversal";
  }
  return "?";
}

struct TypeError : std::runtime_error {
  TypeErrorCode code;
  Term at;                               // offending subterm
  std::optional<CanonicalType> subject;  // the type that was examined
  std::optional<CanonicalType> other;    // what it was checked against

  TypeError(TypeErrorCode c, Term where, std::optional<CanonicalType> subj = {},
            std::optional<CanonicalType> oth = {})
      : std::runtime_error(to_string(c)),
        code(c),
        at(std::move(where)),
        subject(std::move(subj)),
        other(std::move(oth)) {}
};

// Canonical type of a term, or TypeError.
inline CanonicalType infer(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
      return canonicalize(t.var().ann);

    case TermKind::Lam: {
      CanonicalType dom = canonicalize(t.binder().ann);
      CanonicalType cod = infer(t.body());
      std::vector<Prime> primes;
      primes.reserve(cod.size());
      for (const Prime& p : cod.primes()) primes.push_back(Prime::arrow(dom, p));
      return CanonicalType::from(std::move(primes));
    }

    case TermKind::App: {
      CanonicalType f = infer(t.fun());
      CanonicalType a = infer(t.arg());
      if (auto cod = factor_arrow(f, a)) return *cod;
      for (const Prime& p : f.primes())
        if (p.kind() != PrimeKind::Arrow)
          throw TypeError(TypeErrorCode::NotAnArrow, t, f, a);
      throw TypeError(TypeErrorCode::DomainMismatch, t, f, a);
    }

    case TermKind::Sum:
      return conj_union(infer(t.left()), infer(t.right()));

    case TermKind::Proj: {
      CanonicalType target = canonicalize(t.proj_target());
      CanonicalType whole = infer(t.body());
      if (!conj_remainder(whole, target))
        throw TypeError(TypeErrorCode::NotAConjunctionContaining, t, whole, target);
      return target;
    }

    case TermKind::TLam: {
      CanonicalType body = infer(t.body());
      for (const CanonicalType& c : type_env(t.body()))
        if (free_names(c).count(t.tbinder()))
          throw TypeError(TypeErrorCode::EscapingTypeVariable, t, c);
      // Generalize by rebuilding the surface type and canonicalizing the
      // enclosing forall; the binder becomes a de Bruijn index.
      return canonicalize(Type::forall(t.tbinder(), read_back(body)));
    }

    case TermKind::TApp: {
      CanonicalType f = infer(t.fun());
      if (f.size() != 1 || f.primes()[0].kind() != PrimeKind::Forall)
        throw TypeError(TypeErrorCode::NotUniversal, t, f,
                        canonicalize(t.targ()));
      Type spelled = read_back(f);
      return canonicalize(
          subst_type(spelled.body(), spelled.binder(), t.targ()));
    }
  }
  throw std::logic_error("infer: bad kind");
}

inline bool well_typed(const Term& t) {
  try {
    infer(t);
    return true;
  } catch (const TypeError&) {
    return false;
  }
}

}  // namespace lpl
