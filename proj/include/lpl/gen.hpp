#pragma once
// Seeded deterministic generators of types and well-typed terms for the
// property suites.  Terms are built following the typing rules, never by
// generate-and-filter: applications are constructed around their argument's
// type, projections always target a strict sub-multiset of their sum's type,
// and type abstractions pick binders that cannot occur free in the context.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lpl/term.hpp"
#include "lpl/typer.hpp"

namespace lpl {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, n); n must be positive.
  std::size_t pick(std::size_t n) {
    std::uniform_int_distribution<std::size_t> d(0, n - 1);
    return d(eng_);
  }

  bool chance(unsigned num, unsigned den) { return pick(den) < num; }

private:
  std::mt19937_64 eng_;
};

namespace detail {

// Weighted choice over a small option list.
inline std::size_t weighted(Rng& rng, const std::vector<unsigned>& weights) {
  unsigned total = 0;
  for (unsigned w : weights) total += w;
  unsigned roll = static_cast<unsigned>(rng.pick(total));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (roll < weights[i]) return i;
    roll -= weights[i];
  }
  return weights.size() - 1;
}

inline Type gen_type_rec(Rng& rng, std::size_t budget,
                         const std::vector<std::string>& pool, int forall_depth) {
  static const char* kForallNames[] = {"U", "V", "W"};
  if (budget <= 1) return Type::var(pool[rng.pick(pool.size())]);
  enum { kVar, kArrow, kConj, kForall };
  std::vector<unsigned> w = {2, 3, 3, 0};
  if (budget < 3) w[kArrow] = w[kConj] = 0;
  if (forall_depth < 3) w[kForall] = 2;
  switch (weighted(rng, w)) {
    case kVar:
      return Type::var(pool[rng.pick(pool.size())]);
    case kArrow:
    case kConj: {
      bool arrow = rng.chance(1, 2);
      std::size_t rest = budget - 1;
      std::size_t lb = 1 + rng.pick(rest - 1);
      Type l = gen_type_rec(rng, lb, pool, forall_depth);
      Type r = gen_type_rec(rng, rest - lb, pool, forall_depth);
      return arrow ? Type::arrow(l, r) : Type::conj(l, r);
    }
    default: {
      std::string binder = kForallNames[rng.pick(3)];
      std::vector<std::string> inner = pool;
      inner.push_back(binder);
      return Type::forall(binder,
                          gen_type_rec(rng, budget - 1, inner, forall_depth + 1));
    }
  }
}

struct TermGen {
  Rng rng;
  std::vector<std::string> type_names{"A", "B", "C"};
  std::vector<Type> type_pool;               // optional extra annotation source
  std::vector<TypedVar> scope;               // term variables usable here
  std::vector<std::string> active_tbinders;  // enclosing type-abstraction binders
  int next_var = 1;
  int next_tvar = 1;

  explicit TermGen(std::uint64_t seed) : rng(seed) {}

  // An annotation type.  may_use_tbinders: false for variables that will be
  // free in the nearest type abstraction (its binder must not escape).
  Type pick_type(std::size_t budget, bool may_use_tbinders) {
    if (!type_pool.empty() && rng.chance(1, 2)) {
      const Type& t = type_pool[rng.pick(type_pool.size())];
      if (may_use_tbinders || active_tbinders.empty()) return t;
      bool clean = true;
      for (const std::string& x : active_tbinders)
        if (free_type_vars(t).count(x)) clean = false;
      if (clean) return t;
    }
    std::vector<std::string> pool = type_names;
    if (may_use_tbinders)
      for (const std::string& x : active_tbinders) pool.push_back(x);
    return gen_type_rec(rng, budget, pool, 0);
  }

  Term fresh_or_reused_var() {
    if (!scope.empty() && rng.chance(3, 4))
      return Term::var(scope[rng.pick(scope.size())]);
    std::string name = "u" + std::to_string(next_var++);
    return Term::var(name, pick_type(1 + rng.pick(3), false));
  }

  bool mentions_active_tbinder(const Type& t) const {
    auto fv = free_type_vars(t);
    for (const std::string& x : active_tbinders)
      if (fv.count(x)) return true;
    return false;
  }

  // A term whose inferred type factors over dom, to head an application.
  // dom_dirty: dom mentions an active type-abstraction binder, so a fresh
  // free variable cannot carry it (the binder would escape); only a lambda
  // can.  Callers guarantee budget >= 2 in that case.
  Term gen_function(std::size_t budget, const Type& dom, bool dom_dirty) {
    if (budget >= 2 && (dom_dirty || rng.chance(2, 3))) {
      std::string name = "v" + std::to_string(next_var++);
      TypedVar binder{name, dom};
      scope.push_back(binder);
      Term body = gen(budget - 1);
      scope.pop_back();
      return Term::lam(binder, body);
    }
    std::string name = "u" + std::to_string(next_var++);
    Type cod = pick_type(1 + rng.pick(2), false);
    return Term::var(name, Type::arrow(dom, cod));
  }

  Term gen_tlam(std::size_t budget) {
    std::string binder = "X" + std::to_string(next_tvar++);
    active_tbinders.push_back(binder);
    Term body = gen(budget - 1);
    active_tbinders.pop_back();
    return Term::tlam(binder, body);
  }

  Term gen(std::size_t budget) {
    enum { kVar, kLam, kApp, kSum, kProj, kTLam, kTApp };
    std::vector<unsigned> w(7, 0);
    w[kVar] = 2;
    if (budget >= 2) w[kLam] = 4;
    if (budget >= 3) w[kApp] = 4;
    if (budget >= 3) w[kSum] = 4;
    if (budget >= 4) w[kProj] = 3;
    if (budget >= 2) w[kTLam] = 2;
    if (budget >= 3) w[kTApp] = 2;
    switch (weighted(rng, w)) {
      case kVar:
        return fresh_or_reused_var();
      case kLam: {
        std::string name = "v" + std::to_string(next_var++);
        TypedVar binder{name, pick_type(1 + rng.pick(3), true)};
        scope.push_back(binder);
        Term body = gen(budget - 1);
        scope.pop_back();
        return Term::lam(binder, body);
      }
      case kApp: {
        std::size_t ab = 1 + rng.pick(budget - 2);
        Term arg = gen(ab);
        Type dom = read_back(infer(arg));
        bool dirty = mentions_active_tbinder(dom);
        std::size_t fb = budget - 1 - ab;
        if (dirty && fb < 2) return fresh_or_reused_var();
        return Term::app(gen_function(fb, dom, dirty), arg);
      }
      case kSum: {
        std::size_t lb = 1 + rng.pick(budget - 2);
        Term l = gen(lb);
        Term r = gen(budget - 1 - lb);
        return Term::sum(l, r);
      }
      case kProj: {
        // Sum of n parts; project onto the type of a strict subset.
        std::size_t n = 2 + (budget >= 6 ? rng.pick(2) : 0);
        std::size_t rest = budget - n;  // n-1 sum nodes + 1 proj node
        std::vector<Term> parts;
        for (std::size_t i = 0; i < n; ++i) {
          std::size_t share = (i + 1 < n) ? 1 + rng.pick(rest - (n - 1 - i)) : rest;
          rest -= share;
          parts.push_back(gen(share));
        }
        std::size_t mask = 1 + rng.pick((std::size_t(1) << n) - 2);
        std::vector<Prime> primes;
        Term sum = parts[0];
        for (std::size_t i = 0; i < n; ++i) {
          if (i > 0) sum = Term::sum(sum, parts[i]);
          if (mask & (std::size_t(1) << i)) {
            CanonicalType pt = infer(parts[i]);
            for (const Prime& p : pt.primes()) primes.push_back(p);
          }
        }
        return Term::proj(read_back(CanonicalType::from(std::move(primes))), sum);
      }
      case kTLam:
        return gen_tlam(budget);
      default: {  // kTApp
        Term fun;
        if (rng.chance(3, 4)) {
          fun = gen_tlam(budget - 1);
        } else {
          std::string name = "u" + std::to_string(next_var++);
          static const char* kForallNames[] = {"U", "V", "W"};
          std::string b = kForallNames[rng.pick(3)];
          std::vector<std::string> pool = type_names;
          pool.push_back(b);
          fun = Term::var(name, Type::forall(b, gen_type_rec(rng, 2, pool, 1)));
        }
        return Term::tapp(fun, pick_type(1 + rng.pick(2), true));
      }
    }
  }
};

}  // namespace detail

// Well-formed type of size at most size_budget; equal seeds, equal trees.
inline Type gen_type(std::uint64_t seed, std::size_t size_budget,
                     const std::vector<std::string>& var_pool = {"A", "B", "C"}) {
  Rng rng(seed);
  return detail::gen_type_rec(rng, size_budget, var_pool, 0);
}

// Well-typed term of size at most size_budget; equal seeds, equal terms.
// type_pool, when non-empty, seeds annotation choices.
inline Term gen_term(std::uint64_t seed, std::size_t size_budget,
                     const std::vector<Type>& type_pool = {}) {
  detail::TermGen g(seed);
  g.type_pool = type_pool;
  return g.gen(size_budget == 0 ? 1 : size_budget);
}

}  // namespace lpl
