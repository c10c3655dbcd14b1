// Tests for exact rational arithmetic and the outcome-distribution solver.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>

#include "lpl/gen.hpp"
#include "lpl/prob.hpp"
#include "lpl/syntax.hpp"
#include "oracle_support.hpp"

using namespace lpl;

namespace {

std::map<std::string, Rational> as_map(const Distribution& d) {
  std::map<std::string, Rational> out;
  for (const auto& [nf, p] : d.mass) out[print_term(nf.rep())] = p;
  return out;
}

const char* kChoice3 = "pi[A](x:A + pi[A](y:A + z:A) + z:A)";

}  // namespace

TEST_CASE("rational numbers are exact and always reduced") {
  CHECK(Rational::ratio(1, 3) + Rational::ratio(1, 6) == Rational::ratio(1, 2));
  CHECK(Rational::ratio(2, 4) == Rational::ratio(1, 2));
  CHECK(Rational::ratio(-1, -3) == Rational::ratio(1, 3));
  CHECK(Rational::ratio(1, -3) == Rational::ratio(-1, 3));
  CHECK(Rational(7).str() == "7");
  CHECK(Rational::ratio(3, 6).str() == "1/2");
  CHECK((Rational(1) - Rational::ratio(1, 3) - Rational::ratio(2, 3)).is_zero());
  CHECK(Rational::ratio(1, 3) * Rational(3) == Rational(1));
  CHECK(Rational::ratio(1, 2) / Rational::ratio(1, 4) == Rational(2));
  CHECK(Rational::ratio(1, 3) < Rational::ratio(1, 2));
  CHECK_THROWS(Rational::ratio(1, 0));

  // Long products stay exact instead of drifting.
  Rational p(1);
  for (int i = 0; i < 40; ++i) p *= Rational::ratio(1, 3);
  Rational back = p;
  for (int i = 0; i < 40; ++i) back *= Rational(3);
  CHECK(back == Rational(1));
  CHECK(p.str().find("12157665459056928801") != std::string::npos);
}

TEST_CASE("branch probabilities split uniformly at each choice point") {
  Distribution lo = distribution(parse_term(kChoice3));
  auto m = as_map(lo);
  REQUIRE(m.size() == 3);
  CHECK(m["x:A"] == Rational::ratio(1, 3));
  CHECK(m["y:A"] == Rational::ratio(1, 6));
  CHECK(m["z:A"] == Rational::ratio(1, 2));
  CHECK(lo.residual.is_zero());
  CHECK(lo.total() == Rational(1));
  CHECK(distribution_is_exact(parse_term(kChoice3),
                              Strategy::LeftmostOutermost, 10000));
}

TEST_CASE("the distribution depends on the evaluation strategy") {
  Distribution in =
      distribution(parse_term(kChoice3), Strategy::InnermostFirst);
  auto m = as_map(in);
  REQUIRE(m.size() == 3);
  CHECK(m["x:A"] == Rational::ratio(5, 12));
  CHECK(m["y:A"] == Rational::ratio(1, 6));
  CHECK(m["z:A"] == Rational::ratio(5, 12));
  CHECK(in.total() == Rational(1));

  StrategyComparison cmp = compare_strategies(
      parse_term(kChoice3),
      {Strategy::LeftmostOutermost, Strategy::InnermostFirst});
  CHECK_FALSE(cmp.agree());
  REQUIRE(cmp.disagreements.size() == 2);
  std::vector<std::string> where;
  for (const auto& d : cmp.disagreements) {
    where.push_back(d.where);
    CHECK(d.first == 0);
    CHECK(d.second == 1);
  }
  std::sort(where.begin(), where.end());
  CHECK(where == std::vector<std::string>{"x:A", "z:A"});

  // Deterministic programs agree under every strategy.
  StrategyComparison same = compare_strategies(
      parse_term("(\\x:A. x) ((\\y:A. y) w:A)"),
      {Strategy::LeftmostOutermost, Strategy::InnermostFirst});
  CHECK(same.agree());
}

TEST_CASE("formatting prints one outcome per line plus the residual") {
  CHECK(format_distribution(distribution(parse_term(kChoice3))) ==
        "1/3\tx:A\n"
        "1/6\ty:A\n"
        "1/2\tz:A\n"
        "residual\t0\n");
}

TEST_CASE("stuck programs leave their mass as residual") {
  Distribution d = distribution(parse_term("pi[A&B](w:A&C + y:B)"));
  CHECK(d.mass.empty());
  CHECK(d.residual == Rational(1));
  // Stuckness is a definite outcome, not a budget artifact.
  CHECK(distribution_is_exact(parse_term("pi[A&B](w:A&C + y:B)"),
                              Strategy::LeftmostOutermost, 10000));

  // Partially stuck: one branch ends well, the other never fires.
  Distribution half = distribution(parse_term("pi[A](x:A + pi[A](r:A&B))"));
  auto hm = as_map(half);
  REQUIRE(hm.size() == 1);
  CHECK(hm["x:A"] == Rational::ratio(1, 2));
  CHECK(half.residual == Rational::ratio(1, 2));
  CHECK(distribution_is_exact(parse_term("pi[A](x:A + pi[A](r:A&B))"),
                              Strategy::LeftmostOutermost, 10000));
}

TEST_CASE("equal summands collapse into a single outcome") {
  Distribution d = distribution(parse_term("pi[A](x:A + x:A + x:A)"));
  auto m = as_map(d);
  REQUIRE(m.size() == 1);
  CHECK(m["x:A"] == Rational(1));
  CHECK(d.residual.is_zero());
}

TEST_CASE("terms without choices evaluate to a point distribution") {
  Distribution d = distribution(parse_term("(\\x:A. x) ((\\y:A. y) w:A)"));
  auto m = as_map(d);
  REQUIRE(m.size() == 1);
  CHECK(m["w:A"] == Rational(1));
  CHECK(d.residual.is_zero());
}

TEST_CASE("sequenced choices multiply along the path") {
  Distribution d = distribution(parse_term("pi[A](pi[A](x:A + y:A) + z:A)"));
  auto m = as_map(d);
  REQUIRE(m.size() == 3);
  CHECK(m["x:A"] == Rational::ratio(1, 4));
  CHECK(m["y:A"] == Rational::ratio(1, 4));
  CHECK(m["z:A"] == Rational::ratio(1, 2));

  // A chain of three nested choices: the rare outcome gets 1/8.
  Distribution d3 = distribution(parse_term(
      "pi[A](pi[A](pi[A](x:A + y:A) + y:A) + y:A)"));
  auto m3 = as_map(d3);
  REQUIRE(m3.size() == 2);
  CHECK(m3["x:A"] == Rational::ratio(1, 8));
  CHECK(m3["y:A"] == Rational::ratio(7, 8));
  CHECK(d3.residual.is_zero());
}

TEST_CASE("every distribution is a probability distribution") {
  for (unsigned seed = 0; seed < 200; ++seed) {
    Term t = gen_term(seed, 4 + seed % 7);
    for (Strategy s :
         {Strategy::LeftmostOutermost, Strategy::InnermostFirst}) {
      Distribution d = distribution(t, s, 500);
      REQUIRE(d.total() == Rational(1));
      for (const auto& [nf, p] : d.mass) {
        (void)nf;
        REQUIRE(Rational() < p);
      }
    }
  }
}

TEST_CASE("support lies inside the reachable normal forms") {
  for (unsigned seed = 0; seed < 150; ++seed) {
    Term t = gen_term(seed, 4 + seed % 6);
    NormalFormsResult all = normal_forms(t, 2000);
    if (!all.complete) continue;
    Distribution d = distribution(t, Strategy::LeftmostOutermost, 2000);
    for (const auto& [nf, p] : d.mass) {
      (void)p;
      bool found = false;
      for (const StructuralNF& f : all.forms)
        if (f == nf) { found = true; break; }
      REQUIRE(found);
    }
  }
}

TEST_CASE("an exhausted step budget shows up as residual, not as mass") {
  Distribution d =
      distribution(parse_term(kChoice3), Strategy::LeftmostOutermost, 0);
  CHECK(d.mass.empty());
  CHECK(d.residual == Rational(1));
  CHECK_FALSE(
      distribution_is_exact(parse_term(kChoice3), Strategy::LeftmostOutermost, 0));

  // A budget of one lets only the first branch layer resolve.
  Distribution d1 =
      distribution(parse_term(kChoice3), Strategy::LeftmostOutermost, 1);
  CHECK(d1.total() == Rational(1));
  CHECK(!d1.residual.is_zero());
}
