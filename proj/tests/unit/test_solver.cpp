#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "gaar/fol.hpp"
#include "gaar/solver.hpp"
#include "support/oracles.hpp"
#include "support/random_formula.hpp"

namespace {

using gaar::fol::Formula;
using gaar::fol::parse_formula;
using namespace gaar::solver;

LabeledPremises premises_of(std::initializer_list<std::pair<const char*, const char*>> items) {
  LabeledPremises out;
  for (const auto& [label, text] : items) out.push_back({label, parse_formula(text)});
  return out;
}

LabeledPremises walkthrough_first() {
  return premises_of({{"P1", "L(C)"},
                      {"P2", "P(C)"},
                      {"P3", "P(A)"},
                      {"P4", "∀x [P(x) → M(x)]"},
                      {"P5", "∀x∀y [(M(x) ∧ M(y) ∧ L(x)) → L(y)]"},
                      {"P6", "M(O)"}});
}

LabeledPremises walkthrough_second() {
  return premises_of({{"P1", "L(C)"},
                      {"P2", "P(C)"},
                      {"P3", "P(A)"},
                      {"P4", "(P(C) ∧ P(A)) → R(C, A)"},
                      {"P5", "(R(C, A) ∧ L(C)) → S(A)"}});
}

std::vector<std::string> labels(const LabeledPremises& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.label);
  return out;
}

// --- SAT --------------------------------------------------------------------

TEST(Sat, ContradictoryUnits) {
  EXPECT_FALSE(solve_cnf(1, std::vector<Clause>{{1}, {-1}}).satisfiable);
}

TEST(Sat, EmptyClauseAndEmptySet) {
  EXPECT_FALSE(solve_cnf(1, std::vector<Clause>{{}}).satisfiable);
  EXPECT_TRUE(solve_cnf(0, std::vector<Clause>{}).satisfiable);
}

TEST(Sat, ModelSatisfiesEveryClause) {
  std::vector<Clause> cnf = {{1, 2}, {-1, 3}, {-2, -3}, {2, 3}};
  SatResult r = solve_cnf(3, cnf);
  ASSERT_TRUE(r.satisfiable);
  for (const auto& c : cnf) {
    bool sat = false;
    for (int l : c) sat |= (l > 0) == r.model[std::abs(l)];
    EXPECT_TRUE(sat);
  }
}

TEST(Sat, Assumptions) {
  SatSolver s(2);
  s.add_clause({-1, 2});
  EXPECT_TRUE(s.solve(std::vector<Literal>{1}).satisfiable);
  EXPECT_FALSE(s.solve(std::vector<Literal>{1, -2}).satisfiable);
  EXPECT_TRUE(s.solve(std::vector<Literal>{-2}).satisfiable);
}

TEST(Sat, LiteralOutOfRange) {
  SatSolver s(2);
  EXPECT_THROW(s.add_clause({3}), gaar::InvalidArgument);
}

TEST(SatProperty, Random3CnfMatchesTruthTable) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 2000; ++iter) {
    const int n = 1 + static_cast<int>(testsupport::pick(rng, 12));
    const std::size_t m = testsupport::pick(rng, 6 * static_cast<std::size_t>(n));
    std::vector<Clause> cnf;
    for (std::size_t i = 0; i < m; ++i) {
      Clause c;
      for (int k = 0; k < 3; ++k) {
        const int v = 1 + static_cast<int>(testsupport::pick(rng, n));
        c.push_back(testsupport::coin(rng) ? v : -v);
      }
      cnf.push_back(c);
    }
    SatResult r = solve_cnf(n, cnf);
    ASSERT_EQ(r.satisfiable, testsupport::truth_table_sat(n, cnf)) << "iter " << iter;
    if (r.satisfiable) {
      for (const auto& c : cnf) {
        bool sat = false;
        for (int l : c) sat |= (l > 0) == r.model[std::abs(l)];
        ASSERT_TRUE(sat);
      }
    }
  }
}

// --- grounding --------------------------------------------------------------

TEST(Ground, UniversalInstantiation) {
  std::vector<Formula> fs = {parse_formula("∀x [P(x) → M(x)]"),
                             parse_formula("P(C) ∧ P(A)")};
  Grounder g(fs);
  EXPECT_EQ(g.universe(), (std::vector<std::string>{"A", "C"}));
  std::vector<Clause> clauses = g.ground(0);
  ASSERT_EQ(clauses.size(), 2u);
  const auto& set = g.clause_set();
  auto name = [&](int lit) {
    return std::string(lit < 0 ? "~" : "") + set.entries[std::abs(lit) - 1].name;
  };
  std::set<std::set<std::string>> got;
  for (const auto& c : clauses) {
    std::set<std::string> lits;
    for (int l : c) lits.insert(name(l));
    got.insert(lits);
  }
  std::set<std::set<std::string>> expected = {{"~P(A)", "M(A)"}, {"~P(C)", "M(C)"}};
  EXPECT_EQ(got, expected);
}

TEST(Ground, EmptyUniverseGetsFreshConstant) {
  std::vector<Formula> fs = {parse_formula("∀x P(x)")};
  Grounder g(fs);
  EXPECT_EQ(g.universe(), (std::vector<std::string>{"c0"}));
}

TEST(Ground, FreshConstantAvoidsClash) {
  std::vector<Formula> fs = {parse_formula("∃x P(x) ∧ Q(sk0) ∧ R(c0)")};
  Grounder g(fs);
  // c0 is taken, so the Skolem constant from "∃x" must not reuse sk0 either.
  std::set<std::string> u(g.universe().begin(), g.universe().end());
  EXPECT_EQ(u.size(), g.universe().size());
  EXPECT_TRUE(u.contains("sk0_"));
}

TEST(Ground, SkolemFunctionRejected) {
  std::vector<Formula> fs = {parse_formula("∀x ∃y R(x, y)")};
  EXPECT_THROW(Grounder g(fs), UnsupportedFragment);
  // ...but an existential not depending on the universal is fine.
  std::vector<Formula> ok = {parse_formula("∀x [P(x) ∨ ∃y Q(y)]")};
  EXPECT_NO_THROW(Grounder g2(ok));
}

TEST(Ground, OpenFormulaRejected) {
  std::vector<Formula> fs = {Formula::atom("P", {gaar::fol::Term::variable("x")})};
  EXPECT_THROW(Grounder g(fs), UnsupportedFragment);
}

TEST(Ground, SatOnGroundSet) {
  std::vector<Formula> fs = {parse_formula("P(A)"), parse_formula("~P(A)")};
  EXPECT_FALSE(sat(ground(fs)).satisfiable);
  std::vector<Formula> fs2 = {parse_formula("P(A) | Q(A)"), parse_formula("~P(A)")};
  SatVerdict v = sat(ground(fs2));
  ASSERT_TRUE(v.satisfiable);
  EXPECT_TRUE(v.model.at("Q(A)"));
  for (const auto& [name, value] : v.model) EXPECT_NE(name.front(), '$');
}

// --- validity ---------------------------------------------------------------

TEST(CheckValidity, WalkthroughFirstIteration) {
  EXPECT_TRUE(check_validity(walkthrough_first(), parse_formula("L(A)")).valid());
}

TEST(CheckValidity, Identity) {
  EXPECT_TRUE(check_validity(premises_of({{"P1", "P"}}), parse_formula("P")).valid());
}

TEST(CheckValidity, UnderdeterminedHasCountermodel) {
  ValidityVerdict v = check_validity({}, parse_formula("P(A)"));
  ASSERT_FALSE(v.valid());
  ASSERT_TRUE(v.countermodel.has_value());
  EXPECT_EQ(*v.countermodel, (std::map<std::string, bool>{{"P(A)", false}}));
}

TEST(CheckValidity, CountermodelSatisfiesPremisesAndRefutesConclusion) {
  LabeledPremises ps = premises_of({{"P1", "A -> B"}, {"P2", "B"}});
  ValidityVerdict v = check_validity(ps, parse_formula("A"));
  ASSERT_FALSE(v.valid());
  const auto& m = *v.countermodel;
  EXPECT_TRUE(testsupport::eval_prop(ps[0].formula, m));
  EXPECT_TRUE(testsupport::eval_prop(ps[1].formula, m));
  EXPECT_FALSE(m.at("A"));
}

TEST(CheckValidity, ExplosionFromInconsistentPremises) {
  LabeledPremises ps = premises_of({{"P1", "Q(A)"}, {"P2", "~Q(A)"}});
  EXPECT_TRUE(check_validity(ps, parse_formula("Z(B)")).valid());
}

TEST(CheckValidity, ExistentialPremiseAndConclusion) {
  LabeledPremises ps = premises_of({{"P1", "∃x [P(x) ∧ Q(x)]"}});
  EXPECT_TRUE(check_validity(ps, parse_formula("∃y Q(y)")).valid());
  EXPECT_FALSE(check_validity(ps, parse_formula("∀y Q(y)")).valid());
  LabeledPremises swap = premises_of({{"P1", "∃x ∀y R(x, y)"}});
  EXPECT_TRUE(check_validity(swap, parse_formula("∀y ∃x R(x, y)")).valid());
}

TEST(CheckValidity, DuplicateLabelsRejected) {
  LabeledPremises ps = premises_of({{"P1", "A"}, {"P1", "B"}});
  EXPECT_THROW(check_validity(ps, parse_formula("A")), gaar::InvalidArgument);
}

TEST(CheckValidity, Deterministic) {
  LabeledPremises ps = premises_of({{"P1", "∀x [P(x) -> Q(x) | R(x)]"}, {"P2", "P(a) & P(b)"}});
  ValidityVerdict a = check_validity(ps, parse_formula("Q(a)"));
  ValidityVerdict b = check_validity(ps, parse_formula("Q(a)"));
  EXPECT_EQ(a.countermodel, b.countermodel);
}

TEST(ValidityProperty, PropositionalMatchesTruthTable) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> atoms = {"A", "B", "C", "D"};
  for (int iter = 0; iter < 1500; ++iter) {
    LabeledPremises ps;
    const std::size_t n = testsupport::pick(rng, 5);
    std::vector<Formula> raw;
    for (std::size_t i = 0; i < n; ++i) {
      raw.push_back(testsupport::random_propositional(rng, atoms, 3));
      ps.push_back({"P" + std::to_string(i + 1), raw.back()});
    }
    Formula c = testsupport::random_propositional(rng, atoms, 2);
    ValidityVerdict v = check_validity(ps, c);
    ASSERT_EQ(v.valid(), testsupport::truth_table_entails(raw, c)) << "iter " << iter;
    if (!v.valid()) {
      // The countermodel might leave atoms out that never occur; default them.
      std::map<std::string, bool> m = *v.countermodel;
      for (const auto& a : atoms) m.emplace(a, false);
      for (const auto& f : raw) ASSERT_TRUE(testsupport::eval_prop(f, m));
      ASSERT_FALSE(testsupport::eval_prop(c, m));
    }
  }
}

TEST(ValidityProperty, FirstOrderMatchesHerbrandOracle) {
  std::mt19937_64 rng(13);
  int valid = 0;
  for (int iter = 0; iter < 200; ++iter) {
    testsupport::Instance inst = testsupport::random_fo_instance(rng);
    const bool expected = testsupport::herbrand_entails(inst.premises, inst.conclusion);
    ASSERT_EQ(check_validity(inst.premises, inst.conclusion).valid(), expected)
        << "iter " << iter;
    valid += expected;
  }
  EXPECT_GT(valid, 20);
}

TEST(ValidityProperty, Monotonicity) {
  std::mt19937_64 rng(17);
  const std::vector<std::string> atoms = {"A", "B", "C"};
  for (int iter = 0; iter < 300; ++iter) {
    LabeledPremises ps;
    for (std::size_t i = 0; i < 4; ++i) {
      ps.push_back({"P" + std::to_string(i + 1), testsupport::random_propositional(rng, atoms, 2)});
    }
    Formula c = testsupport::random_propositional(rng, atoms, 1);
    EntailmentProblem problem(ps, c);
    for (std::uint64_t bits = 0; bits < 16; ++bits) {
      if (!problem.entails(bits)) continue;
      for (std::uint64_t sup = bits; sup < 16; sup = (sup + 1) | bits) {
        ASSERT_TRUE(problem.entails(sup));
      }
    }
  }
}

// --- minimal sets and pruning -----------------------------------------------

TEST(MinimalPremiseSets, WalkthroughFirstIteration) {
  MinimalSetsResult r = minimal_premise_sets(walkthrough_first(), parse_formula("L(A)"));
  EXPECT_TRUE(r.exact);
  ASSERT_EQ(r.minimal_sets.size(), 1u);
  EXPECT_EQ(r.minimal_sets[0], (std::vector<std::string>{"P1", "P2", "P3", "P4", "P5"}));
  EXPECT_EQ(r.union_labels, (std::vector<std::string>{"P1", "P2", "P3", "P4", "P5"}));
}

TEST(MinimalPremiseSets, TwoIndependentPaths) {
  LabeledPremises ps = premises_of({{"P1", "A -> C"}, {"P2", "A"}, {"P3", "B -> C"}, {"P4", "B"}});
  MinimalSetsResult r = minimal_premise_sets(ps, parse_formula("C"));
  EXPECT_EQ(r.minimal_sets, (std::vector<std::vector<std::string>>{{"P1", "P2"}, {"P3", "P4"}}));
  EXPECT_EQ(r.union_labels, (std::vector<std::string>{"P1", "P2", "P3", "P4"}));
}

TEST(MinimalPremiseSets, TautologicalConclusionNeedsNoPremise) {
  LabeledPremises ps = premises_of({{"P1", "A"}});
  MinimalSetsResult r = minimal_premise_sets(ps, parse_formula("B | ~B"));
  EXPECT_EQ(r.minimal_sets, (std::vector<std::vector<std::string>>{{}}));
  EXPECT_TRUE(r.union_labels.empty());
}

TEST(MinimalPremiseSets, NotValidThrows) {
  EXPECT_THROW(minimal_premise_sets(premises_of({{"P1", "A"}}), parse_formula("B")), NotValid);
}

TEST(MinimalPremiseSets, CapAndFallback) {
  LabeledPremises ps;
  for (int i = 0; i < 20; ++i) {
    ps.push_back({"P" + std::to_string(i + 1), parse_formula("A" + std::to_string(i))});
  }
  ps.push_back({"P21", parse_formula("A3 -> G")});
  EXPECT_THROW(minimal_premise_sets(ps, parse_formula("G")), CapExceeded);
  MinimalSetsResult r =
      minimal_premise_sets(ps, parse_formula("G"), {.cap = 16, .allow_fallback = true});
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.minimal_sets, (std::vector<std::vector<std::string>>{{"P4", "P21"}}));
}

TEST(Prune, WalkthroughIterations) {
  EXPECT_EQ(labels(prune(walkthrough_first(), parse_formula("L(A)"))),
            (std::vector<std::string>{"P1", "P2", "P3", "P4", "P5"}));
  EXPECT_EQ(labels(prune(walkthrough_second(), parse_formula("S(A)"))),
            (std::vector<std::string>{"P1", "P2", "P3", "P4", "P5"}));
  EXPECT_EQ(labels(prune(premises_of({{"P", "P"}}), parse_formula("P"))),
            (std::vector<std::string>{"P"}));
}

TEST(Prune, IsAFixedPoint) {
  LabeledPremises once = prune(walkthrough_first(), parse_formula("L(A)"));
  EXPECT_EQ(prune(once, parse_formula("L(A)")), once);
}

TEST(MinimalSetsProperty, MatchesUnprunedEnumeration) {
  std::mt19937_64 rng(23);
  const std::vector<std::string> atoms = {"A", "B", "C", "D", "E"};
  int checked = 0;
  while (checked < 150) {
    LabeledPremises ps;
    std::vector<Formula> raw;
    const std::size_t n = 1 + testsupport::pick(rng, 8);
    for (std::size_t i = 0; i < n; ++i) {
      raw.push_back(testsupport::random_propositional(rng, atoms, 2));
      ps.push_back({"P" + std::to_string(i + 1), raw.back()});
    }
    Formula c = testsupport::random_propositional(rng, atoms, 1);
    if (!testsupport::truth_table_entails(raw, c)) continue;
    ++checked;
    MinimalSetsResult r = minimal_premise_sets(ps, c);
    testsupport::BruteMinimal b = testsupport::brute_minimal_sets(ps, c);
    ASSERT_EQ(r.minimal_sets, b.sets);
    ASSERT_EQ(r.union_labels, b.union_labels);
    // Minimality, checked directly.
    for (const auto& set : r.minimal_sets) {
      for (std::size_t drop = 0; drop < set.size(); ++drop) {
        std::vector<Formula> rest;
        for (std::size_t i = 0; i < set.size(); ++i) {
          if (i == drop) continue;
          for (const auto& p : ps) {
            if (p.label == set[i]) rest.push_back(p.formula);
          }
        }
        ASSERT_FALSE(testsupport::truth_table_entails(rest, c));
      }
    }
  }
}

// --- problem files ----------------------------------------------------------

TEST(ProblemFile, ParseLabeledAndBare) {
  Problem p = parse_problem(
      "# comment\n"
      "P1: L(C)\n"
      "\n"
      "P(C)\n"
      "CONCLUSION: L(C)\n");
  ASSERT_EQ(p.premises.size(), 2u);
  EXPECT_EQ(p.premises[0].label, "P1");
  EXPECT_EQ(p.premises[1].label, "P2");
  EXPECT_EQ(p.conclusion, parse_formula("L(C)"));
}

TEST(ProblemFile, Errors) {
  EXPECT_THROW(parse_problem("P1: A\n"), gaar::InvalidArgument);
  EXPECT_THROW(parse_problem("P1: A(\nCONCLUSION: A\n"), gaar::InvalidArgument);
  EXPECT_THROW(parse_problem("CONCLUSION: A\nP1: B\n"), gaar::InvalidArgument);
}

TEST(ProblemFile, RenderRoundTrip) {
  LabeledPremises ps = walkthrough_first();
  Formula c = parse_formula("L(A)");
  Problem p = parse_problem(render_problem(ps, c));
  EXPECT_EQ(p.premises, ps);
  EXPECT_EQ(p.conclusion, c);
}

}  // namespace
