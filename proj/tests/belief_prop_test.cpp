// Copyright 2026 The LBN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "test_util.hpp"

namespace lbn {
namespace {

using lbn::testing::graph_for;
using lbn::testing::kManMortalLexicon;
using lbn::testing::make_kb;

// Brute-force noisy-OR over every assignment of supporter groups.
double brute_noisy_or(const std::vector<WeightedSupport>& s) {
  double total = 0.0;
  for (unsigned mask = 0; mask < (1U << s.size()); ++mask) {
    double pr = 1.0, fail = 1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      bool on = (mask >> i) & 1U;
      pr *= on ? s[i].probability : 1.0 - s[i].probability;
      if (on) fail *= 1.0 - s[i].weight;
    }
    total += pr * (1.0 - fail);
  }
  return total;
}

TEST(Kernels, AndPi) {
  std::vector<double> pis{0.5, 0.8, 0.25};
  EXPECT_DOUBLE_EQ(and_pi(pis), 0.1);
  std::vector<double> one{0.3};
  EXPECT_DOUBLE_EQ(and_pi(one), 0.3);
}

TEST(Kernels, NoisyOrMatchesEnumeration) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WeightedSupport> s(1 + trial % 5);
    for (auto& x : s) x = {u(rng), u(rng)};
    EXPECT_NEAR(noisy_or(s), brute_noisy_or(s), 1e-12);
  }
}

TEST(Kernels, NoisyOrExamples) {
  std::vector<WeightedSupport> two{{0.9, 1.0}, {0.5, 1.0}};
  EXPECT_DOUBLE_EQ(noisy_or(two), 0.95);
  std::vector<WeightedSupport> certain{{1.0, 1.0}, {0.5, 0.3}};
  EXPECT_DOUBLE_EQ(noisy_or(certain), 1.0);
  std::vector<WeightedSupport> idle{{0.99, 0.0}};
  EXPECT_DOUBLE_EQ(noisy_or(idle), 0.0);
}

TEST(Kernels, EmptyInputsRejected) {
  try {
    and_pi({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyPremises);
  }
  try {
    noisy_or({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySupporters);
  }
}

TEST(Kernels, AndLambdaMatchesMarginalization) {
  // lambda to premise i: sum over the other premises of P(group | premises) * lambda_group.
  Message lg{0.3, 0.9};
  std::vector<double> others{0.4, 0.7};
  Message got = and_lambda(lg, others);
  double both = 0.4 * 0.7;
  EXPECT_NEAR(got[1], both * lg[1] + (1 - both) * lg[0], 1e-15);
  EXPECT_NEAR(got[0], lg[0], 1e-15);
}

TEST(Kernels, OrLambdaMatchesEnumeration) {
  std::vector<WeightedSupport> s{{0.9, 0.6}, {0.5, 0.2}, {0.99, 0.35}};
  Message node{0.2, 0.7};
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    for (int v = 0; v < 2; ++v) {
      auto fixed = s;
      fixed[idx].probability = v;
      double p_on = brute_noisy_or(fixed);
      EXPECT_NEAR(or_lambda(node, s, idx)[v], node[1] * p_on + node[0] * (1 - p_on), 1e-12);
    }
  }
}

TEST(Kernels, NegExchangeAndHelpers) {
  EXPECT_EQ(neg_exchange(Message{0.2, 0.8}), (Message{0.8, 0.2}));
  EXPECT_EQ(normalize(Message{1.0, 3.0}), (Message{0.25, 0.75}));
  EXPECT_EQ(normalize(Message{0.0, 0.0}), kUniform);
  EXPECT_EQ(clamp_message(true), (Message{0.0, 1.0}));
  Message d = damp(Message{0.0, 1.0}, Message{1.0, 0.0}, 0.5);
  EXPECT_DOUBLE_EQ(d[0], 0.5);
  EXPECT_DOUBLE_EQ(d[1], 0.5);
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(BpConfig{}.validate());
  for (BpConfig bad : {BpConfig{1.0, 1e-6, 20}, BpConfig{-0.1, 1e-6, 20}, BpConfig{0.5, 0.0, 20},
                       BpConfig{0.5, 1e-6, 0}}) {
    try {
      bad.validate();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
    }
  }
}

TEST(Classify, Bands) {
  EXPECT_EQ(classify(0.99), Verdict::yes);
  EXPECT_EQ(classify(0.0099), Verdict::no);
  EXPECT_EQ(classify(0.5), Verdict::unknown);
  EXPECT_EQ(classify(0.5 + 5e-7), Verdict::unknown);
  EXPECT_EQ(classify(0.5 + 2e-6), Verdict::yes);
  EXPECT_EQ(verdict_from_string("no"), Verdict::no);
  EXPECT_FALSE(verdict_from_string("maybe"));
  EXPECT_EQ(to_string(Verdict::unknown), "unknown");
}

TEST(AnswerQuery, SocratesIsMortal) {
  auto kb = make_kb(kManMortalLexicon, "man(theme: socrates)\nalways [x:e]: man(theme: x) -> mortal(theme: x)\n");
  auto r = answer_query(graph_for(kb, "mortal(theme: socrates)"));
  EXPECT_NEAR(r.probability, 0.99, 1e-12);
  EXPECT_EQ(r.verdict, Verdict::yes);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations_used, 3);
}

TEST(AnswerQuery, Contrapositive) {
  auto kb = make_kb(kManMortalLexicon, "always [x:e]: man(theme: x) -> mortal(theme: x)\nnot mortal(theme: zeus)\n");
  auto r = answer_query(graph_for(kb, "man(theme: zeus)"));
  // Bayes with a uniform prior on man(zeus).
  double expected = 0.5 * (1 - 0.99) / (0.5 * (1 - 0.99) + 0.5 * 1.0);
  EXPECT_NEAR(r.probability, expected, 1e-9);
  EXPECT_NEAR(r.probability, 0.0099, 1e-4);
  EXPECT_EQ(r.verdict, Verdict::no);
}

TEST(AnswerQuery, UnsupportedIsUnknown) {
  auto kb = make_kb(kManMortalLexicon, "man(theme: socrates)\n");
  auto r = answer_query(graph_for(kb, "mortal(theme: zeus)"));
  EXPECT_DOUBLE_EQ(r.probability, 0.5);
  EXPECT_EQ(r.verdict, Verdict::unknown);
  EXPECT_TRUE(r.converged);
}

TEST(AnswerQuery, NegativeEvidenceQueriedDirectly) {
  auto kb = make_kb(kManMortalLexicon, "not mortal(theme: zeus)\n");
  EXPECT_DOUBLE_EQ(answer_query(graph_for(kb, "mortal(theme: zeus)")).probability, 0.0);
  EXPECT_DOUBLE_EQ(answer_query(graph_for(kb, "not mortal(theme: zeus)")).probability, 1.0);
}

TEST(AnswerQuery, NoisyOrWithCertainSupport) {
  auto kb = make_kb("predicate likes {agent: e, patient: e}\npredicate rich {theme: e}\npredicate kind {theme: e}\n"
                    "entity jack : e\nentity jill : e\n",
                    "rich(theme: jack)\nkind(theme: jack)\n"
                    "always [x:e]: rich(theme: x) -> likes(agent: jill, patient: x)\n"
                    "usually [x:e]: kind(theme: x) -> likes(agent: jill, patient: x)\n");
  auto r = answer_query(graph_for(kb, "likes(agent: jill, patient: jack)"));
  EXPECT_NEAR(r.probability, 1.0 - 0.01 * 0.1, 1e-12);
}

TEST(RunBp, ObserverSeesBoundedBeliefsAndClampedEvidence) {
  auto kb = make_kb(kManMortalLexicon,
                    "man(theme: socrates)\nnot mortal(theme: zeus)\n"
                    "usually [x:e]: man(theme: x) -> mortal(theme: x)\n");
  auto g = graph_for(kb, "man(theme: zeus)");
  int calls = 0;
  auto observer = [&](int it, double delta, std::span<const double> beliefs) {
    ++calls;
    EXPECT_EQ(it, calls);
    EXPECT_GE(delta, 0.0);
    ASSERT_EQ(beliefs.size(), g.size());
    for (std::uint32_t i = 0; i < g.size(); ++i) {
      EXPECT_GE(beliefs[i], 0.0);
      EXPECT_LE(beliefs[i], 1.0);
      if (g.is_proposition(NodeId{i}) && g.proposition(NodeId{i}).evidence) {
        EXPECT_EQ(beliefs[i], *g.proposition(NodeId{i}).evidence ? 1.0 : 0.0);
      }
    }
  };
  auto state = run_bp(g, {}, observer);
  EXPECT_EQ(calls, state.iteration);
  EXPECT_EQ(state.trace.size(), static_cast<std::size_t>(calls));
  EXPECT_TRUE(state.converged);
  EXPECT_LT(state.trace.back(), 1e-6);
}

TEST(RunBp, MaxIterationsCapsTheRun) {
  auto kb = make_kb(kManMortalLexicon, "man(theme: socrates)\nalways [x:e]: man(theme: x) -> mortal(theme: x)\n");
  auto state = run_bp(graph_for(kb, "mortal(theme: socrates)"), BpConfig{0.5, 1e-6, 1});
  EXPECT_EQ(state.iteration, 1);
  EXPECT_FALSE(state.converged);
}

TEST(RunBp, DampingDoesNotMoveTheFixedPoint) {
  auto kb = make_kb("predicate a {theme: e}\npredicate b {theme: e}\npredicate c {theme: e}\npredicate d {theme: e}\n"
                    "entity k : e\n",
                    "a(theme: k)\nnot d(theme: k)\n"
                    "usually [x:e]: a(theme: x) -> b(theme: x)\n"
                    "sometimes [x:e]: b(theme: x) -> c(theme: x)\n"
                    "usually [x:e]: c(theme: x) -> d(theme: x)\n");
  auto g = graph_for(kb, "c(theme: k)");
  auto base = run_bp(g, BpConfig{0.0, 1e-12, 200});
  for (double d : {0.25, 0.5, 0.9}) {
    auto s = run_bp(g, BpConfig{d, 1e-12, 200});
    ASSERT_TRUE(s.converged);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(s.belief[i], base.belief[i], 1e-9);
  }
}

TEST(RunBp, NegPairsStayComplementary) {
  auto kb = make_kb(kManMortalLexicon,
                    "man(theme: socrates)\n"
                    "usually [x:e]: man(theme: x) -> mortal(theme: x)\n"
                    "sometimes [x:e]: man(theme: x) -> not mortal(theme: x)\n"
                    "never [x:e]: mortal(theme: x) -> man(theme: x)\n");
  auto g = graph_for(kb, "not mortal(theme: socrates)");
  ASSERT_FALSE(g.neg_factors().empty());
  auto state = run_bp(g);
  for (const auto& pair : g.neg_factors()) {
    EXPECT_NEAR(state.belief[pair.positive.value] + state.belief[pair.negative.value], 1.0, 1e-6);
  }
}

// Random single-entity knowledge bases over predicates p0..p7. Rules only
// point from lower to higher predicates, so the graphs are acyclic; those
// that are also singly connected must match enumeration to round-off.
std::string random_kb(std::mt19937& rng) {
  static const char* kQuant[] = {"always", "usually", "sometimes", "never"};
  std::uniform_int_distribution<int> pred(0, 7), count(1, 4), quant(0, 3), coin(0, 1);
  std::ostringstream kb;
  int rules = count(rng) + 1;
  for (int r = 0; r < rules; ++r) {
    int a = pred(rng), b = pred(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    kb << kQuant[quant(rng)] << " [x:e]: p" << a << "(theme: x)";
    if (coin(rng) && a + 1 < b) kb << " & p" << (a + 1) << "(theme: x)";
    kb << " -> p" << b << "(theme: x)\n";
  }
  int facts = count(rng) - 1;
  for (int f = 0; f < facts; ++f) kb << (coin(rng) ? "" : "not ") << "p" << pred(rng) << "(theme: k)\n";
  return kb.str();
}

TEST(RunBp, TreesMatchEnumeration) {
  std::string lexicon = "entity k : e\n";
  for (int i = 0; i < 8; ++i) lexicon += "predicate p" + std::to_string(i) + " {theme: e}\n";
  std::mt19937 rng(20260416);
  std::uniform_int_distribution<int> pred(0, 7), coin(0, 1);
  int trees = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::string text = random_kb(rng);
    std::string query = std::string(coin(rng) ? "" : "not ") + "p" + std::to_string(pred(rng)) + "(theme: k)";
    FactorGraph g;
    std::vector<double> exact;
    try {
      auto kb = make_kb(lexicon, text);
      g = graph_for(kb, query);
      exact = exact_posteriors(g);
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::InconsistentEvidence) << text;
      continue;
    }
    if (!is_singly_connected(g)) continue;
    ++trees;
    auto state = run_bp(g);
    ASSERT_TRUE(state.converged) << text;
    for (std::uint32_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(state.belief[i], exact[i], 1e-9) << text << "query " << query << " node " << i;
    }
  }
  EXPECT_GT(trees, 100);
}

TEST(SinglyConnected, Examples) {
  auto chain = make_kb(kManMortalLexicon, "man(theme: socrates)\nalways [x:e]: man(theme: x) -> mortal(theme: x)\n");
  EXPECT_TRUE(is_singly_connected(graph_for(chain, "mortal(theme: socrates)")));
  auto diamond = make_kb("predicate a {theme: e}\npredicate b {theme: e}\npredicate c {theme: e}\n"
                         "predicate d {theme: e}\nentity k : e\n",
                         "usually [x:e]: a(theme: x) -> b(theme: x)\nusually [x:e]: a(theme: x) -> c(theme: x)\n"
                         "usually [x:e]: b(theme: x) & c(theme: x) -> d(theme: x)\n");
  EXPECT_FALSE(is_singly_connected(graph_for(diamond, "d(theme: k)")));
}

}  // namespace
}  // namespace lbn
