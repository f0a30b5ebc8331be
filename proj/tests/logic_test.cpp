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

#include <random>

#include "test_util.hpp"

namespace lbn {
namespace {

const char* kLexicon = R"(predicate man {theme: e}
  "a human adult male"
predicate mortal {theme: e}
predicate trust {agent: e, patient: e}
predicate careful {theme: e}
predicate apologize {agent: e}
predicate rude {theme: e}
predicate should {content: s}
entity socrates : e
  "Greek philosopher, 470-399 BC"
entity zeus : e
entity jack : e
entity jill : e
entity mary : e
)";

Lexicon lexicon() { return load_lexicon(kLexicon); }

template <class T>
const T& only(const std::vector<Statement>& s) {
  EXPECT_EQ(s.size(), 1u);
  return std::get<T>(s.at(0));
}

ErrorKind kind_of(std::string_view text) {
  try {
    parse_logic(text, lexicon());
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorKind::Io;
}

TEST(ParseLogic, TransitiveFact) {
  auto lit = only<Literal>(parse_logic("trust(agent: jack, patient: jill)", lexicon()));
  EXPECT_TRUE(lit.positive);
  EXPECT_EQ(lit.proposition.predicate, "trust");
  ASSERT_EQ(lit.proposition.args.size(), 2u);
  EXPECT_EQ(lit.proposition.find("agent")->entity_id(), "jack");
  EXPECT_EQ(lit.proposition.find("patient")->entity_id(), "jill");
}

TEST(ParseLogic, NegatedFact) {
  auto lit = only<Literal>(parse_logic("not mortal(theme: zeus)", lexicon()));
  EXPECT_FALSE(lit.positive);
  EXPECT_EQ(lit.proposition.predicate, "mortal");
  EXPECT_EQ(lit.proposition.find("theme")->entity_id(), "zeus");
}

TEST(ParseLogic, EmptyInput) {
  EXPECT_TRUE(parse_logic("", lexicon()).empty());
  EXPECT_TRUE(parse_logic("\n# only a comment\n\n", lexicon()).empty());
}

TEST(ParseLogic, VariableInsideEmbeddedArgument) {
  auto rule = only<QuantifiedRule>(
      parse_logic("usually [o:e]: rude(theme: o) -> should(content: apologize(agent: o))", lexicon()));
  EXPECT_EQ(rule.quantifier, Quantifier::usually);
  ASSERT_EQ(rule.bindings.size(), 1u);
  EXPECT_EQ(rule.bindings[0].variable, "o");
  const Argument* content = rule.conclusion.proposition.find("content");
  ASSERT_NE(content, nullptr);
  ASSERT_TRUE(content->is_embedded());
  EXPECT_EQ(content->proposition().predicate, "apologize");
  EXPECT_TRUE(content->proposition().find("agent")->is_variable());
  EXPECT_EQ(content->proposition().find("agent")->variable_name(), "o");
}

TEST(ParseLogic, RolesAreReorderedToDeclaration) {
  auto a = only<Literal>(parse_logic("trust(patient: jill, agent: jack)", lexicon()));
  auto b = only<Literal>(parse_logic("trust(agent: jack, patient: jill)", lexicon()));
  EXPECT_EQ(a, b);
}

TEST(ParseLogic, DeclarationsPrecedeUses) {
  auto st = parse_logic("predicate happy {theme: e}\nentity ann : e\nhappy(theme: ann)\n");
  ASSERT_EQ(st.size(), 3u);
  EXPECT_TRUE(std::holds_alternative<Literal>(st[2]));
  EXPECT_EQ(kind_of("happy(theme: jack)"), ErrorKind::UnknownPredicate);
}

TEST(ParseLogic, Errors) {
  EXPECT_EQ(kind_of("immortal(theme: zeus)"), ErrorKind::UnknownPredicate);
  EXPECT_EQ(kind_of("mortal(theme: hera)"), ErrorKind::UnknownEntity);
  EXPECT_EQ(kind_of("mortal(subject: zeus)"), ErrorKind::RoleMismatch);
  EXPECT_EQ(kind_of("trust(agent: jack)"), ErrorKind::RoleMismatch);
  EXPECT_EQ(kind_of("should(content: zeus)"), ErrorKind::TypeMismatch);
  EXPECT_EQ(kind_of("mortal(theme: man(theme: zeus))"), ErrorKind::TypeMismatch);
  // Identifiers not bound by the rule are entity references.
  EXPECT_EQ(kind_of("always [x:e]: man(theme: x) -> mortal(theme: y)"), ErrorKind::UnknownEntity);
  EXPECT_EQ(kind_of("always [x:e, y:e]: man(theme: x) -> mortal(theme: y)"), ErrorKind::UnboundVariable);
  EXPECT_EQ(kind_of("often [x:e]: man(theme: x) -> mortal(theme: x)"), ErrorKind::UnknownQuantifier);
  EXPECT_EQ(kind_of("mortal(theme: x)"), ErrorKind::UnknownEntity);
  EXPECT_EQ(kind_of("mortal(theme zeus)"), ErrorKind::SyntaxError);
}

TEST(ParseLogic, SyntaxErrorsCarryPosition) {
  try {
    parse_logic("man(theme: socrates)\nmortal(theme zeus)\n", lexicon());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SyntaxError);
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 1);
  }
}

TEST(ParseLogic, EmbeddingDepthIsBounded) {
  auto lex = load_lexicon("predicate believe {content: s}\npredicate happy {theme: e}\nentity ann : e\n");
  std::string p = "happy(theme: ann)";
  for (int i = 0; i < kMaxEmbeddingDepth; ++i) p = "believe(content: " + p + ")";
  EXPECT_NO_THROW(parse_logic(p, lex));
  p = "believe(content: " + p + ")";
  try {
    parse_logic(p, lex);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmbeddingTooDeep);
  }
}

TEST(Lexicon, Validation) {
  auto expect_kind = [](std::string_view text, ErrorKind k) {
    try {
      load_lexicon(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), k) << text;
    }
  };
  expect_kind("entity ann : person\n", ErrorKind::UnknownType);
  expect_kind("entity ann : e\nentity ann : e\n", ErrorKind::DuplicateDeclaration);
  expect_kind("predicate p {theme: e}\npredicate p {theme: e}\n", ErrorKind::DuplicateDeclaration);
  expect_kind("predicate p {theme: e}\nsurface transitive \"ps\" -> p\n", ErrorKind::RoleMismatch);
  expect_kind("surface noun \"men\" -> man\n", ErrorKind::UnknownPredicate);
  expect_kind("p(theme: a)\n", ErrorKind::UnknownPredicate);

  auto lex = load_lexicon("type person\nentity ann : person\npredicate p {theme: person}\nsurface noun \"p\" -> p\n");
  EXPECT_TRUE(lex.has_type("person"));
  EXPECT_EQ(lex.entities_of_type("person").size(), 1u);
  ASSERT_NE(lex.find_surface("p"), nullptr);
  EXPECT_EQ(lex.find_surface("p")->category, Category::CommonNoun);
}

TEST(Lexicon, DescriptionsAttachToPreviousDeclaration) {
  auto lex = lexicon();
  EXPECT_EQ(lex.find_predicate("man")->description, "a human adult male");
  EXPECT_EQ(lex.find_entity("socrates")->description, "Greek philosopher, 470-399 BC");
  EXPECT_EQ(serialize(*lex.find_predicate("man")), "predicate man {theme: e}\n  \"a human adult male\"");
}

TEST(QuantifierWeight, Map) {
  EXPECT_DOUBLE_EQ(quantifier_weight("always"), 0.99);
  EXPECT_DOUBLE_EQ(quantifier_weight("usually"), 0.9);
  EXPECT_DOUBLE_EQ(quantifier_weight("sometimes"), 0.5);
  EXPECT_DOUBLE_EQ(quantifier_weight("never"), 0.99);
  EXPECT_TRUE(flips_conclusion(Quantifier::never));
  EXPECT_FALSE(flips_conclusion(Quantifier::always));
  EXPECT_THROW(quantifier_weight("rarely"), Error);
}

TEST(QuantifierWeight, NeverConcludesTheNegation) {
  auto rule = only<QuantifiedRule>(parse_logic("never [x:e]: man(theme: x) -> mortal(theme: x)", lexicon()));
  EXPECT_DOUBLE_EQ(rule.weight, 0.99);
  EXPECT_FALSE(rule.conclusion.positive);
  EXPECT_EQ(serialize(rule), "never [x:e]: man(theme: x) -> mortal(theme: x)");
}

TEST(QuantifierWeight, ExplicitWeightOverride) {
  auto rule = only<QuantifiedRule>(parse_logic("always [x:e]: man(theme: x) -> mortal(theme: x) [weight=1.0]", lexicon()));
  EXPECT_DOUBLE_EQ(rule.weight, 1.0);
  EXPECT_EQ(serialize(rule), "always [x:e]: man(theme: x) -> mortal(theme: x) [weight=1]");
  EXPECT_THROW(parse_logic("always [x:e]: man(theme: x) -> mortal(theme: x) [weight=1.5]", lexicon()), Error);
}

TEST(CanonicalKey, Examples) {
  auto lex = lexicon();
  EXPECT_EQ(canonical_key(parse_literal("trust(patient: jill, agent: jack)", lex).proposition), "trust(agent=jack,patient=jill)");
  EXPECT_EQ(canonical_key(parse_literal("mortal(theme: zeus)", lex).proposition), "mortal(theme=zeus)");
  EXPECT_EQ(canonical_key(parse_literal("should(content: careful(theme: mary))", lex).proposition),
            "should(content=careful(theme=mary))");
}

TEST(CanonicalKey, RejectsVariables) {
  auto rule = only<QuantifiedRule>(parse_logic("always [x:e]: man(theme: x) -> mortal(theme: x)", lexicon()));
  try {
    canonical_key(rule.premises[0]);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UngroundedProposition);
  }
}

TEST(Serialize, CanonicalForms) {
  auto lex = lexicon();
  EXPECT_EQ(serialize(parse_literal("not mortal(theme: zeus)", lex)), "not mortal(theme: zeus)");
  QuantifiedRule r;
  r.quantifier = Quantifier::always;
  r.bindings = {{"x", "e"}};
  r.premises = {Proposition{"man", {{"theme", Argument::variable("x")}}}};
  r.conclusion = Literal{Proposition{"mortal", {{"theme", Argument::variable("x")}}}, true};
  r.weight = 0.99;
  EXPECT_EQ(serialize(r), "always [x:e]: man(theme: x) -> mortal(theme: x)");
}

// Random well-typed statements survive serialize -> parse unchanged.
TEST(Serialize, RoundTripProperty) {
  auto lex = lexicon();
  std::mt19937 rng(20260416);
  const std::vector<std::string> entities{"socrates", "zeus", "jack", "jill", "mary"};
  auto pick = [&](const auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
  auto term = [&](bool vars) {
    return vars && rng() % 2 ? Argument::variable(pick(std::vector<std::string>{"x", "y"}))
                             : Argument::entity(pick(entities));
  };
  auto prop = [&](bool vars) {
    switch (rng() % 4) {
      case 0: return Proposition{"man", {{"theme", term(vars)}}};
      case 1: return Proposition{"trust", {{"agent", term(vars)}, {"patient", term(vars)}}};
      case 2: return Proposition{"should", {{"content", Argument::embedded(Proposition{"careful", {{"theme", term(vars)}}})}}};
      default: return Proposition{"mortal", {{"theme", term(vars)}}};
    }
  };
  for (int i = 0; i < 300; ++i) {
    Statement st;
    if (i % 2 == 0) {
      st = Literal{prop(false), rng() % 2 == 0};
    } else {
      QuantifiedRule r;
      r.quantifier = static_cast<Quantifier>(rng() % 4);
      r.weight = quantifier_weight(r.quantifier);
      r.bindings = {{"x", "e"}, {"y", "e"}};
      r.premises = {Proposition{"trust", {{"agent", Argument::variable("x")}, {"patient", Argument::variable("y")}}}};
      if (rng() % 2) r.premises.push_back(prop(true));
      r.conclusion = Literal{prop(true), !flips_conclusion(r.quantifier)};
      st = r;
    }
    std::string text = serialize(st);
    auto back = parse_logic(text, lex);
    ASSERT_EQ(back.size(), 1u) << text;
    EXPECT_EQ(back[0], st) << text;
    EXPECT_EQ(serialize(back[0]), text);
  }
}

// Every corpus statement is a fixed point of serialize(parse(.)).
TEST(Serialize, RoundTripOverCorpus) {
  namespace fs = std::filesystem;
  int checked = 0;
  for (const auto& entry : fs::recursive_directory_iterator(lbn::testing::corpus_dir())) {
    if (entry.path().filename() != "kb.lbn" && entry.path().filename() != "gold.lbn") continue;
    Lexicon lex = load_lexicon(read_file(entry.path().parent_path() / "lexicon.lex"));
    for (const auto& st : parse_logic(read_file(entry.path()), lex)) {
      std::string once = serialize(st);
      auto again = parse_logic(once, lex);
      ASSERT_EQ(again.size(), 1u);
      EXPECT_EQ(again[0], st) << once;
      EXPECT_EQ(serialize(again[0]), once);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

}  // namespace
}  // namespace lbn
