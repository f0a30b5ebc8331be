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

// Typed slot grammar: English sentences to logical statements.
//
// A sentence is tokenized, every token span is bound to a lexicon category
// by longest match, and the resulting category sequence is matched against
// a fixed list of rule patterns. Function words are invisible to a rule
// unless the rule names them as anchors. A sentence parses only if exactly
// one rule accepts it.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lbn/error.hpp"
#include "lbn/logic.hpp"

namespace lbn {

struct Token {
  std::string surface;  // as written
  std::string folded;   // lower case, used for lookup
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last character
};

inline std::vector<Token> tokenize(std::string_view sentence) {
  static constexpr std::string_view kPunct = ".,;:!?\"'()";
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    std::size_t j = i;
    while (j < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[j]))) ++j;
    std::size_t b = i, e = j;
    while (b < e && kPunct.find(sentence[b]) != std::string_view::npos) ++b;
    while (e > b && kPunct.find(sentence[e - 1]) != std::string_view::npos) --e;
    if (b < e) {
      Token t{std::string(sentence.substr(b, e - b)), {}, b, e};
      t.folded = t.surface;
      for (char& c : t.folded) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      out.push_back(std::move(t));
    }
    i = j;
  }
  if (out.empty()) throw Error(ErrorKind::EmptySentence, "sentence has no words");
  return out;
}

struct LexMatch {
  std::size_t first = 0;  // token index
  std::size_t count = 1;
  std::string phrase;     // folded surface text
  Category category = Category::FunctionWord;
  std::string target;     // entity id or predicate name; empty for function words
};

// Words every lexicon understands.
inline std::optional<Category> builtin_category(std::string_view word) {
  static const std::set<std::string_view> kFunction{"the", "a",    "an",   "to",   "of",      "he",   "she",
                                                    "they", "is",  "are",  "if",   "then",    "two",  "each",
                                                    "other", "someone", "than", "who"};
  if (word == "not") return Category::NegationWord;
  if (word == "all" || word == "no") return Category::Quantword;
  if (kFunction.count(word)) return Category::FunctionWord;
  return std::nullopt;
}

// Greedy left-to-right longest match. Lexicon surface forms win over the
// built-in words; an entity is also reachable through its id with
// underscores read as spaces.
inline std::vector<LexMatch> lex_lookup(const std::vector<Token>& tokens, const Lexicon& lexicon) {
  std::map<std::string, SurfaceForm> table = lexicon.surface_forms();
  std::size_t longest = 1;
  for (const auto& e : lexicon.entities()) {
    std::string phrase = e.id;
    std::replace(phrase.begin(), phrase.end(), '_', ' ');
    table.emplace(phrase, SurfaceForm{phrase, Category::EntityName, e.id});
  }
  for (const auto& [phrase, form] : table) {
    longest = std::max<std::size_t>(longest, 1 + std::count(phrase.begin(), phrase.end(), ' '));
  }

  std::vector<LexMatch> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    for (std::size_t n = std::min(longest, tokens.size() - i); n >= 1 && !matched; --n) {
      std::string phrase = tokens[i].folded;
      for (std::size_t k = 1; k < n; ++k) phrase += " " + tokens[i + k].folded;
      if (auto it = table.find(phrase); it != table.end()) {
        out.push_back({i, n, phrase, it->second.category, it->second.target});
        i += n;
        matched = true;
      }
    }
    if (matched) continue;
    if (auto c = builtin_category(tokens[i].folded)) {
      out.push_back({i, 1, tokens[i].folded, *c, ""});
      ++i;
      continue;
    }
    throw Error(ErrorKind::UnknownWord,
                "'" + tokens[i].surface + "' (word " + std::to_string(i + 1) + ") is not in the lexicon", 0,
                static_cast<int>(tokens[i].begin + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rules

// One pattern position: either a category slot or an anchor word set.
struct Element {
  std::vector<Category> categories;
  std::vector<std::string> words;
  bool optional = false;

  bool accepts(const LexMatch& m) const {
    if (!words.empty()) return std::find(words.begin(), words.end(), m.phrase) != words.end();
    return std::find(categories.begin(), categories.end(), m.category) != categories.end();
  }
};

// Matched element contents, aligned with the pattern; nullptr for an
// optional element that was skipped.
using SlotBindings = std::vector<const LexMatch*>;

struct GrammarRule {
  std::string name;
  std::vector<Element> pattern;
  std::function<std::optional<Statement>(const SlotBindings&, const Lexicon&)> emit;

  std::set<std::string> anchors() const {
    std::set<std::string> out;
    for (const auto& e : pattern) out.insert(e.words.begin(), e.words.end());
    return out;
  }
};

namespace grammar {

inline Element slot(std::initializer_list<Category> c) { return {c, {}, false}; }
inline Element opt(std::initializer_list<Category> c) { return {c, {}, true}; }
inline Element word(std::initializer_list<std::string> w) { return {{}, w, false}; }

constexpr auto EN = Category::EntityName;
constexpr auto CN = Category::CommonNoun;
constexpr auto ADJ = Category::Adjective;
constexpr auto TV = Category::TransitiveVerb;
constexpr auto IV = Category::IntransitiveVerb;
constexpr auto REL = Category::RelationalNoun;
constexpr auto NEG = Category::NegationWord;

inline Argument arg_of(const std::string& term, bool variable) {
  return variable ? Argument::variable(term) : Argument::entity(term);
}

// Fills the predicate's roles, in declared order, with `terms`.
inline std::optional<Proposition> apply(const Lexicon& lex, const std::string& predicate,
                                        std::vector<std::string> terms, bool variables) {
  const PredicateDecl* decl = lex.find_predicate(predicate);
  if (!decl || decl->roles.size() != terms.size()) return std::nullopt;
  Proposition p{predicate, {}};
  for (std::size_t i = 0; i < terms.size(); ++i) p.args.emplace_back(decl->roles[i].first, arg_of(terms[i], variables));
  return p;
}

inline std::optional<Proposition> transitive(const Lexicon& lex, const std::string& verb, const std::string& agent,
                                             const std::string& patient, bool variables) {
  const PredicateDecl* decl = lex.find_predicate(verb);
  if (!decl) return std::nullopt;
  Proposition p{verb, {}};
  for (const auto& [role, type] : decl->roles) {
    if (role == "agent") p.args.emplace_back(role, arg_of(agent, variables));
    else if (role == "patient") p.args.emplace_back(role, arg_of(patient, variables));
    else return std::nullopt;
  }
  return p;
}

inline std::optional<Statement> fact(std::optional<Proposition> p, bool positive, const Lexicon& lex) {
  if (!p) return std::nullopt;
  try {
    validate_ground(*p, lex);
  } catch (const Error&) {
    return std::nullopt;
  }
  return Literal{std::move(*p), positive};
}

// Bindings are inferred from the premises: each variable takes the type of
// the first role it fills.
inline std::optional<Statement> rule(Quantifier q, std::vector<std::optional<Proposition>> premises,
                                     std::optional<Proposition> conclusion, const Lexicon& lex) {
  QuantifiedRule r;
  r.quantifier = q;
  r.weight = quantifier_weight(q);
  for (auto& p : premises) {
    if (!p) return std::nullopt;
    const PredicateDecl* decl = lex.find_predicate(p->predicate);
    for (std::size_t i = 0; i < p->args.size(); ++i) {
      const auto& arg = p->args[i].second;
      if (!arg.is_variable()) continue;
      bool seen = std::any_of(r.bindings.begin(), r.bindings.end(),
                              [&](const Binding& b) { return b.variable == arg.variable_name(); });
      if (!seen) r.bindings.push_back({arg.variable_name(), decl->roles[i].second});
    }
    r.premises.push_back(std::move(*p));
  }
  if (!conclusion) return std::nullopt;
  r.conclusion = Literal{std::move(*conclusion), !flips_conclusion(q)};
  try {
    validate_rule(r, lex);
  } catch (const Error&) {
    return std::nullopt;
  }
  return r;
}

inline const std::string& t(const SlotBindings& b, std::size_t i) { return b[i]->target; }

}  // namespace grammar

// The fixed rule list: seven fact patterns, then eight rule patterns.
inline const std::vector<GrammarRule>& default_grammar() {
  using namespace grammar;
  static const std::vector<GrammarRule> rules = [] {
    std::vector<GrammarRule> g;
    const std::initializer_list<std::string> a_an{"a", "an"};
    const std::initializer_list<std::string> is_are{"is", "are"};
    const std::initializer_list<std::string> pronoun{"he", "she", "they"};

    // Socrates is a man
    g.push_back({"copular_fact", {slot({EN}), word({"is"}), slot({CN})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return fact(apply(lex, t(b, 2), {t(b, 0)}, false), true, lex);
                 }});
    // Jack is funny
    g.push_back({"copular_fact_bare", {slot({EN}), word({"is"}), slot({ADJ})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return fact(apply(lex, t(b, 2), {t(b, 0)}, false), true, lex);
                 }});
    // Zeus is not mortal
    g.push_back({"negated_copular_fact", {slot({EN}), word({"is"}), slot({NEG}), slot({ADJ, CN})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return fact(apply(lex, t(b, 3), {t(b, 0)}, false), false, lex);
                 }});
    // Alice is taller than Bob; Henry is king of France
    g.push_back({"prepositional_copular_fact", {slot({EN}), word({"is"}), slot({REL}), slot({EN})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return fact(apply(lex, t(b, 2), {t(b, 0), t(b, 3)}, false), true, lex);
                 }});
    // Clark Kent is Superman
    g.push_back({"copular_identity", {slot({EN}), word({"is"}), slot({EN})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return fact(apply(lex, "identity", {t(b, 0), t(b, 2)}, false), true, lex);
                 }});
    // Jack trusts Jill
    g.push_back({"transitive_fact", {slot({EN}), slot({TV}), slot({EN})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return fact(transitive(lex, t(b, 1), t(b, 0), t(b, 2), false), true, lex);
                 }});
    // Superman flies
    g.push_back({"intransitive_fact", {slot({EN}), slot({IV})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return fact(apply(lex, t(b, 1), {t(b, 0)}, false), true, lex);
                 }});

    // All men are mortal
    g.push_back({"copular_universal", {word({"all"}), slot({CN}), word({"are"}), slot({ADJ, CN})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return rule(Quantifier::always, {apply(lex, t(b, 1), {"x"}, true)},
                               apply(lex, t(b, 3), {"x"}, true), lex);
                 }});
    // No gods are mortal
    g.push_back({"negated_universal", {word({"no"}), slot({CN}), word({"are"}), slot({ADJ, CN})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return rule(Quantifier::never, {apply(lex, t(b, 1), {"x"}, true)},
                               apply(lex, t(b, 3), {"x"}, true), lex);
                 }});
    // A sparrow is a bird
    g.push_back({"copular_generic", {word(a_an), slot({CN}), word({"is"}), word(a_an), slot({CN})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return rule(Quantifier::always, {apply(lex, t(b, 1), {"x"}, true)},
                               apply(lex, t(b, 4), {"x"}, true), lex);
                 }});
    // If two people trust each other, they are allies
    g.push_back({"reciprocal_conditional",
                 {word({"if"}), word({"two"}), word({"people"}), slot({TV}), word({"each"}), word({"other"}),
                  word({"they"}), word({"are"}), slot({REL})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return rule(Quantifier::always,
                               {transitive(lex, t(b, 3), "x", "y", true), transitive(lex, t(b, 3), "y", "x", true)},
                               apply(lex, t(b, 8), {"x", "y"}, true), lex);
                 }});
    // If a man is king of a country, he is successful
    g.push_back({"conditional_prepositional_copular",
                 {word({"if"}), word(a_an), slot({CN}), word({"is"}), slot({REL}), word(a_an), slot({CN}),
                  word(pronoun), word(is_are), slot({ADJ})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return rule(Quantifier::always,
                               {apply(lex, t(b, 2), {"x"}, true), apply(lex, t(b, 4), {"x", "y"}, true),
                                apply(lex, t(b, 6), {"y"}, true)},
                               apply(lex, t(b, 9), {"x"}, true), lex);
                 }});
    // If a girl loves a successful man, she is ambitious
    g.push_back({"conditional_transitive",
                 {word({"if"}), word(a_an), slot({CN}), slot({TV}), word(a_an), opt({ADJ}), slot({CN}),
                  word(pronoun), word(is_are), slot({ADJ})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   std::vector<std::optional<Proposition>> premises{apply(lex, t(b, 2), {"x"}, true),
                                                                    transitive(lex, t(b, 3), "x", "y", true)};
                   if (b[5]) premises.push_back(apply(lex, t(b, 5), {"y"}, true));
                   premises.push_back(apply(lex, t(b, 6), {"y"}, true));
                   return rule(Quantifier::always, std::move(premises), apply(lex, t(b, 9), {"x"}, true), lex);
                 }});
    // If someone is funny, they are liked
    g.push_back({"conditional_someone",
                 {word({"if"}), word({"someone"}), word({"is"}), slot({ADJ}), word({"they"}), word({"are"}),
                  slot({ADJ})},
                 [](const SlotBindings& b, const Lexicon& lex) {
                   return rule(Quantifier::always, {apply(lex, t(b, 3), {"x"}, true)},
                               apply(lex, t(b, 6), {"x"}, true), lex);
                 }});
    // If John is married to Mary, then Mary is married to John
    g.push_back({"conditional_symmetry",
                 {word({"if"}), slot({EN}), word({"is"}), slot({REL}), slot({EN}), word({"then"}), slot({EN}),
                  word({"is"}), slot({REL}), slot({EN})},
                 [](const SlotBindings& b, const Lexicon& lex) -> std::optional<Statement> {
                   if (t(b, 3) != t(b, 8) || t(b, 1) != t(b, 9) || t(b, 4) != t(b, 6)) return std::nullopt;
                   return rule(Quantifier::always, {apply(lex, t(b, 3), {"x", "y"}, true)},
                               apply(lex, t(b, 3), {"y", "x"}, true), lex);
                 }});
    return g;
  }();
  return rules;
}

// ---------------------------------------------------------------------------
// Dispatch

struct ParseOutcome {
  enum class Kind { unique, no_match, ambiguous };
  Kind kind = Kind::no_match;
  std::vector<std::pair<std::string, Statement>> matches;  // (rule name, statement)
  std::string diagnostics;

  bool ok() const { return kind == Kind::unique; }
  const Statement& statement() const { return matches.front().second; }
  const std::string& rule() const { return matches.front().first; }
};

namespace detail {

inline void align(const std::vector<Element>& pattern, const std::vector<const LexMatch*>& input, std::size_t pi,
                  std::size_t ii, SlotBindings& current, std::vector<SlotBindings>& out) {
  if (pi == pattern.size()) {
    if (ii == input.size()) out.push_back(current);
    return;
  }
  const Element& e = pattern[pi];
  if (ii < input.size() && e.accepts(*input[ii])) {
    current.push_back(input[ii]);
    align(pattern, input, pi + 1, ii + 1, current, out);
    current.pop_back();
  }
  if (e.optional) {
    current.push_back(nullptr);
    align(pattern, input, pi + 1, ii, current, out);
    current.pop_back();
  }
}

}  // namespace detail

inline ParseOutcome dispatch(const std::vector<LexMatch>& matches, const Lexicon& lexicon,
                             const std::vector<GrammarRule>& grammar = default_grammar()) {
  ParseOutcome outcome;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : grammar) {
    auto anchors = r.anchors();
    std::vector<const LexMatch*> visible;
    for (const auto& m : matches) {
      if (m.category != Category::FunctionWord || anchors.count(m.phrase)) visible.push_back(&m);
    }
    std::vector<SlotBindings> alignments;
    SlotBindings current;
    detail::align(r.pattern, visible, 0, 0, current, alignments);
    for (const auto& a : alignments) {
      auto st = r.emit(a, lexicon);
      if (!st) continue;
      if (seen.emplace(r.name, serialize(*st)).second) outcome.matches.emplace_back(r.name, std::move(*st));
    }
  }
  if (outcome.matches.size() == 1) {
    outcome.kind = ParseOutcome::Kind::unique;
  } else if (outcome.matches.empty()) {
    std::string sig;
    for (const auto& m : matches) sig += (sig.empty() ? "" : " ") + std::string(to_string(m.category)) + "(" + m.phrase + ")";
    outcome.diagnostics = "no rule matches " + sig;
  } else {
    outcome.kind = ParseOutcome::Kind::ambiguous;
    outcome.diagnostics = std::to_string(outcome.matches.size()) + " rules match:";
    for (const auto& [name, st] : outcome.matches) outcome.diagnostics += " " + name;
  }
  return outcome;
}

inline ParseOutcome parse_sentence(std::string_view sentence, const Lexicon& lexicon,
                                   const std::vector<GrammarRule>& grammar = default_grammar()) {
  try {
    return dispatch(lex_lookup(tokenize(sentence), lexicon), lexicon, grammar);
  } catch (const Error& e) {
    ParseOutcome o;
    o.diagnostics = e.what();
    return o;
  }
}

struct SentenceParse {
  std::string text;
  ParseOutcome outcome;
};

struct DocumentParse {
  std::vector<SentenceParse> sentences;
  std::vector<Statement> statements;  // in sentence order, unique parses only

  bool ok() const {
    return std::all_of(sentences.begin(), sentences.end(), [](const auto& s) { return s.outcome.ok(); });
  }
};

// Sentences end at '.', '!', '?' or a line break.
inline std::vector<std::string> split_sentences(std::string_view document) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    auto b = current.find_first_not_of(" \t\r");
    if (b != std::string::npos) out.push_back(current.substr(b, current.find_last_not_of(" \t\r") - b + 1));
    current.clear();
  };
  for (char c : document) {
    if (c == '\n') {
      flush();
    } else if (c == '.' || c == '!' || c == '?') {
      current += c;
      flush();
    } else {
      current += c;
    }
  }
  flush();
  return out;
}

inline DocumentParse parse_document(std::string_view document, const Lexicon& lexicon,
                                    const std::vector<GrammarRule>& grammar = default_grammar()) {
  DocumentParse doc;
  for (auto& s : split_sentences(document)) {
    ParseOutcome o = parse_sentence(s, lexicon, grammar);
    if (o.ok()) doc.statements.push_back(o.statement());
    doc.sentences.push_back({std::move(s), std::move(o)});
  }
  return doc;
}

}  // namespace lbn
