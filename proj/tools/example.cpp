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

// Minimal library walk-through: parse two English sentences, add a fact
// written in logic form, and ask a question.

#include <iostream>

#include "lbn/lbn.hpp"

int main() {
  const lbn::Lexicon lexicon = lbn::load_lexicon(R"(predicate man {theme: e}
predicate mortal {theme: e}
entity socrates : e
entity zeus : e
surface noun "men" -> man
surface noun "man" -> man
surface adjective "mortal" -> mortal
)");

  lbn::DocumentParse doc = lbn::parse_document("All men are mortal. Zeus is not mortal.", lexicon);
  if (!doc.ok()) {
    for (const auto& s : doc.sentences) std::cerr << s.text << ": " << s.outcome.diagnostics << "\n";
    return 1;
  }

  std::string program;
  for (const auto& st : doc.statements) program += lbn::serialize(st) + "\n";
  program += "man(theme: socrates)\n";
  std::cout << program << "\n";

  lbn::KnowledgeBase kb = lbn::load_knowledge_base(program, lexicon);
  auto clauses = lbn::ground_kb(kb);
  for (const char* q : {"mortal(theme: socrates)", "man(theme: zeus)", "man(theme: socrates)"}) {
    lbn::Literal query = lbn::parse_literal(q, lexicon);
    lbn::FactorGraph graph = lbn::build_graph(clauses, kb.facts, query, lexicon);
    lbn::QueryResult r = lbn::answer_query(graph);
    std::cout << q << "  " << lbn::to_string(r.verdict) << " " << lbn::format_probability(r.probability)
              << "  (exact " << lbn::format_probability(lbn::exact_marginal(graph)) << ")\n";
  }
  return 0;
}
