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

// lbn: query, parse and coverage commands.
//
// Exit codes: 0 success, 1 a coverage case failed, 2 usage or input error.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lbn/lbn.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

lbn::BpConfig config_from_env() {
  lbn::BpConfig config;
  if (const char* env = std::getenv("LBN_MAX_ITERS"); env && *env) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 1000000) {
      throw lbn::Error(lbn::ErrorKind::InvalidConfig, std::string("LBN_MAX_ITERS must be a positive integer, got '") + env + "'");
    }
    config.max_iterations = static_cast<int>(n);
  }
  return config;
}

struct QueryArgs {
  std::string kb;
  std::string lexicon;
  std::string query;
  bool oracle = false;
  bool trace = false;
  bool dump_graph = false;
  bool dump_grounding = false;
};

int run_query(const QueryArgs& a) {
  lbn::Lexicon lexicon = lbn::load_lexicon(lbn::read_file(a.lexicon));
  lbn::KnowledgeBase kb = lbn::load_knowledge_base(lbn::read_file(a.kb), lexicon);
  lbn::Literal query = lbn::parse_literal(a.query, kb.lexicon);
  auto clauses = lbn::ground_kb(kb);
  if (a.dump_grounding) {
    for (const auto& c : clauses) std::cout << lbn::serialize(c) << "\n";
  }
  lbn::FactorGraph graph = lbn::build_graph(clauses, kb.facts, query, kb.lexicon);
  if (a.dump_graph) std::cout << lbn::dump_graph(graph);

  if (a.oracle) {
    double p = lbn::exact_marginal(graph);
    std::cout << lbn::to_string(lbn::classify(p)) << " " << lbn::format_probability(p) << "\n";
    std::cout << "engine exact\n";
    return kOk;
  }

  lbn::BpObserver observer;
  if (a.trace) {
    observer = [&graph](int it, double delta, std::span<const double> beliefs) {
      std::cout << "iteration " << it << " delta " << lbn::format_delta(delta) << "\n";
      for (std::uint32_t i = 0; i < beliefs.size(); ++i) {
        lbn::NodeId id{i};
        std::cout << "  " << i << " "
                  << (graph.is_proposition(id) ? graph.proposition(id).key
                                               : "group " + std::to_string(graph.group(id).clause))
                  << " " << lbn::format_probability(beliefs[i]) << "\n";
      }
    };
  }
  lbn::QueryResult r = lbn::answer_query(graph, config_from_env(), observer);
  std::cout << lbn::to_string(r.verdict) << " " << lbn::format_probability(r.probability) << "\n";
  std::cout << "iterations " << r.iterations_used << (r.converged ? " converged" : " not converged") << "\n";
  return kOk;
}

int run_parse(const std::string& doc_path, const std::string& lexicon_path) {
  lbn::Lexicon lexicon = lbn::load_lexicon(lbn::read_file(lexicon_path));
  lbn::DocumentParse doc = lbn::parse_document(lbn::read_file(doc_path), lexicon);
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    const auto& s = doc.sentences[i];
    if (s.outcome.ok()) {
      std::cout << lbn::serialize(s.outcome.statement()) << "\n";
    } else {
      std::cerr << "sentence " << i + 1 << " \"" << s.text << "\": " << s.outcome.diagnostics << "\n";
    }
  }
  return doc.ok() ? kOk : kUsage;
}

int emit(const lbn::CoverageReport& report, bool json, bool timestamp) {
  if (json) {
    std::cout << lbn::to_json(report, timestamp).dump(2) << "\n";
  } else {
    std::cout << lbn::render_text(report, timestamp);
  }
  return report.ok() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logical Bayesian Network toolkit"};
  app.require_subcommand(1);

  QueryArgs qa;
  auto* query = app.add_subcommand("query", "Answer a query against a knowledge base");
  query->add_option("--kb", qa.kb, "Knowledge base (.lbn)")->required()->check(CLI::ExistingFile);
  query->add_option("--lexicon", qa.lexicon, "Lexicon (.lex)")->required()->check(CLI::ExistingFile);
  query->add_option("--query", qa.query, "Ground literal, e.g. \"mortal(theme: socrates)\"")->required();
  query->add_flag("--oracle", qa.oracle, "Use exact enumeration instead of belief propagation");
  query->add_flag("--trace", qa.trace, "Print per-iteration deltas and beliefs");
  query->add_flag("--dump-graph", qa.dump_graph, "Print the factor graph");
  query->add_flag("--dump-grounding", qa.dump_grounding, "Print the grounded clauses");

  std::string doc_path, lexicon_path;
  auto* parse = app.add_subcommand("parse", "Compile an English document to statements");
  parse->add_option("--doc", doc_path, "Document (.txt)")->required()->check(CLI::ExistingFile);
  parse->add_option("--lexicon", lexicon_path, "Lexicon (.lex)")->required()->check(CLI::ExistingFile);

  auto* coverage = app.add_subcommand("coverage", "Run a corpus");
  coverage->require_subcommand(1);
  std::string root;
  bool with_oracle = false, json = false, no_timestamp = false;
  auto* verify = coverage->add_subcommand("verify", "Inference corpus");
  verify->add_option("root", root, "Corpus root")->required();
  verify->add_flag("--with-oracle", with_oracle, "Cross-check every verdict by exact enumeration");
  auto* cparse = coverage->add_subcommand("parse", "Grammar corpus");
  cparse->add_option("root", root, "Corpus root")->required();
  for (auto* sub : {verify, cparse}) {
    sub->add_flag("--json", json, "Machine-readable report");
    sub->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*query) return run_query(qa);
    if (*parse) return run_parse(doc_path, lexicon_path);
    if (*verify) {
      lbn::VerifyOptions options;
      options.config = config_from_env();
      options.with_oracle = with_oracle;
      return emit(lbn::verify_corpus(root, options), json, !no_timestamp);
    }
    if (*cparse) return emit(lbn::parse_corpus(root), json, !no_timestamp);
  } catch (const lbn::Error& e) {
    std::cerr << "lbn: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
