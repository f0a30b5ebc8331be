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

// Coverage harness over a directory-per-category corpus.
//
//   <root>/<category>/<nn_name>/lexicon.lex   declarations and surface forms
//                               kb.lbn        facts and rules
//                               queries.txt   QUERY <literal> EXPECT <verdict>
//                               document.txt  English sentences (parse cases)
//                               gold.lbn      expected statements (parse cases)
//
// Cases are visited in path order, so reports are byte-for-byte repeatable.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "lbn/belief_prop.hpp"
#include "lbn/error.hpp"
#include "lbn/exact_oracle.hpp"
#include "lbn/factor_graph.hpp"
#include "lbn/grounding.hpp"
#include "lbn/logic.hpp"
#include "lbn/slot_grammar.hpp"

namespace lbn {

namespace fs = std::filesystem;

inline constexpr double kTreeTolerance = 1e-9;
inline constexpr double kLoopyTolerance = 0.05;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", p);
  return buf;
}

inline std::string format_delta(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", d);
  return buf;
}

// ---------------------------------------------------------------------------
// Single queries

struct Evaluation {
  FactorGraph graph;
  BeliefState state;
  QueryResult result;
};

inline Evaluation evaluate(const KnowledgeBase& kb, const std::vector<GroundedClause>& clauses, const Literal& query,
                           const BpConfig& config = {}, const BpObserver& observer = {}) {
  Evaluation ev{build_graph(clauses, kb.facts, query, kb.lexicon), {}, {}};
  ev.state = run_bp(ev.graph, config, observer);
  ev.result.probability = ev.state.belief.at(ev.graph.query().value);
  ev.result.verdict = classify(ev.result.probability);
  ev.result.iterations_used = ev.state.iteration;
  ev.result.converged = ev.state.converged;
  ev.result.trace = ev.state.trace;
  return ev;
}

// ---------------------------------------------------------------------------
// Case files

struct CaseQuery {
  std::string text;
  Literal literal;
  Verdict expected = Verdict::unknown;
};

struct InferenceCase {
  std::string name;  // <category>/<case>
  KnowledgeBase kb;
  std::vector<CaseQuery> queries;
};

struct ParseCase {
  std::string name;
  Lexicon lexicon;
  std::string document;
  std::vector<Statement> gold;
};

inline std::vector<CaseQuery> parse_queries(std::string_view text, const Lexicon& lexicon) {
  std::vector<CaseQuery> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
    auto expect = line.rfind(" EXPECT ");
    if (line.rfind("QUERY ", 0) != 0 || expect == std::string::npos) {
      throw Error(ErrorKind::SyntaxError, "expected 'QUERY <literal> EXPECT <verdict>'", number, 1);
    }
    CaseQuery q;
    q.text = line.substr(6, expect - 6);
    auto verdict = verdict_from_string(line.substr(expect + 8));
    if (!verdict) throw Error(ErrorKind::SyntaxError, "verdict must be yes, no or unknown", number, static_cast<int>(expect + 9));
    q.expected = *verdict;
    q.literal = parse_literal(q.text, lexicon);
    out.push_back(std::move(q));
  }
  return out;
}

inline InferenceCase load_inference_case(const fs::path& dir, std::string name) {
  InferenceCase c;
  c.name = std::move(name);
  Lexicon lexicon = load_lexicon(read_file(dir / "lexicon.lex"));
  c.kb = load_knowledge_base(read_file(dir / "kb.lbn"), lexicon);
  c.queries = parse_queries(read_file(dir / "queries.txt"), c.kb.lexicon);
  return c;
}

inline ParseCase load_parse_case(const fs::path& dir, std::string name) {
  ParseCase c;
  c.name = std::move(name);
  c.lexicon = load_lexicon(read_file(dir / "lexicon.lex"));
  c.document = read_file(dir / "document.txt");
  for (auto& st : parse_logic(read_file(dir / "gold.lbn"), c.lexicon)) {
    if (std::holds_alternative<Literal>(st) || std::holds_alternative<QuantifiedRule>(st)) c.gold.push_back(std::move(st));
  }
  return c;
}

// Case directories `<root>/<category>/<case>` holding `marker`, sorted.
inline std::vector<std::pair<fs::path, std::string>> discover_cases(const fs::path& root, std::string_view marker) {
  if (!fs::is_directory(root)) throw Error(ErrorKind::Io, root.string() + " is not a directory");
  std::vector<std::pair<fs::path, std::string>> out;
  for (const auto& category : fs::directory_iterator(root)) {
    if (!category.is_directory()) continue;
    for (const auto& dir : fs::directory_iterator(category.path())) {
      if (dir.is_directory() && fs::exists(dir.path() / marker)) {
        out.emplace_back(dir.path(), category.path().filename().string() + "/" + dir.path().filename().string());
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

// ---------------------------------------------------------------------------
// Reports

struct QueryReport {
  std::string query;
  Verdict expected = Verdict::unknown;
  double probability = 0.5;
  Verdict verdict = Verdict::unknown;
  int iterations = 0;
  bool converged = false;
  bool singly_connected = false;
  std::optional<double> oracle_probability;
  std::string error;
  bool pass = false;

  std::optional<Verdict> oracle_verdict() const {
    if (!oracle_probability) return std::nullopt;
    return classify(*oracle_probability);
  }
};

struct ParseStats {
  int sentences = 0;
  int parsed = 0;
  int gold = 0;
  int derived = 0;  // gold statements produced by the parser
  int facts = 0;
  int rules = 0;
  int ambiguous = 0;
  int extra = 0;
};

struct CaseReport {
  std::string name;
  bool pass = false;
  std::vector<std::string> diagnostics;
  std::vector<QueryReport> queries;
  ParseStats parse;
};

struct CoverageReport {
  enum class Kind { verify, parse };
  Kind kind = Kind::verify;
  bool with_oracle = false;
  std::vector<CaseReport> cases;

  int passed() const {
    return static_cast<int>(std::count_if(cases.begin(), cases.end(), [](const auto& c) { return c.pass; }));
  }
  bool ok() const { return passed() == static_cast<int>(cases.size()); }

  int categories() const {
    std::set<std::string> names;
    for (const auto& c : cases) names.insert(c.name.substr(0, c.name.find('/')));
    return static_cast<int>(names.size());
  }

  template <class F>
  int count_queries(F pred) const {
    int n = 0;
    for (const auto& c : cases) n += static_cast<int>(std::count_if(c.queries.begin(), c.queries.end(), pred));
    return n;
  }
  int query_count() const { return count_queries([](const auto&) { return true; }); }
  int queries_passed() const { return count_queries([](const auto& q) { return q.pass; }); }
  int oracle_agreements() const {
    return count_queries([](const QueryReport& q) { return q.oracle_verdict() && *q.oracle_verdict() == q.verdict; });
  }

  int max_iterations() const {
    int m = 0;
    for (const auto& c : cases) {
      for (const auto& q : c.queries) m = std::max(m, q.iterations);
    }
    return m;
  }

  // Largest |BP - oracle| over singly connected (true) or loopy graphs.
  double max_oracle_gap(bool singly_connected) const {
    double m = 0.0;
    for (const auto& c : cases) {
      for (const auto& q : c.queries) {
        if (q.oracle_probability && q.singly_connected == singly_connected) {
          m = std::max(m, std::abs(q.probability - *q.oracle_probability));
        }
      }
    }
    return m;
  }

  ParseStats parse_totals() const {
    ParseStats t;
    for (const auto& c : cases) {
      t.sentences += c.parse.sentences;
      t.parsed += c.parse.parsed;
      t.gold += c.parse.gold;
      t.derived += c.parse.derived;
      t.facts += c.parse.facts;
      t.rules += c.parse.rules;
      t.ambiguous += c.parse.ambiguous;
      t.extra += c.parse.extra;
    }
    return t;
  }
};

struct VerifyOptions {
  BpConfig config;
  bool with_oracle = false;
};

inline QueryReport check_query(const InferenceCase& c, const std::vector<GroundedClause>& clauses, const CaseQuery& q,
                               const VerifyOptions& options) {
  QueryReport r;
  r.query = q.text;
  r.expected = q.expected;
  try {
    Evaluation ev = evaluate(c.kb, clauses, q.literal, options.config);
    r.probability = ev.result.probability;
    r.verdict = ev.result.verdict;
    r.iterations = ev.result.iterations_used;
    r.converged = ev.result.converged;
    r.singly_connected = is_singly_connected(ev.graph);
    r.pass = r.converged && r.verdict == r.expected;
    if (options.with_oracle) {
      r.oracle_probability = exact_marginal(ev.graph);
      double tolerance = r.singly_connected ? kTreeTolerance : kLoopyTolerance;
      r.pass = r.pass && *r.oracle_verdict() == r.verdict && std::abs(r.probability - *r.oracle_probability) <= tolerance;
    }
  } catch (const Error& e) {
    r.error = e.what();
    r.pass = false;
  }
  return r;
}

inline CoverageReport verify_corpus(const fs::path& root, const VerifyOptions& options = {}) {
  options.config.validate();
  CoverageReport report;
  report.kind = CoverageReport::Kind::verify;
  report.with_oracle = options.with_oracle;
  for (const auto& [dir, name] : discover_cases(root, "queries.txt")) {
    CaseReport cr;
    cr.name = name;
    try {
      InferenceCase c = load_inference_case(dir, name);
      auto clauses = ground_kb(c.kb);
      for (const auto& q : c.queries) cr.queries.push_back(check_query(c, clauses, q, options));
      if (cr.queries.empty()) cr.diagnostics.push_back("no queries");
      cr.pass = !cr.queries.empty() &&
                std::all_of(cr.queries.begin(), cr.queries.end(), [](const auto& q) { return q.pass; });
      for (const auto& q : cr.queries) {
        if (!q.error.empty()) cr.diagnostics.push_back(q.query + ": " + q.error);
        else if (!q.converged) cr.diagnostics.push_back(q.query + ": no convergence in " + std::to_string(q.iterations) + " iterations");
      }
    } catch (const Error& e) {
      cr.diagnostics.push_back(e.what());
    }
    report.cases.push_back(std::move(cr));
  }
  return report;
}

inline CaseReport check_parse_case(const ParseCase& c) {
  CaseReport cr;
  cr.name = c.name;
  DocumentParse doc = parse_document(c.document, c.lexicon);
  ParseStats& s = cr.parse;
  s.sentences = static_cast<int>(doc.sentences.size());
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    const auto& o = doc.sentences[i].outcome;
    if (o.ok()) ++s.parsed;
    if (o.kind == ParseOutcome::Kind::ambiguous) ++s.ambiguous;
    if (!o.ok()) cr.diagnostics.push_back("sentence " + std::to_string(i + 1) + " \"" + doc.sentences[i].text + "\": " + o.diagnostics);
  }
  std::multiset<std::string> gold;
  for (const auto& st : c.gold) gold.insert(serialize(st));
  s.gold = static_cast<int>(gold.size());
  for (const auto& st : doc.statements) {
    if (std::holds_alternative<Literal>(st)) ++s.facts;
    else ++s.rules;
    std::string text = serialize(st);
    if (auto it = gold.find(text); it != gold.end()) {
      gold.erase(it);
      ++s.derived;
    } else {
      ++s.extra;
      cr.diagnostics.push_back("extra statement: " + text);
    }
  }
  for (const auto& missing : gold) cr.diagnostics.push_back("missing statement: " + missing);
  cr.pass = s.parsed == s.sentences && s.derived == s.gold && s.ambiguous == 0 && s.extra == 0;
  return cr;
}

inline CoverageReport parse_corpus(const fs::path& root) {
  CoverageReport report;
  report.kind = CoverageReport::Kind::parse;
  for (const auto& [dir, name] : discover_cases(root, "document.txt")) {
    try {
      report.cases.push_back(check_parse_case(load_parse_case(dir, name)));
    } catch (const Error& e) {
      CaseReport cr;
      cr.name = name;
      cr.diagnostics.push_back(e.what());
      report.cases.push_back(std::move(cr));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string render_text(const CoverageReport& r, bool timestamp = true) {
  std::ostringstream out;
  bool verify = r.kind == CoverageReport::Kind::verify;
  out << "lbn coverage " << (verify ? "verify" : "parse") << (r.with_oracle ? " --with-oracle" : "") << "\n";
  if (timestamp) out << "generated " << utc_timestamp() << "\n";
  for (const auto& c : r.cases) {
    out << (c.pass ? "PASS  " : "FAIL  ") << c.name;
    if (!verify) {
      const auto& s = c.parse;
      out << "  sentences " << s.parsed << "/" << s.sentences << "  gold " << s.derived << "/" << s.gold << "  facts "
          << s.facts << "  rules " << s.rules << "  ambiguous " << s.ambiguous << "  extra " << s.extra;
    }
    out << "\n";
    for (const auto& q : c.queries) {
      out << "      " << q.query << "  expect " << to_string(q.expected) << "  got " << to_string(q.verdict) << " "
          << format_probability(q.probability) << "  iterations " << q.iterations;
      if (q.oracle_probability) {
        out << "  oracle " << to_string(*q.oracle_verdict()) << " " << format_probability(*q.oracle_probability) << " "
            << (q.singly_connected ? "tree" : "loopy");
      }
      out << "\n";
    }
    for (const auto& d : c.diagnostics) out << "      ! " << d << "\n";
  }
  out << "\n";
  if (verify) {
    out << "categories " << r.categories() << "\n";
    out << "cases " << r.passed() << "/" << r.cases.size() << " pass\n";
    out << "queries " << r.queries_passed() << "/" << r.query_count() << " pass\n";
    out << "max iterations " << r.max_iterations() << "\n";
    if (r.with_oracle) {
      out << "oracle verdicts agree " << r.oracle_agreements() << "/" << r.query_count() << "\n";
      out << "max |bp - oracle| tree " << format_delta(r.max_oracle_gap(true)) << "  loopy "
          << format_delta(r.max_oracle_gap(false)) << "\n";
    }
  } else {
    ParseStats t = r.parse_totals();
    out << "cases " << r.passed() << "/" << r.cases.size() << " pass\n";
    out << "sentences parsed " << t.parsed << "/" << t.sentences << "\n";
    out << "gold statements derived " << t.derived << "/" << t.gold << "\n";
    out << "facts " << t.facts << "  rules " << t.rules << "\n";
    out << "ambiguous " << t.ambiguous << "  extra " << t.extra << "\n";
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const CoverageReport& r, bool timestamp = true) {
  using json = nlohmann::ordered_json;
  bool verify = r.kind == CoverageReport::Kind::verify;
  json out;
  out["command"] = verify ? "verify" : "parse";
  if (timestamp) out["generated"] = utc_timestamp();
  json cases = json::array();
  for (const auto& c : r.cases) {
    json jc;
    jc["name"] = c.name;
    jc["pass"] = c.pass;
    if (verify) {
      json qs = json::array();
      for (const auto& q : c.queries) {
        json jq;
        jq["query"] = q.query;
        jq["expected"] = to_string(q.expected);
        jq["verdict"] = to_string(q.verdict);
        jq["probability"] = q.probability;
        jq["iterations"] = q.iterations;
        jq["converged"] = q.converged;
        jq["singly_connected"] = q.singly_connected;
        if (q.oracle_probability) jq["oracle_probability"] = *q.oracle_probability;
        qs.push_back(std::move(jq));
      }
      jc["queries"] = std::move(qs);
    } else {
      const auto& s = c.parse;
      jc["sentences"] = s.sentences;
      jc["parsed"] = s.parsed;
      jc["gold"] = s.gold;
      jc["derived"] = s.derived;
      jc["facts"] = s.facts;
      jc["rules"] = s.rules;
      jc["ambiguous"] = s.ambiguous;
      jc["extra"] = s.extra;
    }
    jc["diagnostics"] = c.diagnostics;
    cases.push_back(std::move(jc));
  }
  out["cases"] = std::move(cases);
  json totals;
  totals["cases"] = r.cases.size();
  totals["passed"] = r.passed();
  if (verify) {
    totals["categories"] = r.categories();
    totals["queries"] = r.query_count();
    totals["queries_passed"] = r.queries_passed();
    totals["max_iterations"] = r.max_iterations();
    if (r.with_oracle) {
      totals["oracle_agreements"] = r.oracle_agreements();
      totals["max_gap_tree"] = r.max_oracle_gap(true);
      totals["max_gap_loopy"] = r.max_oracle_gap(false);
    }
  } else {
    ParseStats t = r.parse_totals();
    totals["sentences"] = t.sentences;
    totals["parsed"] = t.parsed;
    totals["gold"] = t.gold;
    totals["derived"] = t.derived;
    totals["facts"] = t.facts;
    totals["rules"] = t.rules;
    totals["ambiguous"] = t.ambiguous;
    totals["extra"] = t.extra;
  }
  out["totals"] = std::move(totals);
  return out;
}

}  // namespace lbn
