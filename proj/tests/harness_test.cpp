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

#include <unistd.h>

#include <fstream>

#include "test_util.hpp"

namespace lbn {
namespace {

namespace fs = std::filesystem;

fs::path corpus(std::string_view sub) { return fs::path(lbn::testing::corpus_dir()) / sub; }

// A scratch copy of part of the corpus, removed on destruction.
class ScratchCorpus {
 public:
  explicit ScratchCorpus(std::string_view tag)
      : root_(fs::temp_directory_path() / ("lbn_" + std::string(tag) + "_" + std::to_string(::getpid()))) {
    fs::remove_all(root_);
  }
  ~ScratchCorpus() { fs::remove_all(root_); }
  const fs::path& root() const { return root_; }

  fs::path copy(const fs::path& from, std::string_view name) {
    fs::path to = root_ / name;
    fs::create_directories(to);
    fs::copy(from, to, fs::copy_options::recursive);
    return to;
  }

 private:
  fs::path root_;
};

void write(const fs::path& path, std::string_view text) {
  std::ofstream(path, std::ios::binary) << text;
}

TEST(ParseQueries, Lines) {
  Lexicon lex = load_lexicon(lbn::testing::kManMortalLexicon);
  auto qs = parse_queries("# comment\n\nQUERY man(theme: zeus) EXPECT no\n  QUERY not mortal(theme: zeus) EXPECT unknown\n",
                          lex);
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_EQ(qs[0].text, "man(theme: zeus)");
  EXPECT_EQ(qs[0].expected, Verdict::no);
  EXPECT_FALSE(qs[1].literal.positive);
  EXPECT_EQ(qs[1].expected, Verdict::unknown);
}

TEST(ParseQueries, Errors) {
  Lexicon lex = load_lexicon(lbn::testing::kManMortalLexicon);
  for (std::string_view bad : {"man(theme: zeus) EXPECT no", "QUERY man(theme: zeus) EXPECT maybe",
                               "QUERY man(theme: zeus)"}) {
    try {
      parse_queries(bad, lex);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::SyntaxError);
      EXPECT_EQ(e.line(), 1);
    }
  }
}

TEST(Verify, FullCorpus) {
  auto report = verify_corpus(corpus("inference"), {BpConfig{}, true});
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.cases.size(), 44u);
  EXPECT_GE(report.categories(), 22);
  EXPECT_EQ(report.oracle_agreements(), report.query_count());
  EXPECT_LE(report.max_iterations(), 20);
  EXPECT_LE(report.max_oracle_gap(true), kTreeTolerance);
  EXPECT_LE(report.max_oracle_gap(false), kLoopyTolerance);
}

TEST(Verify, FlippedExpectationFails) {
  ScratchCorpus scratch("flip");
  fs::path dir = scratch.copy(corpus("inference/contrapositive/01_not_mortal"), "contrapositive/01_not_mortal");
  write(dir / "queries.txt", "QUERY man(theme: zeus) EXPECT yes\n");
  auto report = verify_corpus(scratch.root());
  ASSERT_EQ(report.cases.size(), 1u);
  EXPECT_FALSE(report.ok());
  EXPECT_EQ(report.cases[0].queries.at(0).verdict, Verdict::no);
  EXPECT_NE(render_text(report, false).find("FAIL"), std::string::npos);
}

TEST(Verify, BrokenCaseIsReportedNotThrown) {
  ScratchCorpus scratch("broken");
  fs::path dir = scratch.copy(corpus("inference/contrapositive/01_not_mortal"), "contrapositive/01_not_mortal");
  write(dir / "kb.lbn", "always [x:e]: man(theme: x) -> \n");
  auto report = verify_corpus(scratch.root());
  ASSERT_EQ(report.cases.size(), 1u);
  EXPECT_FALSE(report.cases[0].pass);
  ASSERT_FALSE(report.cases[0].diagnostics.empty());
  EXPECT_NE(report.cases[0].diagnostics[0].find("SyntaxError"), std::string::npos);
}

TEST(Verify, MissingRoot) {
  try {
    verify_corpus(corpus("does_not_exist"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(Parse, FullCorpus) {
  auto report = parse_corpus(corpus("parse"));
  EXPECT_TRUE(report.ok());
  auto t = report.parse_totals();
  EXPECT_EQ(t.sentences, t.parsed);
  EXPECT_EQ(t.gold, t.derived);
  EXPECT_EQ(t.ambiguous, 0);
  EXPECT_EQ(t.extra, 0);
}

TEST(Parse, ExtraGoldLineIsMissing) {
  ScratchCorpus scratch("gold");
  fs::path dir = scratch.copy(corpus("parse/contrapositive/01_not_mortal"), "contrapositive/01_not_mortal");
  write(dir / "gold.lbn", read_file(dir / "gold.lbn") + "man(theme: zeus)\n");
  auto report = parse_corpus(scratch.root());
  ASSERT_EQ(report.cases.size(), 1u);
  EXPECT_FALSE(report.ok());
  const auto& d = report.cases[0].diagnostics;
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0], "missing statement: man(theme: zeus)");
}

TEST(Parse, DuplicateSentenceIsExtra) {
  ScratchCorpus scratch("dup");
  fs::path dir = scratch.copy(corpus("parse/contrapositive/01_not_mortal"), "contrapositive/01_not_mortal");
  write(dir / "document.txt", read_file(dir / "document.txt") + " Zeus is not mortal.\n");
  auto report = parse_corpus(scratch.root());
  EXPECT_EQ(report.parse_totals().extra, 1);
  EXPECT_FALSE(report.ok());
}

TEST(Render, DeterministicWithoutTimestamp) {
  auto a = verify_corpus(corpus("inference"));
  auto b = verify_corpus(corpus("inference"));
  EXPECT_EQ(render_text(a, false), render_text(b, false));
  EXPECT_EQ(to_json(a, false).dump(), to_json(b, false).dump());
  EXPECT_EQ(render_text(a, false).find("generated"), std::string::npos);
}

TEST(Format, Numbers) {
  EXPECT_EQ(format_probability(0.99), "0.9900");
  EXPECT_EQ(format_probability(0.5), "0.5000");
  EXPECT_EQ(format_delta(1.5e-7), "1.50e-07");
}

}  // namespace
}  // namespace lbn
