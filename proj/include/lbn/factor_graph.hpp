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

// Query-driven factor graph over proposition and group nodes.
//
// A group node is the conjunction of one grounded clause's premises (AND
// factor). A proposition with supporting groups carries a noisy-OR factor.
// Propositions whose negation is referenced get a partner node keyed
// `!<key>` linked by a NEG factor.

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "lbn/grounding.hpp"
#include "lbn/logic.hpp"

namespace lbn {

struct NodeId {
  std::uint32_t value = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

enum class NodeKind { proposition, group };

struct Supporter {
  NodeId group;
  double weight = 0.0;
};

struct PropositionNode {
  std::string key;
  std::optional<NodeId> partner;
  std::optional<bool> evidence;
  std::vector<Supporter> supporters;
};

struct GroupNode {
  std::vector<NodeId> premises;
  NodeId conclusion;
  double weight = 0.0;
  std::size_t clause = 0;
};

struct NegPair {
  NodeId positive;
  NodeId negative;
};

inline bool is_negation_key(std::string_view key) { return !key.empty() && key.front() == '!'; }

inline std::string negation_key(std::string_view key) {
  return is_negation_key(key) ? std::string(key.substr(1)) : "!" + std::string(key);
}

inline std::string literal_key(const Literal& l) {
  std::string key = canonical_key(l.proposition);
  return l.positive ? key : negation_key(key);
}

class FactorGraph {
 public:
  std::size_t size() const { return nodes_.size(); }
  NodeKind kind(NodeId id) const {
    return std::holds_alternative<PropositionNode>(nodes_.at(id.value)) ? NodeKind::proposition : NodeKind::group;
  }
  bool is_proposition(NodeId id) const { return kind(id) == NodeKind::proposition; }
  const PropositionNode& proposition(NodeId id) const { return std::get<PropositionNode>(nodes_.at(id.value)); }
  const GroupNode& group(NodeId id) const { return std::get<GroupNode>(nodes_.at(id.value)); }

  std::optional<NodeId> find(std::string_view key) const {
    auto it = index_.find(std::string(key));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  NodeId query() const { return query_; }
  const std::vector<NegPair>& neg_factors() const { return neg_; }

  std::vector<NodeId> and_factors() const {
    std::vector<NodeId> out;
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      if (!is_proposition(NodeId{i})) out.push_back(NodeId{i});
    }
    return out;
  }

  std::vector<NodeId> or_factors() const {
    std::vector<NodeId> out;
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      if (is_proposition(NodeId{i}) && !proposition(NodeId{i}).supporters.empty()) out.push_back(NodeId{i});
    }
    return out;
  }

  std::size_t proposition_count() const {
    std::size_t n = 0;
    for (const auto& node : nodes_) n += std::holds_alternative<PropositionNode>(node);
    return n;
  }
  std::size_t group_count() const { return nodes_.size() - proposition_count(); }
  std::size_t evidence_count() const {
    std::size_t n = 0;
    for (const auto& node : nodes_) {
      if (auto* p = std::get_if<PropositionNode>(&node)) n += p->evidence.has_value();
    }
    return n;
  }

 private:
  friend class GraphBuilder;
  std::vector<std::variant<PropositionNode, GroupNode>> nodes_;
  std::map<std::string, NodeId> index_;
  std::vector<NegPair> neg_;
  NodeId query_;
};

// Bidirectional expansion from the query:
//  - every node pulls in all clauses concluding it (backward, depth first in
//    clause order);
//  - a forward worklist then pulls in every clause using a graph node as a
//    premise, with its conclusion and remaining premises;
//  - the two alternate until no clause touching the graph is missing;
//  - instances whose conclusion is also one of their premises are skipped.
// The result is the query's connected component of the grounded clause
// hypergraph, with NEG partners wherever a negation is referenced.
class GraphBuilder {
 public:
  GraphBuilder(const std::vector<GroundedClause>& clauses, const std::vector<Literal>& facts)
      : clauses_(clauses) {
    for (std::size_t c = 0; c < clauses.size(); ++c) {
      if (self_supporting(clauses[c])) continue;
      concluding_[literal_key(clauses[c].conclusion)].push_back(c);
      if (!clauses[c].conclusion.positive) negated_.insert(canonical_key(clauses[c].conclusion.proposition));
      std::set<std::string> seen;
      for (const auto& p : clauses[c].premises) {
        auto key = canonical_key(p);
        if (seen.insert(key).second) using_[key].push_back(c);
      }
    }
    for (const auto& f : facts) {
      std::string key = canonical_key(f.proposition);
      set_evidence(key, f.positive);
      set_evidence(negation_key(key), !f.positive);
      if (!f.positive) negated_.insert(key);
    }
  }

  FactorGraph build(const Literal& query) {
    std::string key = literal_key(query);
    if (!query.positive) negated_.insert(canonical_key(query.proposition));
    graph_.query_ = ensure(key);
    for (std::size_t i = 0; i < graph_.nodes_.size(); ++i) {
      if (!graph_.is_proposition(NodeId{static_cast<std::uint32_t>(i)})) continue;
      std::string node_key = graph_.proposition(NodeId{static_cast<std::uint32_t>(i)}).key;
      if (is_negation_key(node_key)) continue;
      auto it = using_.find(node_key);
      if (it == using_.end()) continue;
      for (std::size_t c : it->second) add_clause(c);
    }
    return std::move(graph_);
  }

 private:
  // `p & q -> p` carries no information and would make p its own cause.
  static bool self_supporting(const GroundedClause& c) {
    if (!c.conclusion.positive) return false;
    return std::any_of(c.premises.begin(), c.premises.end(),
                       [&](const Proposition& p) { return p == c.conclusion.proposition; });
  }

  void set_evidence(const std::string& key, bool value) {
    auto [it, inserted] = evidence_.emplace(key, value);
    if (!inserted && it->second != value) {
      throw Error(ErrorKind::InconsistentEvidence, "facts assert both " + key + " and its negation");
    }
  }

  NodeId ensure(const std::string& key) {
    if (auto found = graph_.find(key)) return *found;
    NodeId id{static_cast<std::uint32_t>(graph_.nodes_.size())};
    PropositionNode node;
    node.key = key;
    if (auto it = evidence_.find(key); it != evidence_.end()) node.evidence = it->second;
    graph_.nodes_.emplace_back(std::move(node));
    graph_.index_.emplace(key, id);

    std::string positive = is_negation_key(key) ? negation_key(key) : key;
    if (negated_.count(positive)) {
      NodeId partner = ensure(negation_key(key));
      auto& self = std::get<PropositionNode>(graph_.nodes_[id.value]);
      if (!self.partner) {
        self.partner = partner;
        std::get<PropositionNode>(graph_.nodes_[partner.value]).partner = id;
        graph_.neg_.push_back(is_negation_key(key) ? NegPair{partner, id} : NegPair{id, partner});
      }
    }

    if (auto it = concluding_.find(key); it != concluding_.end()) {
      for (std::size_t c : it->second) add_clause(c);
    }
    return id;
  }

  void add_clause(std::size_t c) {
    if (!added_.insert(c).second) return;
    const GroundedClause& clause = clauses_[c];
    NodeId conclusion = ensure(literal_key(clause.conclusion));
    NodeId gid{static_cast<std::uint32_t>(graph_.nodes_.size())};
    GroupNode group;
    group.conclusion = conclusion;
    group.weight = clause.weight;
    group.clause = c;
    graph_.nodes_.emplace_back(std::move(group));
    std::get<PropositionNode>(graph_.nodes_[conclusion.value]).supporters.push_back({gid, clause.weight});
    for (const auto& premise : clause.premises) {
      NodeId pid = ensure(canonical_key(premise));
      auto& premises = std::get<GroupNode>(graph_.nodes_[gid.value]).premises;
      if (std::find(premises.begin(), premises.end(), pid) == premises.end()) premises.push_back(pid);
    }
  }

  const std::vector<GroundedClause>& clauses_;
  std::map<std::string, std::vector<std::size_t>> concluding_;
  std::map<std::string, std::vector<std::size_t>> using_;
  std::set<std::string> negated_;
  std::map<std::string, bool> evidence_;
  std::set<std::size_t> added_;
  FactorGraph graph_;
};

namespace detail {

inline void check_declared(const Proposition& p, const Lexicon& lexicon) {
  if (!lexicon.find_predicate(p.predicate)) {
    throw Error(ErrorKind::QueryUndeclared, "query predicate '" + p.predicate + "' is not declared");
  }
  try {
    validate_ground(p, lexicon);
  } catch (const Error& e) {
    throw Error(ErrorKind::QueryUndeclared, e.what());
  }
}

}  // namespace detail

inline FactorGraph build_graph(const std::vector<GroundedClause>& clauses, const std::vector<Literal>& facts,
                               const Literal& query) {
  GraphBuilder builder(clauses, facts);
  return builder.build(query);
}

// As above, additionally rejecting queries that the lexicon does not declare.
inline FactorGraph build_graph(const std::vector<GroundedClause>& clauses, const std::vector<Literal>& facts,
                               const Literal& query, const Lexicon& lexicon) {
  detail::check_declared(query.proposition, lexicon);
  return build_graph(clauses, facts, query);
}

// One line per node and factor in id order; stable across runs.
inline std::string dump_graph(const FactorGraph& g) {
  std::ostringstream out;
  for (std::uint32_t i = 0; i < g.size(); ++i) {
    NodeId id{i};
    if (g.is_proposition(id)) {
      const auto& p = g.proposition(id);
      out << "node " << i << " prop " << p.key;
      out << " evidence=" << (p.evidence ? (*p.evidence ? "true" : "false") : "none");
      if (p.partner) out << " partner=" << p.partner->value;
      out << "\n";
    } else {
      const auto& grp = g.group(id);
      out << "node " << i << " group clause=" << grp.clause << " -> " << grp.conclusion.value << "\n";
    }
  }
  for (auto id : g.and_factors()) {
    out << "factor and " << id.value << " <-";
    for (auto p : g.group(id).premises) out << " " << p.value;
    out << "\n";
  }
  for (auto id : g.or_factors()) {
    out << "factor or " << id.value << " <-";
    for (const auto& s : g.proposition(id).supporters) out << " " << s.group.value << ":" << format_weight(s.weight);
    out << "\n";
  }
  for (const auto& n : g.neg_factors()) {
    out << "factor neg " << n.positive.value << " " << n.negative.value << "\n";
  }
  out << "query " << g.query().value << "\n";
  return out.str();
}

}  // namespace lbn
