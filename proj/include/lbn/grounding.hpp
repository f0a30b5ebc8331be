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

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lbn/logic.hpp"

namespace lbn {

using Substitution = std::vector<std::pair<std::string, std::string>>;  // variable -> entity

struct GroundedClause {
  std::vector<Proposition> premises;
  Literal conclusion;
  double weight = 0.0;
  std::size_t source_rule = 0;
  Substitution substitution;
  friend bool operator==(const GroundedClause&, const GroundedClause&) = default;
};

inline Proposition substitute(const Proposition& p, const Substitution& sub) {
  Proposition out;
  out.predicate = p.predicate;
  out.args.reserve(p.args.size());
  for (const auto& [role, arg] : p.args) {
    if (arg.is_variable()) {
      auto it = std::find_if(sub.begin(), sub.end(),
                             [&](const auto& b) { return b.first == arg.variable_name(); });
      out.args.emplace_back(role, it == sub.end() ? arg : Argument::entity(it->second));
    } else if (arg.is_embedded()) {
      out.args.emplace_back(role, Argument::embedded(substitute(arg.proposition(), sub)));
    } else {
      out.args.emplace_back(role, arg);
    }
  }
  return out;
}

// One clause per element of the Cartesian product of the bound variables'
// entity sets. The first binding varies slowest; entities follow
// declaration order.
inline std::vector<GroundedClause> ground_rule(const QuantifiedRule& rule, const Lexicon& lexicon,
                                               std::size_t rule_index = 0) {
  std::vector<std::vector<const Entity*>> domains;
  domains.reserve(rule.bindings.size());
  for (const auto& b : rule.bindings) {
    domains.push_back(lexicon.entities_of_type(b.type));
    if (domains.back().empty()) return {};
  }

  std::vector<GroundedClause> out;
  std::vector<std::size_t> odometer(domains.size(), 0);
  while (true) {
    GroundedClause clause;
    clause.weight = rule.weight;
    clause.source_rule = rule_index;
    for (std::size_t i = 0; i < domains.size(); ++i) {
      clause.substitution.emplace_back(rule.bindings[i].variable, domains[i][odometer[i]]->id);
    }
    for (const auto& premise : rule.premises) {
      clause.premises.push_back(substitute(premise, clause.substitution));
    }
    clause.conclusion.proposition = substitute(rule.conclusion.proposition, clause.substitution);
    clause.conclusion.positive = rule.conclusion.positive;
    out.push_back(std::move(clause));

    std::size_t i = domains.size();
    while (i > 0) {
      --i;
      if (++odometer[i] < domains[i].size()) break;
      odometer[i] = 0;
      if (i == 0) return out;
    }
    if (domains.empty()) return out;
  }
}

inline std::vector<GroundedClause> ground_kb(const KnowledgeBase& kb) {
  std::vector<GroundedClause> out;
  for (std::size_t r = 0; r < kb.rules.size(); ++r) {
    auto clauses = ground_rule(kb.rules[r], kb.lexicon, r);
    out.insert(out.end(), std::make_move_iterator(clauses.begin()), std::make_move_iterator(clauses.end()));
  }
  return out;
}

// `.lbn`-style rendering used by --dump-grounding.
inline std::string serialize(const GroundedClause& c) {
  std::string out;
  for (std::size_t i = 0; i < c.premises.size(); ++i) {
    if (i) out += " & ";
    out += serialize(c.premises[i]);
  }
  out += " -> " + serialize(c.conclusion) + "   [weight=" + format_weight(c.weight) + "]";
  return out;
}

}  // namespace lbn
