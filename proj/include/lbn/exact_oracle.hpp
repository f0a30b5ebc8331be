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

// Exact inference by enumeration, used as the reference for BP.
//
// A proposition and its negation share one boolean atom. Groups are
// functions of their premises, so only atoms are enumerated; evidence atoms
// are fixed. The joint is the product of the noisy-OR CPTs of all supported
// propositions, and an unsupported atom carries a flat prior.

#pragma once

#include <cstdint>
#include <vector>

#include "lbn/belief_prop.hpp"
#include "lbn/error.hpp"
#include "lbn/factor_graph.hpp"
#include "lbn/grounding.hpp"

namespace lbn {

inline constexpr std::size_t kMaxOracleAtoms = 24;

namespace oracle {

// P(node = 1) given the truth values of its supporting groups.
inline double cpt_true(const std::vector<double>& weights, const std::vector<bool>& active) {
  double off = 1.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (active[i]) off *= 1.0 - weights[i];
  }
  return 1.0 - off;
}

struct Atoms {
  std::vector<std::size_t> atom_of;  // per node; groups unused
  std::vector<bool> negated;         // per node
  std::vector<std::optional<bool>> fixed;  // per atom
};

inline Atoms collect_atoms(const FactorGraph& g) {
  Atoms a;
  a.atom_of.assign(g.size(), SIZE_MAX);
  a.negated.assign(g.size(), false);
  for (std::uint32_t i = 0; i < g.size(); ++i) {
    NodeId id{i};
    if (!g.is_proposition(id) || a.atom_of[i] != SIZE_MAX) continue;
    const auto& p = g.proposition(id);
    std::size_t atom = a.fixed.size();
    a.fixed.emplace_back();
    a.atom_of[i] = atom;
    a.negated[i] = is_negation_key(p.key);
    if (p.evidence) a.fixed[atom] = *p.evidence != a.negated[i];
    if (p.partner) {
      std::uint32_t j = p.partner->value;
      a.atom_of[j] = atom;
      a.negated[j] = !a.negated[i];
      const auto& q = g.proposition(*p.partner);
      if (q.evidence) {
        bool v = *q.evidence != a.negated[j];
        if (a.fixed[atom] && *a.fixed[atom] != v) {
          throw Error(ErrorKind::InconsistentEvidence, "evidence on " + p.key + " contradicts its negation");
        }
        a.fixed[atom] = v;
      }
    }
  }
  return a;
}

}  // namespace oracle

// Exact P(node = 1) for every node, in node id order.
inline std::vector<double> exact_posteriors(const FactorGraph& g) {
  oracle::Atoms atoms = oracle::collect_atoms(g);
  std::vector<std::size_t> free_atoms;
  for (std::size_t a = 0; a < atoms.fixed.size(); ++a) {
    if (!atoms.fixed[a]) free_atoms.push_back(a);
  }
  if (free_atoms.size() > kMaxOracleAtoms) {
    throw Error(ErrorKind::TooLarge, std::to_string(free_atoms.size()) + " free atoms exceed the oracle limit of " +
                                         std::to_string(kMaxOracleAtoms));
  }

  const std::size_t n = g.size();
  std::vector<bool> atom_value(atoms.fixed.size());
  for (std::size_t a = 0; a < atoms.fixed.size(); ++a) atom_value[a] = atoms.fixed[a].value_or(false);

  std::vector<bool> value(n);
  std::vector<double> mass(n, 0.0);
  double total = 0.0;
  const std::uint64_t count = std::uint64_t{1} << free_atoms.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (std::size_t k = 0; k < free_atoms.size(); ++k) atom_value[free_atoms[k]] = (mask >> k) & 1U;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (g.is_proposition(NodeId{i})) value[i] = atom_value[atoms.atom_of[i]] != atoms.negated[i];
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      if (g.is_proposition(NodeId{i})) continue;
      bool all = true;
      for (auto p : g.group(NodeId{i}).premises) all = all && value[p.value];
      value[i] = all;
    }
    double w = 1.0;
    for (std::uint32_t i = 0; i < n && w > 0.0; ++i) {
      if (!g.is_proposition(NodeId{i})) continue;
      const auto& supporters = g.proposition(NodeId{i}).supporters;
      if (supporters.empty()) continue;
      std::vector<double> weights;
      std::vector<bool> active;
      for (const auto& s : supporters) {
        weights.push_back(s.weight);
        active.push_back(value[s.group.value]);
      }
      double p = oracle::cpt_true(weights, active);
      w *= value[i] ? p : 1.0 - p;
    }
    if (w == 0.0) continue;
    total += w;
    for (std::size_t i = 0; i < n; ++i) {
      if (value[i]) mass[i] += w;
    }
  }
  if (!(total > 0.0)) throw Error(ErrorKind::InconsistentEvidence, "evidence has probability zero");
  for (double& m : mass) m /= total;
  return mass;
}

inline double exact_posterior(const FactorGraph& g, NodeId target) { return exact_posteriors(g).at(target.value); }

inline double exact_marginal(const FactorGraph& g) { return exact_posterior(g, g.query()); }

inline Verdict oracle_verdict(const FactorGraph& g) { return classify(exact_marginal(g)); }

// Ground, build and enumerate: the full pipeline with exact inference.
inline Verdict oracle_verdict(const KnowledgeBase& kb, const Literal& query) {
  return oracle_verdict(build_graph(ground_kb(kb), kb.facts, query, kb.lexicon));
}

}  // namespace lbn
