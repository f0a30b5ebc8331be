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

// Pearl-style belief propagation over AND / noisy-OR / NEG factor graphs.
//
// Messages are pairs (value at false, value at true). Each node's belief is
// normalize(pi * lambda): pi is the message from the node's causal side
// (its OR factor for a proposition, its AND factor for a group, uniform for
// an unsupported proposition) and lambda the product of everything else.
//
// Schedule: nodes are ranked breadth first from the query, with evidence
// nodes acting as leaves. An iteration sends every message once, first
// toward the query (descending rank) and then away from it (ascending
// rank). On a graph that is singly connected once evidence nodes are cut
// the first iteration is already exact. A factor-to-node message whose
// update reverses the direction of its previous update is oscillating and is
// damped: m = d * m_old + (1 - d) * m_computed. Monotone updates are taken
// in full, so damping never delays a message that is already settling.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lbn/error.hpp"
#include "lbn/factor_graph.hpp"

namespace lbn {

using Message = std::array<double, 2>;  // {false, true}

inline constexpr Message kUniform{0.5, 0.5};

inline Message normalize(Message m) {
  double s = m[0] + m[1];
  if (!(s > 0.0) || !std::isfinite(s)) return kUniform;
  return {m[0] / s, m[1] / s};
}

inline Message clamp_message(bool value) { return value ? Message{0.0, 1.0} : Message{1.0, 0.0}; }

inline Message damp(const Message& old_value, const Message& computed, double damping) {
  return {damping * old_value[0] + (1.0 - damping) * computed[0],
          damping * old_value[1] + (1.0 - damping) * computed[1]};
}

struct WeightedSupport {
  double weight = 0.0;
  double probability = 0.0;  // P(group = 1)
};

// ---------------------------------------------------------------------------
// Factor kernels

// P(group) for a deterministic conjunction of independent premises.
inline double and_pi(std::span<const double> premise_pis) {
  if (premise_pis.empty()) throw Error(ErrorKind::EmptyPremises, "AND factor without premises");
  double p = 1.0;
  for (double x : premise_pis) p *= x;
  return p;
}

inline double noisy_or(std::span<const WeightedSupport> supporters) {
  if (supporters.empty()) throw Error(ErrorKind::EmptySupporters, "noisy-OR without supporters");
  double fail = 1.0;
  for (const auto& s : supporters) fail *= 1.0 - s.weight * s.probability;
  return 1.0 - fail;
}

// Message from an AND factor to one premise, given the group's lambda and
// the pi values of the other premises. Unnormalized.
inline Message and_lambda(const Message& lambda_group, std::span<const double> other_pis) {
  double others = 1.0;
  for (double x : other_pis) others *= x;
  return {lambda_group[0], lambda_group[1] * others + lambda_group[0] * (1.0 - others)};
}

// Message from a noisy-OR factor to supporter `index`: the node's lambda
// pushed through P(p | g_index = v) with the other supporters at their
// current pi. Unnormalized.
inline Message or_lambda(const Message& node_lambda, std::span<const WeightedSupport> supporters,
                         std::size_t index) {
  double rest = 1.0;
  for (std::size_t i = 0; i < supporters.size(); ++i) {
    if (i != index) rest *= 1.0 - supporters[i].weight * supporters[i].probability;
  }
  double on_if_active = 1.0 - (1.0 - supporters[index].weight) * rest;
  double on_if_idle = 1.0 - rest;
  auto through = [&](double p_on) { return node_lambda[1] * p_on + node_lambda[0] * (1.0 - p_on); };
  return {through(on_if_idle), through(on_if_active)};
}

// The NEG factor maps a message about x onto a message about not-x.
inline Message neg_exchange(const Message& m) { return {m[1], m[0]}; }

// ---------------------------------------------------------------------------
// Configuration and results

struct BpConfig {
  double damping = 0.5;
  double epsilon = 1e-6;
  int max_iterations = 20;

  void validate() const {
    if (!(damping >= 0.0 && damping < 1.0)) throw Error(ErrorKind::InvalidConfig, "damping must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidConfig, "epsilon must be positive");
    if (max_iterations < 1) throw Error(ErrorKind::InvalidConfig, "max_iterations must be at least 1");
  }
};

struct BeliefState {
  std::vector<Message> pi;
  std::vector<Message> lambda;
  std::vector<double> belief;  // P(node = 1)
  int iteration = 0;
  bool converged = false;
  std::vector<double> trace;  // max belief delta per iteration
};

enum class Verdict { yes, no, unknown };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    case Verdict::unknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<Verdict> verdict_from_string(std::string_view s) {
  if (s == "yes") return Verdict::yes;
  if (s == "no") return Verdict::no;
  if (s == "unknown") return Verdict::unknown;
  return std::nullopt;
}

inline Verdict classify(double p, double band = 1e-6) {
  if (std::abs(p - 0.5) <= band) return Verdict::unknown;
  return p > 0.5 ? Verdict::yes : Verdict::no;
}

struct QueryResult {
  double probability = 0.5;
  Verdict verdict = Verdict::unknown;
  int iterations_used = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Called after every iteration with the iteration number, the max belief
// delta and the current beliefs.
using BpObserver = std::function<void(int, double, std::span<const double>)>;

// ---------------------------------------------------------------------------
// Engine

namespace detail {

enum class FactorKind { And, Or, Neg };

struct Factor {
  FactorKind kind;
  std::vector<std::size_t> vars;     // AND: group, premises...; OR: node, groups...; NEG: pos, neg
  std::vector<double> weights;       // OR only, aligned with vars[1..]
  std::vector<std::size_t> edges;    // edge id per slot
};

struct Edge {
  std::size_t factor;
  std::size_t slot;
  std::size_t var;
};

class MessageGraph {
 public:
  explicit MessageGraph(const FactorGraph& g) : graph_(g), var_edges_(g.size()), clamp_(g.size()) {
    for (std::uint32_t i = 0; i < g.size(); ++i) {
      NodeId id{i};
      if (g.is_proposition(id)) {
        const auto& p = g.proposition(id);
        if (p.evidence) clamp_[i] = *p.evidence;
        if (!p.supporters.empty()) {
          Factor f{FactorKind::Or, {i}, {}, {}};
          for (const auto& s : p.supporters) {
            f.vars.push_back(s.group.value);
            f.weights.push_back(s.weight);
          }
          add_factor(std::move(f));
        }
      } else {
        Factor f{FactorKind::And, {i}, {}, {}};
        for (auto p : g.group(id).premises) f.vars.push_back(p.value);
        add_factor(std::move(f));
      }
    }
    for (const auto& n : g.neg_factors()) add_factor(Factor{FactorKind::Neg, {n.positive.value, n.negative.value}, {}, {}});
    v2f_.assign(edges_.size(), kUniform);
    f2v_.assign(edges_.size(), kUniform);
    last_step_.assign(edges_.size(), 0.0);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (clamp_[edges_[e].var]) v2f_[e] = clamp_message(*clamp_[edges_[e].var]);
    }
    build_schedule();
  }

  std::size_t var_count() const { return var_edges_.size(); }

  void sweep(double damping) {
    const std::size_t n = order_.size();
    for (std::size_t r = n; r-- > 0;) send_from(order_[r], damping, /*toward_root=*/true);
    for (std::size_t r = 0; r < n; ++r) send_from(order_[r], damping, /*toward_root=*/false);
  }

  Message belief(std::size_t v) const {
    if (clamp_[v]) return clamp_message(*clamp_[v]);
    Message m{1.0, 1.0};
    for (std::size_t e : var_edges_[v]) {
      m[0] *= f2v_[e][0];
      m[1] *= f2v_[e][1];
    }
    return normalize(m);
  }

  // Causal-side message: the OR factor of a proposition, the AND factor of
  // a group; uniform for unsupported propositions.
  Message pi(std::size_t v) const {
    if (clamp_[v]) return clamp_message(*clamp_[v]);
    for (std::size_t e : var_edges_[v]) {
      if (is_causal(e)) return normalize(f2v_[e]);
    }
    return kUniform;
  }

  Message lambda(std::size_t v) const {
    if (clamp_[v]) return clamp_message(*clamp_[v]);
    Message m{1.0, 1.0};
    for (std::size_t e : var_edges_[v]) {
      if (is_causal(e)) continue;
      m = normalize({m[0] * f2v_[e][0], m[1] * f2v_[e][1]});
    }
    return m;
  }

 private:
  bool is_causal(std::size_t e) const {
    const Factor& f = factors_[edges_[e].factor];
    return f.kind != FactorKind::Neg && edges_[e].slot == 0;
  }

  void add_factor(Factor f) {
    std::size_t fid = factors_.size();
    for (std::size_t slot = 0; slot < f.vars.size(); ++slot) {
      std::size_t e = edges_.size();
      edges_.push_back({fid, slot, f.vars[slot]});
      f.edges.push_back(e);
      var_edges_[f.vars[slot]].push_back(e);
    }
    factors_.push_back(std::move(f));
  }

  // Schedule nodes: variables are [0, V), factors [V, V + F).
  void build_schedule() {
    const std::size_t V = var_edges_.size();
    const std::size_t total = V + factors_.size();
    rank_.assign(total, SIZE_MAX);
    auto bfs = [&](std::size_t root) {
      std::deque<std::size_t> queue{root};
      rank_[root] = order_.size();
      order_.push_back(root);
      while (!queue.empty()) {
        std::size_t u = queue.front();
        queue.pop_front();
        if (u < V && clamp_[u] && u != root) continue;
        for (std::size_t w : neighbours(u)) {
          if (rank_[w] != SIZE_MAX) continue;
          rank_[w] = order_.size();
          order_.push_back(w);
          queue.push_back(w);
        }
      }
    };
    if (V > 0) bfs(graph_.query().value);
    for (std::size_t u = 0; u < total; ++u) {
      if (rank_[u] == SIZE_MAX && !(u < V && clamp_[u])) bfs(u);
    }
    for (std::size_t u = 0; u < total; ++u) {
      if (rank_[u] == SIZE_MAX) bfs(u);
    }
  }

  std::vector<std::size_t> neighbours(std::size_t u) const {
    const std::size_t V = var_edges_.size();
    std::vector<std::size_t> out;
    if (u < V) {
      for (std::size_t e : var_edges_[u]) out.push_back(V + edges_[e].factor);
    } else {
      for (std::size_t v : factors_[u - V].vars) out.push_back(v);
    }
    return out;
  }

  void send_from(std::size_t u, double damping, bool toward_root) {
    const std::size_t V = var_edges_.size();
    if (u < V) {
      for (std::size_t e : var_edges_[u]) {
        std::size_t target = V + edges_[e].factor;
        if ((rank_[target] < rank_[u]) == toward_root) v2f_[e] = var_to_factor(u, e);
      }
    } else {
      const Factor& f = factors_[u - V];
      for (std::size_t slot = 0; slot < f.vars.size(); ++slot) {
        if ((rank_[f.vars[slot]] < rank_[u]) != toward_root) continue;
        std::size_t e = f.edges[slot];
        Message computed = normalize(factor_to_var(f, slot));
        double step = computed[1] - f2v_[e][1];
        if (step * last_step_[e] < 0.0) computed = normalize(damp(f2v_[e], computed, damping));
        last_step_[e] = computed[1] - f2v_[e][1];
        f2v_[e] = computed;
      }
    }
  }

  Message var_to_factor(std::size_t v, std::size_t edge) const {
    if (clamp_[v]) return clamp_message(*clamp_[v]);
    Message m{1.0, 1.0};
    for (std::size_t e : var_edges_[v]) {
      if (e == edge) continue;
      m[0] *= f2v_[e][0];
      m[1] *= f2v_[e][1];
    }
    return normalize(m);
  }

  double incoming_pi(const Factor& f, std::size_t slot) const { return v2f_[f.edges[slot]][1]; }

  Message factor_to_var(const Factor& f, std::size_t slot) const {
    switch (f.kind) {
      case FactorKind::And: {
        if (slot == 0) {
          std::vector<double> pis;
          for (std::size_t s = 1; s < f.vars.size(); ++s) pis.push_back(incoming_pi(f, s));
          double p = and_pi(pis);
          return {1.0 - p, p};
        }
        std::vector<double> others;
        for (std::size_t s = 1; s < f.vars.size(); ++s) {
          if (s != slot) others.push_back(incoming_pi(f, s));
        }
        return and_lambda(v2f_[f.edges[0]], others);
      }
      case FactorKind::Or: {
        std::vector<WeightedSupport> supports;
        for (std::size_t s = 1; s < f.vars.size(); ++s) supports.push_back({f.weights[s - 1], incoming_pi(f, s)});
        if (slot == 0) {
          double p = noisy_or(supports);
          return {1.0 - p, p};
        }
        return or_lambda(v2f_[f.edges[0]], supports, slot - 1);
      }
      case FactorKind::Neg:
        return neg_exchange(v2f_[f.edges[1 - slot]]);
    }
    return kUniform;
  }

  const FactorGraph& graph_;
  std::vector<Factor> factors_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> var_edges_;
  std::vector<std::optional<bool>> clamp_;
  std::vector<Message> v2f_;
  std::vector<Message> f2v_;
  std::vector<double> last_step_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rank_;
};

}  // namespace detail

inline BeliefState run_bp(const FactorGraph& graph, const BpConfig& config = {},
                          const BpObserver& observer = {}) {
  config.validate();
  detail::MessageGraph messages(graph);
  const std::size_t n = messages.var_count();

  BeliefState state;
  state.belief.resize(n);
  for (std::size_t v = 0; v < n; ++v) state.belief[v] = messages.belief(v)[1];

  for (int it = 1; it <= config.max_iterations; ++it) {
    messages.sweep(config.damping);
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double b = messages.belief(v)[1];
      delta = std::max(delta, std::abs(b - state.belief[v]));
      state.belief[v] = b;
    }
    state.iteration = it;
    state.trace.push_back(delta);
    if (observer) observer(it, delta, state.belief);
    if (delta < config.epsilon) {
      state.converged = true;
      break;
    }
  }

  state.pi.resize(n);
  state.lambda.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    state.pi[v] = messages.pi(v);
    state.lambda[v] = messages.lambda(v);
  }
  return state;
}

inline QueryResult answer_query(const FactorGraph& graph, const BpConfig& config = {},
                                const BpObserver& observer = {}) {
  BeliefState state = run_bp(graph, config, observer);
  QueryResult r;
  r.probability = state.belief.at(graph.query().value);
  r.verdict = classify(r.probability);
  r.iterations_used = state.iteration;
  r.converged = state.converged;
  r.trace = std::move(state.trace);
  return r;
}

// True when the graph has no cycle after every evidence node is split into
// one private copy per incident factor. BP is exact on such graphs.
inline bool is_singly_connected(const FactorGraph& g) {
  std::vector<std::size_t> parent;
  auto make = [&]() {
    parent.push_back(parent.size());
    return parent.size() - 1;
  };
  std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::size_t> var(g.size());
  for (auto& v : var) v = make();
  auto is_evidence = [&](NodeId id) { return g.is_proposition(id) && g.proposition(id).evidence.has_value(); };
  bool cyclic = false;
  auto link = [&](std::size_t factor, NodeId v) {
    if (is_evidence(v)) return;  // a private leaf never closes a cycle
    std::size_t a = root(factor), b = root(var[v.value]);
    if (a == b) cyclic = true;
    parent[a] = b;
  };
  for (auto gid : g.and_factors()) {
    std::size_t f = make();
    link(f, gid);
    for (auto p : g.group(gid).premises) link(f, p);
  }
  for (auto pid : g.or_factors()) {
    std::size_t f = make();
    link(f, pid);
    for (const auto& s : g.proposition(pid).supporters) link(f, s.group);
  }
  for (const auto& n : g.neg_factors()) {
    std::size_t f = make();
    link(f, n.positive);
    link(f, n.negative);
  }
  return !cyclic;
}

}  // namespace lbn
