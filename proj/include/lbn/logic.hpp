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

// Typed logical language: entities, role-labeled predicates, propositions
// (with sentential arguments), facts, quantified rules and the lexicon.
// Concrete syntax is line oriented:
//
//   type place
//   entity socrates : e
//     "Greek philosopher"
//   predicate should {content: s}
//   surface noun "men" -> man
//   trust(agent: jack, patient: jill)
//   not mortal(theme: zeus)
//   always [x:e]: man(theme: x) -> mortal(theme: x)
//   usually [x:e, y:e]: a(theme: x) & b(agent: x, patient: y) -> c(theme: y) [weight=0.8]

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lbn/error.hpp"

namespace lbn {

inline constexpr std::string_view kEntityType = "e";
inline constexpr std::string_view kSententialType = "s";
inline constexpr int kMaxEmbeddingDepth = 4;

inline bool is_identifier(std::string_view s) {
  if (s.empty() || s.front() < 'a' || s.front() > 'z') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

// ---------------------------------------------------------------------------
// Propositions

struct Proposition;

struct EntityRef {
  std::string id;
  friend bool operator==(const EntityRef&, const EntityRef&) = default;
};

struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

// A role filler. Embedded propositions are shared immutable values.
struct Argument {
  std::variant<EntityRef, Variable, std::shared_ptr<const Proposition>> value;

  static Argument entity(std::string id) { return {EntityRef{std::move(id)}}; }
  static Argument variable(std::string name) { return {Variable{std::move(name)}}; }
  static Argument embedded(Proposition p);

  bool is_entity() const { return std::holds_alternative<EntityRef>(value); }
  bool is_variable() const { return std::holds_alternative<Variable>(value); }
  bool is_embedded() const {
    return std::holds_alternative<std::shared_ptr<const Proposition>>(value);
  }
  const std::string& entity_id() const { return std::get<EntityRef>(value).id; }
  const std::string& variable_name() const { return std::get<Variable>(value).name; }
  const Proposition& proposition() const {
    return *std::get<std::shared_ptr<const Proposition>>(value);
  }
};

// Arguments are kept in the predicate's declared role order.
struct Proposition {
  std::string predicate;
  std::vector<std::pair<std::string, Argument>> args;

  const Argument* find(std::string_view role) const {
    for (const auto& [name, arg] : args) {
      if (name == role) return &arg;
    }
    return nullptr;
  }
};

inline Argument Argument::embedded(Proposition p) {
  return {std::make_shared<const Proposition>(std::move(p))};
}

bool operator==(const Proposition& a, const Proposition& b);

inline bool operator==(const Argument& a, const Argument& b) {
  if (a.value.index() != b.value.index()) return false;
  if (a.is_entity()) return a.entity_id() == b.entity_id();
  if (a.is_variable()) return a.variable_name() == b.variable_name();
  return a.proposition() == b.proposition();
}

inline bool operator==(const Proposition& a, const Proposition& b) {
  return a.predicate == b.predicate && a.args == b.args;
}

struct Literal {
  Proposition proposition;
  bool positive = true;
  friend bool operator==(const Literal&, const Literal&) = default;
};

// ---------------------------------------------------------------------------
// Rules

enum class Quantifier { always, usually, sometimes, never };

inline std::string_view to_string(Quantifier q) {
  switch (q) {
    case Quantifier::always: return "always";
    case Quantifier::usually: return "usually";
    case Quantifier::sometimes: return "sometimes";
    case Quantifier::never: return "never";
  }
  return "always";
}

inline std::optional<Quantifier> quantifier_from_string(std::string_view word) {
  if (word == "always") return Quantifier::always;
  if (word == "usually") return Quantifier::usually;
  if (word == "sometimes") return Quantifier::sometimes;
  if (word == "never") return Quantifier::never;
  return std::nullopt;
}

// `never` carries the weight of `always`; the parser flips the polarity of
// the conclusion instead.
inline double quantifier_weight(Quantifier q) {
  switch (q) {
    case Quantifier::always: return 0.99;
    case Quantifier::usually: return 0.9;
    case Quantifier::sometimes: return 0.5;
    case Quantifier::never: return 0.99;
  }
  return 0.99;
}

inline double quantifier_weight(std::string_view word) {
  auto q = quantifier_from_string(word);
  if (!q) throw Error(ErrorKind::UnknownQuantifier, "unknown quantifier '" + std::string(word) + "'");
  return quantifier_weight(*q);
}

inline bool flips_conclusion(Quantifier q) { return q == Quantifier::never; }

struct Binding {
  std::string variable;
  std::string type;
  friend bool operator==(const Binding&, const Binding&) = default;
};

// The conclusion is stored with its effective polarity: for `never` rules
// it is the negation of what the source text writes.
struct QuantifiedRule {
  Quantifier quantifier = Quantifier::always;
  std::vector<Binding> bindings;
  std::vector<Proposition> premises;
  Literal conclusion;
  double weight = 0.99;
  friend bool operator==(const QuantifiedRule&, const QuantifiedRule&) = default;
};

// ---------------------------------------------------------------------------
// Declarations

struct TypeDecl {
  std::string name;
  friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

struct Entity {
  std::string id;
  std::string type{kEntityType};
  std::string description;
  friend bool operator==(const Entity&, const Entity&) = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<std::pair<std::string, std::string>> roles;  // role -> type
  std::string description;

  const std::string* role_type(std::string_view role) const {
    for (const auto& [r, t] : roles) {
      if (r == role) return &t;
    }
    return nullptr;
  }
  friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

enum class Category {
  EntityName,
  CommonNoun,
  Adjective,
  TransitiveVerb,
  IntransitiveVerb,
  RelationalNoun,
  Quantword,
  NegationWord,
  FunctionWord,
};

inline std::string_view to_string(Category c) {
  switch (c) {
    case Category::EntityName: return "EntityName";
    case Category::CommonNoun: return "CommonNoun";
    case Category::Adjective: return "Adjective";
    case Category::TransitiveVerb: return "TransitiveVerb";
    case Category::IntransitiveVerb: return "IntransitiveVerb";
    case Category::RelationalNoun: return "RelationalNoun";
    case Category::Quantword: return "Quantword";
    case Category::NegationWord: return "NegationWord";
    case Category::FunctionWord: return "FunctionWord";
  }
  return "FunctionWord";
}

// Keyword used for a category in `surface` lines.
inline std::string_view surface_keyword(Category c) {
  switch (c) {
    case Category::EntityName: return "entity";
    case Category::CommonNoun: return "noun";
    case Category::Adjective: return "adjective";
    case Category::TransitiveVerb: return "transitive";
    case Category::IntransitiveVerb: return "intransitive";
    case Category::RelationalNoun: return "relational";
    case Category::Quantword: return "quantword";
    case Category::NegationWord: return "negation";
    case Category::FunctionWord: return "function";
  }
  return "function";
}

inline std::optional<Category> category_from_keyword(std::string_view word) {
  for (auto c : {Category::EntityName, Category::CommonNoun, Category::Adjective,
                 Category::TransitiveVerb, Category::IntransitiveVerb, Category::RelationalNoun,
                 Category::Quantword, Category::NegationWord, Category::FunctionWord}) {
    if (surface_keyword(c) == word) return c;
  }
  return std::nullopt;
}

// Maps a (lower-case, single-space separated) phrase to a lexicon entry.
// Function-like categories have an empty target.
struct SurfaceForm {
  std::string phrase;
  Category category = Category::FunctionWord;
  std::string target;
  friend bool operator==(const SurfaceForm&, const SurfaceForm&) = default;
};

using Statement = std::variant<TypeDecl, Entity, PredicateDecl, SurfaceForm, Literal, QuantifiedRule>;

// ---------------------------------------------------------------------------
// Lexicon

class Lexicon {
 public:
  Lexicon() { types_.insert(std::string(kEntityType)); }

  const std::set<std::string>& types() const { return types_; }
  const std::vector<Entity>& entities() const { return entities_; }
  const std::vector<PredicateDecl>& predicates() const { return predicates_; }
  const std::map<std::string, SurfaceForm>& surface_forms() const { return surface_; }

  bool has_type(std::string_view t) const { return types_.count(std::string(t)) > 0; }

  const Entity* find_entity(std::string_view id) const {
    auto it = entity_index_.find(std::string(id));
    return it == entity_index_.end() ? nullptr : &entities_[it->second];
  }

  const PredicateDecl* find_predicate(std::string_view name) const {
    auto it = predicate_index_.find(std::string(name));
    return it == predicate_index_.end() ? nullptr : &predicates_[it->second];
  }

  const SurfaceForm* find_surface(std::string_view phrase) const {
    auto it = surface_.find(std::string(phrase));
    return it == surface_.end() ? nullptr : &it->second;
  }

  // Entities of `type` in declaration order.
  std::vector<const Entity*> entities_of_type(std::string_view type) const {
    std::vector<const Entity*> out;
    for (const auto& e : entities_) {
      if (e.type == type) out.push_back(&e);
    }
    return out;
  }

  void add(const TypeDecl& t) {
    if (!is_identifier(t.name) || t.name == kSententialType) {
      throw Error(ErrorKind::SyntaxError, "invalid type name '" + t.name + "'");
    }
    types_.insert(t.name);
  }

  void add(const Entity& e) {
    if (!is_identifier(e.id)) throw Error(ErrorKind::SyntaxError, "invalid entity id '" + e.id + "'");
    if (!has_type(e.type)) throw Error(ErrorKind::UnknownType, "entity '" + e.id + "' has undeclared type '" + e.type + "'");
    if (entity_index_.count(e.id)) throw Error(ErrorKind::DuplicateDeclaration, "entity '" + e.id + "' declared twice");
    entity_index_.emplace(e.id, entities_.size());
    entities_.push_back(e);
  }

  void add(const PredicateDecl& p) {
    if (!is_identifier(p.name)) throw Error(ErrorKind::SyntaxError, "invalid predicate name '" + p.name + "'");
    if (predicate_index_.count(p.name)) {
      throw Error(ErrorKind::DuplicateDeclaration, "predicate '" + p.name + "' declared twice");
    }
    if (p.roles.empty()) throw Error(ErrorKind::RoleMismatch, "predicate '" + p.name + "' has no roles");
    std::set<std::string> seen;
    for (const auto& [role, type] : p.roles) {
      if (!seen.insert(role).second) {
        throw Error(ErrorKind::RoleMismatch, "predicate '" + p.name + "' repeats role '" + role + "'");
      }
      if (type != kSententialType && !has_type(type)) {
        throw Error(ErrorKind::UnknownType, "role '" + role + "' of '" + p.name + "' has undeclared type '" + type + "'");
      }
    }
    predicate_index_.emplace(p.name, predicates_.size());
    predicates_.push_back(p);
  }

  // Checks that the category agrees with the target's signature.
  void add(const SurfaceForm& s) {
    if (s.phrase.empty()) throw Error(ErrorKind::SyntaxError, "empty surface phrase");
    auto require_predicate = [&]() -> const PredicateDecl& {
      const auto* p = find_predicate(s.target);
      if (!p) throw Error(ErrorKind::UnknownPredicate, "surface '" + s.phrase + "' names unknown predicate '" + s.target + "'");
      return *p;
    };
    auto entity_roles = [](const PredicateDecl& p) {
      return std::count_if(p.roles.begin(), p.roles.end(),
                           [](const auto& r) { return r.second != kSententialType; });
    };
    switch (s.category) {
      case Category::EntityName:
        if (!find_entity(s.target)) throw Error(ErrorKind::UnknownEntity, "surface '" + s.phrase + "' names unknown entity '" + s.target + "'");
        break;
      case Category::CommonNoun:
      case Category::Adjective:
      case Category::IntransitiveVerb: {
        const auto& p = require_predicate();
        if (p.roles.size() != 1 || entity_roles(p) != 1) {
          throw Error(ErrorKind::RoleMismatch, "surface '" + s.phrase + "': " + std::string(to_string(s.category)) + " needs a one-role predicate");
        }
        break;
      }
      case Category::TransitiveVerb: {
        const auto& p = require_predicate();
        if (p.roles.size() != 2 || !p.role_type("agent") || !p.role_type("patient") || entity_roles(p) != 2) {
          throw Error(ErrorKind::RoleMismatch, "surface '" + s.phrase + "': TransitiveVerb needs an agent/patient predicate");
        }
        break;
      }
      case Category::RelationalNoun: {
        const auto& p = require_predicate();
        if (p.roles.size() != 2 || entity_roles(p) != 2) {
          throw Error(ErrorKind::RoleMismatch, "surface '" + s.phrase + "': RelationalNoun needs a two-role predicate");
        }
        break;
      }
      case Category::Quantword:
      case Category::NegationWord:
      case Category::FunctionWord:
        if (!s.target.empty()) throw Error(ErrorKind::SyntaxError, "function-like surface forms take no target");
        break;
    }
    if (surface_.count(s.phrase)) throw Error(ErrorKind::DuplicateDeclaration, "surface '" + s.phrase + "' declared twice");
    surface_.emplace(s.phrase, s);
  }

  void describe_entity(std::string_view id, std::string text) {
    if (auto it = entity_index_.find(std::string(id)); it != entity_index_.end()) {
      entities_[it->second].description = std::move(text);
    }
  }

  void describe_predicate(std::string_view name, std::string text) {
    if (auto it = predicate_index_.find(std::string(name)); it != predicate_index_.end()) {
      predicates_[it->second].description = std::move(text);
    }
  }

  // Registers a declaration statement; facts and rules are ignored.
  void declare(const Statement& st) {
    std::visit(
        [this](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, TypeDecl> || std::is_same_v<T, Entity> ||
                        std::is_same_v<T, PredicateDecl> || std::is_same_v<T, SurfaceForm>) {
            add(s);
          }
        },
        st);
  }

 private:
  std::set<std::string> types_;
  std::vector<Entity> entities_;
  std::vector<PredicateDecl> predicates_;
  std::map<std::string, std::size_t> entity_index_;
  std::map<std::string, std::size_t> predicate_index_;
  std::map<std::string, SurfaceForm> surface_;
};

struct KnowledgeBase {
  Lexicon lexicon;
  std::vector<Literal> facts;
  std::vector<QuantifiedRule> rules;
};

// ---------------------------------------------------------------------------
// Structural helpers

inline bool is_ground(const Proposition& p) {
  for (const auto& [role, arg] : p.args) {
    if (arg.is_variable()) return false;
    if (arg.is_embedded() && !is_ground(arg.proposition())) return false;
  }
  return true;
}

inline void collect_variables(const Proposition& p, std::set<std::string>& out) {
  for (const auto& [role, arg] : p.args) {
    if (arg.is_variable()) out.insert(arg.variable_name());
    if (arg.is_embedded()) collect_variables(arg.proposition(), out);
  }
}

inline int embedding_depth(const Proposition& p) {
  int depth = 0;
  for (const auto& [role, arg] : p.args) {
    if (arg.is_embedded()) depth = std::max(depth, 1 + embedding_depth(arg.proposition()));
  }
  return depth;
}

// Deterministic identity of a ground proposition: roles sorted by name,
// arguments canonicalized recursively.
inline std::string canonical_key(const Proposition& p) {
  std::vector<const std::pair<std::string, Argument>*> sorted;
  sorted.reserve(p.args.size());
  for (const auto& a : p.args) sorted.push_back(&a);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->first < b->first; });
  std::string out = p.predicate + "(";
  bool first = true;
  for (const auto* a : sorted) {
    if (!first) out += ',';
    first = false;
    out += a->first;
    out += '=';
    const Argument& arg = a->second;
    if (arg.is_variable()) {
      throw Error(ErrorKind::UngroundedProposition,
                  "variable '" + arg.variable_name() + "' in " + p.predicate);
    }
    out += arg.is_entity() ? arg.entity_id() : canonical_key(arg.proposition());
  }
  out += ')';
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void validate_proposition(const Proposition& p, const Lexicon& lex,
                                 const std::map<std::string, std::string>& scope, int depth,
                                 int line, int column) {
  if (depth > kMaxEmbeddingDepth) {
    throw Error(ErrorKind::EmbeddingTooDeep, "sentential embedding deeper than " + std::to_string(kMaxEmbeddingDepth), line, column);
  }
  const PredicateDecl* decl = lex.find_predicate(p.predicate);
  if (!decl) throw Error(ErrorKind::UnknownPredicate, "unknown predicate '" + p.predicate + "'", line, column);
  if (p.args.size() != decl->roles.size()) {
    throw Error(ErrorKind::RoleMismatch, "'" + p.predicate + "' expects " + std::to_string(decl->roles.size()) + " roles", line, column);
  }
  for (std::size_t i = 0; i < p.args.size(); ++i) {
    const auto& [role, arg] = p.args[i];
    if (decl->roles[i].first != role) {
      throw Error(ErrorKind::RoleMismatch, "'" + p.predicate + "' has no role '" + role + "' at position " + std::to_string(i), line, column);
    }
    const std::string& type = decl->roles[i].second;
    if (type == kSententialType) {
      if (!arg.is_embedded()) {
        throw Error(ErrorKind::TypeMismatch, "role '" + role + "' of '" + p.predicate + "' needs a proposition", line, column);
      }
      validate_proposition(arg.proposition(), lex, scope, depth + 1, line, column);
      continue;
    }
    if (arg.is_embedded()) {
      throw Error(ErrorKind::TypeMismatch, "role '" + role + "' of '" + p.predicate + "' takes an entity of type " + type, line, column);
    }
    if (arg.is_variable()) {
      auto it = scope.find(arg.variable_name());
      if (it == scope.end()) {
        throw Error(ErrorKind::UnboundVariable, "variable '" + arg.variable_name() + "' is not bound", line, column);
      }
      if (it->second != type) {
        throw Error(ErrorKind::TypeMismatch, "variable '" + arg.variable_name() + ":" + it->second + "' fills role '" + role + "' of type " + type, line, column);
      }
    } else {
      const Entity* e = lex.find_entity(arg.entity_id());
      if (!e) throw Error(ErrorKind::UnknownEntity, "unknown entity '" + arg.entity_id() + "'", line, column);
      if (e->type != type) {
        throw Error(ErrorKind::TypeMismatch, "entity '" + e->id + ":" + e->type + "' fills role '" + role + "' of type " + type, line, column);
      }
    }
  }
}

}  // namespace detail

// Throws unless `p` is well-typed and ground.
inline void validate_ground(const Proposition& p, const Lexicon& lex, int line = 0, int column = 0) {
  detail::validate_proposition(p, lex, {}, 0, line, column);
}

inline void validate_rule(const QuantifiedRule& r, const Lexicon& lex, int line = 0, int column = 0) {
  std::map<std::string, std::string> scope;
  for (const auto& b : r.bindings) {
    if (!is_identifier(b.variable)) throw Error(ErrorKind::SyntaxError, "invalid variable '" + b.variable + "'", line, column);
    if (!lex.has_type(b.type)) throw Error(ErrorKind::UnknownType, "binding '" + b.variable + "' has undeclared type '" + b.type + "'", line, column);
    if (!scope.emplace(b.variable, b.type).second) {
      throw Error(ErrorKind::DuplicateDeclaration, "variable '" + b.variable + "' bound twice", line, column);
    }
  }
  if (r.premises.empty()) throw Error(ErrorKind::EmptyPremises, "rule has no premises", line, column);
  std::set<std::string> premise_vars;
  for (const auto& p : r.premises) {
    detail::validate_proposition(p, lex, scope, 0, line, column);
    collect_variables(p, premise_vars);
  }
  detail::validate_proposition(r.conclusion.proposition, lex, scope, 0, line, column);
  std::set<std::string> conclusion_vars;
  collect_variables(r.conclusion.proposition, conclusion_vars);
  for (const auto& v : conclusion_vars) {
    if (!premise_vars.count(v)) {
      throw Error(ErrorKind::UnboundVariable, "variable '" + v + "' occurs in the conclusion but in no premise", line, column);
    }
  }
  if (!(r.weight > 0.0 && r.weight <= 1.0)) {
    throw Error(ErrorKind::SyntaxError, "rule weight must lie in (0, 1]", line, column);
  }
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string format_weight(double w) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, w);
  return std::string(buf, end);
}

inline std::string serialize(const Proposition& p) {
  std::string out = p.predicate + "(";
  bool first = true;
  for (const auto& [role, arg] : p.args) {
    if (!first) out += ", ";
    first = false;
    out += role;
    out += ": ";
    if (arg.is_entity()) {
      out += arg.entity_id();
    } else if (arg.is_variable()) {
      out += arg.variable_name();
    } else {
      out += serialize(arg.proposition());
    }
  }
  out += ')';
  return out;
}

inline std::string serialize(const Literal& l) {
  return (l.positive ? "" : "not ") + serialize(l.proposition);
}

inline std::string serialize(const QuantifiedRule& r) {
  std::string out(to_string(r.quantifier));
  out += " [";
  for (std::size_t i = 0; i < r.bindings.size(); ++i) {
    if (i) out += ", ";
    out += r.bindings[i].variable + ":" + r.bindings[i].type;
  }
  out += "]: ";
  for (std::size_t i = 0; i < r.premises.size(); ++i) {
    if (i) out += " & ";
    out += serialize(r.premises[i]);
  }
  out += " -> ";
  Literal written = r.conclusion;
  if (flips_conclusion(r.quantifier)) written.positive = !written.positive;
  out += serialize(written);
  if (r.weight != quantifier_weight(r.quantifier)) {
    out += " [weight=" + format_weight(r.weight) + "]";
  }
  return out;
}

inline std::string serialize(const TypeDecl& t) { return "type " + t.name; }

inline std::string serialize(const Entity& e) {
  std::string out = "entity " + e.id + " : " + e.type;
  if (!e.description.empty()) out += "\n  \"" + e.description + "\"";
  return out;
}

inline std::string serialize(const PredicateDecl& p) {
  std::string out = "predicate " + p.name + " {";
  for (std::size_t i = 0; i < p.roles.size(); ++i) {
    if (i) out += ", ";
    out += p.roles[i].first + ": " + p.roles[i].second;
  }
  out += "}";
  if (!p.description.empty()) out += "\n  \"" + p.description + "\"";
  return out;
}

inline std::string serialize(const SurfaceForm& s) {
  std::string out = "surface " + std::string(surface_keyword(s.category)) + " \"" + s.phrase + "\"";
  if (!s.target.empty()) out += " -> " + s.target;
  return out;
}

inline std::string serialize(const Statement& s) {
  return std::visit([](const auto& v) { return serialize(v); }, s);
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class LineCursor {
 public:
  LineCursor(std::string_view text, int line) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }
  int column() const { return static_cast<int>(pos_) + 1; }
  int line() const { return line_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::SyntaxError, msg, line_, column());
  }

  bool peek(std::string_view tok) {
    skip_ws();
    return text_.substr(pos_, tok.size()) == tok;
  }
  bool accept(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  std::string_view peek_word() {
    skip_ws();
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) ++end;
    return text_.substr(pos_, end - pos_);
  }

  // Next non-blank character after the word at the cursor.
  char after_word() {
    auto w = peek_word();
    std::size_t p = pos_ + w.size();
    while (p < text_.size() && (text_[p] == ' ' || text_[p] == '\t')) ++p;
    return p < text_.size() ? text_[p] : '\0';
  }

  std::string identifier(std::string_view what) {
    auto w = peek_word();
    if (!is_identifier(w)) fail("expected " + std::string(what));
    pos_ += w.size();
    return std::string(w);
  }

  std::string quoted() {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '"') fail("expected '\"'");
    auto close = text_.find('"', pos_ + 1);
    if (close == std::string_view::npos) fail("unterminated string");
    std::string out(text_.substr(pos_ + 1, close - pos_ - 1));
    pos_ = close + 1;
    return out;
  }

  double number() {
    skip_ws();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

 private:
  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

class StatementParser {
 public:
  explicit StatementParser(Lexicon lexicon) : lex_(std::move(lexicon)) {}

  const Lexicon& lexicon() const { return lex_; }

  std::vector<Statement> parse(std::string_view text) {
    std::vector<Statement> out;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto nl = text.find('\n', start);
      if (nl == std::string_view::npos) nl = text.size();
      ++line_no;
      parse_line(text.substr(start, nl - start), line_no, out);
      start = nl + 1;
    }
    return out;
  }

  Literal parse_single_literal(std::string_view text) {
    LineCursor cur(text, 1);
    if (cur.at_end()) cur.fail("expected a literal");
    Literal lit = literal(cur, {});
    if (!cur.at_end()) cur.fail("trailing input after literal");
    validate_ground(lit.proposition, lex_, 1, 1);
    return lit;
  }

 private:
  void parse_line(std::string_view line, int line_no, std::vector<Statement>& out) {
    LineCursor cur(line, line_no);
    if (cur.at_end()) return;
    int col = cur.column();

    if (cur.peek("\"")) {
      std::string desc = cur.quoted();
      expect_end(cur);
      attach_description(out, std::move(desc), line_no, col);
      return;
    }

    auto word = cur.peek_word();
    char next = cur.after_word();
    if (next != '(') {
      if (word == "type") return emit_decl(out, parse_type(cur), line_no, col);
      if (word == "entity") return emit_decl(out, parse_entity(cur), line_no, col);
      if (word == "predicate") return emit_decl(out, parse_predicate(cur), line_no, col);
      if (word == "surface") return emit_decl(out, parse_surface(cur), line_no, col);
      if (next == '[') {
        if (!quantifier_from_string(word)) {
          throw Error(ErrorKind::UnknownQuantifier, "unknown quantifier '" + std::string(word) + "'", line_no, col);
        }
        QuantifiedRule rule = parse_rule(cur);
        validate_rule(rule, lex_, line_no, col);
        out.emplace_back(std::move(rule));
        return;
      }
    }
    Literal lit = literal(cur, {});
    expect_end(cur);
    validate_ground(lit.proposition, lex_, line_no, col);
    out.emplace_back(std::move(lit));
  }

  template <typename Decl>
  void emit_decl(std::vector<Statement>& out, Decl decl, int line, int col) {
    try {
      lex_.add(decl);
    } catch (const Error& e) {
      throw Error(e.kind(), strip_kind(e.what()), line, col);
    }
    out.emplace_back(std::move(decl));
  }

  static std::string strip_kind(std::string_view what) {
    auto p = what.find(": ");
    return std::string(p == std::string_view::npos ? what : what.substr(p + 2));
  }

  void attach_description(std::vector<Statement>& out, std::string desc, int line, int col) {
    if (!out.empty()) {
      if (auto* e = std::get_if<Entity>(&out.back())) {
        e->description = desc;
        lex_.describe_entity(e->id, desc);
        return;
      }
      if (auto* p = std::get_if<PredicateDecl>(&out.back())) {
        p->description = desc;
        lex_.describe_predicate(p->name, desc);
        return;
      }
    }
    throw Error(ErrorKind::SyntaxError, "description must follow an entity or predicate declaration", line, col);
  }

  static void expect_end(LineCursor& cur) {
    if (!cur.at_end()) cur.fail("unexpected trailing input");
  }

  TypeDecl parse_type(LineCursor& cur) {
    cur.expect("type");
    TypeDecl t{cur.identifier("type name")};
    expect_end(cur);
    return t;
  }

  Entity parse_entity(LineCursor& cur) {
    cur.expect("entity");
    Entity e;
    e.id = cur.identifier("entity id");
    cur.expect(":");
    e.type = cur.identifier("entity type");
    expect_end(cur);
    return e;
  }

  PredicateDecl parse_predicate(LineCursor& cur) {
    cur.expect("predicate");
    PredicateDecl p;
    p.name = cur.identifier("predicate name");
    cur.expect("{");
    do {
      std::string role = cur.identifier("role name");
      cur.expect(":");
      std::string type = cur.identifier("role type");
      p.roles.emplace_back(std::move(role), std::move(type));
    } while (cur.accept(","));
    cur.expect("}");
    expect_end(cur);
    return p;
  }

  SurfaceForm parse_surface(LineCursor& cur) {
    cur.expect("surface");
    SurfaceForm s;
    auto kw = cur.peek_word();
    auto cat = category_from_keyword(kw);
    if (!cat) cur.fail("unknown surface category '" + std::string(kw) + "'");
    cur.identifier("surface category");
    s.category = *cat;
    s.phrase = normalize_phrase(cur.quoted());
    if (cur.accept("->")) s.target = cur.identifier("surface target");
    expect_end(cur);
    return s;
  }

  QuantifiedRule parse_rule(LineCursor& cur) {
    QuantifiedRule r;
    r.quantifier = *quantifier_from_string(cur.identifier("quantifier"));
    r.weight = quantifier_weight(r.quantifier);
    cur.expect("[");
    std::set<std::string> bound;
    if (!cur.accept("]")) {
      do {
        Binding b;
        b.variable = cur.identifier("variable");
        cur.expect(":");
        b.type = cur.identifier("variable type");
        bound.insert(b.variable);
        r.bindings.push_back(std::move(b));
      } while (cur.accept(","));
      cur.expect("]");
    }
    cur.expect(":");
    do {
      r.premises.push_back(proposition(cur, bound));
    } while (cur.accept("&"));
    cur.expect("->");
    r.conclusion = literal(cur, bound);
    if (flips_conclusion(r.quantifier)) r.conclusion.positive = !r.conclusion.positive;
    if (cur.accept("[")) {
      if (cur.identifier("'weight'") != "weight") cur.fail("expected 'weight'");
      cur.expect("=");
      r.weight = cur.number();
      cur.expect("]");
    }
    expect_end(cur);
    return r;
  }

  Literal literal(LineCursor& cur, const std::set<std::string>& bound) {
    Literal lit;
    if (cur.peek_word() == "not" && cur.after_word() != '(') {
      cur.identifier("not");
      lit.positive = false;
    }
    lit.proposition = proposition(cur, bound);
    return lit;
  }

  // Parses `pred(role: arg, ...)` and reorders arguments to the declared
  // role order.
  Proposition proposition(LineCursor& cur, const std::set<std::string>& bound) {
    std::string predicate = cur.identifier("predicate name");
    return proposition_tail(cur, std::move(predicate), bound);
  }

  Proposition proposition_tail(LineCursor& cur, std::string predicate, const std::set<std::string>& bound) {
    int line = cur.line();
    int col = cur.column();
    Proposition p;
    p.predicate = std::move(predicate);
    cur.expect("(");
    std::vector<std::pair<std::string, Argument>> raw;
    if (!cur.accept(")")) {
      do {
        std::string role = cur.identifier("role name");
        cur.expect(":");
        std::string name = cur.identifier("argument");
        Argument arg;
        if (cur.peek("(")) {
          arg = Argument::embedded(proposition_tail(cur, std::move(name), bound));
        } else if (bound.count(name)) {
          arg = Argument::variable(std::move(name));
        } else {
          arg = Argument::entity(std::move(name));
        }
        raw.emplace_back(std::move(role), std::move(arg));
      } while (cur.accept(","));
      cur.expect(")");
    }
    return order_args(std::move(p), std::move(raw), line, col);
  }

  Proposition order_args(Proposition p, std::vector<std::pair<std::string, Argument>> raw, int line, int col) {
    const PredicateDecl* decl = lex_.find_predicate(p.predicate);
    if (!decl) throw Error(ErrorKind::UnknownPredicate, "unknown predicate '" + p.predicate + "'", line, col);
    std::set<std::string> seen;
    for (const auto& [role, arg] : raw) {
      if (!decl->role_type(role)) {
        throw Error(ErrorKind::RoleMismatch, "'" + p.predicate + "' has no role '" + role + "'", line, col);
      }
      if (!seen.insert(role).second) {
        throw Error(ErrorKind::RoleMismatch, "role '" + role + "' given twice", line, col);
      }
    }
    for (const auto& [role, type] : decl->roles) {
      auto it = std::find_if(raw.begin(), raw.end(), [&](const auto& a) { return a.first == role; });
      if (it == raw.end()) {
        throw Error(ErrorKind::RoleMismatch, "'" + p.predicate + "' is missing role '" + role + "'", line, col);
      }
      p.args.push_back(std::move(*it));
    }
    return p;
  }

 public:
  static std::string normalize_phrase(std::string_view phrase) {
    std::string out;
    bool space = false;
    for (char c : phrase) {
      if (c == ' ' || c == '\t') {
        space = !out.empty();
        continue;
      }
      if (space) out += ' ';
      space = false;
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
  }

 private:
  Lexicon lex_;
};

}  // namespace detail

// Parses statements in source order. Declarations extend a private copy of
// `lexicon` so later lines may use them.
inline std::vector<Statement> parse_logic(std::string_view text, const Lexicon& lexicon = {}) {
  detail::StatementParser parser(lexicon);
  return parser.parse(text);
}

// Builds a lexicon from declaration lines; facts and rules are rejected.
inline Lexicon load_lexicon(std::string_view text, const Lexicon& base = {}) {
  detail::StatementParser parser(base);
  auto statements = parser.parse(text);
  for (const auto& s : statements) {
    if (std::holds_alternative<Literal>(s) || std::holds_alternative<QuantifiedRule>(s)) {
      throw Error(ErrorKind::SyntaxError, "lexicon may only contain declarations: " + serialize(s));
    }
  }
  return parser.lexicon();
}

// Parses a fact/rule file against `lexicon`. Declarations in the file are
// allowed and extend the knowledge base's lexicon.
inline KnowledgeBase load_knowledge_base(std::string_view text, const Lexicon& lexicon) {
  detail::StatementParser parser(lexicon);
  auto statements = parser.parse(text);
  KnowledgeBase kb;
  kb.lexicon = parser.lexicon();
  for (auto& s : statements) {
    if (auto* lit = std::get_if<Literal>(&s)) {
      kb.facts.push_back(std::move(*lit));
    } else if (auto* rule = std::get_if<QuantifiedRule>(&s)) {
      kb.rules.push_back(std::move(*rule));
    }
  }
  return kb;
}

// Parses one ground literal, e.g. a query.
inline Literal parse_literal(std::string_view text, const Lexicon& lexicon) {
  detail::StatementParser parser(lexicon);
  return parser.parse_single_literal(text);
}

}  // namespace lbn
