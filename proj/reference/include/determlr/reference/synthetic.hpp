#pragma once

// Synthetic ProofWriter-style theories and a brute-force closure enumerator
// that labels them without going through the text parser.

#include <compare>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "determlr/core.hpp"

namespace determlr::reference {

/// subject relation object. An empty subject is the rule variable.
struct Literal {
  std::string subject;
  std::string relation;  // "is" or a third-person verb
  std::string object;    // attribute or entity
  bool positive = true;

  bool variable() const { return subject.empty(); }
  Literal negation() const { return {subject, relation, object, !positive}; }
  Literal bound(const std::string& entity) const {
    return {variable() ? entity : subject, relation, object, positive};
  }

  auto operator<=>(const Literal&) const = default;
};

struct SyntheticRule {
  std::vector<Literal> antecedents;  // the first one has the variable subject
  Literal consequent;
};

struct Theory {
  std::vector<std::string> entities;  // "the cat" or "Bob"
  bool people = false;                // names use someone/they phrasing
  std::vector<Literal> facts;
  std::vector<SyntheticRule> rules;
};

enum class Label { True, False, Unknown };

std::string_view label_name(Label label);

struct EnumeratedClosure {
  std::map<Literal, int> facts;  // ground literal -> round it first appeared in
  bool consistent = true;
  int depth = 0;                  // rounds that produced something new

  bool contains(const Literal& l) const { return facts.contains(l); }
};

/// Naive fixpoint over every entity binding: modus ponens and modus tollens
/// with one open antecedent. Stops at the first contradiction.
EnumeratedClosure enumerate_closure(const Theory& theory);
Label enumerate_label(const EnumeratedClosure& closure, const Literal& query);

std::string render(const Literal& literal, const Theory& theory, bool first_mention = true);
std::string render(const SyntheticRule& rule, const Theory& theory);
/// Facts then rules, one sentence each.
std::vector<std::string> statements(const Theory& theory);

struct Limits {
  int max_entities = 8;
  int max_rules = 6;
  int max_depth = 5;
};

struct SyntheticCase {
  std::string id;
  Theory theory;
  Literal query;
  Label gold = Label::Unknown;
  int depth = 0;  // closure depth of the theory
};

/// Consistent theory with closure depth within the limit. Labels cycle
/// True, False, Unknown with the index.
SyntheticCase generate_case(std::mt19937_64& rng, std::size_t index, const Limits& limits = {});
std::vector<SyntheticCase> generate_suite(std::uint64_t seed, std::size_t count, const Limits& limits = {});

ProblemInstance to_problem(const SyntheticCase& c);

}  // namespace determlr::reference
