#pragma once

// Natural-logic parser and open-world forward-chaining engine for
// ProofWriter/PrOntoQA-style statements ("The bald eagle chases the cat.",
// "If something is kind and it sees the lion then it is not red.").

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "determlr/errors.hpp"

namespace determlr::oracle {

/// Entity, attribute or rule variable. Equality ignores the article so that
/// "a wumpus" and "wumpus" denote the same class.
struct Term {
  std::string name;
  std::string article;   // "the", "a", "an" or empty; display only
  bool variable = false;
  std::string pronoun;   // variables: "it" or "they"; display only

  static Term constant(std::string name, std::string article = {});
  static Term var(std::string word = "something", std::string pronoun = "it");

  bool empty() const { return !variable && name.empty(); }

  friend bool operator==(const Term& a, const Term& b) {
    return a.variable == b.variable && (a.variable || a.name == b.name);
  }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (auto c = a.variable <=> b.variable; c != 0) return c;
    if (a.variable) return std::strong_ordering::equal;
    return a.name <=> b.name;
  }
};

/// subject relation object, possibly negated. A propositional symbol ("A is
/// true") has an empty relation and object.
struct Atom {
  Term subject;
  std::string relation;
  Term object;
  bool negated = false;

  static Atom symbol(std::string name, bool negated = false);

  bool propositional() const { return relation.empty(); }
  bool ground() const { return !subject.variable && !object.variable; }
  Atom negation() const;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
    if (auto c = a.subject <=> b.subject; c != 0) return c;
    if (auto c = a.relation <=> b.relation; c != 0) return c;
    if (auto c = a.object <=> b.object; c != 0) return c;
    return a.negated <=> b.negated;
  }
};

struct Rule {
  std::vector<Atom> antecedents;
  Atom consequent;

  bool has_variable() const;
  friend bool operator==(const Rule&, const Rule&) = default;
  friend std::strong_ordering operator<=>(const Rule& a, const Rule& b) {
    if (auto c = std::lexicographical_compare_three_way(a.antecedents.begin(), a.antecedents.end(),
                                                        b.antecedents.begin(), b.antecedents.end());
        c != 0) {
      return c;
    }
    return a.consequent <=> b.consequent;
  }
};

struct Disjunction {
  Atom left;
  Atom right;

  friend bool operator==(const Disjunction&, const Disjunction&) = default;
};

/// Fact (Atom), Rule or Disjunction.
using Clause = std::variant<Atom, Rule, Disjunction>;

Clause parse_statement(std::string_view text);
std::optional<Clause> try_parse_statement(std::string_view text);
/// Parses a statement that must be a single fact.
Atom parse_fact(std::string_view text);

std::string unparse(const Atom& atom);
std::string unparse(const Rule& rule);
std::string unparse(const Disjunction& disjunction);
std::string unparse(const Clause& clause);
/// unparse() with the first letter capitalized and a terminal period.
std::string render_sentence(const Clause& clause);

std::string third_person(std::string_view base_verb);
std::string base_form(std::string_view third_person_verb);

/// Why a fact holds: the inference rule applied, the ground instance of the
/// clause it used, and the facts it consumed.
struct ProofStep {
  std::string inference;  // "given", "modus_ponens", "modus_tollens", "disjunctive_syllogism"
  std::optional<std::size_t> clause_index;  // into KnowledgeBase::rules()/disjunctions()
  std::optional<Rule> instance;
  std::optional<Disjunction> disjunction;
  std::vector<Atom> sources;
  int depth = 0;
};

/// A rule obtained by chaining two rules (hypothetical syllogism).
struct DerivedRule {
  Rule rule;
  std::size_t first = 0;   // index into the combined rule list
  std::size_t second = 0;
  int depth = 0;
};

class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  /// Throws Inconsistent when a fact contradicts an existing one.
  void add(const Clause& clause);
  void add_fact(const Atom& fact);
  void add_rule(const Rule& rule);
  void add_disjunction(const Disjunction& disjunction);
  /// Parses and adds; throws ParseError.
  void add_statement(std::string_view text);

  const std::set<Atom>& facts() const { return facts_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const std::vector<Disjunction>& disjunctions() const { return disjunctions_; }

  /// Constant entities that rule variables range over: every ground subject
  /// and every ground object of a non-copular relation.
  std::set<Term> domain() const;

 private:
  std::set<Atom> facts_;
  std::vector<Rule> rules_;
  std::vector<Disjunction> disjunctions_;
};

struct Closure {
  std::set<Atom> facts;
  std::map<Atom, ProofStep> proofs;
  std::vector<DerivedRule> derived_rules;
  int depth = 0;        // rounds that produced something new
  bool fixpoint = false;

  bool contains(const Atom& atom) const { return facts.contains(atom); }
};

inline constexpr int kDefaultDepth = 10;

/// Saturates the knowledge base with modus ponens, modus tollens,
/// disjunctive syllogism and hypothetical syllogism, one round per depth
/// level. Throws Inconsistent on a derived contradiction.
Closure forward_chain(const KnowledgeBase& kb, int max_depth = kDefaultDepth);

enum class Truth { True, False, Unknown };

std::string_view truth_name(Truth truth);

Truth query(const Closure& closure, const Atom& hypothesis);
Truth query(const KnowledgeBase& kb, const Atom& hypothesis, int max_depth = kDefaultDepth);

/// One deduction from a primary clause and its supplements.
struct Derivation {
  Clause conclusion;
  std::string inference;
  std::vector<std::size_t> sources;  // 0 = primary, i = supplements[i - 1]
};

/// First applicable single-step deduction in rule order MP, MT, DS, HS and
/// clause order primary-then-supplements. Conclusions already in `known` or
/// among the inputs are skipped.
std::optional<Derivation> derive_step(const Clause& primary, const std::vector<Clause>& supplements,
                                      const std::set<Atom>& known = {});

/// True iff `proposition` follows from `sources` within `depth` rounds.
/// A rule proposition is checked by assuming its antecedents.
bool check_entailment(const std::vector<Clause>& sources, const Clause& proposition,
                      int depth = 2);
/// Text form; any ParseError yields false and fills `diagnostic`.
bool check_entailment(const std::vector<std::string>& sources, std::string_view proposition,
                      std::string* diagnostic = nullptr, int depth = 2);

/// True iff some antecedent of `rule` unifies with `fact`.
bool match_antecedent(const Atom& fact, const Rule& rule);

/// Substitutes the rule variable.
Atom bind(const Atom& atom, const Term& value);

}  // namespace determlr::oracle
