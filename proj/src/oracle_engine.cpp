#include <algorithm>

#include "determlr/oracle.hpp"

namespace determlr::oracle {

namespace {

constexpr std::size_t kMaxDerivedRules = 512;

Term substitute(const Term& term, const Term& value) { return term.variable ? value : term; }

std::vector<Rule> instances(const Rule& rule, const std::set<Term>& domain) {
  if (!rule.has_variable()) return {rule};
  std::vector<Rule> out;
  out.reserve(domain.size());
  for (const Term& entity : domain) {
    Rule inst;
    for (const auto& a : rule.antecedents) inst.antecedents.push_back(bind(a, entity));
    inst.consequent = bind(rule.consequent, entity);
    out.push_back(std::move(inst));
  }
  return out;
}

void collect_entities(const Atom& atom, std::set<Term>& out) {
  if (atom.propositional()) return;
  if (!atom.subject.variable) out.insert(atom.subject);
  if (atom.relation != "is" && !atom.object.empty() && !atom.object.variable) out.insert(atom.object);
}

// Separate variable namespaces for the two sides of a rule composition.
struct Unifier {
  std::optional<Term> left;   // value of the first rule's variable
  std::optional<Term> right;  // value of the second rule's variable
  bool linked = false;

  bool term(const Term& a, const Term& b) {
    if (a.variable && b.variable) {
      linked = true;
      return true;
    }
    if (a.variable) return assign(left, b);
    if (b.variable) return assign(right, a);
    return a == b;
  }

  static bool assign(std::optional<Term>& slot, const Term& value) {
    if (slot && !(*slot == value)) return false;
    slot = value;
    return true;
  }

  bool settle() {
    if (!linked) return true;
    if (left && right) return *left == *right;
    if (left) right = left;
    if (right) left = right;
    return true;
  }
};

std::optional<Rule> compose(const Rule& first, const Rule& second) {
  if (second.antecedents.size() != 1) return std::nullopt;
  const Atom& link = first.consequent;
  const Atom& target = second.antecedents.front();
  if (link.relation != target.relation || link.negated != target.negated) return std::nullopt;
  Unifier u;
  if (!u.term(link.subject, target.subject) || !u.term(link.object, target.object) || !u.settle()) {
    return std::nullopt;
  }
  Rule out;
  for (const auto& a : first.antecedents) out.antecedents.push_back(u.left ? bind(a, *u.left) : a);
  Atom consequent = second.consequent;
  if (u.right) {
    consequent = bind(consequent, *u.right);
  } else if (u.linked) {
    // The second rule's variable is the first rule's variable: keep it free.
  } else if (second.has_variable() && !(consequent.ground())) {
    return std::nullopt;
  }
  out.consequent = consequent;
  const bool dangling = !out.consequent.ground() &&
                        std::all_of(out.antecedents.begin(), out.antecedents.end(),
                                    [](const Atom& a) { return a.ground(); });
  if (dangling) return std::nullopt;
  return out;
}

bool consistent_insert(std::set<Atom>& facts, const Atom& atom) {
  if (facts.contains(atom.negation())) return false;
  facts.insert(atom);
  return true;
}

}  // namespace

Atom bind(const Atom& atom, const Term& value) {
  Atom out = atom;
  out.subject = substitute(atom.subject, value);
  out.object = substitute(atom.object, value);
  return out;
}

std::string_view truth_name(Truth truth) {
  switch (truth) {
    case Truth::True: return "True";
    case Truth::False: return "False";
    case Truth::Unknown: return "Unknown";
  }
  return "Unknown";
}

void KnowledgeBase::add(const Clause& clause) {
  std::visit(
      [this](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Atom>) {
          add_fact(c);
        } else if constexpr (std::is_same_v<T, Rule>) {
          add_rule(c);
        } else {
          add_disjunction(c);
        }
      },
      clause);
}

void KnowledgeBase::add_fact(const Atom& fact) {
  if (!fact.ground()) throw Error("fact with a free variable: " + unparse(fact));
  if (!consistent_insert(facts_, fact)) {
    const Atom pos = fact.negated ? fact.negation() : fact;
    throw Inconsistent(unparse(pos), unparse(pos.negation()));
  }
}

void KnowledgeBase::add_rule(const Rule& rule) {
  if (rule.antecedents.empty()) throw Error("rule without antecedents");
  if (std::find(rules_.begin(), rules_.end(), rule) == rules_.end()) rules_.push_back(rule);
}

void KnowledgeBase::add_disjunction(const Disjunction& disjunction) {
  disjunctions_.push_back(disjunction);
}

void KnowledgeBase::add_statement(std::string_view text) { add(parse_statement(text)); }

std::set<Term> KnowledgeBase::domain() const {
  std::set<Term> out;
  for (const auto& f : facts_) collect_entities(f, out);
  for (const auto& r : rules_) {
    for (const auto& a : r.antecedents) collect_entities(a, out);
    collect_entities(r.consequent, out);
  }
  for (const auto& d : disjunctions_) {
    collect_entities(d.left, out);
    collect_entities(d.right, out);
  }
  return out;
}

Closure forward_chain(const KnowledgeBase& kb, int max_depth) {
  Closure closure;
  closure.facts = kb.facts();
  for (const auto& f : kb.facts()) closure.proofs.emplace(f, ProofStep{"given", {}, {}, {}, {}, 0});

  const std::set<Term> domain = kb.domain();
  std::vector<std::pair<std::size_t, Rule>> ground;
  for (std::size_t i = 0; i < kb.rules().size(); ++i) {
    for (auto& inst : instances(kb.rules()[i], domain)) ground.emplace_back(i, std::move(inst));
  }

  std::vector<Rule> all_rules = kb.rules();
  for (int depth = 1; depth <= max_depth; ++depth) {
    std::map<Atom, ProofStep> fresh;
    auto consider = [&](const Atom& atom, ProofStep step) {
      if (closure.facts.contains(atom) || fresh.contains(atom)) return;
      step.depth = depth;
      fresh.emplace(atom, std::move(step));
    };

    for (const auto& [index, inst] : ground) {
      std::vector<std::size_t> missing;
      for (std::size_t k = 0; k < inst.antecedents.size(); ++k) {
        if (!closure.facts.contains(inst.antecedents[k])) missing.push_back(k);
      }
      if (missing.empty()) {
        consider(inst.consequent, {"modus_ponens", index, inst, {}, inst.antecedents, 0});
      } else if (missing.size() == 1 && closure.facts.contains(inst.consequent.negation())) {
        std::vector<Atom> sources;
        for (std::size_t k = 0; k < inst.antecedents.size(); ++k) {
          if (k != missing.front()) sources.push_back(inst.antecedents[k]);
        }
        sources.push_back(inst.consequent.negation());
        consider(inst.antecedents[missing.front()].negation(),
                 {"modus_tollens", index, inst, {}, std::move(sources), 0});
      }
    }

    for (std::size_t j = 0; j < kb.disjunctions().size(); ++j) {
      const Disjunction& d = kb.disjunctions()[j];
      if (closure.facts.contains(d.left.negation())) {
        consider(d.right, {"disjunctive_syllogism", j, {}, d, {d.left.negation()}, 0});
      }
      if (closure.facts.contains(d.right.negation())) {
        consider(d.left, {"disjunctive_syllogism", j, {}, d, {d.right.negation()}, 0});
      }
    }

    // Hypothetical syllogism only records composite rules; the atoms they
    // would yield are already reached by chained modus ponens.
    bool new_rule = false;
    const std::size_t known = all_rules.size();
    for (std::size_t a = 0; a < known && all_rules.size() < kMaxDerivedRules; ++a) {
      for (std::size_t b = 0; b < known && all_rules.size() < kMaxDerivedRules; ++b) {
        if (a == b) continue;
        auto composed = compose(all_rules[a], all_rules[b]);
        if (!composed) continue;
        if (std::find(all_rules.begin(), all_rules.end(), *composed) != all_rules.end()) continue;
        all_rules.push_back(*composed);
        closure.derived_rules.push_back({*composed, a, b, depth});
        new_rule = true;
      }
    }

    if (fresh.empty()) {
      closure.fixpoint = !new_rule;
      if (!new_rule) break;
      continue;
    }
    for (const auto& [atom, step] : fresh) {
      if (closure.facts.contains(atom.negation()) || fresh.contains(atom.negation())) {
        const Atom pos = atom.negated ? atom.negation() : atom;
        throw Inconsistent(unparse(pos), unparse(pos.negation()));
      }
    }
    for (auto& [atom, step] : fresh) {
      closure.facts.insert(atom);
      closure.proofs.emplace(atom, std::move(step));
    }
    closure.depth = depth;
  }
  return closure;
}

Truth query(const Closure& closure, const Atom& hypothesis) {
  if (closure.contains(hypothesis)) return Truth::True;
  if (closure.contains(hypothesis.negation())) return Truth::False;
  return Truth::Unknown;
}

Truth query(const KnowledgeBase& kb, const Atom& hypothesis, int max_depth) {
  return query(forward_chain(kb, max_depth), hypothesis);
}

std::optional<Derivation> derive_step(const Clause& primary, const std::vector<Clause>& supplements,
                                      const std::set<Atom>& known) {
  std::vector<const Clause*> clauses{&primary};
  for (const auto& s : supplements) clauses.push_back(&s);

  std::map<Atom, std::size_t> facts;  // first clause index stating each fact
  std::set<Term> domain;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (const auto* a = std::get_if<Atom>(clauses[i])) {
      facts.emplace(*a, i);
      collect_entities(*a, domain);
    }
  }
  auto fresh = [&](const Atom& a) { return !known.contains(a) && !facts.contains(a); };

  // Modus ponens.
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const auto* rule = std::get_if<Rule>(clauses[i]);
    if (!rule) continue;
    for (const Rule& inst : instances(*rule, domain)) {
      std::vector<std::size_t> sources{i};
      bool all = true;
      for (const auto& a : inst.antecedents) {
        auto it = facts.find(a);
        if (it == facts.end()) {
          all = false;
          break;
        }
        sources.push_back(it->second);
      }
      if (all && fresh(inst.consequent)) return Derivation{inst.consequent, "modus_ponens", sources};
    }
  }
  // Modus tollens.
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const auto* rule = std::get_if<Rule>(clauses[i]);
    if (!rule) continue;
    for (const Rule& inst : instances(*rule, domain)) {
      auto neg = facts.find(inst.consequent.negation());
      if (neg == facts.end()) continue;
      std::vector<std::size_t> sources{i, neg->second};
      std::optional<std::size_t> missing;
      bool ok = true;
      for (std::size_t k = 0; k < inst.antecedents.size(); ++k) {
        auto it = facts.find(inst.antecedents[k]);
        if (it != facts.end()) {
          sources.push_back(it->second);
        } else if (!missing) {
          missing = k;
        } else {
          ok = false;
          break;
        }
      }
      if (!ok || !missing) continue;
      Atom conclusion = inst.antecedents[*missing].negation();
      if (fresh(conclusion)) return Derivation{conclusion, "modus_tollens", sources};
    }
  }
  // Disjunctive syllogism.
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const auto* d = std::get_if<Disjunction>(clauses[i]);
    if (!d) continue;
    if (auto it = facts.find(d->left.negation()); it != facts.end() && fresh(d->right)) {
      return Derivation{d->right, "disjunctive_syllogism", {i, it->second}};
    }
    if (auto it = facts.find(d->right.negation()); it != facts.end() && fresh(d->left)) {
      return Derivation{d->left, "disjunctive_syllogism", {i, it->second}};
    }
  }
  // Hypothetical syllogism.
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const auto* first = std::get_if<Rule>(clauses[i]);
    if (!first) continue;
    for (std::size_t j = 0; j < clauses.size(); ++j) {
      const auto* second = std::get_if<Rule>(clauses[j]);
      if (!second || i == j) continue;
      auto composed = compose(*first, *second);
      if (!composed) continue;
      const bool duplicate = std::any_of(clauses.begin(), clauses.end(), [&](const Clause* c) {
        const auto* r = std::get_if<Rule>(c);
        return r && *r == *composed;
      });
      if (!duplicate) return Derivation{*composed, "hypothetical_syllogism", {i, j}};
    }
  }
  return std::nullopt;
}

bool check_entailment(const std::vector<Clause>& sources, const Clause& proposition, int depth) {
  if (std::find(sources.begin(), sources.end(), proposition) != sources.end()) return true;
  KnowledgeBase kb;
  try {
    for (const auto& s : sources) kb.add(s);
  } catch (const Inconsistent&) {
    return false;
  }
  auto entails_atom = [&](KnowledgeBase& base, const Atom& atom) {
    try {
      return forward_chain(base, depth).contains(atom);
    } catch (const Inconsistent&) {
      return false;
    }
  };

  if (const auto* atom = std::get_if<Atom>(&proposition)) {
    if (!atom->ground()) return false;
    return entails_atom(kb, *atom);
  }
  if (const auto* rule = std::get_if<Rule>(&proposition)) {
    // Assume the antecedents for a fresh entity and look for the consequent.
    const Term fresh = Term::constant("#assumed");
    KnowledgeBase assumed = kb;
    try {
      for (const auto& a : rule->antecedents) assumed.add_fact(bind(a, fresh));
    } catch (const Inconsistent&) {
      return false;
    }
    return entails_atom(assumed, bind(rule->consequent, fresh));
  }
  const auto& d = std::get<Disjunction>(proposition);
  for (const auto& s : sources) {
    if (const auto* other = std::get_if<Disjunction>(&s)) {
      if (other->left == d.right && other->right == d.left) return true;
    }
  }
  return entails_atom(kb, d.left) || entails_atom(kb, d.right);
}

bool check_entailment(const std::vector<std::string>& sources, std::string_view proposition,
                      std::string* diagnostic, int depth) {
  try {
    std::vector<Clause> parsed;
    parsed.reserve(sources.size());
    for (const auto& s : sources) parsed.push_back(parse_statement(s));
    return check_entailment(parsed, parse_statement(proposition), depth);
  } catch (const Error& e) {
    if (diagnostic) *diagnostic = e.what();
    return false;
  }
}

bool match_antecedent(const Atom& fact, const Rule& rule) {
  for (const auto& a : rule.antecedents) {
    if (a.relation != fact.relation || a.negated != fact.negated) continue;
    if (a.propositional() != fact.propositional()) continue;
    std::optional<Term> value;
    auto unify = [&](const Term& pattern, const Term& term) {
      if (!pattern.variable) return pattern == term;
      if (term.variable) return false;
      if (value && !(*value == term)) return false;
      value = term;
      return true;
    };
    if (unify(a.subject, fact.subject) && unify(a.object, fact.object)) return true;
  }
  return false;
}

}  // namespace determlr::oracle
