#include "determlr/reference/synthetic.hpp"

#include <algorithm>
#include <cctype>

namespace determlr::reference {

namespace {

const std::vector<std::string> kAnimals{"the cat",  "the dog",   "the bear",     "the mouse",
                                        "the lion", "the rabbit", "the squirrel", "the tiger"};
const std::vector<std::string> kNames{"Anne", "Bob", "Charlie", "Dave", "Erin", "Fiona", "Gary", "Harry"};
const std::vector<std::string> kAttributes{"red",  "blue",  "green", "kind", "rough", "cold",
                                           "big",  "young", "round", "nice", "furry", "quiet"};
const std::vector<std::string> kVerbs{"chases", "eats", "likes", "needs", "sees", "visits"};

// chases -> chase, sees -> see; every verb in the list is regular.
std::string base_verb(const std::string& verb) { return verb.substr(0, verb.size() - 1); }

std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& from) {
  return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(rng)];
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

std::string_view label_name(Label label) {
  switch (label) {
    case Label::True: return "True";
    case Label::False: return "False";
    case Label::Unknown: return "Unknown";
  }
  return "Unknown";
}

EnumeratedClosure enumerate_closure(const Theory& theory) {
  EnumeratedClosure out;
  for (const auto& f : theory.facts) out.facts.emplace(f, 0);
  for (const auto& [f, round] : out.facts) {
    if (out.facts.contains(f.negation())) out.consistent = false;
  }
  if (!out.consistent) return out;

  // Every rule instance, once.
  std::vector<SyntheticRule> ground;
  for (const auto& r : theory.rules) {
    for (const auto& e : theory.entities) {
      SyntheticRule g;
      for (const auto& a : r.antecedents) g.antecedents.push_back(a.bound(e));
      g.consequent = r.consequent.bound(e);
      ground.push_back(std::move(g));
    }
  }

  for (int round = 1;; ++round) {
    std::set<Literal> fresh;
    for (const auto& g : ground) {
      std::vector<const Literal*> open;
      for (const auto& a : g.antecedents) {
        if (!out.contains(a)) open.push_back(&a);
      }
      if (open.empty()) {
        if (!out.contains(g.consequent)) fresh.insert(g.consequent);
      } else if (open.size() == 1 && out.contains(g.consequent.negation())) {
        if (!out.contains(open.front()->negation())) fresh.insert(open.front()->negation());
      }
    }
    if (fresh.empty()) break;
    for (const auto& f : fresh) {
      if (out.contains(f.negation()) || fresh.contains(f.negation())) out.consistent = false;
      out.facts.emplace(f, round);
    }
    out.depth = round;
    if (!out.consistent) break;
  }
  return out;
}

Label enumerate_label(const EnumeratedClosure& closure, const Literal& query) {
  if (closure.contains(query)) return Label::True;
  if (closure.contains(query.negation())) return Label::False;
  return Label::Unknown;
}

std::string render(const Literal& l, const Theory& theory, bool first_mention) {
  std::string subject;
  bool plural = false;
  if (l.variable()) {
    if (first_mention) {
      subject = theory.people ? "someone" : "something";
    } else {
      subject = theory.people ? "they" : "it";
      plural = theory.people;
    }
  } else {
    subject = l.subject;
  }
  std::string out = subject + " ";
  if (l.relation == "is") {
    out += plural ? "are" : "is";
    if (!l.positive) out += " not";
  } else if (l.positive) {
    out += plural ? base_verb(l.relation) : l.relation;
  } else {
    out += (plural ? "do not " : "does not ") + base_verb(l.relation);
  }
  return out + " " + l.object;
}

std::string render(const SyntheticRule& rule, const Theory& theory) {
  std::string out = "If ";
  bool seen_variable = false;
  for (std::size_t i = 0; i < rule.antecedents.size(); ++i) {
    const Literal& a = rule.antecedents[i];
    if (i > 0) out += " and ";
    out += render(a, theory, a.variable() && !seen_variable);
    seen_variable = seen_variable || a.variable();
  }
  out += " then " + render(rule.consequent, theory, rule.consequent.variable() && !seen_variable);
  return out + ".";
}

std::vector<std::string> statements(const Theory& theory) {
  std::vector<std::string> out;
  for (const auto& f : theory.facts) out.push_back(capitalized(render(f, theory)) + ".");
  for (const auto& r : theory.rules) out.push_back(render(r, theory));
  return out;
}

namespace {

Literal random_literal(std::mt19937_64& rng, const Theory& theory, const std::vector<std::string>& attributes,
                       const std::vector<std::string>& verbs, std::string subject, double negative) {
  Literal l;
  l.subject = std::move(subject);
  if (chance(rng, 0.6)) {
    l.relation = "is";
    l.object = pick(rng, attributes);
  } else {
    l.relation = pick(rng, verbs);
    do {
      l.object = pick(rng, theory.entities);
    } while (l.object == l.subject && theory.entities.size() > 1);
  }
  l.positive = !chance(rng, negative);
  return l;
}

std::optional<Theory> random_theory(std::mt19937_64& rng, const Limits& limits) {
  Theory t;
  t.people = chance(rng, 0.5);
  std::vector<std::string> pool = t.people ? kNames : kAnimals;
  std::shuffle(pool.begin(), pool.end(), rng);
  const int entities = std::uniform_int_distribution<int>(2, std::min(limits.max_entities, 4))(rng);
  t.entities.assign(pool.begin(), pool.begin() + entities);

  std::vector<std::string> attributes = kAttributes;
  std::shuffle(attributes.begin(), attributes.end(), rng);
  attributes.resize(std::uniform_int_distribution<std::size_t>(3, 5)(rng));
  std::vector<std::string> verbs = kVerbs;
  std::shuffle(verbs.begin(), verbs.end(), rng);
  verbs.resize(std::uniform_int_distribution<std::size_t>(1, 3)(rng));

  // Every entity is the subject of some fact so rule variables range over all of them.
  std::set<Literal> facts;
  for (const auto& e : t.entities) facts.insert(random_literal(rng, t, attributes, verbs, e, 0.2));
  const int extra = std::uniform_int_distribution<int>(1, 4)(rng);
  for (int i = 0; i < extra; ++i) facts.insert(random_literal(rng, t, attributes, verbs, pick(rng, t.entities), 0.2));
  t.facts.assign(facts.begin(), facts.end());
  std::shuffle(t.facts.begin(), t.facts.end(), rng);

  const int rules = std::uniform_int_distribution<int>(2, limits.max_rules)(rng);
  for (int i = 0; i < rules; ++i) {
    SyntheticRule r;
    r.antecedents.push_back(random_literal(rng, t, attributes, verbs, "", 0.15));
    if (chance(rng, 0.4)) {
      const std::string subject = chance(rng, 0.7) ? "" : pick(rng, t.entities);
      r.antecedents.push_back(random_literal(rng, t, attributes, verbs, subject, 0.15));
      if (r.antecedents[1] == r.antecedents[0]) r.antecedents.pop_back();
    }
    r.consequent = random_literal(rng, t, attributes, verbs, chance(rng, 0.8) ? "" : pick(rng, t.entities), 0.2);
    if (std::find(r.antecedents.begin(), r.antecedents.end(), r.consequent) != r.antecedents.end()) continue;
    t.rules.push_back(std::move(r));
  }
  if (t.rules.empty()) return std::nullopt;
  return t;
}

}  // namespace

SyntheticCase generate_case(std::mt19937_64& rng, std::size_t index, const Limits& limits) {
  const Label wanted = static_cast<Label>(index % 3);
  for (;;) {
    std::optional<Theory> theory = random_theory(rng, limits);
    if (!theory) continue;
    const EnumeratedClosure closure = enumerate_closure(*theory);
    if (!closure.consistent || closure.depth == 0 || closure.depth > limits.max_depth) continue;

    std::vector<Literal> derived;
    for (const auto& [f, round] : closure.facts) {
      if (round > 0) derived.push_back(f);
    }
    std::optional<Literal> query;
    if (wanted == Label::True) {
      query = pick(rng, derived);
    } else if (wanted == Label::False) {
      query = pick(rng, derived).negation();
    } else {
      std::vector<std::string> attributes;
      std::vector<std::string> verbs;
      for (const auto& [f, round] : closure.facts) {
        (f.relation == "is" ? attributes : verbs).push_back(f.relation == "is" ? f.object : f.relation);
      }
      for (int attempt = 0; attempt < 50 && !query; ++attempt) {
        Literal l = random_literal(rng, *theory, attributes.empty() ? kAttributes : attributes,
                                   verbs.empty() ? kVerbs : verbs, pick(rng, theory->entities), 0.3);
        if (enumerate_label(closure, l) == Label::Unknown) query = l;
      }
      if (!query) continue;
    }
    SyntheticCase c;
    c.id = "synthetic-" + std::string(index < 10 ? "00" : index < 100 ? "0" : "") + std::to_string(index);
    c.theory = std::move(*theory);
    c.query = *query;
    c.gold = enumerate_label(closure, *query);
    c.depth = closure.depth;
    return c;
  }
}

std::vector<SyntheticCase> generate_suite(std::uint64_t seed, std::size_t count, const Limits& limits) {
  std::mt19937_64 rng(seed);
  std::vector<SyntheticCase> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(generate_case(rng, i, limits));
  return out;
}

ProblemInstance to_problem(const SyntheticCase& c) {
  ProblemInstance p;
  p.case_id = c.id;
  p.dataset = Dataset::ProofWriter;
  const std::vector<std::string> texts = statements(c.theory);
  for (const auto& s : texts) p.context += (p.context.empty() ? "" : " ") + s;
  p.premises = make_input_premises(texts);
  p.target.hypothesis = capitalized(render(c.query, c.theory)) + ".";
  p.target.question =
      "Based on the above information, is the following statement true, false, or unknown? " + p.target.hypothesis;
  p.target.options = {{"A", "True"}, {"B", "False"}, {"C", "Unknown"}};
  p.target.answer_key = c.gold == Label::True ? "A" : c.gold == Label::False ? "B" : "C";
  return p;
}

}  // namespace determlr::reference
