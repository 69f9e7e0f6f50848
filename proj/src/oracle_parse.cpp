#include <algorithm>
#include <cctype>
#include <set>

#include "determlr/core.hpp"
#include "determlr/oracle.hpp"

namespace determlr::oracle {

namespace {

struct Token {
  std::string word;
  std::size_t offset = 0;
};

using Tokens = std::vector<Token>;

const std::set<std::string, std::less<>> kArticles = {"the", "a", "an"};
const std::set<std::string, std::less<>> kVariableWords = {"something", "someone", "somebody"};
const std::set<std::string, std::less<>> kPronouns = {"it", "they", "them"};
const std::set<std::string, std::less<>> kCopulas = {"is", "are"};
const std::set<std::string, std::less<>> kKnownVerbs = {
    "chases", "eats",  "sees",   "likes", "needs", "visits", "loves",
    "hates",  "helps", "attacks", "kicks", "wants", "holds"};
const std::set<std::string, std::less<>> kStructureWords = {"if", "then", "and", "or", "either"};

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == ',')) ++i;
    std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != ',') ++i;
    if (i > start) out.push_back({std::string(text.substr(start, i - start)), start});
  }
  return out;
}

std::string join(const Tokens& tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += tokens[i].word;
  }
  return out;
}

Tokens slice(const Tokens& tokens, std::size_t begin, std::size_t end) {
  return Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                tokens.begin() + static_cast<std::ptrdiff_t>(end));
}

[[noreturn]] void fail(std::string_view text, const Tokens& tokens, std::size_t index,
                       const std::string& why) {
  const std::size_t pos = index < tokens.size() ? tokens[index].offset : text.size();
  throw ParseError(std::string(text), pos, why);
}

bool looks_like_verb(std::string_view word) {
  if (kCopulas.contains(word) || word == "does" || word == "do") return true;
  if (kKnownVerbs.contains(word)) return true;
  if (word.size() < 4 || word.back() != 's') return false;
  if (word.ends_with("ss") || word.ends_with("us") || word.ends_with("'s")) return false;
  return true;
}

bool is_variable_word(std::string_view word) {
  return kVariableWords.contains(word) || kPronouns.contains(word);
}

bool has_verb(const Tokens& tokens) {
  // "they see the dog": pronoun subjects take the base form.
  if (tokens.size() >= 2 && kPronouns.contains(tokens[0].word)) return true;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i == 0 && !kCopulas.contains(tokens[i].word) && tokens[i].word != "does") continue;
    if (looks_like_verb(tokens[i].word)) return true;
  }
  return false;
}

// Singular class name for a plural noun ("wumpuses" -> "wumpus").
std::string singular(std::string_view word) {
  if (word.ends_with("ies") && word.size() > 3) return std::string(word.substr(0, word.size() - 3)) + "y";
  for (std::string_view suffix : {"sses", "shes", "ches", "xes", "zes", "uses"}) {
    if (word.ends_with(suffix)) return std::string(word.substr(0, word.size() - 2));
  }
  if (word.ends_with("s") && !word.ends_with("ss")) return std::string(word.substr(0, word.size() - 1));
  return std::string(word);
}

bool plural_noun(std::string_view word) {
  return word.size() > 3 && word.back() == 's' && !word.ends_with("ous") && !word.ends_with("ss");
}

Term parse_term(std::string_view text, const Tokens& tokens, std::size_t begin, std::size_t end,
                const Term* variable_hint) {
  if (begin >= end) fail(text, tokens, begin, "expected a noun phrase");
  for (std::size_t i = begin; i < end; ++i) {
    if (kStructureWords.contains(tokens[i].word) || tokens[i].word == "not") {
      fail(text, tokens, i, "unexpected '" + tokens[i].word + "' in noun phrase");
    }
  }
  if (end - begin == 1 && is_variable_word(tokens[begin].word)) {
    Term v = variable_hint && variable_hint->variable ? *variable_hint : Term::var();
    const std::string& w = tokens[begin].word;
    if (w == "they" || w == "them") v.pronoun = "they";
    if (w == "it") v.pronoun = "it";
    return v;
  }
  std::string article;
  if (end - begin > 1 && kArticles.contains(tokens[begin].word)) {
    article = tokens[begin].word;
    ++begin;
  }
  return Term::constant(join(tokens, begin, end), article);
}

struct AtomContext {
  const Term* variable = nullptr;  // variable already introduced in the rule
};

Atom parse_atom(std::string_view text, const Tokens& tokens, AtomContext ctx) {
  const std::size_t n = tokens.size();
  if (n == 0) fail(text, tokens, 0, "empty clause");

  // "X is true" / "X is not true" / "X is false" over a propositional symbol.
  if (n >= 3 && (tokens[n - 1].word == "true" || tokens[n - 1].word == "false")) {
    const bool is_false = tokens[n - 1].word == "false";
    std::size_t is_at = n - 2;
    bool negated = is_false;
    if (tokens[is_at].word == "not") {
      negated = !negated;
      --is_at;
    }
    if (is_at >= 1 && tokens[is_at].word == "is") {
      return Atom::symbol(join(tokens, 0, is_at), negated);
    }
  }
  if (n == 1 && !looks_like_verb(tokens[0].word) && !is_variable_word(tokens[0].word)) {
    return Atom::symbol(tokens[0].word);
  }
  if (n == 2 && tokens[0].word == "not") return Atom::symbol(tokens[1].word, true);

  // Locate the verb that ends the subject noun phrase.
  std::size_t verb = n;
  if (is_variable_word(tokens[0].word)) {
    verb = 1;
  } else {
    std::size_t first = kArticles.contains(tokens[0].word) ? 1 : 0;
    if (first == 1 && n > 1 && looks_like_verb(tokens[1].word)) first = 0;  // "a is ..."
    for (std::size_t i = first + 1; i < n; ++i) {
      if (looks_like_verb(tokens[i].word)) {
        verb = i;
        break;
      }
    }
  }
  if (verb >= n) fail(text, tokens, n, "no verb found");

  Term subject;
  if (verb == 1 && is_variable_word(tokens[0].word)) {
    subject = ctx.variable ? *ctx.variable : Term::var();
    const std::string& w = tokens[0].word;
    if (kVariableWords.contains(w)) subject.name = w;
    if (w == "they" || w == "them") subject.pronoun = "they";
    if (w == "it") subject.pronoun = "it";
  } else if (verb == 1 && kArticles.contains(tokens[0].word)) {
    subject = Term::constant(tokens[0].word);
  } else {
    subject = parse_term(text, tokens, 0, verb, ctx.variable);
  }
  const bool plural_subject = tokens[0].word == "they";

  Atom atom;
  atom.subject = subject;
  std::size_t rest = verb + 1;
  const std::string& v = tokens[verb].word;
  if (kCopulas.contains(v)) {
    atom.relation = "is";
    if (rest < n && tokens[rest].word == "not") {
      atom.negated = true;
      ++rest;
    }
    if (rest < n && tokens[rest].word == "either") fail(text, tokens, rest, "disjunction in fact");
  } else if (v == "does" || v == "do") {
    if (rest >= n || tokens[rest].word != "not") fail(text, tokens, rest, "expected 'not'");
    ++rest;
    if (rest >= n) fail(text, tokens, rest, "expected a verb");
    atom.relation = third_person(tokens[rest].word);
    atom.negated = true;
    ++rest;
  } else {
    atom.relation = plural_subject ? third_person(v) : v;
  }
  if (rest >= n) {
    if (atom.relation == "is") fail(text, tokens, rest, "missing predicate");
    return atom;
  }
  if (atom.relation == "is" && v == "are" && rest + 1 == n && plural_noun(tokens[rest].word)) {
    atom.object = Term::constant(singular(tokens[rest].word), "a");
    return atom;
  }
  atom.object = parse_term(text, tokens, rest, n, ctx.variable);
  if (atom.object.variable && ctx.variable == nullptr && !subject.variable) {
    fail(text, tokens, rest, "unbound variable");
  }
  return atom;
}

std::vector<Tokens> split_on(const Tokens& tokens, std::string_view word) {
  std::vector<Tokens> parts(1);
  for (const auto& t : tokens) {
    if (t.word == word) {
      parts.emplace_back();
    } else {
      parts.back().push_back(t);
    }
  }
  return parts;
}

const Term* first_variable(const std::vector<Atom>& atoms, Term& storage) {
  for (const auto& a : atoms) {
    if (a.subject.variable) return &(storage = a.subject);
    if (a.object.variable) return &(storage = a.object);
  }
  return nullptr;
}

Rule parse_rule(std::string_view text, const Tokens& tokens) {
  auto then_at = std::find_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.word == "then"; });
  if (then_at == tokens.end()) fail(text, tokens, tokens.size(), "conditional without 'then'");
  const std::size_t then_index = static_cast<std::size_t>(then_at - tokens.begin());
  const Tokens antecedent = slice(tokens, 1, then_index);
  const Tokens consequent = slice(tokens, then_index + 1, tokens.size());
  if (antecedent.empty()) fail(text, tokens, 1, "empty antecedent");
  if (consequent.empty()) fail(text, tokens, tokens.size(), "empty consequent");

  Rule rule;
  Term var_storage;
  const Term* var = nullptr;
  Tokens previous;
  for (const Tokens& conjunct : split_on(antecedent, "and")) {
    if (conjunct.empty()) fail(text, tokens, 1, "empty conjunct");
    Atom atom;
    const bool verbless = !has_verb(conjunct);
    if (verbless && !rule.antecedents.empty() && !rule.antecedents.back().propositional()) {
      // "something is big and not kind": inherit the subject and copula.
      Tokens patched = previous;
      for (const auto& t : conjunct) patched.push_back(t);
      atom = parse_atom(text, patched, {var});
    } else {
      atom = parse_atom(text, conjunct, {var});
    }
    rule.antecedents.push_back(atom);
    if (!var) var = first_variable(rule.antecedents, var_storage);
    // Subject plus copula, reused by a following subject-less conjunct.
    previous.clear();
    for (const auto& t : conjunct) {
      previous.push_back(t);
      if (looks_like_verb(t.word)) break;
    }
  }
  rule.consequent = parse_atom(text, consequent, {var});
  const bool needs_var = rule.consequent.subject.variable || rule.consequent.object.variable;
  if (needs_var && !var) fail(text, tokens, then_index + 1, "variable in consequent only");
  return rule;
}

// "all red things are kind", "every wumpus is a tumpus", "wumpuses are not red".
std::optional<Rule> parse_universal(std::string_view text, const Tokens& tokens) {
  const std::size_t n = tokens.size();
  std::size_t begin = 0;
  const bool quantified = tokens[0].word == "all" || tokens[0].word == "every" || tokens[0].word == "each";
  if (quantified) begin = 1;
  std::size_t verb = n;
  for (std::size_t i = begin + 1; i < n; ++i) {
    if (kCopulas.contains(tokens[i].word)) {
      verb = i;
      break;
    }
  }
  if (verb >= n) return std::nullopt;
  Tokens subject = slice(tokens, begin, verb);
  const bool collective = !subject.empty() &&
                          (subject.back().word == "things" || subject.back().word == "people");
  const bool plural_class = tokens[verb].word == "are";
  if (!quantified && !collective && !plural_class) return std::nullopt;
  if (collective) subject.pop_back();
  if (subject.empty()) return std::nullopt;
  for (const auto& t : subject) {
    if (kArticles.contains(t.word) || is_variable_word(t.word) || kStructureWords.contains(t.word)) {
      if (t.word != "and") return std::nullopt;
    }
  }

  Rule rule;
  const Term x = Term::var(collective && tokens[verb - 1].word == "people" ? "someone" : "something");
  if (collective) {
    for (const auto& t : subject) {
      if (t.word == "and") continue;
      rule.antecedents.push_back(Atom{x, "is", Term::constant(t.word), false});
    }
  } else {
    std::string cls = join(subject, 0, subject.size());
    if (plural_class && subject.size() == 1) cls = singular(cls);
    rule.antecedents.push_back(Atom{x, "is", Term::constant(cls, "a"), false});
  }
  Tokens predicate;
  predicate.push_back({"it", tokens[verb].offset});
  predicate.push_back({"is", tokens[verb].offset});
  for (std::size_t i = verb + 1; i < n; ++i) predicate.push_back(tokens[i]);
  if (plural_class && n - verb - 1 >= 1 && plural_noun(tokens[n - 1].word) &&
      !kArticles.contains(tokens[verb + 1].word)) {
    predicate.back().word = singular(predicate.back().word);
    predicate.insert(predicate.end() - 1, Token{"a", tokens[n - 1].offset});
  }
  rule.consequent = parse_atom(text, predicate, {&x});
  return rule;
}

Disjunction parse_disjunction(std::string_view text, const Tokens& tokens) {
  Tokens cleaned;
  for (const auto& t : tokens) {
    if (t.word != "either") cleaned.push_back(t);
  }
  auto parts = split_on(cleaned, "or");
  if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
    fail(text, tokens, 0, "only two-way disjunctions are supported");
  }
  Atom left = parse_atom(text, parts[0], {});
  Atom right;
  if (has_verb(parts[1]) || left.propositional()) {
    right = parse_atom(text, parts[1], {});
  } else {
    // "the cat is red or blue": the right side shares subject and relation.
    Tokens patched;
    for (const auto& t : parts[0]) {
      patched.push_back(t);
      if (looks_like_verb(t.word)) break;
    }
    if (left.negated && left.relation == "is") patched.push_back({"not", parts[1][0].offset});
    for (const auto& t : parts[1]) patched.push_back(t);
    right = parse_atom(text, patched, {});
  }
  if (left.subject.variable || right.subject.variable) {
    fail(text, tokens, 0, "disjunction over a variable");
  }
  const bool propositional = left.propositional() && right.propositional();
  if (!propositional && !(left.subject == right.subject)) {
    fail(text, tokens, 0, "disjuncts must share a subject");
  }
  return {left, right};
}

std::string render_term(const Term& term, bool first_variable_use) {
  if (term.variable) return first_variable_use ? term.name : term.pronoun;
  if (term.article.empty()) return term.name;
  return term.article + " " + term.name;
}

std::string render_atom(const Atom& atom, bool& variable_seen) {
  if (atom.propositional()) {
    return atom.subject.name + (atom.negated ? " is not true" : " is true");
  }
  const bool subject_first = atom.subject.variable && !variable_seen;
  std::string out = render_term(atom.subject, subject_first);
  const bool plural = atom.subject.variable && !subject_first && atom.subject.pronoun == "they";
  if (atom.subject.variable) variable_seen = true;
  if (atom.relation == "is") {
    out += plural ? " are" : " is";
    if (atom.negated) out += " not";
  } else if (atom.negated) {
    out += plural ? " do not " : " does not ";
    out += base_form(atom.relation);
  } else {
    out += " " + (plural ? base_form(atom.relation) : atom.relation);
  }
  if (!atom.object.empty()) {
    const bool object_first = atom.object.variable && !variable_seen;
    std::string object = render_term(atom.object, object_first);
    if (atom.object.variable && !object_first && atom.object.pronoun == "they") object = "them";
    if (atom.object.variable) variable_seen = true;
    out += " " + object;
  }
  return out;
}

}  // namespace

Term Term::constant(std::string name, std::string article) {
  Term t;
  t.name = std::move(name);
  t.article = std::move(article);
  return t;
}

Term Term::var(std::string word, std::string pronoun) {
  Term t;
  t.name = std::move(word);
  t.variable = true;
  t.pronoun = std::move(pronoun);
  return t;
}

Atom Atom::symbol(std::string name, bool negated) {
  Atom a;
  a.subject = Term::constant(std::move(name));
  a.negated = negated;
  return a;
}

Atom Atom::negation() const {
  Atom a = *this;
  a.negated = !negated;
  return a;
}

bool Rule::has_variable() const {
  auto var = [](const Atom& a) { return a.subject.variable || a.object.variable; };
  return var(consequent) || std::any_of(antecedents.begin(), antecedents.end(), var);
}

std::string third_person(std::string_view base) {
  std::string b(base);
  if (b.empty()) return b;
  for (std::string_view suffix : {"s", "x", "z", "ch", "sh", "o"}) {
    if (b.ends_with(suffix)) return b + "es";
  }
  if (b.size() > 1 && b.back() == 'y' && std::string_view("aeiou").find(b[b.size() - 2]) == std::string_view::npos) {
    return b.substr(0, b.size() - 1) + "ies";
  }
  return b + "s";
}

std::string base_form(std::string_view verb) {
  std::string v(verb);
  if (v.ends_with("ies") && v.size() > 3) return v.substr(0, v.size() - 3) + "y";
  for (std::string_view suffix : {"sses", "shes", "ches", "xes", "zes", "oes"}) {
    if (v.ends_with(suffix)) return v.substr(0, v.size() - 2);
  }
  if (v.ends_with("s")) return v.substr(0, v.size() - 1);
  return v;
}

Clause parse_statement(std::string_view raw) {
  const std::string text = normalize(raw);
  const Tokens tokens = tokenize(text);
  if (tokens.empty()) throw ParseError(text, 0, "empty statement");
  if (tokens[0].word == "if") return parse_rule(text, tokens);
  const bool has_or = std::any_of(tokens.begin(), tokens.end(), [](const Token& t) { return t.word == "or"; });
  if (has_or) return parse_disjunction(text, tokens);
  for (const auto& t : tokens) {
    if (t.word == "then" || t.word == "and") {
      fail(text, tokens, static_cast<std::size_t>(&t - tokens.data()), "unsupported connective '" + t.word + "'");
    }
  }
  if (auto universal = parse_universal(text, tokens)) return *universal;
  Atom atom = parse_atom(text, tokens, {});
  if (!atom.ground()) fail(text, tokens, 0, "free variable in a fact");
  return atom;
}

std::optional<Clause> try_parse_statement(std::string_view text) {
  try {
    return parse_statement(text);
  } catch (const Error&) {
    return std::nullopt;
  }
}

Atom parse_fact(std::string_view text) {
  Clause clause = parse_statement(text);
  if (auto* atom = std::get_if<Atom>(&clause)) return *atom;
  throw ParseError(std::string(text), 0, "expected a simple fact");
}

std::string unparse(const Atom& atom) {
  bool seen = false;
  return render_atom(atom, seen);
}

std::string unparse(const Rule& rule) {
  bool seen = false;
  std::string out = "if ";
  for (std::size_t i = 0; i < rule.antecedents.size(); ++i) {
    if (i > 0) out += " and ";
    out += render_atom(rule.antecedents[i], seen);
  }
  out += " then " + render_atom(rule.consequent, seen);
  return out;
}

std::string unparse(const Disjunction& d) {
  if (d.left.relation == d.right.relation && d.left.negated == d.right.negated &&
      !d.left.propositional() && !d.right.object.empty()) {
    bool seen = false;
    Atom head = d.left;
    std::string left = render_atom(head, seen);
    // Replace the object of the left atom with "either X or Y".
    const std::string object = render_term(d.left.object, false);
    left.erase(left.size() - object.size());
    return left + "either " + object + " or " + render_term(d.right.object, false);
  }
  return "either " + unparse(d.left) + " or " + unparse(d.right);
}

std::string unparse(const Clause& clause) {
  return std::visit([](const auto& c) { return unparse(c); }, clause);
}

std::string render_sentence(const Clause& clause) {
  std::string s = unparse(clause);
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s + ".";
}

}  // namespace determlr::oracle
