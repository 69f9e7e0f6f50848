#include "determlr/prioritize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iterator>
#include <sstream>

#include "determlr/oracle.hpp"
#include "embedded_data.hpp"

namespace determlr {

namespace {

struct Token {
  std::string original;
  std::string lower;
  bool comma_after = false;  // punctuation boundary follows
};

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || c == '-' || c == '\'' || u >= 0x80;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    // Trailing apostrophes and hyphens are punctuation, not part of a word.
    while (!current.empty() && (current.back() == '\'' || current.back() == '-')) current.pop_back();
    if (!current.empty()) out.push_back({current, to_lower(current), false});
    current.clear();
  };
  for (char c : text) {
    if (is_word_char(c)) {
      current.push_back(c);
      continue;
    }
    flush();
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r' && !out.empty()) out.back().comma_after = true;
  }
  flush();
  return out;
}

bool is_capitalized(const std::string& word) {
  return !word.empty() && std::isupper(static_cast<unsigned char>(word.front())) != 0;
}

bool is_single_capital(const std::string& word) {
  return word.size() == 1 && std::isupper(static_cast<unsigned char>(word.front())) != 0;
}

std::set<std::string> lines_of(std::string_view text) {
  std::set<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    line = to_lower(trim(line));
    if (!line.empty() && line.front() != '#') out.insert(line);
  }
  return out;
}

}  // namespace

const Lexicon& Lexicon::builtin() {
  static const Lexicon lexicon = from_text(embedded::kStopwords, embedded::kAdjectives, embedded::kEntities);
  return lexicon;
}

Lexicon Lexicon::from_text(std::string_view stopwords, std::string_view adjectives,
                           std::string_view entities) {
  Lexicon lex;
  lex.stopwords = lines_of(stopwords);
  lex.adjectives = lines_of(adjectives);
  for (const auto& e : lines_of(entities)) lex.add_entity(e);
  return lex;
}

void Lexicon::add_entity(std::string entity) {
  entity = to_lower(trim(entity));
  if (entity.empty() || std::find(entities.begin(), entities.end(), entity) != entities.end()) return;
  entities.push_back(std::move(entity));
  // Longest entities first so that matching is greedy.
  std::stable_sort(entities.begin(), entities.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
}

TermProfiler::TermProfiler(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

TermProfile TermProfiler::profile(std::string_view statement) const {
  const std::vector<Token> tokens = tokenize(statement);
  const auto stop = [&](std::size_t i) {
    return i >= tokens.size() || lexicon_.stopwords.contains(tokens[i].lower);
  };

  std::vector<std::string> terms;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const Token& tok = tokens[i];

    // "A is true", "If A then B": a lone capital letter is a symbol, not an article.
    if (is_single_capital(tok.original) &&
        (tok.comma_after || stop(i + 1) || is_single_capital(tokens[i + 1].original))) {
      terms.push_back(tok.lower);
      ++i;
      continue;
    }

    bool merged = false;
    for (const auto& entity : lexicon_.entities) {
      std::istringstream words(entity);
      std::vector<std::string> parts{std::istream_iterator<std::string>(words), {}};
      if (parts.size() < 2 || i + parts.size() > tokens.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < parts.size() && match; ++k) {
        match = tokens[i + k].lower == parts[k] && (k + 1 == parts.size() || !tokens[i + k].comma_after);
      }
      if (match) {
        terms.push_back(entity);
        i += parts.size();
        merged = true;
        break;
      }
    }
    if (merged) continue;

    if (is_capitalized(tok.original) && !stop(i)) {
      std::size_t j = i;
      std::string name = tok.lower;
      while (!tokens[j].comma_after && j + 1 < tokens.size() && is_capitalized(tokens[j + 1].original) &&
             !stop(j + 1) && !is_single_capital(tokens[j + 1].original)) {
        ++j;
        name += ' ' + tokens[j].lower;
      }
      if (j > i) {
        terms.push_back(name);
        i = j + 1;
        continue;
      }
    }

    if (!stop(i)) terms.push_back(tok.lower);
    ++i;
  }

  TermProfile out;
  for (auto& t : terms) {
    if (lexicon_.adjectives.contains(t)) {
      out.adjectives.insert(std::move(t));
    } else {
      out.nouns.insert(std::move(t));
    }
  }
  return out;
}

Score Score::from_counts(std::size_t nouns, std::size_t adjectives, int bonus) {
  const long long raw = 25LL * static_cast<long long>(nouns) + 30LL * static_cast<long long>(adjectives) + bonus;
  return Score{static_cast<int>(std::min<long long>(kCap, raw))};
}

Score Score::threshold(double theta) {
  return Score{static_cast<int>(std::ceil(theta * 100.0 - 1e-9))};
}

std::string Score::str() const {
  std::string frac = std::to_string(hundredths % 100);
  if (frac.size() < 2) frac.insert(frac.begin(), '0');
  return std::to_string(hundredths / 100) + "." + frac;
}

SharedTerms shared_terms(const TermProfile& a, const TermProfile& b) {
  SharedTerms out;
  for (const auto& n : a.nouns) out.nouns += b.nouns.contains(n) ? 1 : 0;
  for (const auto& j : a.adjectives) out.adjectives += b.adjectives.contains(j) ? 1 : 0;
  return out;
}

Score relevance(std::string_view statement, std::string_view hypothesis, const TermProfiler& profiler) {
  const auto shared = shared_terms(profiler.profile(statement), profiler.profile(hypothesis));
  return Score::from_counts(shared.nouns, shared.adjectives);
}

Score relevance(const Premise& premise, const Target& target, const TermProfiler& profiler) {
  return relevance(premise.text(), target.hypothesis, profiler);
}

Score supplement_score(const Premise& primary, const Premise& candidate, const TermProfiler& profiler) {
  const auto shared = shared_terms(profiler.profile(primary.text()), profiler.profile(candidate.text()));
  int bonus = 0;
  const auto rule_clause = oracle::try_parse_statement(candidate.text());
  const auto* rule = rule_clause ? std::get_if<oracle::Rule>(&*rule_clause) : nullptr;
  if (rule) {
    const auto fact_clause = oracle::try_parse_statement(primary.text());
    const auto* fact = fact_clause ? std::get_if<oracle::Atom>(&*fact_clause) : nullptr;
    if (fact && fact->ground() && oracle::match_antecedent(*fact, *rule)) bonus = 25;
  }
  return Score::from_counts(shared.nouns, shared.adjectives, bonus);
}

Premise select_primary(const std::vector<Premise>& determinate, const Target& target,
                       const std::set<PremiseId>& failed, const TermProfiler& profiler,
                       std::mt19937_64* random) {
  if (determinate.empty()) throw EmptyDeterminateSet();
  if (random) {
    std::uniform_int_distribution<std::size_t> pick(0, determinate.size() - 1);
    return determinate[pick(*random)];
  }
  const bool all_failed = std::all_of(determinate.begin(), determinate.end(),
                                      [&](const Premise& p) { return failed.contains(p.id()); });
  const Premise* best = nullptr;
  Score best_score{-1};
  for (const auto& p : determinate) {
    if (!all_failed && failed.contains(p.id())) continue;
    const Score s = relevance(p, target, profiler);
    if (!best || s > best_score || (s == best_score && p.order_key() < best->order_key())) {
      best = &p;
      best_score = s;
    }
  }
  return *best;
}

std::vector<ScoredCandidate> select_supplements(const Premise& primary, const std::vector<Premise>& pool,
                                                double theta, const TermProfiler& profiler) {
  const Score bar = Score::threshold(theta);
  std::vector<std::pair<ScoredCandidate, std::pair<int, int>>> kept;
  for (const auto& p : pool) {
    if (p.id() == primary.id()) continue;
    const Score s = supplement_score(primary, p, profiler);
    if (s >= bar) kept.push_back({{p.id(), s, ScoreStage::Supplement}, p.order_key()});
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.first.score != b.first.score) return a.first.score > b.first.score;
    return a.second < b.second;
  });
  std::vector<ScoredCandidate> out;
  out.reserve(kept.size());
  for (auto& k : kept) out.push_back(std::move(k.first));
  return out;
}

}  // namespace determlr
