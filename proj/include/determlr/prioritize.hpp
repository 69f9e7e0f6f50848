#pragma once

// Term tagging and the two-stage premise scoring (relevance to the target,
// supplement score against the chosen primary premise).

#include <compare>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "determlr/core.hpp"

namespace determlr {

struct TermProfile {
  std::set<std::string> nouns;
  std::set<std::string> adjectives;

  bool empty() const { return nouns.empty() && adjectives.empty(); }
  friend bool operator==(const TermProfile&, const TermProfile&) = default;
};

/// Word lists behind the tagger. One token (or multiword entity) per line.
struct Lexicon {
  std::set<std::string> stopwords;
  std::set<std::string> adjectives;
  std::vector<std::string> entities;  // multiword names, e.g. "bald eagle"

  /// Lists shipped with the library.
  static const Lexicon& builtin();
  static Lexicon from_text(std::string_view stopwords, std::string_view adjectives,
                           std::string_view entities);
  void add_entity(std::string entity);
};

/// Stopword + lexicon tagger. Anything that is neither a stopword nor a known
/// adjective counts as a noun.
class TermProfiler {
 public:
  TermProfiler() : TermProfiler(Lexicon::builtin()) {}
  explicit TermProfiler(Lexicon lexicon);

  TermProfile profile(std::string_view statement) const;
  const Lexicon& lexicon() const { return lexicon_; }

 private:
  Lexicon lexicon_;
};

/// Score in exact hundredths; 0.25 is Score{25}.
struct Score {
  int hundredths = 0;

  static constexpr int kCap = 100;
  static Score from_counts(std::size_t nouns, std::size_t adjectives, int bonus = 0);
  /// Smallest score that satisfies `>= theta`.
  static Score threshold(double theta);

  double value() const { return hundredths / 100.0; }
  std::string str() const;  // "0.75"

  auto operator<=>(const Score&) const = default;
};

enum class ScoreStage { Relevance, Supplement };

struct ScoredCandidate {
  PremiseId premise_id;
  Score score;
  ScoreStage stage = ScoreStage::Relevance;
};

struct SelectionResult {
  Premise primary;
  std::vector<Premise> supplements;
  std::map<PremiseId, Score> scores;
};

struct SharedTerms {
  std::size_t nouns = 0;
  std::size_t adjectives = 0;
};

SharedTerms shared_terms(const TermProfile& a, const TermProfile& b);

Score relevance(std::string_view statement, std::string_view hypothesis, const TermProfiler& profiler);
Score relevance(const Premise& premise, const Target& target, const TermProfiler& profiler);

/// Shared-term score plus 0.25 when `candidate` is a conditional whose
/// antecedent the primary satisfies.
Score supplement_score(const Premise& primary, const Premise& candidate, const TermProfiler& profiler);

/// Argmax relevance over `determinate`, skipping `failed` unless every member
/// failed. Ties go to the earliest premise. With `random` set the choice is
/// uniform instead. Throws EmptyDeterminateSet.
Premise select_primary(const std::vector<Premise>& determinate, const Target& target,
                       const std::set<PremiseId>& failed, const TermProfiler& profiler,
                       std::mt19937_64* random = nullptr);

/// Pool members scoring >= theta, by descending score then input order.
std::vector<ScoredCandidate> select_supplements(const Premise& primary, const std::vector<Premise>& pool,
                                                double theta, const TermProfiler& profiler);

}  // namespace determlr
