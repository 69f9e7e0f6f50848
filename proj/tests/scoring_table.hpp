#pragma once

// Hand-tagged scoring cases. Each row lists the shared nouns and adjectives
// worked out by reading the two statements, plus the expected score in
// hundredths computed from those lists independently of the library.

#include <algorithm>
#include <string>
#include <vector>

namespace determlr::testing {

enum class Scoring { Relevance, Supplement };

struct ScoringRow {
  Scoring kind;
  std::string first;   // premise, or the primary for supplement rows
  std::string second;  // hypothesis, or the candidate
  std::vector<std::string> shared_nouns;
  std::vector<std::string> shared_adjectives;
  bool hypothetical = false;  // candidate is a rule whose antecedent the primary satisfies
  int expected = 0;           // hundredths
};

/// 0.25 per noun, 0.3 per adjective, 0.25 bonus, capped at 1.
inline int hand_score(const ScoringRow& row) {
  const int raw = 25 * static_cast<int>(row.shared_nouns.size()) +
                  30 * static_cast<int>(row.shared_adjectives.size()) + (row.hypothetical ? 25 : 0);
  return std::min(raw, 100);
}

inline const std::vector<ScoringRow>& scoring_table() {
  static const std::vector<ScoringRow> rows{
      {Scoring::Relevance, "The bald eagle chases the cat.", "The cat eats the bald eagle.", {"bald eagle", "cat"}, {}, false, 50},
      {Scoring::Relevance, "The bald eagle is kind.", "The cat eats the bald eagle.", {"bald eagle"}, {}, false, 25},
      {Scoring::Relevance, "The dog sees the cat.", "The cat eats the bald eagle.", {"cat"}, {}, false, 25},
      {Scoring::Relevance, "The dog is blue.", "The cat eats the bald eagle.", {}, {}, false, 0},
      {Scoring::Relevance, "The cat eats the bald eagle.", "The cat eats the bald eagle.", {"cat", "eats", "bald eagle"}, {}, false, 75},
      {Scoring::Relevance, "The lion is green.", "The lion is green.", {"lion"}, {"green"}, false, 55},
      {Scoring::Relevance, "The bear is big and red.", "The bear is red.", {"bear"}, {"red"}, false, 55},
      {Scoring::Relevance, "The bear is big and red.", "The bear is big and red.", {"bear"}, {"big", "red"}, false, 85},
      {Scoring::Relevance, "The mouse is big, red, round and kind.", "The mouse is big, red, round and kind.", {"mouse"}, {"big", "red", "round", "kind"}, false, 100},
      {Scoring::Relevance, "Anne is quiet.", "Anne is not quiet.", {"anne"}, {"quiet"}, false, 55},
      {Scoring::Relevance, "Bob is young.", "Anne is young.", {}, {"young"}, false, 30},
      {Scoring::Relevance, "The tiger likes the mouse.", "The mouse likes the tiger.", {"tiger", "likes", "mouse"}, {}, false, 75},
      {Scoring::Relevance, "The cat chases the dog.", "The dog chases the rabbit.", {"chases", "dog"}, {}, false, 50},
      {Scoring::Relevance, "Something is cold.", "The squirrel is cold.", {}, {"cold"}, false, 30},
      {Scoring::Relevance, "Every wumpus is a tumpus.", "Max is a tumpus.", {"tumpus"}, {}, false, 25},
      {Scoring::Relevance, "The cat is rough and the dog is rough.", "The rabbit is rough.", {}, {"rough"}, false, 30},
      {Scoring::Relevance, "Fiona sees Gary, Harry and Dave.", "Fiona sees Harry.", {"fiona", "sees", "harry"}, {}, false, 75},
      {Scoring::Relevance, "The big dog is young.", "The small dog is old.", {"dog"}, {}, false, 25},
      {Scoring::Relevance, "Eve is kind and nice and smart.", "Eve is kind and nice and smart and round.", {"eve"}, {"kind", "nice", "smart"}, false, 100},
      {Scoring::Relevance, "The cold lion eats the green mouse.", "The lion is green.", {"lion"}, {"green"}, false, 55},
      {Scoring::Supplement, "The bald eagle chases the cat.", "If something chases the cat then the cat chases the dog.", {"chases", "cat"}, {}, true, 75},
      {Scoring::Supplement, "A is true.", "If A then B.", {"a"}, {}, true, 50},
      {Scoring::Supplement, "The bald eagle chases the cat.", "The dog is blue.", {}, {}, false, 0},
      {Scoring::Supplement, "The bald eagle is kind.", "If something is kind then it is red.", {}, {"kind"}, true, 55},
      {Scoring::Supplement, "The dog is blue.", "If something is red then it is blue.", {}, {"blue"}, false, 30},
      {Scoring::Supplement, "The bear is not kind.", "If something is kind then it is red.", {}, {"kind"}, false, 30},
      {Scoring::Supplement, "The cat sees the dog.", "If something sees the dog and it is red then the dog eats the cat.", {"cat", "sees", "dog"}, {}, true, 100},
      {Scoring::Supplement, "The mouse is cold.", "If the mouse is cold then the mouse is big.", {"mouse"}, {"cold"}, true, 80},
      {Scoring::Supplement, "The bald eagle chases the cat.", "The bald eagle is kind.", {"bald eagle"}, {}, false, 25},
  };
  return rows;
}

}  // namespace determlr::testing
