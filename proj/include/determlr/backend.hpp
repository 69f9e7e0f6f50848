#pragma once

// The inference-backend port. Every reasoning stage that may be delegated to
// a model goes through one of these calls.

#include <optional>
#include <string>
#include <vector>

#include "determlr/core.hpp"

namespace determlr {

struct PrioritizeQuery {
  std::vector<Premise> determinate;
  std::vector<Premise> indeterminate;
  Target target;
  Dataset dataset = Dataset::Custom;
  std::string topic;
  std::vector<std::string> boundary;
  std::vector<std::string> history;  // rendered memory entries, oldest first
};

/// What a backend proposed; texts are matched to premises by the caller.
struct BackendSelection {
  std::optional<std::string> primary;
  std::vector<std::string> results;
};

struct ExploreQuery {
  Premise primary;
  std::vector<Premise> supplements;
  std::vector<Premise> known;  // every premise currently in memory
  Target target;
  Dataset dataset = Dataset::Custom;
  std::vector<std::string> boundary;
};

struct SufficiencyQuery {
  std::vector<Premise> determinate;
  std::vector<Premise> indeterminate;
  Target target;
};

struct ConcludeQuery {
  std::string context;
  Target target;
  std::vector<Premise> premises;      // inputs
  std::vector<Premise> propositions;  // admitted derived premises
  std::vector<std::string> boundary;
  std::vector<std::string> history;
};

struct Extraction {
  std::string topic;
  std::vector<std::string> premises;
  std::vector<std::string> boundary;
};

class InferenceBackend {
 public:
  virtual ~InferenceBackend() = default;

  virtual std::string name() const = 0;
  /// True when identification should ask the backend premise by premise.
  virtual bool delegates_identification() const = 0;

  virtual Kind classify(const Premise& premise, const Target& target) = 0;
  /// Empty result means "no opinion": the deterministic scorer decides.
  virtual BackendSelection prioritize(const PrioritizeQuery& query) = 0;
  /// nullopt when no proposition could be produced.
  virtual std::optional<std::string> explore(const ExploreQuery& query) = 0;
  virtual bool validity(const std::vector<std::string>& sources, const std::string& proposition) = 0;
  /// nullopt defers to the deterministic one-hop rule.
  virtual std::optional<bool> usefulness(const std::string& proposition, const Target& target) = 0;
  /// Paraphrase judgement on top of the exact-match check.
  virtual bool novelty(const std::string& proposition, const std::vector<std::string>& known) = 0;
  virtual bool sufficiency(const SufficiencyQuery& query) = 0;
  /// Returns an option label, a truth value name, or "Abstain".
  virtual std::string conclude(const ConcludeQuery& query) = 0;

  virtual Extraction extract_premises(const std::string& context) = 0;
  virtual std::optional<std::string> transform_premise(const std::string& premise,
                                                       const std::vector<std::string>& existing,
                                                       const std::vector<std::string>& boundary,
                                                       const std::string& question) = 0;
  virtual bool check_boundary(const std::vector<std::string>& existing, const std::string& premise,
                              const std::vector<std::string>& boundary) = 0;
};

}  // namespace determlr
