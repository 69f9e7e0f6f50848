#pragma once

// The iterative loop: identify, then select / explore / verify / store until
// enough determinate premises exist, then conclude.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "determlr/backend.hpp"
#include "determlr/identify.hpp"
#include "determlr/memory.hpp"
#include "determlr/prioritize.hpp"
#include "json.hpp"

namespace determlr {

struct IterationRecord {
  int t = 0;
  std::string stage;  // "explore" or "transform"
  PremiseId primary;
  std::vector<PremiseId> supplements;
  std::map<PremiseId, Score> scores;   // deterministic scores behind the selection
  std::vector<std::string> history;    // memory entries the selection saw
  std::vector<PremiseId> excluded;     // failed primaries at selection time
  std::string proposition;
  Verdict verdict;
  Polarity polarity = Polarity::Negative;
  std::optional<bool> sufficient;      // set after accepted propositions
  std::vector<std::string> annotations;
};

struct CaseTimings {
  double wall_ms = 0;
  double backend_ms = 0;
};

struct CaseTrace {
  std::string case_id;
  Dataset dataset = Dataset::Custom;
  std::string topic;
  std::vector<std::string> boundary_conditions;
  IdentificationResult identification;
  std::vector<IterationRecord> iterations;
  ReasoningMemory memory;
  std::string final_answer;
  std::optional<std::string> gold;
  bool correct = false;
  int total_steps = 0;
  std::size_t admitted = 0;
  std::vector<std::string> errors;
  CaseTimings timings;
};

/// Label the gold answer refers to: truth words map through the options.
std::optional<std::string> gold_label(const Target& target);
/// Case-insensitive label comparison; Abstain never matches.
bool answer_matches(std::string_view answer, const std::optional<std::string>& gold);

std::uint64_t fnv1a(std::string_view text);
/// RNG seed for one case.
std::uint64_t case_seed(std::uint64_t seed, std::string_view case_id);

bool sufficiency_check(const ReasoningMemory& memory, const Target& target, InferenceBackend& backend);

/// Runs one problem. Backend failures end the case with an "Abstain" answer
/// and an entry in `errors`; nothing propagates.
CaseTrace run_case(const ProblemInstance& problem, const EngineConfig& config, InferenceBackend& backend,
                   const TermProfiler& profiler = TermProfiler());

nlohmann::json trace_to_json(const CaseTrace& trace, bool include_timings = true);
/// Memory reconstructed from a serialized trace.
ReasoningMemory memory_from_trace(const nlohmann::json& trace);

}  // namespace determlr
