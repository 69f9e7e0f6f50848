#pragma once

// Proposition generation and the validity / usefulness / novelty checks.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "determlr/backend.hpp"
#include "determlr/memory.hpp"
#include "determlr/prioritize.hpp"

namespace determlr {

/// Asks the backend for one proposition. Throws ExplorationFailed when the
/// backend has nothing or returns an empty statement.
std::string explore(const ExploreQuery& query, InferenceBackend& backend);

/// Backend verdict on the deduction; backend errors count as invalid.
bool verify_validity(const std::vector<std::string>& sources, const std::string& proposition,
                     InferenceBackend& backend, std::string* diagnostic = nullptr);

/// "if X then Y" / "if X, Y" split on normalized text.
std::optional<std::pair<std::string, std::string>> split_conditional(std::string_view normalized);

/// Shares a content term with the hypothesis, or with the antecedent of a
/// conditional premise whose consequent shares a term with the hypothesis.
bool deterministic_usefulness(const std::string& proposition, const Target& target,
                              const std::vector<Premise>& premises, const TermProfiler& profiler);

bool verify_usefulness(const std::string& proposition, const Target& target,
                       const std::vector<Premise>& premises, InferenceBackend& backend,
                       const TermProfiler& profiler);

/// Exact normalized match against memory, then the backend's paraphrase check.
bool verify_novelty(const std::string& proposition, const ReasoningMemory& memory, InferenceBackend& backend);

/// Validity, then usefulness, then novelty; a failed check skips the rest.
Verdict verify(const std::string& proposition, const std::vector<PremiseId>& sources, const Target& target,
               const ReasoningMemory& memory, InferenceBackend& backend, const TermProfiler& profiler,
               std::vector<std::string>* notes = nullptr);

}  // namespace determlr
