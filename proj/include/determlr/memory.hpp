#pragma once

// Reasoning memory: input premises, admitted propositions and the
// positive/negative path of every exploration attempt.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "determlr/core.hpp"
#include "json.hpp"

namespace determlr {

struct ExplorationResult {
  std::string proposition;         // empty when nothing was produced
  std::vector<PremiseId> sources;  // primary first
  Verdict verdict;
};

class ReasoningMemory {
 public:
  ReasoningMemory() = default;

  static ReasoningMemory init(const std::vector<Premise>& determinate,
                              const std::vector<Premise>& indeterminate);

  /// Appends one path for iteration t+1. An overall-true verdict also admits
  /// the proposition as derived premise x{t+1}.
  const ReasoningPath& store(const ExplorationResult& result);

  int iteration() const { return iteration_; }
  const std::vector<Premise>& premises() const { return premises_; }
  const std::vector<ReasoningPath>& paths() const { return paths_; }

  const Premise* find(const PremiseId& id) const;
  /// Exact match on normalized text.
  const Premise* find_statement(std::string_view text) const;
  std::size_t derived_count() const;

  /// Inputs first, then derived premises in admission order.
  std::vector<Premise> determinate_view() const;
  std::vector<Premise> indeterminate_view() const;
  std::vector<Premise> inputs() const;
  std::vector<Premise> derived() const;

  friend bool operator==(const ReasoningMemory&, const ReasoningMemory&) = default;

 private:
  std::vector<Premise> premises_;
  std::vector<ReasoningPath> paths_;
  int iteration_ = 0;
};

/// Paths in iteration order; empty when memory is switched off.
std::vector<ReasoningPath> extract_history(const ReasoningMemory& memory, bool enabled = true);
/// Primaries of negative paths; empty when memory is switched off.
std::set<PremiseId> failed_primaries(const ReasoningMemory& memory, bool enabled = true);
/// One prompt line per path.
std::vector<std::string> render_history(const ReasoningMemory& memory,
                                        const std::vector<ReasoningPath>& history);

nlohmann::json premise_to_json(const Premise& premise);
nlohmann::json path_to_json(const ReasoningPath& path);
nlohmann::json memory_to_json(const ReasoningMemory& memory);
/// Rebuilds memory by re-initialising from the inputs and replaying each path.
ReasoningMemory memory_from_json(const nlohmann::json& json);

}  // namespace determlr
