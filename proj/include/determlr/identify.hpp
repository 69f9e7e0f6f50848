#pragma once

// Splits input premises into determinate and indeterminate sets.

#include <string_view>
#include <vector>

#include "determlr/backend.hpp"
#include "determlr/core.hpp"
#include "determlr/prioritize.hpp"

namespace determlr {

struct IdentificationResult {
  std::vector<Premise> determinate;
  std::vector<Premise> indeterminate;

  friend bool operator==(const IdentificationResult&, const IdentificationResult&) = default;
};

enum class IdentifyMode { RuleBased, BackendDelegated };

/// Surface test on normalized text: leading "if", or " then ", " or ", "either ".
bool is_compound(std::string_view normalized);

Kind classify_premise(const Premise& premise, const Target& target, const TermProfiler& profiler);

/// Raised when the backend fails part way; `partial()` holds the premises
/// classified so far, already labelled.
class IdentificationUnavailable : public BackendUnavailable {
 public:
  IdentificationUnavailable(const std::string& why, IdentificationResult partial)
      : BackendUnavailable(why), partial_(std::move(partial)) {}
  const IdentificationResult& partial() const { return partial_; }

 private:
  IdentificationResult partial_;
};

/// Classifies every premise and relabels them d1.. / i1.. in input order.
/// An empty determinate set gets the most relevant premise promoted.
IdentificationResult identify_all(const std::vector<Premise>& premises, const Target& target,
                                  IdentifyMode mode, InferenceBackend* backend,
                                  const TermProfiler& profiler);

}  // namespace determlr
