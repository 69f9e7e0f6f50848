#pragma once

// Domain types shared by every stage of the reasoning loop.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "determlr/errors.hpp"

namespace determlr {

/// Canonical form used for duplicate detection and fixture keys: lowercase,
/// trimmed, single-spaced, without terminal periods. Throws EmptyStatement.
std::string normalize(std::string_view text);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);

/// Splits running prose into sentences at '.', '!' or '?' followed by
/// whitespace or end of input. Terminators are kept.
std::vector<std::string> split_sentences(std::string_view text);

struct PremiseId {
  std::string value;

  auto operator<=>(const PremiseId&) const = default;
};

enum class Kind { Determinate, Indeterminate };

std::string_view kind_name(Kind kind);

/// A known statement. Inputs carry their position in the problem text;
/// derived premises carry the iteration that admitted them.
class Premise {
 public:
  static Premise input(PremiseId id, std::string text, int ordinal,
                       std::optional<Kind> kind = std::nullopt);
  /// Derived premises are always determinate.
  static Premise derived(int iteration, std::string text);

  const PremiseId& id() const { return id_; }
  const std::string& text() const { return text_; }
  const std::string& normalized() const { return normalized_; }
  std::optional<Kind> kind() const { return kind_; }
  bool is_determinate() const { return kind_ == Kind::Determinate; }
  bool is_derived() const { return derived_at_.has_value(); }
  std::optional<int> derived_at() const { return derived_at_; }
  int ordinal() const { return ordinal_; }

  /// Input position first, then derivation order. Used for every tie-break.
  std::pair<int, int> order_key() const {
    return derived_at_ ? std::pair{1, *derived_at_} : std::pair{0, ordinal_};
  }

  Premise with_kind(Kind kind, PremiseId id) const;

  /// Duplicate detection compares normalized text only.
  bool same_statement(const Premise& other) const { return normalized_ == other.normalized_; }

  friend bool operator==(const Premise&, const Premise&) = default;

 private:
  Premise() = default;

  PremiseId id_;
  std::string text_;
  std::string normalized_;
  std::optional<Kind> kind_;
  std::optional<int> derived_at_;
  int ordinal_ = 0;
};

struct Option {
  std::string label;
  std::string text;

  friend bool operator==(const Option&, const Option&) = default;
};

struct Target {
  std::string hypothesis;
  std::string question;
  std::vector<Option> options;
  std::optional<std::string> answer_key;

  /// Option label whose text reads as the given truth value ("true",
  /// "false", "unknown"/"uncertain"). Empty when the task has no such option.
  std::optional<std::string> label_for_truth(std::string_view truth) const;
  bool has_label(std::string_view label) const;

  friend bool operator==(const Target&, const Target&) = default;
};

enum class Dataset { LogiQA, ProofWriter, FOLIO, PrOntoQA, LogicalDeduction, Custom };

std::string_view dataset_name(Dataset dataset);
/// Accepts the display names and common lowercase spellings ("proofwriter", "ld").
Dataset parse_dataset(std::string_view name);

struct ProblemInstance {
  std::string case_id;
  Dataset dataset = Dataset::Custom;
  std::string context;
  std::vector<Premise> premises;
  Target target;
  std::vector<std::string> boundary_conditions;

  /// Checks the cross-field invariants; throws SchemaError.
  void validate(std::size_t record_index = 0) const;

  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

/// Builds input premises p1..pN from raw statements.
std::vector<Premise> make_input_premises(const std::vector<std::string>& statements);

enum class Polarity { Positive, Negative };

std::string_view polarity_name(Polarity polarity);

struct ReasoningPath {
  std::vector<PremiseId> sources;  // primary first, then supplements
  std::string proposition_text;
  Polarity polarity = Polarity::Negative;
  int iteration = 0;

  const PremiseId& primary() const { return sources.front(); }

  friend bool operator==(const ReasoningPath&, const ReasoningPath&) = default;
};

class Verdict {
 public:
  Verdict() = default;
  Verdict(bool valid, bool useful, bool novel)
      : valid_(valid), useful_(useful), novel_(novel) {}

  bool valid() const { return valid_; }
  bool useful() const { return useful_; }
  bool novel() const { return novel_; }
  bool overall() const { return valid_ && useful_ && novel_; }

  friend bool operator==(const Verdict&, const Verdict&) = default;

 private:
  bool valid_ = false;
  bool useful_ = false;
  bool novel_ = false;
};

struct Ablation {
  bool no_identify = false;
  bool no_priority = false;
  bool no_memory = false;

  friend bool operator==(const Ablation&, const Ablation&) = default;
};

enum class BackendChoice { Llm, Symbolic, Replay };

std::string_view backend_name(BackendChoice choice);
BackendChoice parse_backend(std::string_view name);

struct EngineConfig {
  int n_required_determinate = 4;
  int max_iterations = 25;
  double theta = 0.25;
  double temperature_default = 0.1;
  double temperature_conclude = 0.7;
  Ablation ablation;
  BackendChoice backend = BackendChoice::Symbolic;
  std::uint64_t seed = 0;
  int oracle_depth = 10;

  /// Throws Error when a field is out of range.
  void validate() const;
};

}  // namespace determlr
