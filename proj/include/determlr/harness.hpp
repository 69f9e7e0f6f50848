#pragma once

// Dataset loading, batch evaluation and report files.

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "determlr/backend.hpp"
#include "determlr/controller.hpp"
#include "json.hpp"

namespace determlr {

/// Reads a dataset file. Accepts canonical JSONL records, Logic-LM style
/// JSON arrays ("A) text" options) and native ProofWriter theories (one case
/// per question). Throws SchemaError naming the record and field.
std::vector<ProblemInstance> load_dataset(Dataset dataset, const std::filesystem::path& path);
std::vector<ProblemInstance> parse_dataset_text(Dataset dataset, std::string_view content);

/// One record in any of the accepted shapes. ProofWriter theories expand to
/// several cases, hence the list.
std::vector<ProblemInstance> convert_record(const nlohmann::json& record, Dataset dataset, std::size_t index);

/// Text after the last '?' when every option reads as a truth value.
std::string derive_hypothesis(const std::string& question, const std::vector<Option>& options);

nlohmann::json config_to_json(const EngineConfig& config);
/// Applies the keys present in `overrides`; unknown keys throw SchemaError.
void apply_config(EngineConfig& config, const nlohmann::json& overrides);

struct CaseResult {
  std::string case_id;
  std::string answer;
  std::optional<std::string> gold;
  bool correct = false;
  int steps = 0;
  std::size_t admitted = 0;
  double wall_ms = 0;
  double backend_ms = 0;
  std::vector<std::string> errors;

  friend bool operator==(const CaseResult&, const CaseResult&) = default;
};

CaseResult result_from_trace(const CaseTrace& trace);
/// Accepts a serialized trace or a report row.
CaseResult result_from_json(const nlohmann::json& row);

struct Aggregates {
  std::size_t cases = 0;
  std::size_t correct = 0;
  double accuracy = 0;
  double avg_steps = 0;
  std::optional<double> steps_per_determinate;  // unset when nothing was admitted
  double avg_time_per_step_ms = 0;
  double avg_time_per_case_ms = 0;

  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

struct RunReport {
  std::string dataset;
  nlohmann::json config;
  std::vector<CaseResult> cases;  // sorted by case_id
  Aggregates aggregates;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Sorts the results and computes the aggregates.
RunReport aggregate(std::string dataset, nlohmann::json config, std::vector<CaseResult> results);

using BackendFactory = std::function<std::unique_ptr<InferenceBackend>(const ProblemInstance&)>;

/// Runs every case with up to `parallelism` concurrent sessions. Each case
/// gets its own backend from the factory. `traces`, when given, receives the
/// traces in case_id order.
RunReport evaluate(const std::vector<ProblemInstance>& cases, const EngineConfig& config,
                   const BackendFactory& factory, int parallelism = 1, std::vector<CaseTrace>* traces = nullptr,
                   const TermProfiler& profiler = TermProfiler());

enum class ReportFormat { Json, Csv, Markdown };
ReportFormat parse_report_format(std::string_view name);

nlohmann::json report_to_json(const RunReport& report, bool include_timings = true);
RunReport report_from_json(const nlohmann::json& json);
std::string render_report(const RunReport& report, ReportFormat format, bool include_timings = true);
void write_report(const RunReport& report, ReportFormat format, const std::filesystem::path& path,
                  bool include_timings = true);

/// Per-case rows from a JSONL log of traces (or report rows).
std::vector<CaseResult> load_case_log(const std::filesystem::path& path);

struct ReplayFixture {
  ProblemInstance problem;
  nlohmann::json config;  // overrides applied on top of the caller's config
  nlohmann::json responses;
};

ReplayFixture load_replay_fixture(const std::filesystem::path& path);
ReplayFixture parse_replay_fixture(const nlohmann::json& json);

std::string read_file(const std::filesystem::path& path);

}  // namespace determlr
