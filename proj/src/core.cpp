#include "determlr/core.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace determlr {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  return std::string(text.substr(begin, end - begin));
}

std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  while (!out.empty() && (out.back() == '.' || out.back() == ' ')) out.pop_back();
  if (out.empty()) throw EmptyStatement();
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 < text.size() && !is_space(text[i + 1])) continue;
    std::string sentence = trim(text.substr(start, i + 1 - start));
    if (!sentence.empty() && sentence != ".") out.push_back(std::move(sentence));
    start = i + 1;
  }
  std::string tail = trim(text.substr(std::min(start, text.size())));
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

std::string_view kind_name(Kind kind) {
  return kind == Kind::Determinate ? "determinate" : "indeterminate";
}

Premise Premise::input(PremiseId id, std::string text, int ordinal, std::optional<Kind> kind) {
  Premise p;
  p.normalized_ = normalize(text);
  p.id_ = std::move(id);
  p.text_ = trim(text);
  p.kind_ = kind;
  p.ordinal_ = ordinal;
  return p;
}

Premise Premise::derived(int iteration, std::string text) {
  if (iteration < 1) throw InternalInvariantViolation("derived premise needs iteration >= 1");
  Premise p;
  p.normalized_ = normalize(text);
  p.id_ = PremiseId{"x" + std::to_string(iteration)};
  p.text_ = trim(text);
  p.kind_ = Kind::Determinate;
  p.derived_at_ = iteration;
  p.ordinal_ = -1;
  return p;
}

Premise Premise::with_kind(Kind kind, PremiseId id) const {
  if (derived_at_ && kind != Kind::Determinate) {
    throw InternalInvariantViolation("derived premise " + id_.value + " must stay determinate");
  }
  Premise copy = *this;
  copy.kind_ = kind;
  copy.id_ = std::move(id);
  return copy;
}

std::optional<std::string> Target::label_for_truth(std::string_view truth) const {
  const std::string wanted = to_lower(truth);
  for (const auto& option : options) {
    std::string text;
    try {
      text = normalize(option.text);
    } catch (const EmptyStatement&) {
      continue;
    }
    if (text == wanted) return option.label;
    if (wanted == "unknown" && text == "uncertain") return option.label;
    if (wanted == "uncertain" && text == "unknown") return option.label;
  }
  return std::nullopt;
}

bool Target::has_label(std::string_view label) const {
  const std::string wanted = to_lower(label);
  return std::any_of(options.begin(), options.end(),
                     [&](const Option& o) { return to_lower(o.label) == wanted; });
}

std::string_view dataset_name(Dataset dataset) {
  switch (dataset) {
    case Dataset::LogiQA: return "LogiQA";
    case Dataset::ProofWriter: return "ProofWriter";
    case Dataset::FOLIO: return "FOLIO";
    case Dataset::PrOntoQA: return "PrOntoQA";
    case Dataset::LogicalDeduction: return "LogicalDeduction";
    case Dataset::Custom: return "Custom";
  }
  return "Custom";
}

Dataset parse_dataset(std::string_view name) {
  const std::string key = to_lower(name);
  if (key == "logiqa") return Dataset::LogiQA;
  if (key == "proofwriter") return Dataset::ProofWriter;
  if (key == "folio") return Dataset::FOLIO;
  if (key == "prontoqa") return Dataset::PrOntoQA;
  if (key == "logicaldeduction" || key == "logical_deduction" || key == "ld") {
    return Dataset::LogicalDeduction;
  }
  if (key == "custom") return Dataset::Custom;
  throw Error("unknown dataset: " + std::string(name));
}

void ProblemInstance::validate(std::size_t record_index) const {
  if (case_id.empty()) throw SchemaError(record_index, "case_id", "must be non-empty");
  std::set<std::string> labels;
  for (const auto& option : target.options) {
    if (!labels.insert(to_lower(option.label)).second) {
      throw SchemaError(record_index, "options", "duplicate label " + option.label);
    }
  }
  if (target.answer_key) {
    const std::string key = to_lower(*target.answer_key);
    const bool truth = key == "true" || key == "false" || key == "unknown";
    if (!truth && !labels.contains(key)) {
      throw SchemaError(record_index, "answer", "not an option label: " + *target.answer_key);
    }
  }
  // LogicalDeduction premises may arrive empty and come from extraction.
  if (premises.empty() && dataset != Dataset::LogicalDeduction) {
    throw SchemaError(record_index, "premises", "must be non-empty");
  }
  if (!boundary_conditions.empty() && dataset != Dataset::LogicalDeduction) {
    throw SchemaError(record_index, "boundary_conditions", "only LogicalDeduction cases carry them");
  }
}

std::vector<Premise> make_input_premises(const std::vector<std::string>& statements) {
  std::vector<Premise> out;
  out.reserve(statements.size());
  int ordinal = 0;
  for (const auto& s : statements) {
    out.push_back(Premise::input(PremiseId{"p" + std::to_string(ordinal + 1)}, s, ordinal));
    ++ordinal;
  }
  return out;
}

std::string_view polarity_name(Polarity polarity) {
  return polarity == Polarity::Positive ? "positive" : "negative";
}

std::string_view backend_name(BackendChoice choice) {
  switch (choice) {
    case BackendChoice::Llm: return "llm";
    case BackendChoice::Symbolic: return "symbolic";
    case BackendChoice::Replay: return "replay";
  }
  return "symbolic";
}

BackendChoice parse_backend(std::string_view name) {
  const std::string key = to_lower(name);
  if (key == "llm") return BackendChoice::Llm;
  if (key == "symbolic") return BackendChoice::Symbolic;
  if (key == "replay") return BackendChoice::Replay;
  throw Error("unknown backend: " + std::string(name));
}

void EngineConfig::validate() const {
  if (n_required_determinate < 1) throw Error("n_required_determinate must be positive");
  if (max_iterations < 0) throw Error("max_iterations must be non-negative");
  // max_iterations == 0 is the single-shot degenerate mode; the ordering
  // constraint only binds once the loop can run.
  if (max_iterations > 0 && n_required_determinate > max_iterations) {
    throw Error("n_required_determinate exceeds max_iterations");
  }
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error("theta must lie in [0, 1]");
  if (temperature_default < 0.0 || temperature_conclude < 0.0) {
    throw Error("temperatures must be non-negative");
  }
  if (oracle_depth < 1) throw Error("oracle_depth must be positive");
}

}  // namespace determlr
