#include "determlr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

namespace determlr {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

namespace {

std::string string_field(const json& record, const char* name, std::size_t index, bool required) {
  if (!record.contains(name) || record.at(name).is_null()) {
    if (required) throw SchemaError(index, name, "missing");
    return {};
  }
  const json& v = record.at(name);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw SchemaError(index, name, "must be a string");
}

std::vector<std::string> string_list(const json& record, const char* name, std::size_t index) {
  std::vector<std::string> out;
  if (!record.contains(name) || record.at(name).is_null()) return out;
  const json& v = record.at(name);
  if (v.is_string()) return split_sentences(v.get<std::string>());
  if (!v.is_array()) throw SchemaError(index, name, "must be a list of strings");
  for (const auto& item : v) {
    if (!item.is_string()) throw SchemaError(index, name, "must be a list of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::vector<Option> parse_options(const json& record, std::size_t index) {
  std::vector<Option> out;
  if (!record.contains("options") || record.at("options").is_null()) return out;
  const json& list = record.at("options");
  if (!list.is_array()) throw SchemaError(index, "options", "must be a list");
  static const std::regex labelled(R"(^\s*\(?([A-Za-z0-9]{1,2})\)\s*(.*)$)");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& item = list[i];
    if (item.is_object()) {
      if (!item.contains("label") || !item.contains("text")) throw SchemaError(index, "options", "need label and text");
      out.push_back({item.at("label").get<std::string>(), item.at("text").get<std::string>()});
    } else if (item.is_string()) {
      const std::string s = item.get<std::string>();
      std::smatch m;
      if (std::regex_match(s, m, labelled)) {
        out.push_back({m[1].str(), trim(m[2].str())});
      } else {
        out.push_back({std::string(1, static_cast<char>('A' + i)), trim(s)});
      }
    } else {
      throw SchemaError(index, "options", "entries must be strings or objects");
    }
  }
  return out;
}

std::string answer_field(const json& record, std::size_t index) {
  if (!record.contains("answer") || record.at("answer").is_null()) return {};
  const json& v = record.at("answer");
  if (v.is_boolean()) return v.get<bool>() ? "True" : "False";
  if (v.is_string()) return trim(v.get<std::string>());
  throw SchemaError(index, "answer", "must be a string or boolean");
}

// Native ProofWriter theory: triples and rules in key order, one case per question.
std::vector<ProblemInstance> convert_proofwriter(const json& record, std::size_t index) {
  const std::string id = string_field(record, "id", index, true);
  auto ordered_texts = [&](const char* name) {
    std::vector<std::pair<std::pair<std::size_t, std::string>, std::string>> items;
    if (!record.contains(name)) return std::vector<std::string>{};
    if (!record.at(name).is_object()) throw SchemaError(index, name, "must be an object");
    for (const auto& [key, value] : record.at(name).items()) {
      if (!value.is_object() || !value.contains("text")) throw SchemaError(index, name, "entries need \"text\"");
      const std::size_t digits = key.find_first_of("0123456789");
      const std::size_t n = digits == std::string::npos ? 0 : std::stoul(key.substr(digits));
      items.push_back({{n, key}, value.at("text").get<std::string>()});
    }
    std::sort(items.begin(), items.end());
    std::vector<std::string> out;
    for (auto& it : items) out.push_back(std::move(it.second));
    return out;
  };
  std::vector<std::string> statements = ordered_texts("triples");
  for (auto& r : ordered_texts("rules")) statements.push_back(std::move(r));
  if (statements.empty()) statements = split_sentences(string_field(record, "theory", index, true));

  if (!record.contains("questions") || !record.at("questions").is_object()) {
    throw SchemaError(index, "questions", "missing");
  }
  std::vector<std::pair<std::pair<std::size_t, std::string>, json>> questions;
  for (const auto& [key, value] : record.at("questions").items()) {
    const std::size_t digits = key.find_first_of("0123456789");
    questions.push_back({{digits == std::string::npos ? 0 : std::stoul(key.substr(digits)), key}, value});
  }
  std::sort(questions.begin(), questions.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<ProblemInstance> out;
  for (const auto& [key, q] : questions) {
    ProblemInstance p;
    p.case_id = id + "-" + key.second;
    p.dataset = Dataset::ProofWriter;
    p.context = string_field(record, "theory", index, false);
    p.premises = make_input_premises(statements);
    p.target.hypothesis = string_field(q, "question", index, true);
    p.target.question = "Based on the above information, is the following statement true, false, or unknown? " +
                        p.target.hypothesis;
    p.target.options = {{"A", "True"}, {"B", "False"}, {"C", "Unknown"}};
    const std::string answer = answer_field(q, index);
    if (!answer.empty()) p.target.answer_key = p.target.label_for_truth(answer).value_or(answer);
    p.validate(index);
    out.push_back(std::move(p));
  }
  return out;
}

bool truth_option(const Option& o) {
  std::string t = to_lower(trim(o.text));
  while (!t.empty() && t.back() == '.') t.pop_back();
  return t == "true" || t == "false" || t == "unknown" || t == "uncertain";
}

}  // namespace

std::string derive_hypothesis(const std::string& question, const std::vector<Option>& options) {
  if (options.empty() || !std::all_of(options.begin(), options.end(), truth_option)) return {};
  const auto mark = question.rfind('?');
  if (mark == std::string::npos) return {};
  return trim(question.substr(mark + 1));
}

std::vector<ProblemInstance> convert_record(const json& record, Dataset dataset, std::size_t index) {
  if (!record.is_object()) throw SchemaError(index, "record", "must be an object");
  if (record.contains("questions") && (record.contains("triples") || record.contains("theory"))) {
    return convert_proofwriter(record, index);
  }
  ProblemInstance p;
  p.case_id = string_field(record, "case_id", index, false);
  if (p.case_id.empty()) p.case_id = string_field(record, "id", index, false);
  if (p.case_id.empty()) p.case_id = "case-" + std::to_string(index);
  const std::string ds = string_field(record, "dataset", index, false);
  try {
    p.dataset = ds.empty() ? dataset : parse_dataset(ds);
  } catch (const Error& e) {
    throw SchemaError(index, "dataset", e.what());
  }
  if (record.contains("context") && record.at("context").is_array()) {
    for (const auto& s : string_list(record, "context", index)) p.context += (p.context.empty() ? "" : " ") + s;
  } else {
    p.context = string_field(record, "context", index, false);
  }
  std::vector<std::string> statements = string_list(record, "premises", index);
  if (statements.empty() && p.dataset != Dataset::LogicalDeduction) statements = split_sentences(p.context);
  p.premises = make_input_premises(statements);
  p.target.question = string_field(record, "question", index, true);
  p.target.options = parse_options(record, index);
  p.target.hypothesis = string_field(record, "hypothesis", index, false);
  if (p.target.hypothesis.empty()) p.target.hypothesis = derive_hypothesis(p.target.question, p.target.options);
  const std::string answer = answer_field(record, index);
  if (!answer.empty()) p.target.answer_key = answer;
  p.boundary_conditions = string_list(record, "boundary_conditions", index);
  if (p.premises.empty() && trim(p.context).empty()) throw SchemaError(index, "context", "no premises and no context");
  p.validate(index);
  return {std::move(p)};
}

std::vector<ProblemInstance> parse_dataset_text(Dataset dataset, std::string_view content) {
  std::vector<ProblemInstance> out;
  auto add = [&](const json& record, std::size_t index) {
    for (auto& p : convert_record(record, dataset, index)) out.push_back(std::move(p));
  };
  const std::string text = trim(content);
  if (!text.empty() && text.front() == '[') {
    json list;
    try {
      list = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError(0, "record", e.what());
    }
    for (std::size_t i = 0; i < list.size(); ++i) add(list[i], i);
    return out;
  }
  std::istringstream in(text);
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(index, "record", e.what());
    }
    add(record, index++);
  }
  return out;
}

std::vector<ProblemInstance> load_dataset(Dataset dataset, const std::filesystem::path& path) {
  return parse_dataset_text(dataset, read_file(path));
}

json config_to_json(const EngineConfig& c) {
  return {{"n_required_determinate", c.n_required_determinate},
          {"max_iterations", c.max_iterations},
          {"theta", c.theta},
          {"temperature_default", c.temperature_default},
          {"temperature_conclude", c.temperature_conclude},
          {"ablation", {{"no_identify", c.ablation.no_identify},
                        {"no_priority", c.ablation.no_priority},
                        {"no_memory", c.ablation.no_memory}}},
          {"backend", backend_name(c.backend)},
          {"seed", c.seed},
          {"oracle_depth", c.oracle_depth}};
}

void apply_config(EngineConfig& c, const json& overrides) {
  if (overrides.is_null()) return;
  if (!overrides.is_object()) throw SchemaError(0, "config", "must be an object");
  try {
    for (const auto& [key, value] : overrides.items()) {
      if (key == "n_required_determinate") c.n_required_determinate = value.get<int>();
      else if (key == "max_iterations") c.max_iterations = value.get<int>();
      else if (key == "theta") c.theta = value.get<double>();
      else if (key == "temperature_default") c.temperature_default = value.get<double>();
      else if (key == "temperature_conclude") c.temperature_conclude = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "oracle_depth") c.oracle_depth = value.get<int>();
      else if (key == "backend") c.backend = parse_backend(value.get<std::string>());
      else if (key == "ablation") {
        for (const auto& [flag, on] : value.items()) {
          if (flag == "no_identify") c.ablation.no_identify = on.get<bool>();
          else if (flag == "no_priority") c.ablation.no_priority = on.get<bool>();
          else if (flag == "no_memory") c.ablation.no_memory = on.get<bool>();
          else throw SchemaError(0, "ablation." + flag, "unknown ablation");
        }
      } else {
        throw SchemaError(0, key, "unknown config key");
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError(0, "config", e.what());
  }
}

CaseResult result_from_trace(const CaseTrace& trace) {
  return CaseResult{trace.case_id,      trace.final_answer,          trace.gold,
                    trace.correct,      trace.total_steps,           trace.admitted,
                    trace.timings.wall_ms, trace.timings.backend_ms, trace.errors};
}

CaseResult result_from_json(const json& row) {
  auto first = [&](std::initializer_list<const char*> names) -> const json* {
    for (const char* n : names) {
      if (row.contains(n) && !row.at(n).is_null()) return &row.at(n);
    }
    return nullptr;
  };
  CaseResult r;
  try {
    r.case_id = row.at("case_id").get<std::string>();
    if (const json* a = first({"final_answer", "answer"})) r.answer = a->get<std::string>();
    if (const json* g = first({"gold"})) r.gold = g->get<std::string>();
    if (const json* c = first({"correct"})) r.correct = c->get<bool>();
    else r.correct = answer_matches(r.answer, r.gold);
    if (const json* s = first({"step_count", "steps"})) r.steps = s->get<int>();
    if (const json* a = first({"admitted"})) r.admitted = a->get<std::size_t>();
    const json& timing = row.contains("timings") ? row.at("timings") : row;
    if (timing.contains("wall_ms")) r.wall_ms = timing.at("wall_ms").get<double>();
    if (timing.contains("backend_ms")) r.backend_ms = timing.at("backend_ms").get<double>();
    if (const json* e = first({"errors"})) r.errors = e->get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw SchemaError(0, "case", e.what());
  }
  return r;
}

RunReport aggregate(std::string dataset, json config, std::vector<CaseResult> results) {
  std::sort(results.begin(), results.end(),
            [](const CaseResult& a, const CaseResult& b) { return a.case_id < b.case_id; });
  RunReport report{std::move(dataset), std::move(config), std::move(results), {}};
  Aggregates& a = report.aggregates;
  a.cases = report.cases.size();
  long long steps = 0;
  std::size_t admitted = 0;
  double wall = 0;
  double backend = 0;
  for (const auto& r : report.cases) {
    a.correct += r.correct ? 1 : 0;
    steps += r.steps;
    admitted += r.admitted;
    wall += r.wall_ms;
    backend += r.backend_ms;
  }
  if (a.cases > 0) {
    a.accuracy = 100.0 * static_cast<double>(a.correct) / static_cast<double>(a.cases);
    a.avg_steps = static_cast<double>(steps) / static_cast<double>(a.cases);
    a.avg_time_per_case_ms = wall / static_cast<double>(a.cases);
  }
  if (admitted > 0) a.steps_per_determinate = static_cast<double>(steps) / static_cast<double>(admitted);
  if (steps > 0) a.avg_time_per_step_ms = backend / static_cast<double>(steps);
  return report;
}

RunReport evaluate(const std::vector<ProblemInstance>& cases, const EngineConfig& config,
                   const BackendFactory& factory, int parallelism, std::vector<CaseTrace>* traces,
                   const TermProfiler& profiler) {
  if (cases.empty()) throw Error("no cases to evaluate");
  config.validate();
  std::vector<CaseTrace> done(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      try {
        std::unique_ptr<InferenceBackend> backend = factory(cases[i]);
        done[i] = run_case(cases[i], config, *backend, profiler);
      } catch (const std::exception& e) {
        CaseTrace t;
        t.case_id = cases[i].case_id;
        t.dataset = cases[i].dataset;
        t.gold = gold_label(cases[i].target);
        t.final_answer = "Abstain";
        t.total_steps = 1;
        t.errors.emplace_back(e.what());
        done[i] = std::move(t);
      }
    }
  };
  const int workers = std::clamp(parallelism, 1, static_cast<int>(cases.size()));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  std::vector<CaseResult> results;
  for (const auto& t : done) results.push_back(result_from_trace(t));
  std::sort(done.begin(), done.end(), [](const CaseTrace& a, const CaseTrace& b) { return a.case_id < b.case_id; });
  if (traces) *traces = std::move(done);
  return aggregate(std::string(dataset_name(cases.front().dataset)), config_to_json(config), std::move(results));
}

ReportFormat parse_report_format(std::string_view name) {
  const std::string n = to_lower(name);
  if (n == "json") return ReportFormat::Json;
  if (n == "csv") return ReportFormat::Csv;
  if (n == "markdown" || n == "md") return ReportFormat::Markdown;
  throw Error("unknown report format: " + std::string(name));
}

json report_to_json(const RunReport& report, bool include_timings) {
  json cases = json::array();
  for (const auto& r : report.cases) {
    json row{{"case_id", r.case_id},
             {"answer", r.answer},
             {"gold", r.gold ? json(*r.gold) : json(nullptr)},
             {"correct", r.correct},
             {"steps", r.steps},
             {"admitted", r.admitted},
             {"errors", r.errors}};
    if (include_timings) {
      row["wall_ms"] = r.wall_ms;
      row["backend_ms"] = r.backend_ms;
    }
    cases.push_back(std::move(row));
  }
  const Aggregates& a = report.aggregates;
  json agg{{"cases", a.cases},
           {"correct", a.correct},
           {"accuracy", a.accuracy},
           {"avg_steps", a.avg_steps},
           {"steps_per_determinate", a.steps_per_determinate ? json(*a.steps_per_determinate) : json(nullptr)}};
  if (include_timings) {
    agg["avg_time_per_step_ms"] = a.avg_time_per_step_ms;
    agg["avg_time_per_case_ms"] = a.avg_time_per_case_ms;
  }
  return {{"dataset", report.dataset}, {"config", report.config}, {"aggregates", agg}, {"cases", cases}};
}

RunReport report_from_json(const json& j) {
  std::vector<CaseResult> results;
  for (const auto& row : j.at("cases")) results.push_back(result_from_json(row));
  return aggregate(j.at("dataset").get<std::string>(), j.value("config", json::object()), std::move(results));
}

namespace {

std::string fixed(double v, int digits = 2) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

std::string render_report(const RunReport& report, ReportFormat format, bool include_timings) {
  std::ostringstream out;
  const Aggregates& a = report.aggregates;
  switch (format) {
    case ReportFormat::Json:
      out << report_to_json(report, include_timings).dump(2) << "\n";
      break;
    case ReportFormat::Csv:
      out << "case_id,answer,gold,correct,steps,admitted" << (include_timings ? ",wall_ms,backend_ms" : "") << "\n";
      for (const auto& r : report.cases) {
        out << csv_cell(r.case_id) << ',' << csv_cell(r.answer) << ',' << csv_cell(r.gold.value_or("")) << ','
            << (r.correct ? "true" : "false") << ',' << r.steps << ',' << r.admitted;
        if (include_timings) out << ',' << fixed(r.wall_ms, 3) << ',' << fixed(r.backend_ms, 3);
        out << "\n";
      }
      break;
    case ReportFormat::Markdown:
      out << "| Dataset | Cases | Accuracy | Avg. steps | Steps / determinate";
      out << (include_timings ? " | ms / step | ms / case |\n" : " |\n");
      out << "|---|---|---|---|---" << (include_timings ? "|---|---|\n" : "|\n");
      out << "| " << report.dataset << " | " << a.cases << " | " << fixed(a.accuracy) << " | " << fixed(a.avg_steps)
          << " | " << (a.steps_per_determinate ? fixed(*a.steps_per_determinate) : "n/a");
      if (include_timings) out << " | " << fixed(a.avg_time_per_step_ms, 3) << " | " << fixed(a.avg_time_per_case_ms, 3);
      out << " |\n";
      break;
  }
  return out.str();
}

void write_report(const RunReport& report, ReportFormat format, const std::filesystem::path& path,
                  bool include_timings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << render_report(report, format, include_timings);
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<CaseResult> load_case_log(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<CaseResult> out;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      out.push_back(result_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw SchemaError(index, "record", e.what());
    } catch (const SchemaError& e) {
      throw SchemaError(index, e.field(), e.what());
    }
    ++index;
  }
  return out;
}

ReplayFixture parse_replay_fixture(const json& j) {
  if (!j.is_object() || !j.contains("case")) throw SchemaError(0, "case", "fixture needs a case");
  if (!j.contains("responses")) throw SchemaError(0, "responses", "fixture needs responses");
  const std::string ds = j.at("case").value("dataset", "Custom");
  auto problems = convert_record(j.at("case"), parse_dataset(ds), 0);
  if (problems.size() != 1) throw SchemaError(0, "case", "fixture must hold exactly one case");
  return ReplayFixture{std::move(problems.front()), j.value("config", json::object()), j.at("responses")};
}

ReplayFixture load_replay_fixture(const std::filesystem::path& path) {
  try {
    return parse_replay_fixture(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw SchemaError(0, "fixture", e.what());
  }
}

}  // namespace determlr
