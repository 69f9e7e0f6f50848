#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "determlr/backends.hpp"
#include "determlr/harness.hpp"
#include "determlr/oracle.hpp"
#include "determlr/reference/synthetic.hpp"

namespace determlr::cli {

namespace {

using nlohmann::json;

// Raised for bad flag values; maps to the usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string dataset;
  std::string path;
  std::string backend = "symbolic";
  std::string model = "gpt-4";
  std::string endpoint;
  std::string cache_dir;
  std::string out;
  std::string fixture;
  std::string format = "json";
  std::string config_file;
  std::string traces;
  double theta = 0.25;
  int n_determinate = 4;
  int max_iters = 25;
  int parallel = 1;
  std::vector<std::string> ablations;
  std::uint64_t seed = 0;
  std::size_t count = 200;
  bool timings = false;
  bool pipeline = false;
};

void add_engine_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--backend", o.backend, "llm, symbolic or replay")->check(CLI::IsMember({"llm", "symbolic", "replay"}));
  cmd->add_option("--model", o.model, "Model name sent to the endpoint");
  cmd->add_option("--endpoint", o.endpoint, "Chat-completions URL");
  cmd->add_option("--theta", o.theta, "Supplement threshold");
  cmd->add_option("--n-determinate", o.n_determinate, "Derived premises required before concluding");
  cmd->add_option("--max-iters", o.max_iters, "Exploration iteration cap");
  cmd->add_option("--ablation", o.ablations, "no-identify, no-priority or no-memory (repeatable)")
      ->check(CLI::IsMember({"no-identify", "no-priority", "no-memory"}));
  cmd->add_option("--seed", o.seed, "Seed for random selection");
  cmd->add_option("--cache-dir", o.cache_dir, "Response cache directory");
  cmd->add_option("--config", o.config_file, "JSON file with engine settings");
  cmd->add_flag("--timings", o.timings, "Include wall-clock timings in output files");
}

EngineConfig engine_config(const CLI::App* cmd, const Options& o, const json& fixture_overrides = json()) {
  EngineConfig c;
  try {
    if (!o.config_file.empty()) apply_config(c, json::parse(read_file(o.config_file)));
    apply_config(c, fixture_overrides);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (cmd->count("--theta")) c.theta = o.theta;
  if (cmd->count("--n-determinate")) c.n_required_determinate = o.n_determinate;
  if (cmd->count("--max-iters")) c.max_iterations = o.max_iters;
  if (cmd->count("--seed")) c.seed = o.seed;
  if (cmd->count("--backend")) c.backend = parse_backend(o.backend);
  for (const auto& a : o.ablations) {
    if (a == "no-identify") c.ablation.no_identify = true;
    if (a == "no-priority") c.ablation.no_priority = true;
    if (a == "no-memory") c.ablation.no_memory = true;
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return c;
}

struct BackendSetup {
  std::unique_ptr<ChatClient> client;
  BackendFactory factory;
};

BackendSetup backend_setup(const EngineConfig& config, const Options& o) {
  BackendSetup setup;
  switch (config.backend) {
    case BackendChoice::Symbolic:
      setup.factory = [depth = config.oracle_depth](const ProblemInstance&) {
        return std::make_unique<SymbolicBackend>(TermProfiler(), depth);
      };
      break;
    case BackendChoice::Llm: {
      if (o.endpoint.empty()) throw UsageError("--backend llm needs --endpoint");
      ClientConfig cc;
      cc.endpoint = o.endpoint;
      cc.model = o.model;
      if (const char* key = std::getenv("DETERMLR_API_KEY")) cc.api_key = key;
      if (!o.cache_dir.empty()) cc.cache_dir = o.cache_dir;
      setup.client = std::make_unique<ChatClient>(cc);
      ChatClient* client = setup.client.get();
      setup.factory = [client, config, model = o.model](const ProblemInstance& p) -> std::unique_ptr<InferenceBackend> {
        struct Owned : PromptedBackend {
          using PromptedBackend::PromptedBackend;
          std::string name() const override { return "llm"; }
        };
        return std::make_unique<Owned>(*client, prompted_config(config, p.dataset, model));
      };
      break;
    }
    case BackendChoice::Replay: {
      if (o.fixture.empty()) throw UsageError("--backend replay needs --fixture <directory>");
      const std::filesystem::path dir = o.fixture;
      setup.factory = [dir, config](const ProblemInstance& p) -> std::unique_ptr<InferenceBackend> {
        const json j = json::parse(read_file(dir / (p.case_id + ".json")));
        return std::make_unique<ReplayBackend>(ReplayScript::from_json(j), prompted_config(config, p.dataset));
      };
      break;
    }
  }
  return setup;
}

std::string summary(const RunReport& r) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2);
  s << r.dataset << ": " << r.aggregates.cases << " cases, accuracy " << r.aggregates.accuracy << "%, avg steps "
    << r.aggregates.avg_steps << ", steps per determinate premise ";
  if (r.aggregates.steps_per_determinate) s << *r.aggregates.steps_per_determinate;
  else s << "n/a";
  return s.str();
}

std::string case_summary(const CaseTrace& t) {
  std::ostringstream s;
  s << t.case_id << ": answer " << t.final_answer;
  if (t.gold) s << " (gold " << *t.gold << (t.correct ? ", correct" : ", wrong") << ")";
  s << ", " << t.admitted << " derived premises, " << t.total_steps << " steps";
  for (const auto& e : t.errors) s << "\n  error: " << e;
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

int cmd_run(const CLI::App* cmd, const Options& o, std::ostream& out) {
  const EngineConfig config = engine_config(cmd, o);
  const ReportFormat format = parse_report_format(o.format);
  Dataset dataset;
  try {
    dataset = parse_dataset(o.dataset);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  BackendSetup setup = backend_setup(config, o);
  const std::vector<ProblemInstance> cases = load_dataset(dataset, o.path);
  std::vector<CaseTrace> traces;
  const RunReport report = evaluate(cases, config, setup.factory, o.parallel, &traces);
  if (!o.out.empty()) write_report(report, format, o.out, o.timings);
  if (!o.traces.empty()) {
    std::string lines;
    for (const auto& t : traces) lines += trace_to_json(t, o.timings).dump() + "\n";
    write_text(o.traces, lines);
  }
  out << summary(report) << "\n";
  return kExitOk;
}

ProblemInstance read_case(const Options& o, std::istream& in) {
  std::string text;
  if (o.path.empty() || o.path == "-") {
    std::ostringstream s;
    s << in.rdbuf();
    text = s.str();
  } else {
    text = read_file(o.path);
  }
  const Dataset fallback = o.dataset.empty() ? Dataset::Custom : parse_dataset(o.dataset);
  std::vector<ProblemInstance> cases;
  const std::string trimmed = trim(text);
  if (!trimmed.empty() && trimmed.front() == '{') {
    try {
      cases = convert_record(json::parse(trimmed), fallback, 0);
    } catch (const json::parse_error& e) {
      throw SchemaError(0, "record", e.what());
    }
  } else {
    cases = parse_dataset_text(fallback, text);
  }
  if (cases.empty()) throw SchemaError(0, "record", "no case found");
  return cases.front();
}

int cmd_solve(const CLI::App* cmd, const Options& o, std::istream& in, std::ostream& out) {
  const EngineConfig config = engine_config(cmd, o);
  BackendSetup setup = backend_setup(config, o);
  const ProblemInstance problem = read_case(o, in);
  auto backend = setup.factory(problem);
  const CaseTrace trace = run_case(problem, config, *backend);
  const std::string dumped = trace_to_json(trace, o.timings).dump(2) + "\n";
  if (o.out.empty()) {
    out << dumped;
  } else {
    write_text(o.out, dumped);
    out << case_summary(trace) << "\n";
  }
  return trace.errors.empty() ? kExitOk : kExitFailure;
}

int cmd_replay(const CLI::App* cmd, const Options& o, std::ostream& out) {
  const ReplayFixture fixture = load_replay_fixture(o.fixture);
  EngineConfig config = engine_config(cmd, o, fixture.config);
  config.backend = BackendChoice::Replay;
  ReplayBackend backend(ReplayScript::from_json(fixture.responses),
                        prompted_config(config, fixture.problem.dataset, o.model));
  const CaseTrace trace = run_case(fixture.problem, config, backend);
  if (!o.out.empty()) write_text(o.out, trace_to_json(trace, o.timings).dump(2) + "\n");
  out << case_summary(trace) << "\n";
  return trace.errors.empty() ? kExitOk : kExitFailure;
}

int cmd_oracle_check(const Options& o, std::ostream& out, std::ostream& err) {
  const auto suite = reference::generate_suite(o.seed, o.count);
  std::size_t agree = 0;
  for (const auto& c : suite) {
    const ProblemInstance p = reference::to_problem(c);
    std::string got;
    if (o.pipeline) {
      SymbolicBackend backend;
      got = run_case(p, EngineConfig{}, backend).final_answer;
    } else {
      oracle::KnowledgeBase kb;
      for (const auto& s : reference::statements(c.theory)) kb.add_statement(s);
      const auto truth = oracle::query(kb, oracle::parse_fact(p.target.hypothesis));
      got = p.target.label_for_truth(oracle::truth_name(truth)).value_or("Abstain");
    }
    if (got == *p.target.answer_key) {
      ++agree;
    } else {
      err << c.id << ": expected " << *p.target.answer_key << " got " << got << "\n";
    }
  }
  out << "oracle-check: " << agree << "/" << suite.size() << " agree\n";
  return agree == suite.size() ? kExitOk : kExitFailure;
}

int cmd_report(const Options& o, std::ostream& out) {
  const ReportFormat format = parse_report_format(o.format);
  RunReport report;
  const std::string text = trim(read_file(o.path));
  if (!text.empty() && text.front() == '{' && text.find('\n') == std::string::npos) {
    report = aggregate(o.dataset, json::object(), load_case_log(o.path));
  } else if (!text.empty() && text.front() == '{') {
    // Either a pretty-printed report or a JSONL log.
    json parsed;
    bool single = true;
    try {
      parsed = json::parse(text);
    } catch (const json::parse_error&) {
      single = false;
    }
    if (single && parsed.contains("aggregates")) {
      report = report_from_json(parsed);
    } else if (single) {
      report = aggregate(o.dataset, json::object(), {result_from_json(parsed)});
    } else {
      report = aggregate(o.dataset, json::object(), load_case_log(o.path));
    }
  } else {
    throw SchemaError(0, "record", "expected a JSON report or a JSONL case log");
  }
  if (!o.dataset.empty()) report.dataset = o.dataset;
  if (!o.out.empty()) write_report(report, format, o.out, o.timings);
  out << summary(report) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iterative premise-driven reasoning over logic benchmarks", "determlr"};
  app.require_subcommand(1);
  Options o;

  CLI::App* run_cmd = app.add_subcommand("run", "Evaluate a dataset");
  run_cmd->add_option("--dataset", o.dataset, "LogiQA, ProofWriter, FOLIO, PrOntoQA or LD")->required();
  run_cmd->add_option("--path", o.path, "Dataset file")->required();
  run_cmd->add_option("--fixture", o.fixture, "Replay fixture directory (one <case_id>.json per case)");
  run_cmd->add_option("--parallel", o.parallel, "Concurrent sessions")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", o.out, "Report file");
  run_cmd->add_option("--format", o.format, "json, csv or markdown")->check(CLI::IsMember({"json", "csv", "markdown"}));
  run_cmd->add_option("--traces", o.traces, "JSONL file receiving every case trace");
  add_engine_flags(run_cmd, o);

  CLI::App* solve_cmd = app.add_subcommand("solve", "Run one case and print its trace");
  solve_cmd->add_option("--path", o.path, "Case file, or - for stdin");
  solve_cmd->add_option("--dataset", o.dataset, "Dataset the case belongs to");
  solve_cmd->add_option("--fixture", o.fixture, "Replay fixture directory");
  solve_cmd->add_option("--out", o.out, "Trace file; stdout gets a summary instead");
  add_engine_flags(solve_cmd, o);

  CLI::App* replay_cmd = app.add_subcommand("replay", "Run a replay fixture");
  replay_cmd->add_option("--fixture", o.fixture, "Fixture file")->required();
  replay_cmd->add_option("--out", o.out, "Trace file");
  add_engine_flags(replay_cmd, o);

  CLI::App* check_cmd = app.add_subcommand("oracle-check", "Compare the oracle with the brute-force enumerator");
  check_cmd->add_option("--count", o.count, "Generated cases");
  check_cmd->add_option("--seed", o.seed, "Generator seed");
  check_cmd->add_flag("--pipeline", o.pipeline, "Run the full reasoning loop instead of a direct query");

  CLI::App* report_cmd = app.add_subcommand("report", "Aggregate saved traces");
  report_cmd->add_option("--path", o.path, "JSONL case log or JSON report")->required();
  report_cmd->add_option("--dataset", o.dataset, "Dataset name for the report");
  report_cmd->add_option("--format", o.format, "json, csv or markdown")->check(CLI::IsMember({"json", "csv", "markdown"}));
  report_cmd->add_option("--out", o.out, "Report file");
  report_cmd->add_flag("--timings", o.timings, "Include timings");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_cmd, o, out);
    if (solve_cmd->parsed()) return cmd_solve(solve_cmd, o, in, out);
    if (replay_cmd->parsed()) return cmd_replay(replay_cmd, o, out);
    if (check_cmd->parsed()) return cmd_oracle_check(o, out, err);
    if (report_cmd->parsed()) return cmd_report(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace determlr::cli
