#include "determlr/controller.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <set>
#include <type_traits>

#include "determlr/backends.hpp"
#include "determlr/explore.hpp"

namespace determlr {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<std::string> texts_of(const std::vector<Premise>& premises) {
  std::vector<std::string> out;
  out.reserve(premises.size());
  for (const auto& p : premises) out.push_back(p.text());
  return out;
}

std::string safe_normalize(std::string_view text) {
  try {
    return normalize(text);
  } catch (const EmptyStatement&) {
    return {};
  }
}

const Premise* match_text(const std::vector<Premise>& candidates, std::string_view text) {
  const std::string key = safe_normalize(text);
  if (key.empty()) return nullptr;
  for (const auto& p : candidates) {
    if (p.normalized() == key) return &p;
  }
  return nullptr;
}

// State of one session. Every backend-invoking operation goes through step().
class Session {
 public:
  Session(const ProblemInstance& problem, const EngineConfig& config, InferenceBackend& backend,
          const TermProfiler& profiler)
      : problem_(problem),
        config_(config),
        backend_(backend),
        profiler_(profiler),
        rng_(case_seed(config.seed, problem.case_id)) {
    trace_.case_id = problem.case_id;
    trace_.dataset = problem.dataset;
    trace_.boundary_conditions = problem.boundary_conditions;
    trace_.gold = gold_label(problem.target);
  }

  CaseTrace run() {
    const auto start = Clock::now();
    bool concluding = false;
    try {
      config_.validate();
      std::vector<Premise> premises = load_premises();
      identify(premises);
      loop();
      concluding = true;
      trace_.final_answer = step([&] { return conclude(); });
    } catch (const std::exception& e) {
      trace_.errors.emplace_back(e.what());
      trace_.final_answer = "Abstain";
      // An aborted run still counts the closing step once.
      if (!concluding) ++trace_.total_steps;
    }
    if (trace_.final_answer.empty()) trace_.final_answer = "Abstain";
    trace_.memory = memory_;
    trace_.admitted = memory_.derived_count();
    trace_.correct = answer_matches(trace_.final_answer, trace_.gold);
    trace_.timings.wall_ms = ms_since(start);
    return std::move(trace_);
  }

 private:
  bool ld() const { return problem_.dataset == Dataset::LogicalDeduction; }
  bool use_memory() const { return !config_.ablation.no_memory; }

  template <typename F>
  std::invoke_result_t<F> step(F&& call) {
    ++trace_.total_steps;
    const auto start = Clock::now();
    struct Charge {
      CaseTimings& timings;
      Clock::time_point start;
      ~Charge() { timings.backend_ms += ms_since(start); }
    } charge{trace_.timings, start};
    return call();
  }

  std::vector<Premise> load_premises() {
    if (!problem_.premises.empty()) return problem_.premises;
    if (ld()) {
      Extraction ex = step([&] { return backend_.extract_premises(problem_.context); });
      trace_.topic = ex.topic;
      if (trace_.boundary_conditions.empty()) trace_.boundary_conditions = ex.boundary;
      return make_input_premises(ex.premises);
    }
    std::vector<Premise> out = make_input_premises(split_sentences(problem_.context));
    if (out.empty()) throw EmptyDeterminateSet();
    return out;
  }

  void identify(const std::vector<Premise>& premises) {
    if (config_.ablation.no_identify) {
      // One undifferentiated pool; every premise is a primary candidate.
      for (const auto& p : premises) trace_.identification.determinate.push_back(p.with_kind(Kind::Determinate, p.id()));
    } else {
      const IdentifyMode mode =
          backend_.delegates_identification() ? IdentifyMode::BackendDelegated : IdentifyMode::RuleBased;
      trace_.identification =
          step([&] { return identify_all(premises, problem_.target, mode, &backend_, profiler_); });
    }
    memory_ = ReasoningMemory::init(trace_.identification.determinate, trace_.identification.indeterminate);
  }

  bool loop_open() const {
    return memory_.derived_count() < static_cast<std::size_t>(config_.n_required_determinate) &&
           memory_.iteration() < config_.max_iterations;
  }

  void loop() {
    while (loop_open()) {
      IterationRecord rec = select();
      if (ld() && !transformed_.contains(rec.primary)) {
        transformed_.insert(rec.primary);
        if (transform(rec) || !loop_open()) break;
      }
      if (explore_and_verify(rec)) break;
    }
  }

  IterationRecord select() {
    IterationRecord rec;
    rec.stage = "explore";
    const std::vector<ReasoningPath> history = extract_history(memory_, use_memory());
    const std::set<PremiseId> failed = failed_primaries(memory_, use_memory());
    rec.history = render_history(memory_, history);
    const std::vector<Premise> candidates = memory_.determinate_view();
    if (candidates.empty()) throw EmptyDeterminateSet();

    std::optional<Premise> primary;
    std::vector<Premise> supplements;
    auto pool_without = [&](const Premise& p) {
      std::vector<Premise> pool;
      for (const auto& q : memory_.premises()) {
        if (q.id() != p.id()) pool.push_back(q);
      }
      return pool;
    };

    if (config_.ablation.no_priority) {
      ++trace_.total_steps;
      primary = select_primary(candidates, problem_.target, failed, profiler_, &rng_);
      std::bernoulli_distribution coin(0.5);
      for (const auto& q : pool_without(*primary)) {
        if (coin(rng_)) supplements.push_back(q);
      }
    } else {
      PrioritizeQuery query{memory_.determinate_view(), memory_.indeterminate_view(), problem_.target,
                            problem_.dataset,           trace_.topic,                 trace_.boundary_conditions,
                            rec.history};
      const BackendSelection sel = step([&] { return backend_.prioritize(query); });
      const bool all_failed = std::all_of(candidates.begin(), candidates.end(),
                                          [&](const Premise& p) { return failed.contains(p.id()); });
      auto eligible = [&](const Premise* p) { return p && (all_failed || !failed.contains(p->id())); };
      if (sel.primary && eligible(match_text(candidates, *sel.primary))) {
        primary = *match_text(candidates, *sel.primary);
      } else {
        for (const auto& r : sel.results) {
          if (const Premise* p = match_text(candidates, r); eligible(p)) {
            primary = *p;
            break;
          }
        }
      }
      if (!primary) {
        primary = select_primary(candidates, problem_.target, failed, profiler_);
        rec.annotations.push_back("primary: deterministic");
      }
      const auto scored = select_supplements(*primary, pool_without(*primary), config_.theta, profiler_);
      for (const auto& s : scored) rec.scores.emplace(s.premise_id, s.score);
      if (!sel.results.empty()) {
        for (const auto& r : sel.results) {
          const Premise* p = match_text(memory_.premises(), r);
          if (!p || p->id() == primary->id()) continue;
          if (std::none_of(supplements.begin(), supplements.end(), [&](const Premise& q) { return q.id() == p->id(); })) {
            supplements.push_back(*p);
          }
        }
      } else {
        for (const auto& s : scored) supplements.push_back(*memory_.find(s.premise_id));
      }
    }
    rec.primary = primary->id();
    for (const auto& s : supplements) rec.supplements.push_back(s.id());
    rec.excluded.assign(failed.begin(), failed.end());
    selected_primary_ = *primary;
    selected_supplements_ = std::move(supplements);
    return rec;
  }

  // Returns true when the session should stop exploring.
  bool transform(const IterationRecord& selection) {
    const std::vector<std::string> existing = texts_of(memory_.premises());
    const std::optional<std::string> out = step([&] {
      return backend_.transform_premise(selected_primary_->text(), existing, trace_.boundary_conditions,
                                        question_with_options(problem_.target));
    });
    if (!out || safe_normalize(*out).empty()) return false;

    IterationRecord rec;
    rec.stage = "transform";
    rec.primary = selection.primary;
    rec.history = selection.history;
    rec.excluded = selection.excluded;
    rec.proposition = *out;
    const bool inside = step([&] { return backend_.check_boundary(existing, *out, trace_.boundary_conditions); });
    const bool novel = inside && memory_.find_statement(*out) == nullptr;
    if (!inside) rec.annotations.push_back("boundary");
    if (inside && !novel) rec.annotations.push_back("novelty: duplicate");
    rec.verdict = Verdict(inside, inside, novel);
    return record(std::move(rec), ExplorationResult{*out, {selection.primary}, Verdict(inside, inside, novel)});
  }

  bool explore_and_verify(IterationRecord& rec) {
    std::vector<PremiseId> sources{rec.primary};
    sources.insert(sources.end(), rec.supplements.begin(), rec.supplements.end());

    ExploreQuery query{*selected_primary_, selected_supplements_, memory_.premises(), problem_.target,
                       problem_.dataset, trace_.boundary_conditions};
    std::string proposition;
    try {
      proposition = step([&] { return determlr::explore(query, backend_); });
    } catch (const ExplorationFailed& e) {
      rec.annotations.push_back(std::string("exploration: ") + e.what());
      return record(std::move(rec), ExplorationResult{"", sources, Verdict()});
    }
    rec.proposition = proposition;

    std::vector<std::string> notes;
    Verdict verdict = step([&] {
      return verify(proposition, sources, problem_.target, memory_, backend_, profiler_, &notes);
    });
    rec.annotations.insert(rec.annotations.end(), notes.begin(), notes.end());
    if (ld() && verdict.overall()) {
      const bool inside = step([&] {
        return backend_.check_boundary(texts_of(memory_.premises()), proposition, trace_.boundary_conditions);
      });
      if (!inside) {
        verdict = Verdict(false, verdict.useful(), verdict.novel());
        rec.annotations.push_back("boundary");
      }
    }
    rec.verdict = verdict;
    return record(std::move(rec), ExplorationResult{proposition, sources, verdict});
  }

  // Stores the attempt; after an admission asks whether to stop.
  bool record(IterationRecord rec, const ExplorationResult& result) {
    const ReasoningPath& path = memory_.store(result);
    rec.t = path.iteration;
    rec.polarity = path.polarity;
    bool stop = false;
    if (path.polarity == Polarity::Positive) {
      stop = step([&] { return sufficiency_check(memory_, problem_.target, backend_); });
      rec.sufficient = stop;
    }
    trace_.iterations.push_back(std::move(rec));
    return stop;
  }

  std::string conclude() {
    ConcludeQuery query{problem_.context,
                        problem_.target,
                        memory_.inputs(),
                        memory_.derived(),
                        trace_.boundary_conditions,
                        render_history(memory_, extract_history(memory_, use_memory()))};
    return backend_.conclude(query);
  }

  const ProblemInstance& problem_;
  const EngineConfig& config_;
  InferenceBackend& backend_;
  const TermProfiler& profiler_;
  std::mt19937_64 rng_;
  CaseTrace trace_;
  ReasoningMemory memory_;
  std::set<PremiseId> transformed_;
  std::optional<Premise> selected_primary_;
  std::vector<Premise> selected_supplements_;
};

json verdict_json(const Verdict& v) {
  return {{"valid", v.valid()}, {"useful", v.useful()}, {"novel", v.novel()}, {"overall", v.overall()}};
}

json ids_json(const std::vector<PremiseId>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(id.value);
  return out;
}

json premises_json(const std::vector<Premise>& premises) {
  json out = json::array();
  for (const auto& p : premises) out.push_back(premise_to_json(p));
  return out;
}

}  // namespace

std::optional<std::string> gold_label(const Target& target) {
  if (!target.answer_key) return std::nullopt;
  const std::string key = trim(*target.answer_key);
  if (target.has_label(key)) return key;
  if (auto label = target.label_for_truth(key)) return label;
  return key;
}

bool answer_matches(std::string_view answer, const std::optional<std::string>& gold) {
  if (!gold || answer == "Abstain") return false;
  return to_lower(trim(answer)) == to_lower(trim(*gold));
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t case_seed(std::uint64_t seed, std::string_view case_id) { return seed ^ fnv1a(case_id); }

bool sufficiency_check(const ReasoningMemory& memory, const Target& target, InferenceBackend& backend) {
  try {
    return backend.sufficiency(SufficiencyQuery{memory.determinate_view(), memory.indeterminate_view(), target});
  } catch (const FieldNotFound&) {
    return false;
  } catch (const ParseError&) {
    return false;
  }
}

CaseTrace run_case(const ProblemInstance& problem, const EngineConfig& config, InferenceBackend& backend,
                   const TermProfiler& profiler) {
  return Session(problem, config, backend, profiler).run();
}

json trace_to_json(const CaseTrace& trace, bool include_timings) {
  json iterations = json::array();
  for (const auto& r : trace.iterations) {
    json scores = json::object();
    for (const auto& [id, s] : r.scores) scores[id.value] = s.str();
    json it{{"t", r.t},
            {"stage", r.stage},
            {"primary", r.primary.value},
            {"supplements", ids_json(r.supplements)},
            {"scores", scores},
            {"history", r.history},
            {"excluded", ids_json(r.excluded)},
            {"proposition", r.proposition},
            {"verdict", verdict_json(r.verdict)},
            {"polarity", polarity_name(r.polarity)},
            {"sufficient", r.sufficient ? json(*r.sufficient) : json(nullptr)},
            {"annotations", r.annotations}};
    iterations.push_back(std::move(it));
  }
  json out{{"case_id", trace.case_id},
           {"dataset", dataset_name(trace.dataset)},
           {"topic", trace.topic},
           {"boundary_conditions", trace.boundary_conditions},
           {"premises", premises_json(trace.memory.inputs())},
           {"identification",
            {{"determinate", premises_json(trace.identification.determinate)},
             {"indeterminate", premises_json(trace.identification.indeterminate)}}},
           {"iterations", std::move(iterations)},
           {"derived", premises_json(trace.memory.derived())},
           {"final_answer", trace.final_answer},
           {"gold", trace.gold ? json(*trace.gold) : json(nullptr)},
           {"correct", trace.correct},
           {"step_count", trace.total_steps},
           {"admitted", trace.admitted},
           {"errors", trace.errors}};
  if (include_timings) {
    out["timings"] = {{"wall_ms", trace.timings.wall_ms}, {"backend_ms", trace.timings.backend_ms}};
  }
  return out;
}

ReasoningMemory memory_from_trace(const json& trace) {
  json paths = json::array();
  for (const auto& it : trace.at("iterations")) {
    json sources = json::array({it.at("primary")});
    for (const auto& s : it.at("supplements")) sources.push_back(s);
    paths.push_back({{"t", it.at("t")},
                     {"sources", sources},
                     {"proposition", it.at("proposition")},
                     {"polarity", it.at("polarity")}});
  }
  return memory_from_json({{"premises", trace.at("premises")}, {"paths", paths}});
}

}  // namespace determlr
