#include <gtest/gtest.h>

#include "determlr/controller.hpp"
#include "determlr/reference/synthetic.hpp"
#include "support.hpp"

using namespace determlr;
using determlr::testing::HookedBackend;

namespace {

std::vector<std::string> derived_texts(const CaseTrace& trace) {
  std::vector<std::string> out;
  for (const auto& p : trace.memory.derived()) out.push_back(p.text());
  return out;
}

CaseTrace replay(const std::string& name) {
  const auto f = load_replay_fixture(determlr::testing::fixture(name));
  const EngineConfig config = determlr::testing::fixture_config(f);
  auto backend = determlr::testing::replay_backend(f, config);
  return run_case(f.problem, config, backend);
}

CaseTrace symbolic(const ProblemInstance& p, EngineConfig config = {}) {
  SymbolicBackend backend;
  return run_case(p, config, backend);
}

// One step per select, explore, verify and post-admission sufficiency call.
int expected_steps(const CaseTrace& t, bool identify_counted) {
  int steps = (identify_counted ? 1 : 0) + 1;
  for (const auto& r : t.iterations) {
    steps += 2;
    if (!r.proposition.empty()) ++steps;
    if (r.sufficient) ++steps;
  }
  return steps;
}

}  // namespace

TEST(RunCase, BaldEagleReplay) {
  const CaseTrace t = replay("bald_eagle.json");
  EXPECT_TRUE(t.errors.empty()) << (t.errors.empty() ? "" : t.errors.front());
  EXPECT_EQ(derived_texts(t), (std::vector<std::string>{
                                  "The cat chases the dog.",
                                  "The dog chases the bald eagle.",
                                  "Something chases the cat.",
                                  "The bald eagle is something that chases the cat.",
                                  "The dog and the lion both see the bald eagle.",
                                  "If the cat chases the dog, then the cat eats the bald eagle.",
                                  "The cat eats the bald eagle.",
                              }));
  EXPECT_EQ(t.final_answer, "A");
  EXPECT_TRUE(t.correct);
  EXPECT_EQ(t.admitted, 7u);
  EXPECT_EQ(t.total_steps, 30);
  ASSERT_EQ(t.iterations.size(), 7u);
  EXPECT_EQ(t.iterations.back().sufficient, true);
  EXPECT_EQ(t.iterations.front().sufficient, false);
}

TEST(RunCase, BaldEagleTracesAreByteIdentical) {
  const std::string a = trace_to_json(replay("bald_eagle.json"), false).dump();
  EXPECT_EQ(a, trace_to_json(replay("bald_eagle.json"), false).dump());
  EXPECT_EQ(a, trace_to_json(replay("bald_eagle.json"), false).dump());
}

TEST(RunCase, GolfersReplay) {
  const CaseTrace t = replay("golfers.json");
  EXPECT_TRUE(t.errors.empty()) << (t.errors.empty() ? "" : t.errors.front());
  EXPECT_EQ(t.final_answer, "A");
  EXPECT_FALSE(t.topic.empty());
  ASSERT_EQ(t.boundary_conditions.size(), 1u);
  const auto derived = derived_texts(t);
  EXPECT_NE(std::find(derived.begin(), derived.end(), "Amy finished second. Joe finished first."), derived.end());
  EXPECT_NE(std::find(derived.begin(), derived.end(), "Mya did not finish first."), derived.end());
  EXPECT_EQ(t.total_steps, 42);
  bool saw_transform = false;
  for (const auto& r : t.iterations) saw_transform = saw_transform || r.stage == "transform";
  EXPECT_TRUE(saw_transform);
}

TEST(RunCase, MaxIterationsZeroConcludesImmediately) {
  EngineConfig config;
  config.max_iterations = 0;
  const CaseTrace t = symbolic(determlr::testing::bald_eagle_problem(), config);
  EXPECT_TRUE(t.iterations.empty());
  EXPECT_EQ(t.total_steps, 2);
  EXPECT_EQ(t.final_answer, "A");
}

TEST(RunCase, StepAccountingAndTerminationOnSyntheticSuite) {
  for (const auto& c : reference::generate_suite(5, 40)) {
    const ProblemInstance p = reference::to_problem(c);
    EngineConfig config;
    const CaseTrace t = symbolic(p, config);
    EXPECT_TRUE(t.errors.empty()) << c.id;
    EXPECT_EQ(t.total_steps, expected_steps(t, true)) << c.id;
    EXPECT_LE(static_cast<int>(t.iterations.size()), config.max_iterations);
    EXPECT_LE(t.admitted, static_cast<std::size_t>(config.n_required_determinate));
    EXPECT_GE(t.total_steps, 1);
    for (std::size_t i = 0; i < t.iterations.size(); ++i) {
      EXPECT_EQ(t.iterations[i].t, static_cast<int>(i) + 1);
      EXPECT_EQ(t.iterations[i].polarity == Polarity::Positive, t.iterations[i].verdict.overall());
    }
  }
}

TEST(RunCase, BackendFailureAbstains) {
  HookedBackend backend;
  backend.on_explore = [](const ExploreQuery&) -> std::optional<std::string> { throw BackendUnavailable("endpoint down"); };
  const CaseTrace t = run_case(determlr::testing::bald_eagle_problem(), EngineConfig{}, backend);
  EXPECT_EQ(t.final_answer, "Abstain");
  EXPECT_FALSE(t.correct);
  ASSERT_EQ(t.errors.size(), 1u);
  EXPECT_NE(t.errors[0].find("endpoint down"), std::string::npos);
  // identify, select, the failed explore, then the closing step.
  EXPECT_EQ(t.total_steps, 4);
}

TEST(RunCase, FailingConclusionCountsOnce) {
  const auto p = determlr::testing::bald_eagle_problem();
  const CaseTrace normal = symbolic(p);
  HookedBackend backend;
  backend.on_conclude = [](const ConcludeQuery&) -> std::string { throw BackendUnavailable("late failure"); };
  const CaseTrace t = run_case(p, EngineConfig{}, backend);
  EXPECT_EQ(t.final_answer, "Abstain");
  EXPECT_EQ(t.total_steps, normal.total_steps);
}

TEST(RunCase, ExplorationFailureIsANegativePath) {
  HookedBackend backend;
  backend.on_explore = [](const ExploreQuery&) { return std::optional<std::string>(); };
  EngineConfig config;
  config.n_required_determinate = 2;
  config.max_iterations = 3;
  const CaseTrace t = run_case(determlr::testing::bald_eagle_problem(), config, backend);
  ASSERT_EQ(t.iterations.size(), 3u);
  for (const auto& r : t.iterations) {
    EXPECT_EQ(r.polarity, Polarity::Negative);
    EXPECT_TRUE(r.proposition.empty());
  }
  // Each failed primary is skipped next round while others remain.
  EXPECT_NE(t.iterations[0].primary, t.iterations[1].primary);
  EXPECT_EQ(t.total_steps, 1 + 3 * 2 + 1);
  EXPECT_TRUE(t.errors.empty());
}

TEST(RunCase, InvalidConfigAbstains) {
  EngineConfig config;
  config.theta = 2;
  const CaseTrace t = symbolic(determlr::testing::bald_eagle_problem(), config);
  EXPECT_EQ(t.final_answer, "Abstain");
  EXPECT_FALSE(t.errors.empty());
}

TEST(Ablation, NoMemoryHasEmptyHistory) {
  HookedBackend backend;
  backend.on_explore = [](const ExploreQuery&) { return std::optional<std::string>(); };
  EngineConfig config;
  config.ablation.no_memory = true;
  config.max_iterations = 5;
  const CaseTrace t = run_case(determlr::testing::bald_eagle_problem(), config, backend);
  ASSERT_EQ(t.iterations.size(), 5u);
  for (const auto& r : t.iterations) {
    EXPECT_TRUE(r.history.empty());
    EXPECT_TRUE(r.excluded.empty());
    // Without exclusion the argmax never moves.
    EXPECT_EQ(r.primary, t.iterations[0].primary);
  }
}

TEST(Ablation, NoPrioritySeeded) {
  EngineConfig config;
  config.ablation.no_priority = true;
  config.seed = 42;
  const auto p = reference::to_problem(reference::generate_suite(9, 1)[0]);
  const std::string a = trace_to_json(symbolic(p, config), false).dump();
  EXPECT_EQ(a, trace_to_json(symbolic(p, config), false).dump());

  int differing = 0;
  for (const auto& c : reference::generate_suite(9, 10)) {
    const auto q = reference::to_problem(c);
    EngineConfig other = config;
    other.seed = 43;
    differing += trace_to_json(symbolic(q, config), false) != trace_to_json(symbolic(q, other), false) ? 1 : 0;
    const CaseTrace t = symbolic(q, config);
    EXPECT_EQ(t.total_steps, expected_steps(t, true)) << c.id;
    for (const auto& r : t.iterations) EXPECT_TRUE(r.scores.empty());
  }
  EXPECT_GT(differing, 0);
}

TEST(Ablation, NoIdentifyPoolsEverything) {
  EngineConfig config;
  config.ablation.no_identify = true;
  const auto p = determlr::testing::bald_eagle_problem();
  const CaseTrace t = symbolic(p, config);
  EXPECT_EQ(t.identification.determinate.size(), p.premises.size());
  EXPECT_TRUE(t.identification.indeterminate.empty());
  EXPECT_EQ(t.total_steps, expected_steps(t, false));
}

TEST(Sufficiency, Examples) {
  SymbolicBackend backend;
  Target t;
  t.hypothesis = "The cat is big.";
  const auto same = ReasoningMemory::init({Premise::input({"d1"}, "The cat is big.", 0, Kind::Determinate)}, {});
  EXPECT_TRUE(sufficiency_check(same, t, backend));
  const auto via_rule =
      ReasoningMemory::init({Premise::input({"d1"}, "The cat is red.", 0, Kind::Determinate)},
                            {Premise::input({"i1"}, "If something is red then it is big.", 1, Kind::Indeterminate),
                             Premise::input({"i2"}, "The dog is green.", 2, Kind::Indeterminate)});
  EXPECT_TRUE(sufficiency_check(via_rule, t, backend));
  const auto nothing = ReasoningMemory::init({Premise::input({"d1"}, "The cat is red.", 0, Kind::Determinate)}, {});
  EXPECT_FALSE(sufficiency_check(nothing, t, backend));

  ReplayScript script({{"sufficiency", std::nullopt, "no judgement here"}});
  PromptedBackend garbled(script, PromptedConfig{});
  EXPECT_FALSE(sufficiency_check(same, t, garbled));
}

TEST(Trace, JsonShapeAndMemoryRoundTrip) {
  const CaseTrace t = replay("bald_eagle.json");
  const nlohmann::json j = trace_to_json(t);
  for (const char* key : {"case_id", "dataset", "iterations", "final_answer", "step_count", "admitted", "identification",
                          "premises", "derived", "errors", "timings", "gold", "correct"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_FALSE(trace_to_json(t, false).contains("timings"));
  EXPECT_EQ(j.at("step_count"), 30);
  const auto& first = j.at("iterations").at(0);
  for (const char* key : {"t", "primary", "supplements", "proposition", "verdict", "polarity"}) {
    EXPECT_TRUE(first.contains(key)) << key;
  }
  EXPECT_EQ(first.at("proposition"), "The cat chases the dog.");
  EXPECT_EQ(first.at("polarity"), "positive");
  EXPECT_EQ(memory_from_trace(j), t.memory);
  EXPECT_EQ(memory_from_trace(nlohmann::json::parse(j.dump())), t.memory);
}

TEST(Trace, SymbolicRoundTripOnSuite) {
  for (const auto& c : reference::generate_suite(12, 20)) {
    const CaseTrace t = symbolic(reference::to_problem(c));
    EXPECT_EQ(memory_from_trace(nlohmann::json::parse(trace_to_json(t).dump())), t.memory) << c.id;
  }
}

TEST(Answers, GoldAndMatching) {
  Target t;
  t.options = {{"A", "True"}, {"B", "False"}, {"C", "Uncertain"}};
  t.answer_key = "A";
  EXPECT_EQ(gold_label(t), "A");
  t.answer_key = "Unknown";
  EXPECT_EQ(gold_label(t), "C");
  t.answer_key.reset();
  EXPECT_FALSE(gold_label(t).has_value());
  EXPECT_TRUE(answer_matches("a", std::optional<std::string>("A")));
  EXPECT_FALSE(answer_matches("B", std::optional<std::string>("A")));
  EXPECT_FALSE(answer_matches("Abstain", std::optional<std::string>("Abstain")));
  EXPECT_FALSE(answer_matches("A", std::nullopt));
}

TEST(Seeds, Fnv1aAndCaseSeed) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(case_seed(7, "x"), case_seed(7, "x"));
  EXPECT_NE(case_seed(7, "x"), case_seed(7, "y"));
  EXPECT_NE(case_seed(7, "x"), case_seed(8, "x"));
}
