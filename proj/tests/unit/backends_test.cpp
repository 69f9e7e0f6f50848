#include <gtest/gtest.h>

#include <fstream>

#include "determlr/backends.hpp"
#include "support.hpp"

using namespace determlr;
using nlohmann::json;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / ("determlr-test-" + name + "-" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

ChatRequest simple_request(const std::string& user = "hello") {
  return ChatRequest{"gpt-4", {{"system", "sys"}, {"user", user}}, 0.1, 64};
}

std::string ok_body(const std::string& text) {
  return json{{"choices", json::array({json{{"message", {{"role", "assistant"}, {"content", text}}}}})}}.dump();
}

Target abc_target() {
  Target t;
  t.question = "Is it true?";
  t.options = {{"A", "True"}, {"B", "False"}, {"C", "Uncertain"}};
  return t;
}

}  // namespace

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ChatRequest, ValidateAndDigest) {
  EXPECT_NO_THROW(simple_request().validate());
  EXPECT_THROW((ChatRequest{"m", {}, 0.1, 1}).validate(), Error);
  EXPECT_THROW((ChatRequest{"m", {{"user", "x"}}, 0.1, 1}).validate(), Error);
  EXPECT_EQ(simple_request().digest(), simple_request().digest());
  EXPECT_NE(simple_request().digest(), simple_request("other").digest());
  ChatRequest warmer = simple_request();
  warmer.temperature = 0.7;
  EXPECT_NE(warmer.digest(), simple_request().digest());
  const json j = simple_request().to_json();
  EXPECT_EQ(j.at("model"), "gpt-4");
  EXPECT_EQ(j.at("messages").size(), 2u);
  EXPECT_EQ(j.at("max_tokens"), 64);
}

TEST(PromptTemplate, RenderAndPlaceholders) {
  const auto t = PromptTemplate::parse("demo", "[system]\nBe {mood}. {{literal}}\n[user]\nSay {word}.\n");
  EXPECT_EQ(t.placeholders(), (std::set<std::string>{"mood", "word"}));
  const ChatRequest r = t.render({{"mood", "calm"}, {"word", "hi"}}, "m", 0.1, 10);
  ASSERT_EQ(r.messages.size(), 2u);
  EXPECT_EQ(r.messages[0].role, "system");
  EXPECT_EQ(r.messages[0].content, "Be calm. {literal}");
  EXPECT_EQ(r.messages[1].content, "Say hi.");
  try {
    t.render({{"mood", "calm"}}, "m", 0.1, 10);
    FAIL() << "expected UnboundPlaceholder";
  } catch (const UnboundPlaceholder& e) {
    EXPECT_EQ(e.name(), "word");
  }
}

TEST(PromptTemplate, ExamplesGoAfterSystem) {
  auto t = PromptTemplate::parse("demo", "[system]\nS\n[user]\nU {x}\n");
  t.set_examples({{"user", "example q"}, {"assistant", "example a"}});
  const auto r = t.render({{"x", "1"}}, "m", 0.1, 10);
  ASSERT_EQ(r.messages.size(), 4u);
  EXPECT_EQ(r.messages[1].content, "example q");
  EXPECT_EQ(r.messages[3].content, "U 1");
}

TEST(PromptLibrary, BuiltinIdentification) {
  const auto& lib = PromptLibrary::builtin();
  for (const char* name : {"identify", "prioritize", "prioritize_ld", "explore", "explore_ld", "validity", "usefulness",
                           "novelty", "sufficiency", "conclude", "extract", "transform", "boundary"}) {
    EXPECT_TRUE(lib.contains(name)) << name;
  }
  const auto& t = lib.get("identify");
  EXPECT_EQ(t.placeholders(), (std::set<std::string>{"premise", "hypothesis"}));
  const auto r = t.render({{"premise", "The bald eagle is kind."}, {"hypothesis", "The cat eats the bald eagle."}},
                          "gpt-4", 0.1, 512);
  std::string user;
  for (const auto& m : r.messages) {
    if (m.role == "user") user += m.content;
  }
  EXPECT_NE(user.find("\"Premise\": \"The bald eagle is kind.\""), std::string::npos);
  EXPECT_NE(user.find("\"Hypothesis\": \"The cat eats the bald eagle.\""), std::string::npos);
  EXPECT_THROW(t.render({{"premise", "x"}}, "gpt-4", 0.1, 512), UnboundPlaceholder);
  EXPECT_EQ(t.render({{"premise", "a"}, {"hypothesis", "b"}}, "gpt-4", 0.1, 512).digest(),
            t.render({{"premise", "a"}, {"hypothesis", "b"}}, "gpt-4", 0.1, 512).digest());
  EXPECT_THROW(lib.get("nope"), Error);
}

TEST(PromptLibrary, DirectoryOverrides) {
  TempDir dir("prompts");
  std::ofstream(dir.path / "identify.txt") << "[system]\nCustom\n[user]\n{premise}|{hypothesis}\n";
  std::ofstream(dir.path / "identify.examples.json")
      << R"([{"role": "user", "content": "q"}, {"role": "assistant", "content": "a"}])";
  const auto lib = PromptLibrary::from_directory(dir.path);
  const auto r = lib.get("identify").render({{"premise", "p"}, {"hypothesis", "h"}}, "m", 0.1, 5);
  ASSERT_EQ(r.messages.size(), 4u);
  EXPECT_EQ(r.messages[0].content, "Custom");
  EXPECT_EQ(r.messages[3].content, "p|h");
  EXPECT_TRUE(lib.contains("explore"));
}

TEST(ParseLabeledField, Examples) {
  EXPECT_EQ(parse_labeled_field("\"Judgement\": \"Is this deduction valid? True\"", "Judgement"),
            "Is this deduction valid? True");
  EXPECT_EQ(parse_labeled_field("proposition: The cat chases the dog", "proposition"), "The cat chases the dog");
  EXPECT_THROW(parse_labeled_field("nothing here", "Judgement"), FieldNotFound);
  EXPECT_EQ(parse_labeled_field("Results: a\nRESULTS: b\n", "results"), "b");
  EXPECT_EQ(parse_labeled_field("\"Most relevant premise\": \"The cat is red.\"\nOther: x", "most relevant premise"),
            "The cat is red.");
}

TEST(ParseJudgement, Forms) {
  EXPECT_EQ(parse_judgement("Is this deduction valid? True"), true);
  EXPECT_EQ(parse_judgement("Is this deduction valid? False"), false);
  EXPECT_EQ(parse_judgement("Yes."), true);
  EXPECT_EQ(parse_judgement("No, it is not."), false);
  EXPECT_FALSE(parse_judgement("maybe").has_value());
}

TEST(ParseAnswer, Forms) {
  Target logiqa;
  logiqa.options = {{"A", "a"}, {"B", "b"}, {"C", "c"}, {"D", "d"}};
  EXPECT_EQ(parse_answer("the answer is D. D is a female PhD.", logiqa), "D");
  EXPECT_EQ(parse_answer("The cat eats the bald eagle. So the answer is true.", abc_target()), "A");
  EXPECT_EQ(parse_answer("So the answer is uncertain.", abc_target()), "C");
  EXPECT_EQ(parse_answer("\"Judgement\": \"Now we know that the answer to this question should be B\"", abc_target()), "B");
  Target ld;
  ld.options = {{"A", "Ana finished third."}, {"B", "Eli finished third."}};
  EXPECT_EQ(parse_answer("I think eli finished third here", ld), "B");
  EXPECT_EQ(parse_answer("no idea at all", abc_target()), "Abstain");
}

TEST(ChatClient, RetriesTransientErrorsWithBackoff) {
  int calls = 0;
  std::vector<std::chrono::milliseconds> slept;
  Transport transport = [&](const std::string& url, const std::string& body, const std::string& key) {
    ++calls;
    EXPECT_EQ(url, "http://x/v1/chat");
    EXPECT_EQ(key, "secret");
    EXPECT_EQ(json::parse(body).at("model"), "gpt-4");
    return calls <= 2 ? HttpResponse{429, "slow down"} : HttpResponse{200, ok_body("hi")};
  };
  ChatClient client(ClientConfig{"http://x/v1/chat", "gpt-4", "secret"}, transport,
                    [&](std::chrono::milliseconds d) { slept.push_back(d); });
  EXPECT_EQ(client.chat(simple_request()), "hi");
  EXPECT_EQ(calls, 3);
  EXPECT_EQ(slept, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(1000), std::chrono::milliseconds(2000)}));
  EXPECT_EQ(client.network_calls(), 3u);
}

TEST(ChatClient, TransportExceptionsRetryThenGiveUp) {
  int calls = 0;
  Transport transport = [&](const std::string&, const std::string&, const std::string&) -> HttpResponse {
    ++calls;
    throw std::runtime_error("connection refused");
  };
  std::vector<std::chrono::milliseconds> slept;
  ChatClient client(ClientConfig{"http://x", "gpt-4", "k"}, transport,
                    [&](std::chrono::milliseconds d) { slept.push_back(d); });
  EXPECT_THROW(client.chat(simple_request()), BackendUnavailable);
  EXPECT_EQ(calls, 5);
  ASSERT_EQ(slept.size(), 4u);
  EXPECT_EQ(slept.back(), std::chrono::milliseconds(8000));
}

TEST(ChatClient, AuthErrorIsImmediate) {
  for (int status : {401, 403}) {
    int calls = 0;
    Transport transport = [&](const std::string&, const std::string&, const std::string&) {
      ++calls;
      return HttpResponse{status, ""};
    };
    ChatClient client(ClientConfig{"http://x", "gpt-4", "k"}, transport, [](std::chrono::milliseconds) {});
    EXPECT_THROW(client.chat(simple_request()), AuthError);
    EXPECT_EQ(calls, 1);
  }
}

TEST(ChatClient, ClientErrorsAndMalformedBodies) {
  Transport bad_request = [](const std::string&, const std::string&, const std::string&) { return HttpResponse{400, "bad"}; };
  ChatClient a(ClientConfig{"http://x", "gpt-4", "k"}, bad_request, [](std::chrono::milliseconds) {});
  EXPECT_THROW(a.chat(simple_request()), BackendUnavailable);
  EXPECT_EQ(a.network_calls(), 1u);

  Transport garbage = [](const std::string&, const std::string&, const std::string&) { return HttpResponse{200, "{}"}; };
  ChatClient b(ClientConfig{"http://x", "gpt-4", "k"}, garbage, [](std::chrono::milliseconds) {});
  EXPECT_THROW(b.chat(simple_request()), BackendUnavailable);

  ChatClient c(ClientConfig{"", "gpt-4", "k"}, garbage, [](std::chrono::milliseconds) {});
  EXPECT_THROW(c.chat(simple_request()), BackendUnavailable);
}

TEST(ChatClient, CacheHitsAvoidTheNetwork) {
  TempDir dir("cache");
  int calls = 0;
  Transport transport = [&](const std::string&, const std::string& body, const std::string&) {
    ++calls;
    return HttpResponse{200, ok_body("reply to " + json::parse(body)["messages"][1]["content"].get<std::string>())};
  };
  ClientConfig config{"http://x", "gpt-4", "k"};
  config.cache_dir = dir.path;
  {
    ChatClient client(config, transport, [](std::chrono::milliseconds) {});
    EXPECT_EQ(client.chat(simple_request("one")), "reply to one");
    EXPECT_EQ(client.chat(simple_request("one")), "reply to one");
    EXPECT_EQ(client.chat(simple_request("two")), "reply to two");
    EXPECT_EQ(calls, 2);
    EXPECT_EQ(client.cache_hits(), 1u);
  }
  ChatClient reopened(config, transport, [](std::chrono::milliseconds) {});
  EXPECT_EQ(reopened.chat(simple_request("two")), "reply to two");
  EXPECT_EQ(reopened.network_calls(), 0u);
  EXPECT_EQ(calls, 2);
}

TEST(ResponseCache, PersistsAndReloads) {
  TempDir dir("store");
  {
    ResponseCache cache(dir.path);
    EXPECT_FALSE(cache.get("k1"));
    cache.put("k1", "v1\nwith newline");
    cache.put("k2", "v2");
    EXPECT_EQ(cache.size(), 2u);
  }
  ResponseCache again(dir.path);
  EXPECT_EQ(again.size(), 2u);
  EXPECT_EQ(again.get("k1"), "v1\nwith newline");
}

TEST(ReplayScript, OrderedPerStage) {
  ReplayScript script({{"explore", std::nullopt, "first"}, {"validity", std::nullopt, "v"}, {"explore", std::nullopt, "second"}});
  EXPECT_EQ(script.remaining("explore"), 2u);
  EXPECT_EQ(script.next("explore", "d"), "first");
  EXPECT_EQ(script.next("validity", "d"), "v");
  EXPECT_EQ(script.next("explore", "d"), "second");
  EXPECT_THROW(script.next("explore", "d"), ReplayExhausted);
  EXPECT_THROW(script.next("conclude", "d"), ReplayExhausted);
}

TEST(ReplayScript, DigestsAreChecked) {
  ReplayScript script({{"explore", "abc", "ok"}, {"explore", "abc", "never"}});
  EXPECT_EQ(script.next("explore", "abc"), "ok");
  EXPECT_THROW(script.next("explore", "xyz"), ReplayMismatch);
}

TEST(ReplayScript, FromJsonShapes) {
  const json list = json::array({json{{"stage", "a"}, {"response", "1"}}});
  EXPECT_EQ(ReplayScript::from_json(list).remaining("a"), 1u);
  const json wrapped{{"responses", list}};
  EXPECT_EQ(ReplayScript::from_json(wrapped).remaining("a"), 1u);
  EXPECT_THROW(ReplayScript::from_json(json{{"nope", 1}}), Error);
}

TEST(ReplayBackend, BaldEagleFirstExploreRound) {
  const auto f = load_replay_fixture(determlr::testing::fixture("bald_eagle.json"));
  auto script = ReplayScript::from_json(f.responses);
  std::string reply;
  // Skip to the first scripted exploration.
  reply = script.next("explore", "");
  EXPECT_EQ(normalize(parse_labeled_field("\"Proposition\": \"" + reply, "proposition")), "the cat chases the dog");
}

TEST(PromptedBackend, ParsesEveryStage) {
  ReplayScript script({
      {"identify", std::nullopt, "Yes, it is a determinate premise.\""},
      {"identify", std::nullopt, "No, it is not.\""},
      {"prioritize", std::nullopt,
       "\"Most relevant premise\": \"The cat is red.\"\n\"Results\": \"If something is red then it is big.\""},
      {"explore", std::nullopt, "The cat is big.\""},
      {"explore", std::nullopt, "None.\""},
      {"validity", std::nullopt, "True\""},
      {"usefulness", std::nullopt, "False\""},
      {"novelty", std::nullopt, "True\""},
      {"sufficiency", std::nullopt, "garbled"},
      {"conclude", std::nullopt, "So the answer is false."},
      {"extract", std::nullopt,
       "\"topic\": \"Golf.\"\n\"premise\": \"Ada finished third-to-last. Joe finished first.\"\n"
       "\"boundary condition\": \"Seven golfers.\""},
      {"transform", std::nullopt, "None.\""},
      {"transform", std::nullopt, "Ada finished fifth.\""},
      {"boundary", std::nullopt, "True\""},
  });
  PromptedConfig config;
  PromptedBackend backend(script, config);
  Target t = abc_target();
  t.hypothesis = "The cat is big.";
  const Premise red = Premise::input({"d1"}, "The cat is red.", 0, Kind::Determinate);

  EXPECT_EQ(backend.classify(red, t), Kind::Determinate);
  EXPECT_EQ(backend.classify(red, t), Kind::Indeterminate);

  const auto sel = backend.prioritize(PrioritizeQuery{{red}, {}, t, Dataset::ProofWriter, "", {}, {}});
  EXPECT_EQ(sel.primary, "The cat is red.");
  EXPECT_EQ(sel.results, (std::vector<std::string>{"If something is red then it is big."}));

  const ExploreQuery q{red, {}, {red}, t, Dataset::ProofWriter, {}};
  EXPECT_EQ(backend.explore(q), "The cat is big.");
  EXPECT_FALSE(backend.explore(q).has_value());
  EXPECT_TRUE(backend.validity({"a"}, "b"));
  EXPECT_EQ(backend.usefulness("b", t), false);
  EXPECT_TRUE(backend.novelty("b", {"a"}));
  EXPECT_FALSE(backend.sufficiency(SufficiencyQuery{{red}, {}, t}));
  EXPECT_EQ(backend.conclude(ConcludeQuery{"ctx", t, {red}, {}, {}, {}}), "B");

  const Extraction e = backend.extract_premises("Some golfers played.");
  EXPECT_EQ(e.topic, "Golf.");
  EXPECT_EQ(e.premises, (std::vector<std::string>{"Ada finished third-to-last.", "Joe finished first."}));
  EXPECT_EQ(e.boundary, (std::vector<std::string>{"Seven golfers."}));
  EXPECT_THROW(backend.extract_premises("   "), Error);

  EXPECT_FALSE(backend.transform_premise("Ada finished third-to-last.", {}, e.boundary, "q").has_value());
  EXPECT_EQ(backend.transform_premise("Ada finished third-to-last.", {}, e.boundary, "q"), "Ada finished fifth.");
  EXPECT_TRUE(backend.check_boundary({"Joe finished first."}, "Amy finished second.", e.boundary));
  EXPECT_THROW(backend.validity({"a"}, "b"), ReplayExhausted);
}

TEST(PromptedBackend, StrictDigestMatchesRenderedRequest) {
  PromptedConfig config;
  ReplayScript probe({});
  PromptedBackend renderer(probe, config);
  const Premise red = Premise::input({"d1"}, "The cat is red.", 0, Kind::Determinate);
  Target t;
  t.hypothesis = "The cat is big.";
  const std::string digest =
      renderer.render("identify", {{"premise", red.text()}, {"hypothesis", t.hypothesis}}).digest();

  ReplayScript good({{"identify", digest, "Yes.\""}});
  PromptedBackend a(good, config);
  EXPECT_EQ(a.classify(red, t), Kind::Determinate);

  ReplayScript bad({{"identify", digest, "Yes.\""}});
  PromptedBackend b(bad, config);
  const Premise blue = Premise::input({"d1"}, "The cat is blue.", 0, Kind::Determinate);
  EXPECT_THROW(b.classify(blue, t), ReplayMismatch);
}

TEST(SymbolicBackend, ConcludeMapsTruthToLabels) {
  SymbolicBackend backend;
  const auto p = determlr::testing::bald_eagle_problem();
  EXPECT_EQ(backend.conclude(ConcludeQuery{p.context, p.target, p.premises, {}, {}, {}}), "A");
  Target unknown = p.target;
  unknown.hypothesis = "The lion is kind.";
  EXPECT_EQ(backend.conclude(ConcludeQuery{p.context, unknown, p.premises, {}, {}, {}}), "C");
  Target negative = p.target;
  negative.hypothesis = "The dog sees the lion.";
  EXPECT_EQ(backend.conclude(ConcludeQuery{p.context, negative, p.premises, {}, {}, {}}), "B");
}

TEST(SymbolicBackend, Sufficiency) {
  SymbolicBackend backend;
  Target t;
  t.hypothesis = "The cat is big.";
  const Premise fact = Premise::input({"d1"}, "The cat is red.", 0, Kind::Determinate);
  const Premise rule = Premise::input({"i1"}, "If something is red then it is big.", 1, Kind::Indeterminate);
  const Premise same = Premise::input({"d2"}, "The cat is big.", 2, Kind::Determinate);
  EXPECT_TRUE(backend.sufficiency(SufficiencyQuery{{same}, {}, t}));
  EXPECT_TRUE(backend.sufficiency(SufficiencyQuery{{fact}, {rule}, t}));
  EXPECT_FALSE(backend.sufficiency(SufficiencyQuery{{fact}, {}, t}));
}

TEST(QuestionText, OptionsAndHypothesis) {
  Target t = abc_target();
  EXPECT_EQ(question_with_options(t), "Is it true?\nA) True\nB) False\nC) Uncertain");
  EXPECT_EQ(hypothesis_text(t), question_with_options(t));
  t.hypothesis = "The cat is red.";
  EXPECT_EQ(hypothesis_text(t), "The cat is red.");
}
