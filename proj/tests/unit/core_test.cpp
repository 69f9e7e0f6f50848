#include <gtest/gtest.h>

#include <random>

#include "determlr/core.hpp"

using namespace determlr;

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize("The cat chases the dog."), "the cat chases the dog");
  EXPECT_EQ(normalize("the cat chases the dog"), "the cat chases the dog");
  EXPECT_EQ(normalize("  If A,then B.  "), "if a,then b");
}

TEST(Normalize, CollapsesInnerWhitespaceAndKeepsPunctuation) {
  EXPECT_EQ(normalize("Ada\t finished   third-to-last..."), "ada finished third-to-last");
  EXPECT_EQ(normalize("A, B; C?"), "a, b; c?");
}

TEST(Normalize, EmptyThrows) {
  EXPECT_THROW(normalize(""), EmptyStatement);
  EXPECT_THROW(normalize("   "), EmptyStatement);
  EXPECT_THROW(normalize(" . "), EmptyStatement);
}

TEST(Normalize, IdempotentOnRandomStrings) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "aB .,\t\nXyz-'?";
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const int len = std::uniform_int_distribution<int>(1, 24)(rng);
    for (int k = 0; k < len; ++k) s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    std::string once;
    try {
      once = normalize(s);
    } catch (const EmptyStatement&) {
      continue;
    }
    EXPECT_EQ(normalize(once), once) << '"' << s << '"';
  }
}

TEST(SplitSentences, KeepsTerminators) {
  const auto parts = split_sentences("The cat is red. Is it? Yes!  Done");
  ASSERT_EQ(parts.size(), 4u);
  EXPECT_EQ(parts[0], "The cat is red.");
  EXPECT_EQ(parts[1], "Is it?");
  EXPECT_EQ(parts[2], "Yes!");
  EXPECT_EQ(parts[3], "Done");
}

TEST(Premise, InputAndDerived) {
  const Premise p = Premise::input({"p1"}, "The cat is red.", 0);
  EXPECT_EQ(p.normalized(), "the cat is red");
  EXPECT_FALSE(p.kind().has_value());
  EXPECT_FALSE(p.is_derived());

  const Premise x = Premise::derived(3, "The cat is blue.");
  EXPECT_EQ(x.id().value, "x3");
  EXPECT_TRUE(x.is_determinate());
  EXPECT_EQ(x.derived_at(), 3);
  EXPECT_LT(p.order_key(), x.order_key());
}

TEST(Premise, DuplicationIsNormalizedEquality) {
  const Premise a = Premise::input({"p1"}, "The Cat is red.", 0);
  const Premise b = Premise::input({"p2"}, "the cat  is red", 1);
  const Premise c = Premise::input({"p3"}, "The cat is red!", 2);
  EXPECT_TRUE(a.same_statement(b));
  EXPECT_FALSE(a.same_statement(c));
}

TEST(Premise, MakeInputPremisesNumbersSequentially) {
  const auto ps = make_input_premises({"A.", "B.", "C."});
  ASSERT_EQ(ps.size(), 3u);
  EXPECT_EQ(ps[0].id().value, "p1");
  EXPECT_EQ(ps[2].id().value, "p3");
  EXPECT_EQ(ps[2].ordinal(), 2);
}

TEST(Verdict, OverallIsConjunction) {
  for (int bits = 0; bits < 8; ++bits) {
    const Verdict v((bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0);
    EXPECT_EQ(v.overall(), bits == 7);
  }
  EXPECT_FALSE(Verdict().overall());
}

TEST(Target, LabelForTruth) {
  Target t;
  t.options = {{"A", "True"}, {"B", "False"}, {"C", "Uncertain"}};
  EXPECT_EQ(t.label_for_truth("true"), "A");
  EXPECT_EQ(t.label_for_truth("False"), "B");
  EXPECT_EQ(t.label_for_truth("Unknown"), "C");
  Target none;
  EXPECT_FALSE(none.label_for_truth("true").has_value());
}

TEST(ProblemInstance, ValidateRejectsBadShapes) {
  ProblemInstance p;
  p.case_id = "c";
  p.dataset = Dataset::ProofWriter;
  p.premises = make_input_premises({"The cat is red."});
  p.target.hypothesis = "The cat is red.";
  p.target.options = {{"A", "True"}, {"B", "False"}};
  p.target.answer_key = "A";
  EXPECT_NO_THROW(p.validate());

  ProblemInstance dup = p;
  dup.target.options.push_back({"A", "again"});
  EXPECT_THROW(dup.validate(), SchemaError);

  ProblemInstance bad_key = p;
  bad_key.target.answer_key = "Z";
  EXPECT_THROW(bad_key.validate(), SchemaError);

  ProblemInstance boundary = p;
  boundary.boundary_conditions = {"Seven golfers."};
  EXPECT_THROW(boundary.validate(), SchemaError);

  ProblemInstance empty = p;
  empty.premises.clear();
  EXPECT_THROW(empty.validate(), SchemaError);
}

TEST(EngineConfig, Validate) {
  EngineConfig c;
  EXPECT_EQ(c.n_required_determinate, 4);
  EXPECT_EQ(c.max_iterations, 25);
  EXPECT_DOUBLE_EQ(c.theta, 0.25);
  EXPECT_DOUBLE_EQ(c.temperature_default, 0.1);
  EXPECT_DOUBLE_EQ(c.temperature_conclude, 0.7);
  EXPECT_NO_THROW(c.validate());
  c.theta = 1.5;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.n_required_determinate = 30;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Names, DatasetAndBackendRoundTrip) {
  for (Dataset d : {Dataset::LogiQA, Dataset::ProofWriter, Dataset::FOLIO, Dataset::PrOntoQA,
                    Dataset::LogicalDeduction, Dataset::Custom}) {
    EXPECT_EQ(parse_dataset(dataset_name(d)), d);
  }
  EXPECT_EQ(parse_dataset("proofwriter"), Dataset::ProofWriter);
  EXPECT_EQ(parse_dataset("ld"), Dataset::LogicalDeduction);
  for (BackendChoice b : {BackendChoice::Llm, BackendChoice::Symbolic, BackendChoice::Replay}) {
    EXPECT_EQ(parse_backend(backend_name(b)), b);
  }
}
