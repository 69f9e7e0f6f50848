#pragma once

#include <filesystem>
#include <string>

#include "determlr/backends.hpp"
#include "determlr/harness.hpp"
#include "scoring_table.hpp"

namespace determlr::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(DETERMLR_FIXTURE_DIR) / name;
}

/// Fixture config applied over the defaults.
inline EngineConfig fixture_config(const ReplayFixture& f) {
  EngineConfig config;
  config.backend = BackendChoice::Replay;
  apply_config(config, f.config);
  return config;
}

inline ReplayBackend replay_backend(const ReplayFixture& f, const EngineConfig& config) {
  return ReplayBackend(ReplayScript::from_json(f.responses), prompted_config(config, f.problem.dataset));
}

}  // namespace determlr::testing

namespace determlr::testing {

inline ProblemInstance bald_eagle_problem() {
  return load_replay_fixture(fixture("bald_eagle.json")).problem;
}

/// Symbolic backend with hooks for the stages a test wants to control.
class HookedBackend : public SymbolicBackend {
 public:
  std::function<Kind(const Premise&)> on_classify;
  std::function<std::optional<std::string>(const ExploreQuery&)> on_explore;
  std::function<bool(const std::vector<std::string>&, const std::string&)> on_validity;
  std::function<std::optional<bool>(const std::string&)> on_usefulness;
  std::function<bool(const std::string&)> on_novelty;
  std::function<std::string(const ConcludeQuery&)> on_conclude;
  bool delegate = false;
  int validity_calls = 0;
  int usefulness_calls = 0;
  int novelty_calls = 0;

  bool delegates_identification() const override { return delegate; }
  Kind classify(const Premise& p, const Target& t) override {
    return on_classify ? on_classify(p) : SymbolicBackend::classify(p, t);
  }
  std::optional<std::string> explore(const ExploreQuery& q) override {
    return on_explore ? on_explore(q) : SymbolicBackend::explore(q);
  }
  bool validity(const std::vector<std::string>& s, const std::string& p) override {
    ++validity_calls;
    return on_validity ? on_validity(s, p) : SymbolicBackend::validity(s, p);
  }
  std::optional<bool> usefulness(const std::string& p, const Target& t) override {
    ++usefulness_calls;
    return on_usefulness ? on_usefulness(p) : SymbolicBackend::usefulness(p, t);
  }
  bool novelty(const std::string& p, const std::vector<std::string>& k) override {
    ++novelty_calls;
    return on_novelty ? on_novelty(p) : SymbolicBackend::novelty(p, k);
  }
  std::string conclude(const ConcludeQuery& q) override {
    return on_conclude ? on_conclude(q) : SymbolicBackend::conclude(q);
  }
};

}  // namespace determlr::testing
