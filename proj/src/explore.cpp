#include "determlr/explore.hpp"

namespace determlr {

std::string explore(const ExploreQuery& query, InferenceBackend& backend) {
  auto text = backend.explore(query);
  if (!text) throw ExplorationFailed("no proposition from " + query.primary.id().value);
  std::string out = trim(*text);
  if (out.empty() || out == ".") throw ExplorationFailed("empty proposition from " + query.primary.id().value);
  return out;
}

bool verify_validity(const std::vector<std::string>& sources, const std::string& proposition,
                     InferenceBackend& backend, std::string* diagnostic) {
  try {
    return backend.validity(sources, proposition);
  } catch (const FieldNotFound& e) {
    if (diagnostic) *diagnostic = e.what();
    return false;
  } catch (const ParseError& e) {
    if (diagnostic) *diagnostic = e.what();
    return false;
  }
}

std::optional<std::pair<std::string, std::string>> split_conditional(std::string_view normalized) {
  if (!normalized.starts_with("if ")) return std::nullopt;
  const std::string_view body = normalized.substr(3);
  auto cut = body.find(" then ");
  std::size_t skip = 6;
  if (cut == std::string_view::npos) {
    cut = body.find(',');
    skip = 1;
  }
  if (cut == std::string_view::npos) return std::nullopt;
  std::string antecedent = trim(body.substr(0, cut));
  while (!antecedent.empty() && antecedent.back() == ',') antecedent.pop_back();
  std::string consequent = trim(body.substr(cut + skip));
  if (consequent.starts_with("then ")) consequent = consequent.substr(5);
  if (antecedent.empty() || consequent.empty()) return std::nullopt;
  return std::pair{std::move(antecedent), std::move(consequent)};
}

bool deterministic_usefulness(const std::string& proposition, const Target& target,
                              const std::vector<Premise>& premises, const TermProfiler& profiler) {
  const TermProfile prop = profiler.profile(proposition);
  const TermProfile hyp = profiler.profile(target.hypothesis);
  const auto overlaps = [](const TermProfile& a, const TermProfile& b) {
    const auto s = shared_terms(a, b);
    return s.nouns + s.adjectives > 0;
  };
  if (overlaps(prop, hyp)) return true;
  for (const auto& p : premises) {
    const auto parts = split_conditional(p.normalized());
    if (!parts) continue;
    if (overlaps(prop, profiler.profile(parts->first)) && overlaps(profiler.profile(parts->second), hyp)) {
      return true;
    }
  }
  return false;
}

bool verify_usefulness(const std::string& proposition, const Target& target,
                       const std::vector<Premise>& premises, InferenceBackend& backend,
                       const TermProfiler& profiler) {
  std::optional<bool> judged;
  try {
    judged = backend.usefulness(proposition, target);
  } catch (const FieldNotFound&) {
    judged = false;
  }
  if (judged) return *judged;
  return deterministic_usefulness(proposition, target, premises, profiler);
}

bool verify_novelty(const std::string& proposition, const ReasoningMemory& memory, InferenceBackend& backend) {
  if (memory.find_statement(proposition)) return false;
  std::vector<std::string> known;
  known.reserve(memory.premises().size());
  for (const auto& p : memory.premises()) known.push_back(p.text());
  try {
    return backend.novelty(proposition, known);
  } catch (const FieldNotFound&) {
    return false;
  }
}

Verdict verify(const std::string& proposition, const std::vector<PremiseId>& sources, const Target& target,
               const ReasoningMemory& memory, InferenceBackend& backend, const TermProfiler& profiler,
               std::vector<std::string>* notes) {
  std::vector<std::string> texts;
  for (const auto& id : sources) {
    const Premise* p = memory.find(id);
    if (!p) throw InternalInvariantViolation("source " + id.value + " is not in memory");
    texts.push_back(p->text());
  }
  std::string diagnostic;
  const bool valid = verify_validity(texts, proposition, backend, &diagnostic);
  if (!diagnostic.empty() && notes) notes->push_back("validity: " + diagnostic);
  if (!valid) {
    if (notes) notes->insert(notes->end(), {"usefulness: skipped", "novelty: skipped"});
    return Verdict(false, false, false);
  }

  const bool useful = verify_usefulness(proposition, target, memory.inputs(), backend, profiler);
  if (!useful) {
    if (notes) notes->push_back("novelty: skipped");
    return Verdict(true, false, false);
  }

  const bool novel = verify_novelty(proposition, memory, backend);
  return Verdict(true, true, novel);
}

}  // namespace determlr
