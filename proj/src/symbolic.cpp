#include "determlr/backends.hpp"
#include "determlr/identify.hpp"
#include "determlr/oracle.hpp"

namespace determlr {

namespace {

std::vector<oracle::Clause> parse_all(const std::vector<Premise>& premises) {
  std::vector<oracle::Clause> out;
  for (const auto& p : premises) {
    if (auto c = oracle::try_parse_statement(p.text())) out.push_back(std::move(*c));
  }
  return out;
}

}  // namespace

SymbolicBackend::SymbolicBackend(TermProfiler profiler, int depth) : profiler_(std::move(profiler)), depth_(depth) {}

Kind SymbolicBackend::classify(const Premise& premise, const Target& target) {
  return classify_premise(premise, target, profiler_);
}

BackendSelection SymbolicBackend::prioritize(const PrioritizeQuery&) { return {}; }

std::optional<std::string> SymbolicBackend::explore(const ExploreQuery& query) {
  const auto primary = oracle::try_parse_statement(query.primary.text());
  if (!primary) return std::nullopt;
  std::vector<oracle::Clause> supplements = parse_all(query.supplements);
  std::set<oracle::Atom> known;
  for (const auto& c : parse_all(query.known)) {
    if (const auto* a = std::get_if<oracle::Atom>(&c)) known.insert(*a);
  }
  const auto step = oracle::derive_step(*primary, supplements, known);
  if (!step) return std::nullopt;
  return oracle::render_sentence(step->conclusion);
}

bool SymbolicBackend::validity(const std::vector<std::string>& sources, const std::string& proposition) {
  return oracle::check_entailment(sources, proposition);
}

std::optional<bool> SymbolicBackend::usefulness(const std::string&, const Target&) { return std::nullopt; }

bool SymbolicBackend::novelty(const std::string&, const std::vector<std::string>&) { return true; }

bool SymbolicBackend::sufficiency(const SufficiencyQuery& query) {
  const auto hypothesis = oracle::try_parse_statement(query.target.hypothesis);
  const auto* atom = hypothesis ? std::get_if<oracle::Atom>(&*hypothesis) : nullptr;
  if (!atom || !atom->ground()) return false;
  try {
    oracle::KnowledgeBase kb;
    for (const auto& c : parse_all(query.determinate)) kb.add(c);
    for (const auto& c : parse_all(query.indeterminate)) {
      if (!std::holds_alternative<oracle::Atom>(c)) kb.add(c);
    }
    return oracle::query(kb, *atom, depth_) != oracle::Truth::Unknown;
  } catch (const Inconsistent&) {
    return false;
  }
}

std::string SymbolicBackend::conclude(const ConcludeQuery& query) {
  const oracle::Atom hypothesis = oracle::parse_fact(query.target.hypothesis);
  oracle::KnowledgeBase kb;
  for (const auto* set : {&query.premises, &query.propositions}) {
    for (const auto& p : *set) kb.add(oracle::parse_statement(p.text()));
  }
  const oracle::Truth truth = oracle::query(kb, hypothesis, depth_);
  const std::string name(oracle::truth_name(truth));
  if (auto label = query.target.label_for_truth(name)) return *label;
  return name;
}

Extraction SymbolicBackend::extract_premises(const std::string& context) {
  if (trim(context).empty()) throw Error("cannot extract premises from an empty context");
  return Extraction{"", split_sentences(context), {}};
}

std::optional<std::string> SymbolicBackend::transform_premise(const std::string&, const std::vector<std::string>&,
                                                              const std::vector<std::string>&, const std::string&) {
  return std::nullopt;
}

bool SymbolicBackend::check_boundary(const std::vector<std::string>&, const std::string&,
                                     const std::vector<std::string>&) {
  return true;
}

}  // namespace determlr
