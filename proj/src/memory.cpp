#include "determlr/memory.hpp"

#include <algorithm>

namespace determlr {

using nlohmann::json;

ReasoningMemory ReasoningMemory::init(const std::vector<Premise>& determinate,
                                      const std::vector<Premise>& indeterminate) {
  ReasoningMemory m;
  m.premises_.reserve(determinate.size() + indeterminate.size());
  for (const auto* set : {&determinate, &indeterminate}) {
    for (const auto& p : *set) {
      if (p.is_derived()) throw InternalInvariantViolation("memory starts from input premises only");
      if (m.find(p.id())) throw InternalInvariantViolation("duplicate premise id " + p.id().value);
      m.premises_.push_back(p);
    }
  }
  std::stable_sort(m.premises_.begin(), m.premises_.end(),
                   [](const Premise& a, const Premise& b) { return a.order_key() < b.order_key(); });
  return m;
}

const ReasoningPath& ReasoningMemory::store(const ExplorationResult& result) {
  if (result.sources.empty()) throw InternalInvariantViolation("reasoning path without sources");
  for (const auto& id : result.sources) {
    if (!find(id)) throw InternalInvariantViolation("source " + id.value + " is not in memory");
  }
  const int t = iteration_ + 1;
  const bool admit = result.verdict.overall();
  if (admit) {
    Premise p = Premise::derived(t, result.proposition);
    if (find(p.id())) throw InternalInvariantViolation("duplicate derived premise id " + p.id().value);
    if (find_statement(p.normalized())) {
      throw InternalInvariantViolation("admitted proposition duplicates a premise: " + p.text());
    }
    premises_.push_back(std::move(p));
  }
  paths_.push_back(ReasoningPath{result.sources, result.proposition,
                                 admit ? Polarity::Positive : Polarity::Negative, t});
  iteration_ = t;
  return paths_.back();
}

const Premise* ReasoningMemory::find(const PremiseId& id) const {
  auto it = std::find_if(premises_.begin(), premises_.end(), [&](const Premise& p) { return p.id() == id; });
  return it == premises_.end() ? nullptr : &*it;
}

const Premise* ReasoningMemory::find_statement(std::string_view text) const {
  std::string key;
  try {
    key = normalize(text);
  } catch (const EmptyStatement&) {
    return nullptr;
  }
  auto it = std::find_if(premises_.begin(), premises_.end(),
                         [&](const Premise& p) { return p.normalized() == key; });
  return it == premises_.end() ? nullptr : &*it;
}

std::size_t ReasoningMemory::derived_count() const {
  return static_cast<std::size_t>(
      std::count_if(premises_.begin(), premises_.end(), [](const Premise& p) { return p.is_derived(); }));
}

std::vector<Premise> ReasoningMemory::determinate_view() const {
  std::vector<Premise> out;
  std::copy_if(premises_.begin(), premises_.end(), std::back_inserter(out),
               [](const Premise& p) { return p.is_determinate(); });
  return out;
}

std::vector<Premise> ReasoningMemory::indeterminate_view() const {
  std::vector<Premise> out;
  std::copy_if(premises_.begin(), premises_.end(), std::back_inserter(out),
               [](const Premise& p) { return !p.is_determinate(); });
  return out;
}

std::vector<Premise> ReasoningMemory::inputs() const {
  std::vector<Premise> out;
  std::copy_if(premises_.begin(), premises_.end(), std::back_inserter(out),
               [](const Premise& p) { return !p.is_derived(); });
  return out;
}

std::vector<Premise> ReasoningMemory::derived() const {
  std::vector<Premise> out;
  std::copy_if(premises_.begin(), premises_.end(), std::back_inserter(out),
               [](const Premise& p) { return p.is_derived(); });
  return out;
}

std::vector<ReasoningPath> extract_history(const ReasoningMemory& memory, bool enabled) {
  if (!enabled) return {};
  return memory.paths();
}

std::set<PremiseId> failed_primaries(const ReasoningMemory& memory, bool enabled) {
  std::set<PremiseId> out;
  if (!enabled) return out;
  for (const auto& path : memory.paths()) {
    if (path.polarity == Polarity::Negative) out.insert(path.primary());
  }
  return out;
}

std::vector<std::string> render_history(const ReasoningMemory& memory,
                                        const std::vector<ReasoningPath>& history) {
  std::vector<std::string> out;
  out.reserve(history.size());
  for (const auto& path : history) {
    std::string used;
    for (const auto& id : path.sources) {
      const Premise* p = memory.find(id);
      if (!p) continue;
      if (!used.empty()) used += ' ';
      used += p->text();
    }
    std::string line = "In the NO:" + std::to_string(path.iteration) + " round, we use these premises: \"" +
                       used + "\" and got ";
    if (path.proposition_text.empty()) {
      line += "no proposition.";
    } else if (path.polarity == Polarity::Positive) {
      line += "a New Determinate Premise: \"" + path.proposition_text + "\"";
    } else {
      line += "a false Proposition: \"" + path.proposition_text + "\"";
    }
    out.push_back(std::move(line));
  }
  return out;
}

json premise_to_json(const Premise& premise) {
  json j{{"id", premise.id().value}, {"text", premise.text()}};
  j["kind"] = premise.kind() ? json(kind_name(*premise.kind())) : json(nullptr);
  if (premise.is_derived()) {
    j["origin"] = "derived";
    j["iteration"] = *premise.derived_at();
  } else {
    j["origin"] = "input";
    j["ordinal"] = premise.ordinal();
  }
  return j;
}

json path_to_json(const ReasoningPath& path) {
  json sources = json::array();
  for (const auto& id : path.sources) sources.push_back(id.value);
  return json{{"t", path.iteration},
              {"sources", std::move(sources)},
              {"proposition", path.proposition_text},
              {"polarity", polarity_name(path.polarity)}};
}

json memory_to_json(const ReasoningMemory& memory) {
  json premises = json::array();
  for (const auto& p : memory.inputs()) premises.push_back(premise_to_json(p));
  json paths = json::array();
  for (const auto& p : memory.paths()) paths.push_back(path_to_json(p));
  return json{{"premises", std::move(premises)}, {"paths", std::move(paths)}};
}

ReasoningMemory memory_from_json(const json& j) {
  std::vector<Premise> determinate;
  std::vector<Premise> indeterminate;
  for (const auto& p : j.at("premises")) {
    std::optional<Kind> kind;
    if (!p.at("kind").is_null()) {
      kind = p.at("kind").get<std::string>() == "determinate" ? Kind::Determinate : Kind::Indeterminate;
    }
    Premise premise = Premise::input(PremiseId{p.at("id").get<std::string>()}, p.at("text").get<std::string>(),
                                     p.at("ordinal").get<int>(), kind);
    (kind == Kind::Determinate ? determinate : indeterminate).push_back(std::move(premise));
  }
  ReasoningMemory memory = ReasoningMemory::init(determinate, indeterminate);
  for (const auto& path : j.at("paths")) {
    ExplorationResult r;
    r.proposition = path.at("proposition").get<std::string>();
    for (const auto& id : path.at("sources")) r.sources.push_back(PremiseId{id.get<std::string>()});
    const bool positive = path.at("polarity").get<std::string>() == "positive";
    r.verdict = Verdict(positive, positive, positive);
    const auto& stored = memory.store(r);
    if (stored.iteration != path.at("t").get<int>()) {
      throw SchemaError(static_cast<std::size_t>(stored.iteration), "t", "paths must be consecutive");
    }
  }
  return memory;
}

}  // namespace determlr
