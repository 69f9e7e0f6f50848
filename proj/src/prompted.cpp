#include <sstream>

#include "determlr/backends.hpp"

namespace determlr {

namespace {

std::string sentence(std::string text) {
  text = trim(text);
  if (!text.empty() && text.back() != '.' && text.back() != '?' && text.back() != '!') text.push_back('.');
  return text;
}

std::string join_texts(const std::vector<std::string>& texts) {
  std::string out;
  for (const auto& t : texts) {
    if (trim(t).empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += sentence(t);
  }
  return out;
}

std::string join_premises(const std::vector<Premise>& premises) {
  std::vector<std::string> texts;
  texts.reserve(premises.size());
  for (const auto& p : premises) texts.push_back(p.text());
  return join_texts(texts);
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out.push_back('\n');
    out += l;
  }
  return out;
}

// Labelled value, or the first line of a reply that continued a prefilled label.
std::string field_or_reply(const std::string& reply, std::string_view label) {
  try {
    return parse_labeled_field(reply, label);
  } catch (const FieldNotFound&) {
    std::istringstream in(reply);
    std::string line;
    while (std::getline(in, line)) {
      std::string t = trim(line);
      while (!t.empty() && (t.back() == '"' || t.front() == '"')) {
        if (t.back() == '"') t.pop_back();
        if (!t.empty() && t.front() == '"') t.erase(t.begin());
        t = trim(t);
      }
      if (!t.empty()) return t;
    }
    throw;
  }
}

bool is_none(const std::string& value) {
  const std::string v = to_lower(trim(value));
  return v.empty() || v == "none" || v == "none." || v == "n/a";
}

}  // namespace

std::string question_with_options(const Target& target) {
  std::string out = target.question;
  for (const auto& o : target.options) out += "\n" + o.label + ") " + o.text;
  return out;
}

std::string hypothesis_text(const Target& target) {
  return trim(target.hypothesis).empty() ? question_with_options(target) : target.hypothesis;
}

PromptedConfig prompted_config(const EngineConfig& config, Dataset dataset, std::string model) {
  PromptedConfig out;
  out.model = std::move(model);
  out.temperature_default = config.temperature_default;
  out.temperature_conclude = config.temperature_conclude;
  out.dataset = dataset;
  return out;
}

PromptedBackend::PromptedBackend(Completer& completer, PromptedConfig config, const PromptLibrary& library)
    : completer_(completer), config_(std::move(config)), library_(library) {}

ChatRequest PromptedBackend::render(const std::string& template_name,
                                    const std::map<std::string, std::string>& bindings, bool conclude) const {
  return library_.get(template_name)
      .render(bindings, config_.model, conclude ? config_.temperature_conclude : config_.temperature_default,
              conclude ? config_.max_tokens_conclude : config_.max_tokens);
}

std::string PromptedBackend::ask(const std::string& stage, const std::string& template_name,
                                 const std::map<std::string, std::string>& bindings, bool conclude) {
  return completer_.complete(stage, render(template_name, bindings, conclude));
}

bool PromptedBackend::ask_judgement(const std::string& stage, const std::map<std::string, std::string>& bindings) {
  const std::string reply = ask(stage, stage, bindings);
  try {
    return parse_judgement(field_or_reply(reply, "judgement")).value_or(false);
  } catch (const FieldNotFound&) {
    return false;
  }
}

Kind PromptedBackend::classify(const Premise& premise, const Target& target) {
  const std::string reply = ask("identify", "identify", {{"premise", premise.text()}, {"hypothesis", hypothesis_text(target)}});
  try {
    const auto verdict = parse_judgement(field_or_reply(reply, "judgement"));
    return verdict.value_or(false) ? Kind::Determinate : Kind::Indeterminate;
  } catch (const FieldNotFound&) {
    return Kind::Indeterminate;
  }
}

BackendSelection PromptedBackend::prioritize(const PrioritizeQuery& query) {
  const bool ld = query.dataset == Dataset::LogicalDeduction;
  std::map<std::string, std::string> b{{"determinate", join_premises(query.determinate)},
                                       {"indeterminate", join_premises(query.indeterminate)},
                                       {"hypothesis", hypothesis_text(query.target)},
                                       {"history", join_lines(query.history)},
                                       {"topic", query.topic},
                                       {"boundary", join_texts(query.boundary)}};
  const std::string reply = ask("prioritize", ld ? "prioritize_ld" : "prioritize", b);
  BackendSelection out;
  try {
    out.primary = parse_labeled_field(reply, "most relevant premise");
  } catch (const FieldNotFound&) {
  }
  try {
    out.results = split_sentences(parse_labeled_field(reply, "results"));
  } catch (const FieldNotFound&) {
  }
  return out;
}

std::optional<std::string> PromptedBackend::explore(const ExploreQuery& query) {
  const bool ld = query.dataset == Dataset::LogicalDeduction;
  std::vector<Premise> used{query.primary};
  used.insert(used.end(), query.supplements.begin(), query.supplements.end());
  std::map<std::string, std::string> b{{"premises", join_premises(used)},
                                       {"hypothesis", hypothesis_text(query.target)},
                                       {"question", question_with_options(query.target)},
                                       {"boundary", join_texts(query.boundary)}};
  const std::string reply = ask("explore", ld ? "explore_ld" : "explore", b);
  try {
    std::string value = field_or_reply(reply, "proposition");
    if (is_none(value)) return std::nullopt;
    return value;
  } catch (const FieldNotFound&) {
    return std::nullopt;
  }
}

bool PromptedBackend::validity(const std::vector<std::string>& sources, const std::string& proposition) {
  return ask_judgement("validity", {{"premises", join_texts(sources)}, {"proposition", proposition}});
}

std::optional<bool> PromptedBackend::usefulness(const std::string& proposition, const Target& target) {
  return ask_judgement("usefulness", {{"proposition", proposition}, {"hypothesis", hypothesis_text(target)}});
}

bool PromptedBackend::novelty(const std::string& proposition, const std::vector<std::string>& known) {
  return ask_judgement("novelty", {{"proposition", proposition}, {"premises", join_texts(known)}});
}

bool PromptedBackend::sufficiency(const SufficiencyQuery& query) {
  return ask_judgement("sufficiency", {{"determinate", join_premises(query.determinate)},
                                       {"indeterminate", join_premises(query.indeterminate)},
                                       {"hypothesis", hypothesis_text(query.target)}});
}

std::string PromptedBackend::conclude(const ConcludeQuery& query) {
  std::map<std::string, std::string> b{{"context", query.context},
                                       {"question", question_with_options(query.target)},
                                       {"premises", join_premises(query.premises)},
                                       {"boundary", join_texts(query.boundary)},
                                       {"propositions", join_premises(query.propositions)},
                                       {"history", join_lines(query.history)}};
  return parse_answer(ask("conclude", "conclude", b, true), query.target);
}

Extraction PromptedBackend::extract_premises(const std::string& context) {
  if (trim(context).empty()) throw Error("cannot extract premises from an empty context");
  const std::string reply = ask("extract", "extract", {{"context", context}});
  Extraction out;
  try {
    out.topic = parse_labeled_field(reply, "topic");
  } catch (const FieldNotFound&) {
  }
  out.premises = split_sentences(parse_labeled_field(reply, "premise"));
  try {
    out.boundary = split_sentences(parse_labeled_field(reply, "boundary condition"));
  } catch (const FieldNotFound&) {
  }
  if (out.premises.empty()) throw FieldNotFound("premise");
  return out;
}

std::optional<std::string> PromptedBackend::transform_premise(const std::string& premise,
                                                              const std::vector<std::string>& existing,
                                                              const std::vector<std::string>& boundary,
                                                              const std::string& question) {
  const std::string reply = ask("transform", "transform",
                                {{"premises", join_texts(existing)},
                                 {"question", question},
                                 {"premise", premise},
                                 {"boundary", join_texts(boundary)}});
  try {
    std::string value = field_or_reply(reply, "new premise");
    if (is_none(value)) return std::nullopt;
    return value;
  } catch (const FieldNotFound&) {
    return std::nullopt;
  }
}

bool PromptedBackend::check_boundary(const std::vector<std::string>& existing, const std::string& premise,
                                     const std::vector<std::string>& boundary) {
  return ask_judgement("boundary", {{"premises", join_texts(existing)},
                                    {"proposition", premise},
                                    {"boundary", join_texts(boundary)}});
}

}  // namespace determlr
