#include "determlr/backends.hpp"

namespace determlr {

using nlohmann::json;

ReplayScript::ReplayScript(std::vector<ReplayEntry> entries) {
  for (auto& e : entries) by_stage_[e.stage].push_back(std::move(e));
}

ReplayScript ReplayScript::from_json(const json& j) {
  if (j.is_object() && !j.contains("responses")) throw SchemaError(0, "responses", "missing");
  const json& list = j.is_object() ? j.at("responses") : j;
  if (!list.is_array()) throw SchemaError(0, "responses", "must be a list");
  std::vector<ReplayEntry> entries;
  std::size_t index = 0;
  for (const auto& item : list) {
    if (!item.is_object() || !item.contains("stage") || !item.contains("response") || !item.at("stage").is_string() ||
        !item.at("response").is_string()) {
      throw SchemaError(index, "responses", "entries need \"stage\" and \"response\"");
    }
    ReplayEntry e{item.at("stage").get<std::string>(), std::nullopt, item.at("response").get<std::string>()};
    if (item.contains("inputs_digest") && !item.at("inputs_digest").is_null()) {
      if (!item.at("inputs_digest").is_string()) throw SchemaError(index, "inputs_digest", "must be a string");
      e.inputs_digest = item.at("inputs_digest").get<std::string>();
    }
    entries.push_back(std::move(e));
    ++index;
  }
  return ReplayScript(std::move(entries));
}

std::string ReplayScript::next(const std::string& stage, const std::string& digest) {
  auto it = by_stage_.find(stage);
  std::size_t& at = cursor_[stage];
  if (it == by_stage_.end() || at >= it->second.size()) throw ReplayExhausted(stage);
  const ReplayEntry& entry = it->second[at];
  if (entry.inputs_digest && *entry.inputs_digest != digest) {
    throw ReplayMismatch(stage, *entry.inputs_digest, digest);
  }
  ++at;
  return entry.response;
}

std::string ReplayScript::complete(const std::string& stage, const ChatRequest& request) {
  return next(stage, request.digest());
}

std::size_t ReplayScript::remaining(const std::string& stage) const {
  auto it = by_stage_.find(stage);
  if (it == by_stage_.end()) return 0;
  auto c = cursor_.find(stage);
  const std::size_t used = c == cursor_.end() ? 0 : c->second;
  return it->second.size() - used;
}

}  // namespace determlr
