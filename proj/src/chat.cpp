#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "determlr/backends.hpp"

namespace determlr {

using nlohmann::json;

ResponseCache::ResponseCache(std::filesystem::path dir) {
  std::filesystem::create_directories(dir);
  file_ = dir / "responses.jsonl";
  std::ifstream in(file_);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      index_.insert_or_assign(j.at("key").get<std::string>(), j.at("response").get<std::string>());
    } catch (const json::exception&) {
      // A torn final line from an interrupted run; later entries still load.
    }
  }
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& key, const std::string& response) {
  std::lock_guard lock(mutex_);
  if (index_.contains(key)) return;
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  std::ofstream out(file_, std::ios::app);
  out << json{{"key", key}, {"response", response}, {"timestamp", now}}.dump() << '\n';
  out.flush();
  if (!out) throw Error("cannot write response cache " + file_.string());
  index_.emplace(key, response);
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return index_.size();
}

ChatClient::ChatClient(ClientConfig config, Transport transport, Sleeper sleeper)
    : config_(std::move(config)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {
  if (config_.api_key.empty()) {
    if (const char* key = std::getenv("DETERMLR_API_KEY")) config_.api_key = key;
  }
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (config_.cache_dir) cache_ = std::make_unique<ResponseCache>(*config_.cache_dir);
  if (config_.max_attempts < 1) throw Error("max_attempts must be positive");
}

std::string ChatClient::chat(const ChatRequest& request) {
  request.validate();
  const std::string key = request.digest();
  if (cache_) {
    if (auto hit = cache_->get(key)) {
      std::lock_guard lock(stats_mutex_);
      ++cache_hits_;
      return *hit;
    }
  }
  if (config_.endpoint.empty()) throw BackendUnavailable("no chat endpoint configured");

  const std::string body = request.to_json().dump();
  std::chrono::milliseconds delay = config_.base_delay;
  std::string last_error;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      sleeper_(delay);
      delay *= config_.backoff_factor;
    }
    HttpResponse response;
    try {
      {
        std::lock_guard lock(stats_mutex_);
        ++network_calls_;
      }
      response = transport_(config_.endpoint, body, config_.api_key);
    } catch (const std::exception& e) {
      last_error = std::string("transport: ") + e.what();
      continue;
    }
    if (response.status == 401 || response.status == 403) {
      throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(response.status) + ")");
    }
    if (response.status == 429 || response.status >= 500) {
      last_error = "HTTP " + std::to_string(response.status);
      continue;
    }
    if (response.status < 200 || response.status >= 300) {
      throw BackendUnavailable("HTTP " + std::to_string(response.status) + ": " + response.body.substr(0, 200));
    }
    std::string text;
    try {
      text = json::parse(response.body).at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw BackendUnavailable(std::string("malformed chat response: ") + e.what());
    }
    if (cache_) cache_->put(key, text);
    return text;
  }
  throw BackendUnavailable("gave up after " + std::to_string(config_.max_attempts) + " attempts: " + last_error);
}

std::string ChatClient::complete(const std::string&, const ChatRequest& request) { return chat(request); }

std::uint64_t ChatClient::network_calls() const {
  std::lock_guard lock(stats_mutex_);
  return network_calls_;
}

std::uint64_t ChatClient::cache_hits() const {
  std::lock_guard lock(stats_mutex_);
  return cache_hits_;
}

}  // namespace determlr
