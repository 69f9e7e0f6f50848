#pragma once

// Prompt rendering, reply parsing, the chat-endpoint client, fixture replay,
// and the two InferenceBackend implementations.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "determlr/backend.hpp"
#include "determlr/prioritize.hpp"
#include "json.hpp"

namespace determlr {

struct ChatMessage {
  std::string role;  // system, user or assistant
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.1;
  int max_tokens = 512;

  /// Throws Error unless messages are non-empty and start with a system turn.
  void validate() const;
  nlohmann::json to_json() const;
  /// Hex SHA-256 of the canonical JSON serialization.
  std::string digest() const;

  friend bool operator==(const ChatRequest&, const ChatRequest&) = default;
};

std::string sha256_hex(std::string_view data);

/// Template text split into [system]/[user]/[assistant] blocks with `{name}`
/// placeholders; `{{` and `}}` are literal braces.
class PromptTemplate {
 public:
  static PromptTemplate parse(std::string name, std::string_view text);

  const std::string& name() const { return name_; }
  std::set<std::string> placeholders() const;
  /// Example turns inserted after the system block.
  void set_examples(std::vector<ChatMessage> examples) { examples_ = std::move(examples); }

  /// Throws UnboundPlaceholder.
  ChatRequest render(const std::map<std::string, std::string>& bindings, const std::string& model,
                     double temperature, int max_tokens) const;

 private:
  std::string name_;
  std::vector<ChatMessage> blocks_;
  std::vector<ChatMessage> examples_;
};

class PromptLibrary {
 public:
  /// Templates compiled into the library.
  static const PromptLibrary& builtin();
  /// Files in `dir` override the built-in templates of the same stage.
  static PromptLibrary from_directory(const std::filesystem::path& dir);

  const PromptTemplate& get(const std::string& name) const;
  bool contains(const std::string& name) const { return templates_.contains(name); }

 private:
  std::map<std::string, PromptTemplate> templates_;
};

/// Value of the last `label:` in `text` (case-insensitive, optional quotes
/// around the label). Quoted values return the quoted span, otherwise the
/// rest of the line. Throws FieldNotFound.
std::string parse_labeled_field(std::string_view text, std::string_view label);
/// Reads yes/no style verdicts; uses the text after the last '?' if any.
std::optional<bool> parse_judgement(std::string_view text);
/// Option label picked by a conclusion reply, or "Abstain".
std::string parse_answer(std::string_view reply, const Target& target);

/// Turns a rendered request into reply text.
class Completer {
 public:
  virtual ~Completer() = default;
  virtual std::string complete(const std::string& stage, const ChatRequest& request) = 0;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// POSTs `body` to `url`; throws std::exception on transport failure.
using Transport = std::function<HttpResponse(const std::string& url, const std::string& body,
                                             const std::string& api_key)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

Transport http_transport(std::chrono::seconds timeout = std::chrono::seconds(120));

/// Append-only JSONL store keyed by request digest.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& response);
  std::size_t size() const;

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> index_;
};

struct ClientConfig {
  std::string endpoint;
  std::string model = "gpt-4";
  std::string api_key;  // defaults to $DETERMLR_API_KEY
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  int backoff_factor = 2;
  std::optional<std::filesystem::path> cache_dir;
};

class ChatClient : public Completer {
 public:
  explicit ChatClient(ClientConfig config, Transport transport = http_transport(), Sleeper sleeper = {});

  /// Cache first, then the endpoint with retries. Throws BackendUnavailable
  /// or AuthError.
  std::string chat(const ChatRequest& request);
  std::string complete(const std::string& stage, const ChatRequest& request) override;

  const ClientConfig& config() const { return config_; }
  std::uint64_t network_calls() const;
  std::uint64_t cache_hits() const;

 private:
  ClientConfig config_;
  Transport transport_;
  Sleeper sleeper_;
  std::unique_ptr<ResponseCache> cache_;
  mutable std::mutex stats_mutex_;
  std::uint64_t network_calls_ = 0;
  std::uint64_t cache_hits_ = 0;
};

struct ReplayEntry {
  std::string stage;
  std::optional<std::string> inputs_digest;
  std::string response;
};

/// Scripted replies served in order per stage. Entries that carry a digest
/// must match the rendered request exactly.
class ReplayScript : public Completer {
 public:
  explicit ReplayScript(std::vector<ReplayEntry> entries);
  /// Accepts a bare list of entries or an object with a "responses" list.
  static ReplayScript from_json(const nlohmann::json& json);

  std::string next(const std::string& stage, const std::string& digest);
  std::string complete(const std::string& stage, const ChatRequest& request) override;
  std::size_t remaining(const std::string& stage) const;

 private:
  std::map<std::string, std::vector<ReplayEntry>> by_stage_;
  std::map<std::string, std::size_t> cursor_;
};

struct PromptedConfig {
  std::string model = "gpt-4";
  double temperature_default = 0.1;
  double temperature_conclude = 0.7;
  int max_tokens = 512;
  int max_tokens_conclude = 1024;
  Dataset dataset = Dataset::Custom;
};

/// Renders a template per stage and parses the reply. Works over a live
/// client or a replay script.
class PromptedBackend : public InferenceBackend {
 public:
  PromptedBackend(Completer& completer, PromptedConfig config,
                  const PromptLibrary& library = PromptLibrary::builtin());

  std::string name() const override { return "prompted"; }
  bool delegates_identification() const override { return true; }

  Kind classify(const Premise& premise, const Target& target) override;
  BackendSelection prioritize(const PrioritizeQuery& query) override;
  std::optional<std::string> explore(const ExploreQuery& query) override;
  bool validity(const std::vector<std::string>& sources, const std::string& proposition) override;
  std::optional<bool> usefulness(const std::string& proposition, const Target& target) override;
  bool novelty(const std::string& proposition, const std::vector<std::string>& known) override;
  bool sufficiency(const SufficiencyQuery& query) override;
  std::string conclude(const ConcludeQuery& query) override;
  Extraction extract_premises(const std::string& context) override;
  std::optional<std::string> transform_premise(const std::string& premise, const std::vector<std::string>& existing,
                                               const std::vector<std::string>& boundary,
                                               const std::string& question) override;
  bool check_boundary(const std::vector<std::string>& existing, const std::string& premise,
                      const std::vector<std::string>& boundary) override;

  /// The request a stage would send; exposed for fixture digests.
  ChatRequest render(const std::string& template_name, const std::map<std::string, std::string>& bindings,
                     bool conclude = false) const;

 private:
  std::string ask(const std::string& stage, const std::string& template_name,
                  const std::map<std::string, std::string>& bindings, bool conclude = false);
  bool ask_judgement(const std::string& stage, const std::map<std::string, std::string>& bindings);

  Completer& completer_;
  PromptedConfig config_;
  const PromptLibrary& library_;
};

namespace detail {
struct ScriptHolder {
  ReplayScript script;
};
}  // namespace detail

/// Prompted backend that owns its replay script.
class ReplayBackend : private detail::ScriptHolder, public PromptedBackend {
 public:
  ReplayBackend(ReplayScript script, PromptedConfig config, const PromptLibrary& library = PromptLibrary::builtin())
      : detail::ScriptHolder{std::move(script)}, PromptedBackend(this->script, std::move(config), library) {}

  std::string name() const override { return "replay"; }
  const ReplayScript& replay_script() const { return script; }
};

PromptedConfig prompted_config(const EngineConfig& config, Dataset dataset, std::string model = "gpt-4");

/// Offline backend built on the natural-logic oracle.
class SymbolicBackend : public InferenceBackend {
 public:
  explicit SymbolicBackend(TermProfiler profiler = TermProfiler(), int depth = 10);

  std::string name() const override { return "symbolic"; }
  bool delegates_identification() const override { return false; }

  Kind classify(const Premise& premise, const Target& target) override;
  BackendSelection prioritize(const PrioritizeQuery& query) override;
  std::optional<std::string> explore(const ExploreQuery& query) override;
  bool validity(const std::vector<std::string>& sources, const std::string& proposition) override;
  std::optional<bool> usefulness(const std::string& proposition, const Target& target) override;
  bool novelty(const std::string& proposition, const std::vector<std::string>& known) override;
  bool sufficiency(const SufficiencyQuery& query) override;
  /// Open-world query over every premise; throws Error when the statements
  /// do not parse or contradict each other.
  std::string conclude(const ConcludeQuery& query) override;
  Extraction extract_premises(const std::string& context) override;
  std::optional<std::string> transform_premise(const std::string& premise, const std::vector<std::string>& existing,
                                               const std::vector<std::string>& boundary,
                                               const std::string& question) override;
  bool check_boundary(const std::vector<std::string>& existing, const std::string& premise,
                      const std::vector<std::string>& boundary) override;

 private:
  TermProfiler profiler_;
  int depth_;
};

/// Hypothesis for statement tasks, otherwise the question with its options.
std::string hypothesis_text(const Target& target);
/// "question\nA) text\nB) text".
std::string question_with_options(const Target& target);

}  // namespace determlr
