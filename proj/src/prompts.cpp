#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "determlr/backends.hpp"
#include "embedded_data.hpp"

namespace determlr {

using nlohmann::json;

namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

constexpr std::string_view kOpenCurly = "\xE2\x80\x9C";
constexpr std::string_view kCloseCurly = "\xE2\x80\x9D";

// Length of a quote mark at `pos`, 0 if none.
std::size_t quote_at(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return 0;
  if (text[pos] == '"' || text[pos] == '\'' || text[pos] == '`') return 1;
  if (text.substr(pos, 3) == kOpenCurly || text.substr(pos, 3) == kCloseCurly) return 3;
  return 0;
}

std::string strip_quotes(std::string value) {
  value = trim(value);
  for (bool changed = true; changed && !value.empty();) {
    changed = false;
    for (std::string_view q : {std::string_view("\""), kOpenCurly, kCloseCurly, std::string_view("'"),
                               std::string_view("`")}) {
      if (value.size() >= q.size() && value.compare(value.size() - q.size(), q.size(), q) == 0) {
        value.erase(value.size() - q.size());
        changed = true;
      }
      if (value.size() >= q.size() && value.compare(0, q.size(), q) == 0) {
        value.erase(0, q.size());
        changed = true;
      }
    }
    value = trim(value);
  }
  return value;
}

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (is_alnum(c) || c == '-') {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::optional<std::string> label_from_truth_word(std::string_view word, const Target& target) {
  std::string truth;
  if (word == "true" || word == "yes") truth = "true";
  if (word == "false" || word == "no") truth = "false";
  if (word == "unknown" || word == "uncertain") truth = "unknown";
  if (truth.empty()) return std::nullopt;
  if (auto label = target.label_for_truth(truth)) return label;
  if (!target.options.empty()) return std::nullopt;
  if (truth == "true") return "True";
  if (truth == "false") return "False";
  return "Unknown";
}

// First option label or truth word inside `text`.
std::optional<std::string> answer_in(std::string_view text, const Target& target) {
  std::string token;
  std::vector<std::string> raw;
  for (char c : text) {
    if (is_alnum(c) || c == '-') {
      token.push_back(c);
    } else if (!token.empty()) {
      raw.push_back(std::move(token));
      token.clear();
    }
  }
  if (!token.empty()) raw.push_back(std::move(token));
  for (const auto& t : raw) {
    for (const auto& o : target.options) {
      // Single-letter labels must match case so that the article "a" is skipped.
      const bool hit = o.label.size() == 1 ? t == o.label : to_lower(t) == to_lower(o.label);
      if (hit) return o.label;
    }
    if (auto label = label_from_truth_word(to_lower(t), target)) return label;
  }
  return std::nullopt;
}

}  // namespace

void ChatRequest::validate() const {
  if (messages.empty()) throw Error("chat request without messages");
  if (messages.front().role != "system") throw Error("chat request must start with a system message");
  for (const auto& m : messages) {
    if (m.role != "system" && m.role != "user" && m.role != "assistant") {
      throw Error("unknown chat role: " + m.role);
    }
  }
}

json ChatRequest::to_json() const {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return json{{"model", model}, {"messages", std::move(msgs)}, {"temperature", temperature},
              {"max_tokens", max_tokens}};
}

std::string ChatRequest::digest() const { return sha256_hex(to_json().dump()); }

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

PromptTemplate PromptTemplate::parse(std::string name, std::string_view text) {
  PromptTemplate t;
  t.name_ = std::move(name);
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<ChatMessage> current;
  auto close = [&] {
    if (!current) return;
    while (!current->content.empty() && current->content.back() == '\n') current->content.pop_back();
    t.blocks_.push_back(std::move(*current));
    current.reset();
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "[system]" || line == "[user]" || line == "[assistant]") {
      close();
      current = ChatMessage{line.substr(1, line.size() - 2), ""};
      continue;
    }
    if (!current) {
      if (trim(line).empty()) continue;
      throw Error("template " + t.name_ + ": text before the first role block");
    }
    current->content += line;
    current->content.push_back('\n');
  }
  close();
  if (t.blocks_.empty() || t.blocks_.front().role != "system") {
    throw Error("template " + t.name_ + " must start with a [system] block");
  }
  return t;
}

std::set<std::string> PromptTemplate::placeholders() const {
  std::set<std::string> out;
  for (const auto& b : blocks_) {
    const std::string& s = b.content;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '{') continue;
      if (i + 1 < s.size() && s[i + 1] == '{') {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < s.size() && is_ident_char(s[j])) ++j;
      if (j > i + 1 && j < s.size() && s[j] == '}') out.insert(s.substr(i + 1, j - i - 1));
    }
  }
  return out;
}

ChatRequest PromptTemplate::render(const std::map<std::string, std::string>& bindings, const std::string& model,
                                   double temperature, int max_tokens) const {
  auto fill = [&](const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char c = s[i];
      if ((c == '{' || c == '}') && i + 1 < s.size() && s[i + 1] == c) {
        out.push_back(c);
        ++i;
        continue;
      }
      if (c == '{') {
        std::size_t j = i + 1;
        while (j < s.size() && is_ident_char(s[j])) ++j;
        if (j > i + 1 && j < s.size() && s[j] == '}') {
          const std::string key = s.substr(i + 1, j - i - 1);
          auto it = bindings.find(key);
          if (it == bindings.end()) throw UnboundPlaceholder(key);
          out += it->second;
          i = j;
          continue;
        }
      }
      out.push_back(c);
    }
    return out;
  };

  ChatRequest req;
  req.model = model;
  req.temperature = temperature;
  req.max_tokens = max_tokens;
  req.messages.push_back({blocks_.front().role, fill(blocks_.front().content)});
  for (const auto& e : examples_) req.messages.push_back(e);
  for (std::size_t i = 1; i < blocks_.size(); ++i) req.messages.push_back({blocks_[i].role, fill(blocks_[i].content)});
  req.validate();
  return req;
}

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary library = [] {
    PromptLibrary lib;
    for (const auto& [stage, text] : embedded::kPrompts) {
      lib.templates_.insert_or_assign(std::string(stage), PromptTemplate::parse(std::string(stage), text));
    }
    return lib;
  }();
  return library;
}

PromptLibrary PromptLibrary::from_directory(const std::filesystem::path& dir) {
  PromptLibrary lib = builtin();
  if (!std::filesystem::is_directory(dir)) throw Error("not a template directory: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto& path = entry.path();
    if (path.extension() != ".txt") continue;
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string stage = path.stem().string();
    PromptTemplate t = PromptTemplate::parse(stage, buf.str());
    const auto examples_path = dir / (stage + ".examples.json");
    if (std::filesystem::exists(examples_path)) {
      std::ifstream ex(examples_path);
      const json j = json::parse(ex);
      std::vector<ChatMessage> examples;
      for (const auto& m : j) examples.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
      t.set_examples(std::move(examples));
    }
    lib.templates_.insert_or_assign(stage, std::move(t));
  }
  return lib;
}

const PromptTemplate& PromptLibrary::get(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw Error("no prompt template named " + name);
  return it->second;
}

std::string parse_labeled_field(std::string_view text, std::string_view label) {
  const std::string hay = to_lower(text);
  const std::string needle = to_lower(label);
  if (needle.empty()) throw FieldNotFound(std::string(label));

  std::optional<std::size_t> value_start;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
    if (pos > 0 && is_alnum(hay[pos - 1])) continue;
    std::size_t i = pos + needle.size();
    while (std::size_t q = quote_at(hay, i)) i += q;
    while (i < hay.size() && (hay[i] == ' ' || hay[i] == '\t')) ++i;
    if (i < hay.size() && hay[i] == ':') value_start = i + 1;
  }
  if (!value_start) throw FieldNotFound(std::string(label));

  std::size_t i = *value_start;
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  if (std::size_t q = quote_at(text, i)) {
    const std::string_view open = text.substr(i, q);
    const std::string_view close = open == kOpenCurly ? kCloseCurly : open;
    const std::size_t begin = i + q;
    std::size_t end = text.find(close, begin);
    if (open == kOpenCurly && end == std::string_view::npos) end = text.find('"', begin);
    if (end != std::string_view::npos) return trim(text.substr(begin, end - begin));
    i = begin;
  }
  const std::size_t eol = text.find('\n', i);
  return strip_quotes(std::string(text.substr(i, eol == std::string_view::npos ? std::string_view::npos : eol - i)));
}

std::optional<bool> parse_judgement(std::string_view text) {
  std::string_view tail = text;
  if (auto q = text.rfind('?'); q != std::string_view::npos && !trim(text.substr(q + 1)).empty()) {
    tail = text.substr(q + 1);
  }
  static const std::set<std::string> yes{"true", "yes", "valid", "sufficient", "determinate", "useful",
                                         "novel", "new", "consistent", "satisfied", "satisfies"};
  static const std::set<std::string> no{"false", "no", "not", "invalid", "insufficient", "indeterminate",
                                        "duplicated", "duplicate", "useless", "inconsistent", "paraphrase",
                                        "cannot", "unknown", "violates"};
  for (const auto& w : words_of(tail)) {
    if (no.contains(w)) return false;
    if (yes.contains(w)) return true;
  }
  return std::nullopt;
}

std::string parse_answer(std::string_view reply, const Target& target) {
  try {
    const std::string judgement = parse_labeled_field(reply, "judgement");
    std::string_view rest = judgement;
    const std::string lowered = to_lower(judgement);
    if (auto at = lowered.rfind("should be"); at != std::string::npos) rest = rest.substr(at + 9);
    if (auto label = answer_in(rest, target)) return *label;
    for (const auto& o : target.options) {
      if (!trim(o.text).empty() && to_lower(rest).find(to_lower(trim(o.text))) != std::string::npos) return o.label;
    }
  } catch (const FieldNotFound&) {
  }

  const std::string lowered = to_lower(reply);
  if (auto at = lowered.rfind("answer is"); at != std::string::npos) {
    const auto words_after = reply.substr(at + 9);
    std::size_t i = 0;
    while (i < words_after.size() && !is_alnum(words_after[i])) ++i;
    std::size_t j = i;
    while (j < words_after.size() && (is_alnum(words_after[j]) || words_after[j] == '-')) ++j;
    const std::string word(words_after.substr(i, j - i));
    for (const auto& o : target.options) {
      if (to_lower(word) == to_lower(o.label)) return o.label;
    }
    if (auto label = label_from_truth_word(to_lower(word), target)) return *label;
  }

  for (const auto& o : target.options) {
    std::string text;
    try {
      text = normalize(o.text);
    } catch (const EmptyStatement&) {
      continue;
    }
    if (lowered.find(text) != std::string::npos) return o.label;
  }
  return "Abstain";
}

}  // namespace determlr
