#include "lextopic/interpret.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <set>
#include <thread>
#include <tuple>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "lextopic/text.hpp"

namespace lextopic::interpret {

using nlohmann::json;

std::string_view task_name(TaskKind kind) { return kind == TaskKind::Label ? "label" : "summary"; }

TaskKind parse_task(std::string_view name) {
  if (name == "label") return TaskKind::Label;
  if (name == "summary") return TaskKind::Summary;
  throw ValidationError("unknown task \"" + std::string(name) + "\" (expected label or summary)");
}

namespace {

constexpr std::string_view kPreamble =
    "Sei un esperto di giurisprudenza e di diritto italiano.\n"
    "Rispondi in modo professionale alle richieste.\n"
    "Ho un topic descritto dalle seguenti keywords: [KEYWORDS]\n"
    "In questo topic, i seguenti documenti sono un sottoinsieme piccolo ma rappresentativo di tutti i "
    "documenti dell'argomento: [REPR_DOCS].\n";

constexpr std::string_view kLabelRequest =
    "Sulla base delle informazioni di cui sopra, fornisci una breve label a questo topic.\n"
    "Assicurati di riportare solo la label e nient'altro.";

constexpr std::string_view kSummaryRequest =
    "Sulla base delle informazioni di cui sopra, fornisci una descrizione di questo topic nel seguente formato:\n"
    "topic: <descrizione>";

std::size_t count_of(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

std::string replace_once(std::string s, std::string_view placeholder, const std::string& value) {
  const auto pos = s.find(placeholder);
  s.replace(pos, placeholder.size(), value);
  return s;
}

}  // namespace

PromptTask PromptTask::defaults(TaskKind kind) {
  return {kind, std::string(kPreamble) + std::string(kind == TaskKind::Label ? kLabelRequest : kSummaryRequest)};
}

void PromptTask::validate() const {
  for (auto placeholder : {kKeywordsPlaceholder, kDocsPlaceholder}) {
    const auto n = count_of(text, placeholder);
    if (n != 1) {
      throw ValidationError("prompt template must contain " + std::string(placeholder) + " exactly once (found " +
                            std::to_string(n) + ")");
    }
  }
}

std::string render_prompt(const PromptTask& task, std::span<const std::string> keywords,
                          std::span<const std::string> docs) {
  task.validate();
  if (keywords.empty()) throw ValidationError("prompt needs at least one keyword");
  if (docs.empty()) throw ValidationError("prompt needs at least one representative document");

  std::string joined_keywords;
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    if (i > 0) joined_keywords += ", ";
    joined_keywords += keywords[i];
  }
  std::string joined_docs;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i > 0) joined_docs += "\n";
    auto scalars = text::decode_utf8(docs[i]);
    if (scalars.size() > kMaxDocScalars) scalars.resize(kMaxDocScalars);
    joined_docs += "- " + text::encode_utf8(scalars);
  }
  // Replace the later placeholder first so inserted text is never searched again.
  auto keyword_pos = task.text.find(kKeywordsPlaceholder);
  auto docs_pos = task.text.find(kDocsPlaceholder);
  std::string out = task.text;
  if (keyword_pos > docs_pos) {
    out = replace_once(std::move(out), kKeywordsPlaceholder, joined_keywords);
    out = replace_once(std::move(out), kDocsPlaceholder, joined_docs);
  } else {
    out = replace_once(std::move(out), kDocsPlaceholder, joined_docs);
    out = replace_once(std::move(out), kKeywordsPlaceholder, joined_keywords);
  }
  return out;
}

GenerationParams GenerationParams::defaults(TaskKind kind) {
  return kind == TaskKind::Label ? GenerationParams{50, 0.1, 1.1} : GenerationParams{2048, 0.1, 1.1};
}

void GenerationParams::validate() const {
  if (max_new_tokens < 1) throw ValidationError("max_new_tokens must be >= 1");
  if (!(temperature >= 0)) throw ValidationError("temperature must be >= 0");
  if (!(repetition_penalty > 0)) throw ValidationError("repetition_penalty must be > 0");
}

std::optional<GenerationParams> Provider::params_for(TaskKind kind) const {
  const auto& configured = kind == TaskKind::Label ? label_params : summary_params;
  if (configured) return configured;
  if (send_default_params) return GenerationParams::defaults(kind);
  return std::nullopt;
}

std::string expand_env(std::string_view input) {
  std::string out;
  std::size_t i = 0;
  while (i < input.size()) {
    if (input.substr(i, 2) == "${") {
      const auto close = input.find('}', i + 2);
      if (close == std::string_view::npos) throw ValidationError("unterminated ${ in \"" + std::string(input) + "\"");
      const std::string name(input.substr(i + 2, close - i - 2));
      const char* value = std::getenv(name.c_str());
      if (value == nullptr) throw ValidationError("environment variable " + name + " is not set");
      out += value;
      i = close + 1;
    } else {
      out += input[i++];
    }
  }
  return out;
}

namespace {

struct Endpoint {
  std::string origin;
  std::string path;
};

Endpoint split_url(const std::string& url) {
  static const std::regex pattern(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) throw ValidationError("invalid endpoint URL \"" + url + "\"");
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

std::string extract_content(const std::string& body) {
  json reply;
  try {
    reply = json::parse(body);
  } catch (const json::parse_error& e) {
    throw CompletionError(std::string("completion response is not JSON: ") + e.what());
  }
  const json* text = nullptr;
  if (reply.contains("choices") && reply["choices"].is_array() && !reply["choices"].empty()) {
    const auto& choice = reply["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content")) {
      text = &choice["message"]["content"];
    } else if (choice.contains("text")) {
      text = &choice["text"];
    }
  }
  if (text == nullptr || !text->is_string()) throw CompletionError("completion response has no choices[0] text");
  auto out = text->get<std::string>();
  if (text::trim(out).empty()) throw CompletionError("empty completion");
  return out;
}

}  // namespace

std::string request_completion(const Provider& provider, const std::string& prompt,
                               const std::optional<GenerationParams>& params) {
  if (provider.endpoint.empty()) throw ValidationError("provider " + provider.name + " has no endpoint");
  if (provider.attempts < 1) throw ValidationError("attempts must be >= 1");
  const auto endpoint = split_url(provider.endpoint);

  json body = {{"model", provider.model}, {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
  if (params) {
    params->validate();
    body["max_tokens"] = params->max_new_tokens;
    body["temperature"] = params->temperature;
    body["repetition_penalty"] = params->repetition_penalty;
  }

  httplib::Headers headers;
  if (!provider.auth_header.empty()) {
    const auto header = expand_env(provider.auth_header);
    const auto colon = header.find(':');
    if (colon == std::string::npos) throw ValidationError("auth header must look like \"Name: value\"");
    headers.emplace(std::string(text::trim(std::string_view(header).substr(0, colon))),
                    std::string(text::trim(std::string_view(header).substr(colon + 1))));
  }

  httplib::Client client(endpoint.origin);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(provider.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const std::string payload = body.dump();
  std::string last_error;
  for (int attempt = 0; attempt < provider.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(provider.backoff_seconds * std::pow(2.0, attempt - 1)));
    }
    auto res = client.Post(endpoint.path, headers, payload, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return extract_content(res->body);
    last_error = "HTTP " + std::to_string(res->status);
    if (res->status != 429 && res->status < 500) break;
  }
  throw CompletionError(provider.endpoint + ": " + last_error + " after " + std::to_string(provider.attempts) +
                        " attempt(s)");
}

namespace {

std::string strip_quotes(std::string_view s) {
  s = text::trim(s);
  static constexpr std::pair<std::string_view, std::string_view> kPairs[] = {
      {"\"", "\""}, {"'", "'"}, {"“", "”"}, {"«", "»"}, {"`", "`"}};
  for (const auto& [open, close] : kPairs) {
    if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close)) {
      return std::string(text::trim(s.substr(open.size(), s.size() - open.size() - close.size())));
    }
  }
  return std::string(s);
}

void require_text(std::string_view raw) {
  if (text::trim(raw).empty()) throw ValidationError("completion is empty");
}

}  // namespace

ParsedOutput parse_label(std::string_view raw) {
  require_text(raw);
  std::size_t start = 0;
  while (start < raw.size()) {
    auto end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    const auto line = text::trim(raw.substr(start, end - start));
    if (!line.empty()) {
      ParsedOutput out{strip_quotes(line), true};
      out.conforming = text::scalar_length(out.text) <= kMaxLabelScalars;
      return out;
    }
    start = end + 1;
  }
  throw ValidationError("completion is empty");
}

ParsedOutput parse_summary(std::string_view raw) {
  require_text(raw);
  std::string lowered(raw);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c); });
  constexpr std::string_view marker = "topic:";
  const auto pos = lowered.find(marker);
  if (pos != std::string::npos) {
    auto rest = strip_quotes(raw.substr(pos + marker.size()));
    if (!rest.empty()) return {rest, true};
  }
  return {std::string(text::trim(raw)), false};
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

namespace {

json record_to_json(const ResultRecord& r) {
  return {{"provider", r.provider},     {"task", task_name(r.task)}, {"topic_id", r.topic_id},
          {"prompt_sha256", r.prompt_sha256}, {"output", r.output},        {"conforming", r.conforming}};
}

}  // namespace

std::vector<ResultRecord> read_results(const std::filesystem::path& path) {
  std::vector<ResultRecord> out;
  if (!std::filesystem::exists(path)) return out;
  const auto lines = text::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    try {
      const auto j = json::parse(lines[i]);
      out.push_back({j.at("provider").get<std::string>(), parse_task(j.at("task").get<std::string>()),
                     j.at("topic_id").get<int>(), j.at("prompt_sha256").get<std::string>(),
                     j.at("output").get<std::string>(), j.at("conforming").get<bool>()});
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ResultRecord> interpret_topics(const Provider& provider, TaskKind task,
                                           std::span<const TopicPrompt> topics,
                                           const std::filesystem::path& results, const InterpretOptions& options) {
  const PromptTask prompt_task = options.task_template.value_or(PromptTask::defaults(task));
  if (prompt_task.kind != task) throw ValidationError("prompt template is for a different task");
  const auto params = provider.params_for(task);

  std::set<std::tuple<std::string, TaskKind, int, std::string>> done;
  for (const auto& r : read_results(results)) done.emplace(r.provider, r.task, r.topic_id, r.prompt_sha256);

  struct Job {
    const TopicPrompt* topic;
    std::string prompt;
    std::string hash;
  };
  std::vector<Job> jobs;
  for (const auto& t : topics) {
    auto prompt = render_prompt(prompt_task, t.keywords, t.docs);
    auto hash = sha256_hex(prompt);
    if (done.contains({provider.name, task, t.topic_id, hash})) continue;
    jobs.push_back({&t, std::move(prompt), std::move(hash)});
  }

  std::vector<std::optional<ResultRecord>> outputs(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto raw = request_completion(provider, jobs[i].prompt, params);
        const auto parsed = task == TaskKind::Label ? parse_label(raw) : parse_summary(raw);
        outputs[i] = ResultRecord{provider.name, task, jobs[i].topic->topic_id, jobs[i].hash, parsed.text,
                                  parsed.conforming};
      } catch (const std::exception& e) {
        errors[i] = "topic " + std::to_string(jobs[i].topic->topic_id) + ": " + e.what();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(options.parallelism, 1, std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<ResultRecord> written;
  std::string appended;
  for (const auto& o : outputs) {
    if (!o) continue;
    appended += record_to_json(*o).dump() + "\n";
    written.push_back(*o);
  }
  if (!appended.empty()) {
    std::string existing = std::filesystem::exists(results) ? text::read_file(results) : std::string();
    if (!existing.empty() && existing.back() != '\n') existing += '\n';
    text::write_file(results, existing + appended);
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw CompletionError(e);
  }
  return written;
}

}  // namespace lextopic::interpret
