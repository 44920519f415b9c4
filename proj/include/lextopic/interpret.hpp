#pragma once

/**
 * @file interpret.hpp
 *
 * @brief Topic labels and summaries from a chat-completion endpoint.
 *
 * Prompts are rendered from a template holding the placeholders
 * [KEYWORDS] and [REPR_DOCS]. Requests use the common chat-completions
 * JSON shape; responses are stored as JSON Lines keyed by provider, task,
 * topic and prompt hash so that re-running skips finished work.
 */

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lextopic/error.hpp"

namespace lextopic::interpret {

enum class TaskKind { Label, Summary };

std::string_view task_name(TaskKind kind);
TaskKind parse_task(std::string_view name);

struct PromptTask {
  TaskKind kind = TaskKind::Label;
  std::string text;

  /// The shipped Italian template for the task.
  static PromptTask defaults(TaskKind kind);
  /// Throws ValidationError unless each placeholder occurs exactly once.
  void validate() const;
};

inline constexpr std::string_view kKeywordsPlaceholder = "[KEYWORDS]";
inline constexpr std::string_view kDocsPlaceholder = "[REPR_DOCS]";
inline constexpr std::size_t kMaxDocScalars = 2000;

/// Keywords joined with ", "; each doc cut to kMaxDocScalars scalars,
/// prefixed "- " and joined with newlines.
std::string render_prompt(const PromptTask& task, std::span<const std::string> keywords,
                          std::span<const std::string> docs);

struct GenerationParams {
  int max_new_tokens = 50;
  double temperature = 0.1;
  double repetition_penalty = 1.1;

  static GenerationParams defaults(TaskKind kind);
  void validate() const;

  friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

struct Provider {
  std::string name;
  /// Full URL of the completions endpoint, e.g. http://host:8000/v1/chat/completions.
  std::string endpoint;
  std::string model;
  /// "Header-Name: value"; ${VAR} is replaced from the environment.
  std::string auth_header;
  /// When false, sampling fields are sent only if configured explicitly.
  bool send_default_params = true;
  std::optional<GenerationParams> label_params;
  std::optional<GenerationParams> summary_params;
  double timeout_seconds = 120;
  int attempts = 3;
  double backoff_seconds = 1.0;

  /// Sampling fields to send for a task, if any.
  std::optional<GenerationParams> params_for(TaskKind kind) const;
};

/// Network failure after all retries, a non-2xx reply or an empty completion.
class CompletionError : public IoError {
 public:
  using IoError::IoError;
};

/// Replaces every ${NAME} with the environment value; throws
/// ValidationError when a variable is unset.
std::string expand_env(std::string_view text);

/// Sends one single-turn request and returns the completion text verbatim.
/// Retries network errors, 429 and 5xx with exponential backoff.
std::string request_completion(const Provider& provider, const std::string& prompt,
                               const std::optional<GenerationParams>& params);

struct ParsedOutput {
  std::string text;
  bool conforming = true;
};

inline constexpr std::size_t kMaxLabelScalars = 120;

/// First non-empty line, trimmed, surrounding quotes removed. Longer than
/// kMaxLabelScalars scalars is nonconforming.
ParsedOutput parse_label(std::string_view raw);
/// Text after the first "topic:" marker; without the marker the trimmed
/// raw text is returned as nonconforming.
ParsedOutput parse_summary(std::string_view raw);

std::string sha256_hex(std::string_view data);

struct TopicPrompt {
  int topic_id = 0;
  std::vector<std::string> keywords;
  std::vector<std::string> docs;
};

struct ResultRecord {
  std::string provider;
  TaskKind task = TaskKind::Label;
  int topic_id = 0;
  std::string prompt_sha256;
  std::string output;
  bool conforming = true;
};

std::vector<ResultRecord> read_results(const std::filesystem::path& path);

struct InterpretOptions {
  std::size_t parallelism = 2;
  std::optional<PromptTask> task_template;
};

/// Requests every topic whose (provider, task, topic, prompt hash) key is
/// not yet in `results`, appending new records in topic order. Returns the
/// new records. Records finished before a failure are still written.
std::vector<ResultRecord> interpret_topics(const Provider& provider, TaskKind task,
                                           std::span<const TopicPrompt> topics,
                                           const std::filesystem::path& results,
                                           const InterpretOptions& options = {});

}  // namespace lextopic::interpret
