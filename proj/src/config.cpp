#include "lextopic/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <regex>

#include "lextopic/error.hpp"
#include "lextopic/text.hpp"

namespace lextopic::config {

using nlohmann::json;

namespace {

class ValueParser {
 public:
  ValueParser(std::string source, std::size_t line, std::string key, std::string value)
      : where_(source + ":" + std::to_string(line) + ": " + key), value_(std::move(value)) {}

  long long integer(long long min) const {
    long long v = 0;
    const auto* end = value_.data() + value_.size();
    auto [ptr, ec] = std::from_chars(value_.data(), end, v);
    if (ec != std::errc{} || ptr != end) fail("expected an integer");
    if (v < min) fail("must be >= " + std::to_string(min));
    return v;
  }

  double real() const {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(value_, &used);
    } catch (const std::exception&) {
      fail("expected a number");
    }
    if (used != value_.size() || !std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  bool boolean() const {
    const auto v = text::to_lower(value_);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail("expected true or false");
  }

  std::pair<int, int> range() const {
    static const std::regex pattern(R"(^\(?\s*(\d+)\s*,\s*(\d+)\s*\)?$)");
    std::smatch m;
    if (!std::regex_match(value_, m, pattern)) fail("expected a pair such as (1, 2)");
    return {std::stoi(m[1].str()), std::stoi(m[2].str())};
  }

  const std::string& str() const { return value_; }

  [[noreturn]] void fail(const std::string& why) const {
    throw ValidationError(where_ + " = \"" + value_ + "\": " + why);
  }

 private:
  std::string where_;
  std::string value_;
};

using Setter = std::function<void(ToolkitConfig&, const ValueParser&)>;
using SectionTable = std::map<std::string, Setter, std::less<>>;

const std::map<std::string, SectionTable, std::less<>>& fixed_sections() {
  static const std::map<std::string, SectionTable, std::less<>> table = {
      {"embedding",
       {{"id_model", [](ToolkitConfig& c, const ValueParser& v) { c.embedding.id_model = v.str(); }},
        {"max_seq_length",
         [](ToolkitConfig& c, const ValueParser& v) { c.embedding.max_seq_length = static_cast<int>(v.integer(1)); }},
        {"batch_size",
         [](ToolkitConfig& c, const ValueParser& v) { c.embedding.batch_size = static_cast<int>(v.integer(1)); }}}},
      {"umap",
       {{"n_neighbors", [](ToolkitConfig& c, const ValueParser& v) { c.umap.n_neighbors = static_cast<int>(v.integer(2)); }},
        {"n_components",
         [](ToolkitConfig& c, const ValueParser& v) { c.umap.n_components = static_cast<int>(v.integer(1)); }},
        {"min_dist",
         [](ToolkitConfig& c, const ValueParser& v) {
           c.umap.min_dist = v.real();
           if (c.umap.min_dist < 0) v.fail("must be >= 0");
         }},
        {"spread",
         [](ToolkitConfig& c, const ValueParser& v) {
           c.umap.spread = v.real();
           if (c.umap.spread <= 0) v.fail("must be > 0");
         }},
        {"metric", [](ToolkitConfig& c, const ValueParser& v) { c.umap.metric = reduce::parse_metric(v.str()); }},
        {"n_epochs", [](ToolkitConfig& c, const ValueParser& v) { c.umap.n_epochs = static_cast<int>(v.integer(1)); }},
        {"negative_sample_rate",
         [](ToolkitConfig& c, const ValueParser& v) { c.umap.negative_sample_rate = static_cast<int>(v.integer(0)); }}}},
      {"hdbscan",
       {{"min_cluster_size",
         [](ToolkitConfig& c, const ValueParser& v) { c.hdbscan.min_cluster_size = static_cast<int>(v.integer(2)); }},
        {"min_samples",
         [](ToolkitConfig& c, const ValueParser& v) { c.hdbscan.min_samples = static_cast<int>(v.integer(1)); }},
        {"metric",
         [](ToolkitConfig&, const ValueParser& v) {
           if (v.str() != "euclidean") v.fail("only euclidean is supported");
         }},
        {"allow_single_cluster",
         [](ToolkitConfig& c, const ValueParser& v) { c.hdbscan.allow_single_cluster = v.boolean(); }}}},
      {"vectorizer",
       {{"ngram_range",
         [](ToolkitConfig& c, const ValueParser& v) {
           auto [lo, hi] = v.range();
           if (lo < 1 || hi < lo) v.fail("need 1 <= min <= max");
           c.topics.vectorizer.ngram_min = lo;
           c.topics.vectorizer.ngram_max = hi;
         }},
        {"min_df",
         [](ToolkitConfig& c, const ValueParser& v) { c.topics.vectorizer.min_df = static_cast<int>(v.integer(1)); }},
        {"stop_words", [](ToolkitConfig& c, const ValueParser& v) { c.stop_words = v.str(); }}}},
      {"topics",
       {{"top_n_words",
         [](ToolkitConfig& c, const ValueParser& v) { c.topics.top_n_words = static_cast<std::size_t>(v.integer(1)); }},
        {"diversity",
         [](ToolkitConfig& c, const ValueParser& v) {
           c.topics.diversity = v.real();
           if (c.topics.diversity < 0 || c.topics.diversity > 1) v.fail("must lie in [0, 1]");
         }},
        {"n_representative",
         [](ToolkitConfig& c, const ValueParser& v) {
           c.topics.n_representative = static_cast<std::size_t>(v.integer(1));
         }},
        {"log_base",
         [](ToolkitConfig& c, const ValueParser& v) {
           const auto s = text::to_lower(v.str());
           c.topics.log_base = s == "e" ? std::numbers::e : v.real();
           if (!(c.topics.log_base > 1)) v.fail("must be > 1");
         }}}},
      {"coherence",
       {{"window",
         [](ToolkitConfig& c, const ValueParser& v) { c.coherence.window = static_cast<std::size_t>(v.integer(1)); }},
        {"epsilon",
         [](ToolkitConfig& c, const ValueParser& v) {
           c.coherence.epsilon = v.real();
           if (c.coherence.epsilon <= 0) v.fail("must be > 0");
         }},
        {"topn", [](ToolkitConfig& c, const ValueParser& v) { c.coherence_topn = static_cast<std::size_t>(v.integer(1)); }}}},
  };
  return table;
}

void set_llm_key(LlmSection& s, const std::string& key, const ValueParser& v) {
  auto& p = s.provider;
  auto task_params = [&](std::optional<interpret::GenerationParams>& slot, interpret::TaskKind kind,
                         std::string_view field) {
    if (!slot) slot = interpret::GenerationParams::defaults(kind);
    if (field == "max_new_tokens") {
      slot->max_new_tokens = static_cast<int>(v.integer(1));
    } else if (field == "temperature") {
      slot->temperature = v.real();
      if (slot->temperature < 0) v.fail("must be >= 0");
    } else if (field == "repetition_penalty") {
      slot->repetition_penalty = v.real();
      if (slot->repetition_penalty <= 0) v.fail("must be > 0");
    } else {
      v.fail("unknown key");
    }
  };
  if (key == "endpoint") {
    p.endpoint = v.str();
  } else if (key == "model") {
    p.model = v.str();
  } else if (key == "auth_header") {
    p.auth_header = v.str();
  } else if (key == "send_default_params") {
    p.send_default_params = v.boolean();
  } else if (key == "timeout") {
    p.timeout_seconds = v.real();
    if (p.timeout_seconds <= 0) v.fail("must be > 0");
  } else if (key == "attempts") {
    p.attempts = static_cast<int>(v.integer(1));
  } else if (key == "backoff") {
    p.backoff_seconds = v.real();
    if (p.backoff_seconds < 0) v.fail("must be >= 0");
  } else if (key == "parallelism") {
    s.parallelism = static_cast<std::size_t>(v.integer(1));
  } else if (key.starts_with("label.")) {
    task_params(p.label_params, interpret::TaskKind::Label, std::string_view(key).substr(6));
  } else if (key.starts_with("summary.")) {
    task_params(p.summary_params, interpret::TaskKind::Summary, std::string_view(key).substr(8));
  } else {
    v.fail("unknown key");
  }
}

}  // namespace

ToolkitConfig ToolkitConfig::parse(std::string_view contents, const std::string& source) {
  ToolkitConfig config;
  const auto& sections = fixed_sections();
  const SectionTable* current = nullptr;
  LlmSection* llm = nullptr;
  bool in_section = false;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    ++line_no;
    auto line = text::trim(contents.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const std::string where = source + ":" + std::to_string(line_no);

    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where + ": malformed section header");
      const std::string name(text::trim(line.substr(1, line.size() - 2)));
      current = nullptr;
      llm = nullptr;
      if (name.starts_with("llm.") && name.size() > 4) {
        llm = &config.llm[name.substr(4)];
        llm->provider.name = name.substr(4);
      } else if (auto it = sections.find(name); it != sections.end()) {
        current = &it->second;
      } else {
        throw ValidationError(where + ": unknown section [" + name + "]");
      }
      in_section = true;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ValidationError(where + ": expected key = value");
    if (!in_section) throw ValidationError(where + ": key outside of any section");
    const std::string key(text::trim(line.substr(0, eq)));
    std::string value(text::trim(line.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    const ValueParser parser(source, line_no, key, value);
    if (llm != nullptr) {
      set_llm_key(*llm, key, parser);
      continue;
    }
    auto it = current->find(key);
    if (it == current->end()) throw ValidationError(where + ": unknown key \"" + key + "\"");
    it->second(config, parser);
  }

  return config;
}

ToolkitConfig ToolkitConfig::load(const std::filesystem::path& path) {
  auto config = parse(text::read_file(path), path.string());
  if (config.stop_words != "builtin" && std::filesystem::path(config.stop_words).is_relative()) {
    config.stop_words = (path.parent_path() / config.stop_words).string();
  }
  return config;
}

topics::Stopwords ToolkitConfig::stopwords(const std::filesystem::path& base) const {
  if (stop_words == "builtin") return topics::Stopwords::builtin();
  std::filesystem::path p(stop_words);
  if (p.is_relative() && !base.empty()) p = base / p;
  return topics::Stopwords::from_file(p);
}

topic_eval::SweepConfig ToolkitConfig::sweep_config() const {
  return {topics, coherence, coherence_topn};
}

json ToolkitConfig::to_json() const {
  json llm_json = json::object();
  for (const auto& [name, s] : llm) {
    llm_json[name] = {{"endpoint", s.provider.endpoint},
                      {"model", s.provider.model},
                      {"timeout", s.provider.timeout_seconds},
                      {"attempts", s.provider.attempts},
                      {"parallelism", s.parallelism}};
  }
  return {
      {"embedding",
       {{"id_model", embedding.id_model},
        {"max_seq_length", embedding.max_seq_length},
        {"batch_size", embedding.batch_size}}},
      {"umap",
       {{"n_neighbors", umap.n_neighbors},
        {"n_components", umap.n_components},
        {"min_dist", umap.min_dist},
        {"spread", umap.spread},
        {"metric", reduce::to_string(umap.metric)},
        {"n_epochs", umap.n_epochs},
        {"negative_sample_rate", umap.negative_sample_rate},
        {"seed", umap.seed}}},
      {"hdbscan",
       {{"min_cluster_size", hdbscan.min_cluster_size},
        {"min_samples", hdbscan.min_samples},
        {"metric", "euclidean"},
        {"allow_single_cluster", hdbscan.allow_single_cluster}}},
      {"vectorizer",
       {{"ngram_range", {topics.vectorizer.ngram_min, topics.vectorizer.ngram_max}},
        {"min_df", topics.vectorizer.min_df},
        {"stop_words", stop_words}}},
      {"topics",
       {{"top_n_words", topics.top_n_words},
        {"diversity", topics.diversity},
        {"n_representative", topics.n_representative},
        {"log_base", topics.log_base}}},
      {"coherence", {{"window", coherence.window}, {"epsilon", coherence.epsilon}, {"topn", coherence_topn}}},
      {"llm", llm_json},
  };
}

std::string default_config_text() {
  return R"(# lextopic configuration. Every key is optional.

[embedding]
# Read by the embedding export script only.
id_model = dlicari/distil-ita-legal-bert
max_seq_length = 512
batch_size = 32

[umap]
n_neighbors = 5
n_components = 5
min_dist = 0.0
metric = cosine
n_epochs = 500
spread = 1.0
negative_sample_rate = 5

[hdbscan]
min_cluster_size = 5
min_samples = 5
metric = euclidean
allow_single_cluster = false

[vectorizer]
ngram_range = (1, 2)
min_df = 2
stop_words = builtin

[topics]
top_n_words = 15
diversity = 0.35
n_representative = 3
log_base = e

[coherence]
window = 110
epsilon = 1e-12
topn = 10

# [llm.local]
# endpoint = http://127.0.0.1:8000/v1/chat/completions
# model = meta-llama/Llama-3.1-8B-Instruct
# auth_header = Authorization: Bearer ${LLM_API_KEY}
# timeout = 120
# attempts = 3
# backoff = 1
# parallelism = 2
# label.max_new_tokens = 50
# summary.max_new_tokens = 2048
)";
}

}  // namespace lextopic::config
