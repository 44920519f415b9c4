#include <gtest/gtest.h>

#include <sstream>

#include "lextopic/cli.hpp"
#include "lextopic/report.hpp"
#include "lextopic/text.hpp"
#include "oracles.hpp"

using namespace lextopic;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("lextopic_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string corpus() { return oracle::data("synthetic/segments.jsonl").string(); }
std::string embeddings() { return oracle::data("synthetic/embeddings.emb").string(); }

}  // namespace

TEST(Cli, FitRecoversPlantedThemes) {
  const auto dir = scratch("fit");
  const auto r = run({"fit", "--corpus", corpus(), "--embeddings", embeddings(), "--out", (dir / "model").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (auto f : {"labels.csv", "topics.json", "reduced.emb", "reduced.emb.ids"}) EXPECT_TRUE(fs::exists(dir / "model" / f)) << f;

  const auto model = cli::read_model_dir(dir / "model");
  EXPECT_GE(model.topics.size(), 3u);
  const auto labels = oracle::read_pairs_csv(dir / "model/labels.csv");
  const auto themes = oracle::read_pairs_csv(oracle::data("synthetic/themes.csv"));
  EXPECT_EQ(labels.size(), themes.size());
  EXPECT_GE(oracle::purity(labels, themes), 0.8);
}

TEST(Cli, FitIsDeterministicAndSeeded) {
  const auto dir = scratch("det");
  for (auto name : {"a", "b"}) {
    ASSERT_EQ(run({"fit", "--corpus", corpus(), "--embeddings", embeddings(), "--out", (dir / name).string()}).code, 0);
  }
  ASSERT_EQ(run({"--seed", "7", "fit", "--corpus", corpus(), "--embeddings", embeddings(), "--out", (dir / "c").string()}).code,
            0);
  EXPECT_EQ(text::read_file(dir / "a/labels.csv"), text::read_file(dir / "b/labels.csv"));
  EXPECT_EQ(text::read_file(dir / "a/reduced.emb"), text::read_file(dir / "b/reduced.emb"));
  EXPECT_NE(text::read_file(dir / "a/reduced.emb"), text::read_file(dir / "c/reduced.emb"));
  const auto topics = nlohmann::json::parse(text::read_file(dir / "c/topics.json"));
  EXPECT_EQ(topics["seed"], 7);
}

TEST(Cli, SweepAndPlots) {
  const auto dir = scratch("sweep");
  ASSERT_EQ(run({"fit", "--corpus", corpus(), "--embeddings", embeddings(), "--out", (dir / "m").string()}).code, 0);
  const auto n_topics = cli::read_model_dir(dir / "m").topics.size();
  const auto r = run({"sweep", "--model-dir", (dir / "m").string(), "--out", (dir / "sweep.csv").string(),
                      "--save-models", (dir / "ks").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = text::read_lines(dir / "sweep.csv");
  ASSERT_EQ(lines.size(), n_topics);  // header + K = 2..n
  EXPECT_EQ(lines[0], "K,topic_diversity,coherence_cv");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    EXPECT_EQ(std::stoi(lines[i]), static_cast<int>(i) + 1);
    EXPECT_TRUE(fs::exists(dir / "ks" / ("k" + std::to_string(i + 1)) / "topics.json"));
  }

  EXPECT_EQ(run({"plot", "sweep", "--csv", (dir / "sweep.csv").string(), "--out", (dir / "s.svg").string()}).code, 0);
  EXPECT_EQ(run({"plot", "scatter", "--model-dir", (dir / "m").string(), "--out", (dir / "p.svg").string()}).code, 0);
  EXPECT_NE(text::read_file(dir / "p.svg").find("<circle"), std::string::npos);
}

TEST(Cli, BarsOnOneTopicModel) {
  const auto dir = scratch("bars");
  const auto inputs = cli::load_inputs(corpus(), embeddings(), topics::Stopwords::builtin());
  const std::vector<int> all_one(inputs.segment_ids.size(), 0);
  cli::FitResult one{topics::represent(inputs, all_one, {}), {}};
  ASSERT_EQ(one.model.topics.size(), 1u);
  cli::write_model_dir(dir / "m", one, nlohmann::json::object());
  const auto r = run({"plot", "bars", "--model-dir", (dir / "m").string(), "--out", (dir / "bars.svg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto svg = text::read_file(dir / "bars.svg");
  std::size_t bars = 0;
  for (auto p = svg.find("class=\"bar\""); p != std::string::npos; p = svg.find("class=\"bar\"", p + 1)) ++bars;
  EXPECT_EQ(bars, 15u);
}

TEST(Cli, EvalDetectMatchesFixture) {
  const auto dir = scratch("detect");
  const auto r = run({"eval-detect", "--pred", oracle::data("detect/pred.jsonl").string(), "--gt",
                      oracle::data("detect/gt.jsonl").string(), "--out", (dir / "r.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = lextopic::MetricReport::from_json(nlohmann::json::parse(text::read_file(dir / "r.json")));
  const auto expected = nlohmann::json::parse(text::read_file(oracle::data("detect/expected.json")));
  EXPECT_NEAR(report.at("mAP"), expected["mAP"].get<double>(), 1e-9);
}

TEST(Cli, IngestAnonymizeAndValidate) {
  const auto dir = scratch("ingest");
  auto r = run({"ingest", "--in", oracle::data("synthetic/pages").string(), "--out", (dir / "seg.jsonl").string(), "--stats",
                (dir / "stats.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run({"validate", "segments", (dir / "seg.jsonl").string()}).code, 0);

  r = run({"anonymize", "--corpus", oracle::data("anonymize/segments.jsonl").string(), "--spans",
           oracle::data("anonymize/spans.jsonl").string(), "--out", (dir / "anon.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("PERSONA\t"), std::string::npos);
  EXPECT_EQ(run({"validate", "spans", oracle::data("anonymize/spans.jsonl").string()}).code, 0);
  r = run({"validate", "emb", embeddings()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "ok\temb\t200\n");
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  EXPECT_EQ(run({"validate", "emb", (dir / "nope.emb").string()}).code, 2);
  EXPECT_EQ(run({"fit", "--corpus", corpus()}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
  text::write_file(dir / "bad.jsonl", "{\"segment_id\": 3}\n");
  EXPECT_EQ(run({"validate", "segments", (dir / "bad.jsonl").string()}).code, 1);
  text::write_file(dir / "bad.ini", "[umap]\nwhatever = 1\n");
  EXPECT_EQ(run({"fit", "--corpus", corpus(), "--embeddings", embeddings(), "--config", (dir / "bad.ini").string(), "--out",
                 (dir / "m").string()})
                .code,
            1);
}
