#include "lextopic/cli.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "lextopic/anonymize.hpp"
#include "lextopic/cluster.hpp"
#include "lextopic/corpus.hpp"
#include "lextopic/error.hpp"
#include "lextopic/eval_detect.hpp"
#include "lextopic/eval_text.hpp"
#include "lextopic/gen_eval.hpp"
#include "lextopic/interpret.hpp"
#include "lextopic/plot.hpp"
#include "lextopic/reduce.hpp"
#include "lextopic/text.hpp"
#include "lextopic/topic_eval.hpp"

namespace lextopic::cli {

namespace fs = std::filesystem;
using nlohmann::json;

topics::TopicInputs load_inputs(const fs::path& corpus_path, const fs::path& embeddings_path,
                                const topics::Stopwords& stopwords) {
  const auto segments = corpus::read_segments(corpus_path);
  if (segments.empty()) throw corpus::EmptyCorpusError(corpus_path.string() + ": no segments");
  const auto all = embed::read_embeddings(embeddings_path);

  std::unordered_map<std::string_view, std::size_t> row_of;
  for (std::size_t i = 0; i < all.rows(); ++i) row_of.emplace(all.ids()[i], i);
  std::vector<std::size_t> rows;
  std::vector<std::string> ids, texts;
  for (const auto& s : segments) {
    auto it = row_of.find(s.segment_id);
    if (it == row_of.end()) {
      throw ValidationError(embeddings_path.string() + ": no embedding for segment " + s.segment_id);
    }
    rows.push_back(it->second);
    ids.push_back(s.segment_id);
    texts.push_back(s.text);
  }
  return topics::TopicInputs::make(std::move(ids), std::move(texts), all.select(rows), stopwords);
}

FitResult fit(const topics::TopicInputs& inputs, const config::ToolkitConfig& config) {
  FitResult result;
  result.reduced = reduce::fit_transform(inputs.embeddings, config.umap);
  const auto clusters = cluster::hdbscan(result.reduced, config.hdbscan);
  result.model = topics::represent(inputs, clusters.labels, config.topics);
  return result;
}

void write_model_dir(const fs::path& dir, const FitResult& result, const json& provenance) {
  fs::create_directories(dir);
  topics::write_labels_csv(dir / "labels.csv", result.model);
  auto j = topics::topics_to_json(result.model);
  for (const auto& [key, value] : provenance.items()) j[key] = value;
  text::write_file(dir / "topics.json", j.dump(2) + "\n");
  if (result.reduced.rows() > 0) embed::write_embeddings(result.reduced, dir / "reduced.emb");
}

ModelDir read_model_dir(const fs::path& dir) {
  ModelDir m;
  const auto topics_path = dir / "topics.json";
  try {
    m.topics_json = json::parse(text::read_file(topics_path));
  } catch (const json::parse_error& e) {
    throw ValidationError(topics_path.string() + ": " + e.what());
  }
  m.topics = topics::topics_from_json(m.topics_json);
  for (auto& [id, label] : topics::read_labels_csv(dir / "labels.csv")) {
    m.segment_ids.push_back(std::move(id));
    m.labels.push_back(label);
  }
  return m;
}

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::uint64_t seed = 42;
};

config::ToolkitConfig load_config(const std::string& path, std::uint64_t seed) {
  auto cfg = path.empty() ? config::ToolkitConfig{} : config::ToolkitConfig::load(path);
  cfg.umap.seed = seed;
  return cfg;
}

std::string absolute(const std::string& p) { return p.empty() ? p : fs::absolute(p).lexically_normal().string(); }

struct ModelSession {
  ModelDir dir;
  config::ToolkitConfig config;
  topics::TopicInputs inputs;
  std::vector<int> labels;
};

// Reloads the inputs recorded by `fit` and aligns the stored labels with them.
ModelSession open_model(const fs::path& model_dir, std::uint64_t seed) {
  ModelSession s;
  s.dir = read_model_dir(model_dir);
  const auto& prov = s.dir.topics_json;
  if (!prov.contains("inputs")) throw ValidationError((model_dir / "topics.json").string() + ": no inputs recorded");
  const auto& in = prov["inputs"];
  s.config = load_config(in.value("config", std::string()), prov.value("seed", seed));
  s.inputs = load_inputs(in.at("corpus").get<std::string>(), in.at("embeddings").get<std::string>(),
                         s.config.stopwords());
  if (s.inputs.segment_ids != s.dir.segment_ids) {
    throw ValidationError((model_dir / "labels.csv").string() + ": segment ids do not match the recorded corpus");
  }
  s.labels = s.dir.labels;
  return s;
}

void print_report(Context& ctx, const MetricReport& report, const std::string& out_path) {
  ctx.out << report.to_text();
  for (const auto& w : report.warnings) ctx.err << "warning: " << w << "\n";
  if (!out_path.empty()) text::write_file(out_path, report.to_json().dump(2) + "\n");
}

std::set<corpus::ElementClass> parse_classes(const std::string& list) {
  std::set<corpus::ElementClass> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto name = text::trim(item);
    if (!name.empty()) out.insert(corpus::parse_element_class(name));
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  CLI::App app{"Topic modeling and evaluation toolkit for anonymized legal text", "lextopic"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", ctx.seed, "Seed for every random choice")->default_val(42);

  std::function<void()> action;

  // ingest
  struct {
    std::string in, out, drop = "Title,Section-header,Page-footer", stats;
    double min_quantile = 0.25;
    bool anonymized = false;
  } ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Page JSON collection to a segment table");
  c_ingest->add_option("--in", ingest.in, "Collection root (<root>/<doc>/<page>.json)")->required();
  c_ingest->add_option("--out", ingest.out, "Segment JSONL output")->required();
  c_ingest->add_option("--drop-classes", ingest.drop, "Comma-separated element classes to drop")->capture_default_str();
  c_ingest->add_option("--min-quantile", ingest.min_quantile, "Drop segments shorter than this word-count quantile")
      ->capture_default_str();
  c_ingest->add_flag("--anonymized", ingest.anonymized, "Use anonymized_text instead of text");
  c_ingest->add_option("--stats", ingest.stats, "Write corpus statistics JSON here");
  c_ingest->callback([&] {
    action = [&] {
      auto pages = corpus::load_collection(ingest.in);
      for (auto& p : pages) p.page.elements = corpus::reading_order(p.page.elements);
      corpus::FilterOptions opts;
      opts.drop_classes = parse_classes(ingest.drop);
      opts.min_quantile = ingest.min_quantile;
      opts.use_anonymized = ingest.anonymized;
      const auto segments = corpus::filter_corpus(pages, opts);
      corpus::write_segments(ingest.out, segments);
      const auto stats = corpus::corpus_stats(segments);
      if (!ingest.stats.empty()) text::write_file(ingest.stats, corpus::to_json(stats).dump(2) + "\n");
      ctx.out << "segments\t" << stats.segments << "\ndocuments\t" << stats.documents << "\npages\t" << stats.pages
              << "\n";
    };
  });

  // anonymize
  struct {
    std::string corpus, spans, out;
    double threshold = anonymize::kDefaultThreshold;
  } anon;
  auto* c_anon = app.add_subcommand("anonymize", "Replace entity spans with placeholder tags");
  c_anon->add_option("--corpus", anon.corpus, "Segment JSONL")->required();
  c_anon->add_option("--spans", anon.spans, "Span JSONL")->required();
  c_anon->add_option("--threshold", anon.threshold, "Minimum span score")->capture_default_str();
  c_anon->add_option("--out", anon.out, "Masked segment JSONL")->required();
  c_anon->callback([&] {
    action = [&] {
      auto segments = corpus::read_segments(anon.corpus);
      std::map<std::string, std::vector<anonymize::EntitySpan>> by_segment;
      for (auto& s : anonymize::read_spans(anon.spans)) by_segment[s.segment_id].push_back(std::move(s));
      std::map<anonymize::EntityLabel, std::size_t> counts;
      for (auto& seg : segments) {
        auto it = by_segment.find(seg.segment_id);
        if (it == by_segment.end()) continue;
        const auto kept = anonymize::resolve_overlaps(it->second, anon.threshold, text::scalar_length(seg.text));
        for (const auto& s : kept) ++counts[s.label];
        seg.text = anonymize::mask(seg.text, kept);
        seg.word_count = text::word_count(seg.text);
        by_segment.erase(it);
      }
      if (!by_segment.empty()) {
        throw ValidationError(anon.spans + ": span refers to unknown segment " + by_segment.begin()->first);
      }
      corpus::write_segments(anon.out, segments);
      const auto& tags = anonymize::TagTable::defaults();
      for (auto label : anonymize::kAllLabels) ctx.out << tags.name(label) << "\t" << counts[label] << "\n";
    };
  });

  // fit
  struct {
    std::string corpus, embeddings, config, out;
  } fit_args;
  auto* c_fit = app.add_subcommand("fit", "Reduce, cluster and describe topics");
  c_fit->add_option("--corpus", fit_args.corpus, "Segment JSONL")->required();
  c_fit->add_option("--embeddings", fit_args.embeddings, "EMB1 segment embeddings")->required();
  c_fit->add_option("--config", fit_args.config, "INI config (defaults: lextopic config-defaults)");
  c_fit->add_option("--out", fit_args.out, "Model directory")->required();
  c_fit->callback([&] {
    action = [&] {
      const auto cfg = load_config(fit_args.config, ctx.seed);
      const auto inputs = load_inputs(fit_args.corpus, fit_args.embeddings, cfg.stopwords());
      const auto result = fit(inputs, cfg);
      const json provenance = {{"config", cfg.to_json()},
                               {"seed", ctx.seed},
                               {"inputs",
                                {{"corpus", absolute(fit_args.corpus)},
                                 {"embeddings", absolute(fit_args.embeddings)},
                                 {"config", absolute(fit_args.config)}}}};
      write_model_dir(fit_args.out, result, provenance);
      ctx.out << "topics\t" << result.model.topics.size() << "\nnoise\t" << result.model.noise_count() << "\n";
    };
  });

  // sweep
  struct {
    std::string model_dir, out, save_models;
    int kmin = 2, kmax = 50;
  } sw;
  auto* c_sweep = app.add_subcommand("sweep", "Topic diversity and coherence for K = kmin..kmax");
  c_sweep->add_option("--model-dir", sw.model_dir, "Directory written by fit")->required();
  c_sweep->add_option("--kmin", sw.kmin)->capture_default_str();
  c_sweep->add_option("--kmax", sw.kmax)->capture_default_str();
  c_sweep->add_option("--out", sw.out, "CSV output")->required();
  c_sweep->add_option("--save-models", sw.save_models, "Also write each reduced model to <dir>/k<K>");
  c_sweep->callback([&] {
    action = [&] {
      const auto session = open_model(sw.model_dir, ctx.seed);
      const auto result = topic_eval::sweep(session.inputs, session.labels, session.config.sweep_config(), sw.kmin, sw.kmax);
      text::write_file(sw.out, topic_eval::sweep_csv(result.rows));
      if (!sw.save_models.empty()) {
        for (std::size_t i = 0; i < result.rows.size(); ++i) {
          FitResult r{result.models[i], {}};
          write_model_dir(fs::path(sw.save_models) / ("k" + std::to_string(result.rows[i].k)), r,
                          {{"inputs", session.dir.topics_json["inputs"]}, {"seed", session.dir.topics_json.value("seed", ctx.seed)}});
        }
      }
      ctx.out << topic_eval::sweep_csv(result.rows);
    };
  });

  // eval-detect
  struct {
    std::string pred, gt, mode = "50-95", out;
  } det;
  auto* c_det = app.add_subcommand("eval-detect", "Mean average precision of layout detections");
  c_det->add_option("--pred", det.pred, "Prediction JSONL")->required();
  c_det->add_option("--gt", det.gt, "Ground-truth JSONL")->required();
  c_det->add_option("--mode", det.mode, "50 or 50-95")->check(CLI::IsMember({"50", "50-95"}))->capture_default_str();
  c_det->add_option("--out", det.out, "Report JSON");
  c_det->callback([&] {
    action = [&] {
      const auto files = eval_detect::load_detection_files(det.pred, det.gt);
      const std::vector<double> thresholds = det.mode == "50" ? std::vector<double>{0.5} : eval_detect::coco_thresholds();
      auto report = eval_detect::mean_ap(files.predictions, files.ground_truth, thresholds);
      report.config["classes"] = files.class_names;
      report.config["mode"] = det.mode;
      print_report(ctx, report, det.out);
    };
  });

  // eval-ocr
  struct {
    std::string pairs, out;
    eval_text::NormalizeOptions norm;
  } ocr;
  auto* c_ocr = app.add_subcommand("eval-ocr", "Character and word error rates");
  c_ocr->add_option("--pairs", ocr.pairs, "TSV of reference<TAB>hypothesis")->required();
  c_ocr->add_flag("--lowercase", ocr.norm.lowercase);
  c_ocr->add_flag("--strip-punctuation", ocr.norm.strip_punctuation);
  c_ocr->add_flag("--collapse-whitespace", ocr.norm.collapse_whitespace);
  c_ocr->add_option("--out", ocr.out, "Report JSON");
  c_ocr->callback([&] {
    action = [&] {
      const auto pairs = eval_text::read_pairs_tsv(ocr.pairs);
      print_report(ctx, eval_text::corpus_error_rates(pairs, ocr.norm), ocr.out);
    };
  });

  // bertscore
  struct {
    std::string manifest, out;
  } bs;
  auto* c_bs = app.add_subcommand("bertscore", "BERTScore over token embedding files");
  c_bs->add_option("--manifest", bs.manifest, "CSV: system,topic_id,candidate_emb_path,reference_emb_path")->required();
  c_bs->add_option("--out", bs.out, "Report JSON");
  c_bs->callback([&] { action = [&] { print_report(ctx, gen_eval::batch_report(bs.manifest), bs.out); }; });

  // interpret
  struct {
    std::string model_dir, provider, task = "label", config, out;
  } ip;
  auto* c_ip = app.add_subcommand("interpret", "Ask a chat model for topic labels or summaries");
  c_ip->add_option("--model-dir", ip.model_dir, "Directory written by fit")->required();
  c_ip->add_option("--provider", ip.provider, "Name of an [llm.<name>] config section")->required();
  c_ip->add_option("--task", ip.task)->check(CLI::IsMember({"label", "summary"}))->capture_default_str();
  c_ip->add_option("--config", ip.config, "Config holding the provider section")->required();
  c_ip->add_option("--out", ip.out, "Results JSONL (default <model-dir>/interpret.jsonl)");
  c_ip->callback([&] {
    action = [&] {
      const auto cfg = load_config(ip.config, ctx.seed);
      auto it = cfg.llm.find(ip.provider);
      if (it == cfg.llm.end()) throw ValidationError(ip.config + ": no [llm." + ip.provider + "] section");
      const auto session = open_model(ip.model_dir, ctx.seed);
      std::unordered_map<std::string_view, std::size_t> row_of;
      for (std::size_t i = 0; i < session.inputs.segment_ids.size(); ++i) row_of.emplace(session.inputs.segment_ids[i], i);

      std::vector<interpret::TopicPrompt> prompts;
      for (const auto& t : session.dir.topics) {
        interpret::TopicPrompt p;
        p.topic_id = t.id;
        for (const auto& w : t.words) p.keywords.push_back(w.term);
        for (const auto& id : t.representative_docs) {
          auto r = row_of.find(id);
          if (r == row_of.end()) throw ValidationError("representative doc " + id + " is not in the corpus");
          p.docs.push_back(session.inputs.texts[r->second]);
        }
        prompts.push_back(std::move(p));
      }
      const fs::path results = ip.out.empty() ? fs::path(ip.model_dir) / "interpret.jsonl" : fs::path(ip.out);
      interpret::InterpretOptions opts;
      opts.parallelism = it->second.parallelism;
      const auto written =
          interpret::interpret_topics(it->second.provider, interpret::parse_task(ip.task), prompts, results, opts);
      for (const auto& r : written) {
        ctx.out << r.topic_id << "\t" << (r.conforming ? "" : "[nonconforming] ") << r.output << "\n";
      }
      ctx.out << "new\t" << written.size() << "\nskipped\t" << prompts.size() - written.size() << "\n";
    };
  });

  // plot
  struct {
    std::string kind, model_dir, csv, out;
  } pl;
  auto* c_pl = app.add_subcommand("plot", "SVG charts: scatter, bars or sweep");
  c_pl->add_option("kind", pl.kind)->required()->check(CLI::IsMember({"scatter", "bars", "sweep"}));
  c_pl->add_option("--model-dir", pl.model_dir, "Directory written by fit (scatter, bars)");
  c_pl->add_option("--csv", pl.csv, "Sweep CSV (sweep)");
  c_pl->add_option("--out", pl.out, "SVG output")->required();
  c_pl->callback([&] {
    action = [&] {
      std::string svg;
      if (pl.kind == "sweep") {
        if (pl.csv.empty()) throw ValidationError("plot sweep needs --csv");
        std::vector<topic_eval::SweepRow> rows;
        const auto lines = text::read_lines(pl.csv);
        for (std::size_t i = 1; i < lines.size(); ++i) {
          if (lines[i].empty()) continue;
          topic_eval::SweepRow r;
          if (std::sscanf(lines[i].c_str(), "%d,%lf,%lf", &r.k, &r.topic_diversity, &r.coherence_cv) != 3) {
            throw ValidationError(pl.csv + ":" + std::to_string(i + 1) + ": expected K,topic_diversity,coherence_cv");
          }
          rows.push_back(r);
        }
        svg = plot::sweep_svg(rows);
      } else if (pl.model_dir.empty()) {
        throw ValidationError("plot " + pl.kind + " needs --model-dir");
      } else if (pl.kind == "bars") {
        svg = plot::bars_svg(read_model_dir(pl.model_dir).topics);
      } else {
        const auto session = open_model(pl.model_dir, ctx.seed);
        auto umap = session.config.umap;
        umap.n_components = 2;
        svg = plot::scatter_svg(reduce::fit_transform(session.inputs.embeddings, umap), session.labels);
      }
      text::write_file(pl.out, svg);
    };
  });

  // validate
  struct {
    std::string kind, path;
  } val;
  auto* c_val = app.add_subcommand("validate", "Check a file against its schema");
  c_val->add_option("kind", val.kind)->required()->check(CLI::IsMember({"emb", "spans", "segments", "pages"}));
  c_val->add_option("path", val.path)->required();
  c_val->callback([&] {
    action = [&] {
      std::size_t n = 0;
      if (val.kind == "emb") {
        n = embed::read_embeddings(val.path).rows();
      } else if (val.kind == "spans") {
        n = anonymize::read_spans(val.path).size();
      } else if (val.kind == "segments") {
        n = corpus::read_segments(val.path).size();
      } else if (fs::is_directory(val.path)) {
        n = corpus::load_collection(val.path).size();
      } else {
        corpus::parse_page(text::read_file(val.path));
        n = 1;
      }
      ctx.out << "ok\t" << val.kind << "\t" << n << "\n";
    };
  });

  auto* c_defaults = app.add_subcommand("config-defaults", "Print the default configuration");
  c_defaults->callback([&] { action = [&] { ctx.out << config::default_config_text(); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (action) action();
    return 0;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace lextopic::cli
