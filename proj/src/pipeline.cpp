#include "taxomatic/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "taxomatic/corpus.hpp"
#include "taxomatic/evaluation.hpp"
#include "taxomatic/inference.hpp"
#include "taxomatic/jsonl.hpp"
#include "taxomatic/prompts.hpp"
#include "taxomatic/tei.hpp"

namespace taxomatic::pipeline {

fs::path RunDirectory::run_file(TaskKind task, const std::string& model,
                                const std::string& strategy) const {
  const auto* task_dir = task == TaskKind::relevance ? "relevance" : "extraction";
  return runs_dir() / task_dir / (model + "__" + strategy + ".jsonl");
}

Providers make_providers(const config::PipelineConfig& cfg) {
  gateway::GatewayConfig gw_cfg;
  gw_cfg.max_concurrency = cfg.concurrency;

  std::shared_ptr<gateway::ChatProvider> chat;
  std::shared_ptr<gateway::EmbeddingProvider> embedder;
  if (cfg.endpoints.provider == "mock") {
    gw_cfg.requests_per_second = 100000.0;  // no throttling needed offline
    gw_cfg.retry.initial_backoff = std::chrono::milliseconds(1);
    chat = std::make_shared<gateway::MockChatProvider>();
    embedder = std::make_shared<gateway::MockEmbeddingProvider>(
        static_cast<std::size_t>(cfg.embedding_dim), cfg.random_seed);
  } else {
    chat = std::make_shared<gateway::HttpChatProvider>(
        cfg.endpoints.chat_base_url, cfg.endpoints.chat_path, cfg.endpoints.chat_api_key_env);
    embedder = std::make_shared<gateway::HttpEmbeddingProvider>(
        cfg.endpoints.embedding_base_url, cfg.endpoints.embedding_path,
        cfg.endpoints.embedding_model, static_cast<std::size_t>(cfg.embedding_dim),
        cfg.endpoints.embedding_api_key_env);
  }
  return Providers{std::make_shared<gateway::Gateway>(chat, embedder, gw_cfg)};
}

void write_config_snapshot(const RunDirectory& dir, const config::PipelineConfig& cfg) {
  fs::create_directories(dir.root);
  if (!fs::exists(dir.config_snapshot())) {
    jsonl::write_text(dir.config_snapshot(), config::config_to_json(cfg).dump(2) + "\n");
  }
}

std::map<std::string, GroundTruthEntry> load_ground_truth(const fs::path& path) {
  std::map<std::string, GroundTruthEntry> out;
  for (auto& entry : jsonl::read_file<GroundTruthEntry>(path)) {
    out[entry.paper_id] = std::move(entry);
  }
  return out;
}

namespace {

ModelSpec model_spec_for(const config::PipelineConfig& cfg, const std::string& name) {
  ModelSpec spec;
  spec.provider = cfg.endpoints.provider == "mock" ? ProviderKind::mock
                                                   : ProviderKind::openai_compatible;
  spec.model_name = name;
  spec.temperature = 0.0;
  return spec;
}

inference::InferenceOptions inference_options(const config::PipelineConfig& cfg) {
  inference::InferenceOptions opt;
  opt.repetitions = cfg.repetitions;
  opt.few_shot_k = static_cast<std::size_t>(cfg.few_shot_k);
  opt.num_clusters = static_cast<std::size_t>(cfg.num_clusters);
  opt.per_label = static_cast<std::size_t>(cfg.few_shot_k) / 2;
  opt.seed = cfg.random_seed;
  opt.text_budget = static_cast<std::size_t>(cfg.text_budget);
  opt.pinned_example_ids = cfg.pinned_example_ids;
  return opt;
}

StageStatus fail(const std::string& message) { return {false, message, 0, 0}; }

std::vector<StructuredDocument> load_docs_or_fail(const RunDirectory& dir, StageStatus& status) {
  if (!fs::exists(dir.docs_file())) {
    status = fail("no parsed documents found; run cmd_ingest first (or pre-seed " +
                  dir.docs_file().string() + ")");
    return {};
  }
  return jsonl::read_file<StructuredDocument>(dir.docs_file());
}

}  // namespace

StageStatus cmd_expand(const config::PipelineConfig& cfg, const RunDirectory& dir,
                       Providers& providers, bool resume) {
  write_config_snapshot(dir, cfg);
  if (resume && fs::exists(dir.keywords_file())) {
    return {true, "keywords already present", 0, 1};
  }
  if (cfg.seed_keywords.empty()) return fail("config.seed_keywords is empty");

  SeedKeywordSet seeds{cfg.seed_keywords, cfg.expansions_per_seed};
  auto expander = [&](const std::string& seed, int count) {
    CompletionRequest request;
    request.model = model_spec_for(cfg, cfg.models.front());
    request.prompt_text = "Generate " + std::to_string(count) +
                          " terms closely related to the research keyword \"" + seed +
                          "\". Output one term per line, nothing else.";
    request.request_id = "expand|" + seed;
    auto result = providers.gw->complete(request);
    if (!result.ok()) throw std::runtime_error(result.error->message);
    std::vector<std::string> terms;
    std::istringstream stream(result.value->text);
    std::string line;
    while (std::getline(stream, line)) {
      if (!line.empty()) terms.push_back(line);
    }
    return terms;
  };
  auto result = corpus::expand_keywords(seeds, expander);
  if (result.partial) return fail(result.error);
  jsonl::write_text(dir.keywords_file(), json(result.keywords).dump(2) + "\n");
  jsonl::write_text(dir.marker("expand"), "done\n");
  return {true, std::to_string(result.keywords.size()) + " keywords", result.keywords.size(), 0};
}

StageStatus cmd_crawl(const config::PipelineConfig& cfg, const RunDirectory& dir, bool resume) {
  write_config_snapshot(dir, cfg);
  if (!fs::exists(dir.keywords_file())) {
    return fail("no keyword list found; run cmd_expand first");
  }
  if (resume && fs::exists(dir.marker("crawl"))) {
    return {true, "crawl already complete", 0, 1};
  }
  const auto keywords =
      json::parse(jsonl::read_text(dir.keywords_file())).get<std::vector<std::string>>();
  auto client = corpus::make_semantic_scholar_client(cfg.endpoints.search_base_url,
                                                     cfg.endpoints.search_api_key_env);
  std::vector<PaperRecord> all;
  for (const auto& keyword : keywords) {
    auto records = corpus::search_papers(
        keyword, static_cast<std::size_t>(cfg.crawl_limit_per_keyword), client);
    all.insert(all.end(), records.begin(), records.end());
  }
  auto manifest = corpus::dedupe_and_filter(all, cfg.min_citations_crawl);
  manifest.keyword_list_digest = corpus::keyword_digest(keywords);
  jsonl::write_file(dir.manifest_file(), manifest.records);

  auto outcomes = corpus::download_pdfs(manifest, dir.pdf_dir(), corpus::make_http_fetcher(),
                                        cfg.concurrency);
  std::size_t downloaded = 0;
  for (const auto& o : outcomes) {
    if (o.status == corpus::DownloadStatus::success) ++downloaded;
  }
  jsonl::write_text(dir.marker("crawl"), "done\n");
  return {true,
          std::to_string(manifest.records.size()) + " records, " +
              std::to_string(downloaded) + " pdfs downloaded",
          manifest.records.size(), 0};
}

StageStatus cmd_ingest(const config::PipelineConfig& cfg, const RunDirectory& dir, bool resume) {
  write_config_snapshot(dir, cfg);
  if (!fs::exists(dir.manifest_file())) {
    return fail("no corpus manifest found; run cmd_crawl first");
  }
  if (resume && fs::exists(dir.docs_file())) {
    return {true, "documents already present", 0, 1};
  }
  CorpusManifest manifest;
  manifest.records = jsonl::read_file<PaperRecord>(dir.manifest_file());

  auto service = tei::make_grobid_service(cfg.endpoints.grobid_base_url);
  std::vector<StructuredDocument> docs;
  fs::create_directories(dir.tei_dir());
  auto report = tei::batch_process(
      manifest, dir.pdf_dir(), service,
      [&](const TeiArtifact& artifact) {
        jsonl::write_text(dir.tei_dir() / (artifact.paper_id + ".xml"), artifact.xml_bytes);
      },
      [&](const StructuredDocument& doc) { docs.push_back(doc); },
      cfg.concurrency);
  jsonl::write_file(dir.docs_file(), docs);

  json report_json{{"succeeded", report.succeeded},
                   {"failed", report.failed},
                   {"service_configuration", report.service_configuration},
                   {"entries", json::array()}};
  if (report.success_ratio) report_json["success_ratio"] = *report.success_ratio;
  for (const auto& e : report.entries) {
    report_json["entries"].push_back(
        {{"paper_id", e.paper_id},
         {"status", e.status == TeiStatus::ok                ? "ok"
                    : e.status == TeiStatus::service_error   ? "service_error"
                                                             : "parse_error"},
         {"error", e.error_message}});
  }
  jsonl::write_text(dir.ingest_report(), report_json.dump(2) + "\n");
  jsonl::write_text(dir.marker("ingest"), "done\n");
  return {true, std::to_string(report.succeeded) + "/" + std::to_string(report.entries.size()) +
                    " documents parsed",
          report.succeeded, 0};
}

StageStatus cmd_classify(const config::PipelineConfig& cfg, const RunDirectory& dir,
                         Providers& providers, bool resume) {
  write_config_snapshot(dir, cfg);
  StageStatus status{true, "", 0, 0};
  const auto docs = load_docs_or_fail(dir, status);
  if (!status.ok) return status;
  if (cfg.ground_truth_path.empty()) return fail("config.ground_truth_path is empty");
  const auto truth = load_ground_truth(cfg.ground_truth_path);

  // classification targets: annotated papers with a parsed document
  std::vector<StructuredDocument> targets;
  for (const auto& doc : docs) {
    if (truth.contains(doc.paper_id)) targets.push_back(doc);
  }
  if (targets.empty()) return fail("no annotated documents to classify");

  const auto options = inference_options(cfg);
  const bool needs_pool = std::any_of(
      cfg.relevance_strategies.begin(), cfg.relevance_strategies.end(), [](const auto& name) {
        return prompts::is_contextual(prompts::find_strategy(name, TaskKind::relevance));
      });
  ExamplePool pool;
  if (needs_pool) pool = inference::build_example_pool(docs, truth, *providers.gw);

  for (const auto& model_name : cfg.models) {
    const auto model = model_spec_for(cfg, model_name);
    for (const auto& strategy_name : cfg.relevance_strategies) {
      const auto& strategy = prompts::find_strategy(strategy_name, TaskKind::relevance);
      const auto out_file = dir.run_file(TaskKind::relevance, model_name, strategy_name);
      const auto expected =
          targets.size() * static_cast<std::size_t>(cfg.repetitions);
      if (resume && fs::exists(out_file) &&
          jsonl::read_file<RunRecord>(out_file).size() == expected) {
        status.units_skipped += expected;
        continue;
      }
      std::vector<RunRecord> records;
      records.reserve(expected);
      for (const auto& doc : targets) {
        auto cell = inference::classify_relevance(doc, model, strategy, pool,
                                                  *providers.gw, options);
        records.insert(records.end(), cell.begin(), cell.end());
      }
      jsonl::write_file(out_file, records);
      status.units_processed += records.size();
    }
  }
  jsonl::write_text(dir.marker("classify"), "done\n");
  status.message = std::to_string(status.units_processed) + " relevance records";
  return status;
}

StageStatus cmd_extract(const config::PipelineConfig& cfg, const RunDirectory& dir,
                        Providers& providers, bool resume) {
  write_config_snapshot(dir, cfg);
  StageStatus status{true, "", 0, 0};
  const auto docs = load_docs_or_fail(dir, status);
  if (!status.ok) return status;
  if (cfg.ground_truth_path.empty()) return fail("config.ground_truth_path is empty");
  const auto truth = load_ground_truth(cfg.ground_truth_path);

  // extraction runs over the relevant subset only
  std::vector<StructuredDocument> targets;
  for (const auto& doc : docs) {
    auto it = truth.find(doc.paper_id);
    if (it != truth.end() && it->second.relevance == RelevanceLabel::relevant) {
      targets.push_back(doc);
    }
  }
  if (targets.empty()) return fail("no relevant documents to extract from");

  const auto options = inference_options(cfg);
  const auto model = model_spec_for(cfg, cfg.extraction_model);
  for (const auto& strategy_name : cfg.extraction_strategies) {
    const auto& strategy = prompts::find_strategy(strategy_name, TaskKind::extraction);
    const auto out_file = dir.run_file(TaskKind::extraction, cfg.extraction_model, strategy_name);
    if (resume && fs::exists(out_file) &&
        jsonl::read_file<RunRecord>(out_file).size() == targets.size()) {
      status.units_skipped += targets.size();
      continue;
    }
    std::vector<RunRecord> records;
    records.reserve(targets.size());
    for (const auto& doc : targets) {
      records.push_back(inference::extract_definition(doc, model, strategy,
                                                      *providers.gw, options));
    }
    jsonl::write_file(out_file, records);
    status.units_processed += records.size();
  }
  jsonl::write_text(dir.marker("extract"), "done\n");
  status.message = std::to_string(status.units_processed) + " extraction records";
  return status;
}

StageStatus cmd_evaluate(const config::PipelineConfig& cfg, const RunDirectory& dir,
                         Providers& providers, bool /*resume*/) {
  write_config_snapshot(dir, cfg);
  if (!fs::exists(dir.runs_dir())) {
    return fail("no run records found; run cmd_classify or cmd_extract first");
  }
  if (cfg.ground_truth_path.empty()) return fail("config.ground_truth_path is empty");

  eval::EvaluationInputs inputs;
  inputs.ground_truth = load_ground_truth(cfg.ground_truth_path);
  inputs.thresholds = cfg.thresholds;
  inputs.embed = [&](const std::string& text) { return providers.gw->embed(text); };

  auto load_runs = [&](const char* task_dir, std::vector<RunRecord>& sink) {
    const auto path = dir.runs_dir() / task_dir;
    if (!fs::exists(path)) return;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      auto records = jsonl::read_file<RunRecord>(file);
      sink.insert(sink.end(), records.begin(), records.end());
    }
  };
  load_runs("relevance", inputs.relevance_records);
  load_runs("extraction", inputs.extraction_records);
  if (inputs.relevance_records.empty() && inputs.extraction_records.empty()) {
    return fail("no run records found; run cmd_classify or cmd_extract first");
  }

  const auto report = eval::build_report(inputs);

  json aggregated = json::array();
  for (const auto& a : eval::aggregate_labels(inputs.relevance_records)) {
    aggregated.push_back({{"paper_id", a.paper_id},
                          {"model_name", a.model_name},
                          {"strategy_name", a.strategy_name},
                          {"label", a.label ? json(to_string(*a.label)) : json(nullptr)},
                          {"tie_flag", a.tie_flag}});
  }
  std::string agg_lines;
  for (const auto& a : aggregated) agg_lines += a.dump() + "\n";
  jsonl::write_text(dir.aggregated_file(), agg_lines);

  jsonl::write_text(dir.report_file(), report.dump(2) + "\n");
  jsonl::write_text(dir.tables_file(), eval::render_tables(report));
  jsonl::write_text(dir.marker("evaluate"), "done\n");
  return {true, "report written to " + dir.report_file().string(),
          inputs.relevance_records.size() + inputs.extraction_records.size(), 0};
}

}  // namespace taxomatic::pipeline
