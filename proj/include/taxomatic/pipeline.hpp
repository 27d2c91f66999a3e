#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "taxomatic/config.hpp"
#include "taxomatic/gateway.hpp"
#include "taxomatic/types.hpp"

namespace taxomatic::pipeline {

namespace fs = std::filesystem;

// Stage layout inside a run directory. A stage reads only from upstream
// directories; the config snapshot is written before any stage output.
struct RunDirectory {
  fs::path root;

  fs::path config_snapshot() const { return root / "config.json"; }
  fs::path keywords_file() const { return root / "manifest" / "keywords.json"; }
  fs::path manifest_file() const { return root / "manifest" / "corpus.jsonl"; }
  fs::path pdf_dir() const { return root / "pdfs"; }
  fs::path tei_dir() const { return root / "tei"; }
  fs::path docs_file() const { return root / "docs" / "documents.jsonl"; }
  fs::path ingest_report() const { return root / "docs" / "ingest_report.json"; }
  fs::path runs_dir() const { return root / "runs"; }
  fs::path aggregated_file() const { return root / "runs" / "aggregated_labels.jsonl"; }
  fs::path report_file() const { return root / "reports" / "report.json"; }
  fs::path tables_file() const { return root / "reports" / "tables.txt"; }
  fs::path marker(const std::string& stage) const { return root / (stage + ".done"); }

  fs::path run_file(TaskKind task, const std::string& model,
                    const std::string& strategy) const;
};

struct Providers {
  std::shared_ptr<gateway::Gateway> gw;
};

// Built from config: mock providers by default, HTTP adapters otherwise.
Providers make_providers(const config::PipelineConfig& cfg);

struct StageStatus {
  bool ok = true;
  std::string message;
  std::size_t units_processed = 0;
  std::size_t units_skipped = 0;  // --resume reuse
};

void write_config_snapshot(const RunDirectory& dir, const config::PipelineConfig& cfg);

StageStatus cmd_expand(const config::PipelineConfig& cfg, const RunDirectory& dir,
                       Providers& providers, bool resume);
StageStatus cmd_crawl(const config::PipelineConfig& cfg, const RunDirectory& dir,
                      bool resume);
StageStatus cmd_ingest(const config::PipelineConfig& cfg, const RunDirectory& dir,
                       bool resume);
StageStatus cmd_classify(const config::PipelineConfig& cfg, const RunDirectory& dir,
                         Providers& providers, bool resume);
StageStatus cmd_extract(const config::PipelineConfig& cfg, const RunDirectory& dir,
                        Providers& providers, bool resume);
StageStatus cmd_evaluate(const config::PipelineConfig& cfg, const RunDirectory& dir,
                         Providers& providers, bool resume);

std::map<std::string, GroundTruthEntry> load_ground_truth(const fs::path& path);

}  // namespace taxomatic::pipeline
