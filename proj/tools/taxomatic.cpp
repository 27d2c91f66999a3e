#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "taxomatic/config.hpp"
#include "taxomatic/jsonl.hpp"
#include "taxomatic/pipeline.hpp"
#include "taxomatic/prompts.hpp"

namespace {

using taxomatic::config::PipelineConfig;
using taxomatic::pipeline::Providers;
using taxomatic::pipeline::RunDirectory;
using taxomatic::pipeline::StageStatus;

struct CommonOptions {
  std::string config_path;
  std::string run_dir = "run";
  bool resume = false;
  std::vector<std::string> models;
  std::vector<std::string> strategies;
};

int run_stage(const CommonOptions& opts,
              const std::function<StageStatus(const PipelineConfig&, const RunDirectory&,
                                              Providers&, bool)>& stage) {
  std::string raw;
  if (!opts.config_path.empty()) {
    raw = taxomatic::jsonl::read_text(opts.config_path);
  }
  auto validated = taxomatic::config::validate_config(raw);
  if (!validated.config) {
    std::cerr << "invalid configuration:\n";
    for (const auto& e : validated.errors) std::cerr << "  - " << e << "\n";
    return 2;
  }
  auto cfg = *validated.config;
  if (!opts.models.empty()) cfg.models = opts.models;
  if (!opts.strategies.empty()) {
    cfg.relevance_strategies = opts.strategies;
    cfg.extraction_strategies.clear();
    for (const auto& s : opts.strategies) {
      try {
        taxomatic::prompts::find_strategy(s, taxomatic::TaskKind::extraction);
        cfg.extraction_strategies.push_back(s);
      } catch (const std::exception&) {
      }
    }
  }

  RunDirectory dir{opts.run_dir};
  auto providers = taxomatic::pipeline::make_providers(cfg);
  StageStatus status;
  try {
    status = stage(cfg, dir, providers, opts.resume);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!status.ok) {
    std::cerr << "error: " << status.message << "\n";
    return 1;
  }
  std::cout << status.message;
  if (status.units_skipped > 0) {
    std::cout << " (" << status.units_skipped << " units reused)";
  }
  std::cout << "\n";
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "pipeline configuration (JSON)");
  cmd->add_option("--run-dir", opts.run_dir, "run directory for stage artifacts");
  cmd->add_flag("--resume", opts.resume, "skip already completed units");
  cmd->add_option("--models", opts.models, "restrict the model roster")->delimiter(',');
  cmd->add_option("--strategies", opts.strategies, "restrict the strategy roster")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TaxoMatic: LLM-assisted definition extraction pipeline"};
  app.require_subcommand(1);
  CommonOptions opts;

  int exit_code = 0;
  auto bind = [&](const char* name, const char* help, auto stage) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, opts);
    cmd->callback([&, stage] { exit_code = run_stage(opts, stage); });
  };

  namespace pl = taxomatic::pipeline;
  bind("expand", "expand seed keywords via the LLM", pl::cmd_expand);
  bind("crawl", "search the scholarly API and download open-access PDFs",
       [](const PipelineConfig& c, const RunDirectory& d, Providers&, bool r) {
         return pl::cmd_crawl(c, d, r);
       });
  bind("ingest", "structure PDFs via GROBID and parse TEI",
       [](const PipelineConfig& c, const RunDirectory& d, Providers&, bool r) {
         return pl::cmd_ingest(c, d, r);
       });
  bind("classify", "run the relevance classification matrix", pl::cmd_classify);
  bind("extract", "run definition extraction over relevant papers", pl::cmd_extract);
  bind("evaluate", "compute metrics and emit the report", pl::cmd_evaluate);

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}
