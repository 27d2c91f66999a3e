#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "taxomatic/types.hpp"

namespace taxomatic::config {

struct ProviderEndpoints {
  std::string chat_base_url = "http://localhost:8000";
  std::string chat_path = "/v1/chat/completions";
  std::string chat_api_key_env = "TAXOMATIC_CHAT_API_KEY";
  std::string embedding_base_url = "http://localhost:8001";
  std::string embedding_path = "/v1/embeddings";
  std::string embedding_model = "all-MiniLM-L6-v2";
  std::string embedding_api_key_env = "TAXOMATIC_EMBED_API_KEY";
  std::string grobid_base_url = "http://localhost:8070";
  std::string search_base_url = "https://api.semanticscholar.org";
  std::string search_api_key_env = "S2_API_KEY";
  std::string provider = "mock";  // mock | http
};

struct PipelineConfig {
  std::vector<std::string> seed_keywords;
  int expansions_per_seed = 200;
  int crawl_limit_per_keyword = 1000;
  std::int64_t min_citations_crawl = 50;
  std::int64_t min_citations_groundtruth = 100;
  int repetitions = 3;
  std::vector<double> thresholds = {0.5, 0.6, 0.7};
  int few_shot_k = 4;
  int num_clusters = 8;
  std::vector<std::string> models = {"gpt-3.5-turbo", "mistral-7b-instruct-v0.2",
                                     "vicuna-13b-v1.5", "openchat-3.6-8b",
                                     "claude-3-sonnet"};
  std::vector<std::string> relevance_strategies;   // empty = all eight
  std::vector<std::string> extraction_strategies;  // empty = all five
  std::string extraction_model = "claude-3-sonnet";
  ProviderEndpoints endpoints;
  int text_budget = 24000;
  int concurrency = 4;
  std::uint64_t random_seed = 7;
  int embedding_dim = 384;
  std::string ground_truth_path;
  std::vector<std::string> pinned_example_ids;
};

struct ConfigResult {
  std::optional<PipelineConfig> config;
  std::vector<std::string> errors;  // field paths + messages, exhaustive
};

// Defaults applied first, then the JSON document overrides field by field.
// Violations never yield a partial config.
ConfigResult validate_config(const std::string& raw_json_text);

json config_to_json(const PipelineConfig& c);

}  // namespace taxomatic::config
