#include "taxomatic/config.hpp"

#include <algorithm>
#include <set>

#include "taxomatic/prompts.hpp"

namespace taxomatic::config {

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& target) {
  if (j.contains(key)) j.at(key).get_to(target);
}

std::set<std::string> known_strategy_names(TaskKind task) {
  std::set<std::string> names;
  const auto& list = task == TaskKind::relevance ? prompts::relevance_strategies()
                                                 : prompts::extraction_strategies();
  for (const auto& s : list) names.insert(s.name);
  return names;
}

}  // namespace

ConfigResult validate_config(const std::string& raw_json_text) {
  ConfigResult result;
  PipelineConfig cfg;

  json j;
  if (raw_json_text.empty() || raw_json_text.find_first_not_of(" \t\r\n") == std::string::npos) {
    j = json::object();
  } else {
    try {
      j = json::parse(raw_json_text);
    } catch (const std::exception& e) {
      result.errors.push_back(std::string("config: not valid JSON: ") + e.what());
      return result;
    }
  }

  try {
    read_field(j, "seed_keywords", cfg.seed_keywords);
    read_field(j, "expansions_per_seed", cfg.expansions_per_seed);
    read_field(j, "crawl_limit_per_keyword", cfg.crawl_limit_per_keyword);
    read_field(j, "min_citations_crawl", cfg.min_citations_crawl);
    read_field(j, "min_citations_groundtruth", cfg.min_citations_groundtruth);
    read_field(j, "repetitions", cfg.repetitions);
    read_field(j, "thresholds", cfg.thresholds);
    read_field(j, "few_shot_k", cfg.few_shot_k);
    read_field(j, "num_clusters", cfg.num_clusters);
    read_field(j, "models", cfg.models);
    read_field(j, "relevance_strategies", cfg.relevance_strategies);
    read_field(j, "extraction_strategies", cfg.extraction_strategies);
    read_field(j, "extraction_model", cfg.extraction_model);
    read_field(j, "text_budget", cfg.text_budget);
    read_field(j, "concurrency", cfg.concurrency);
    read_field(j, "random_seed", cfg.random_seed);
    read_field(j, "embedding_dim", cfg.embedding_dim);
    read_field(j, "ground_truth_path", cfg.ground_truth_path);
    read_field(j, "pinned_example_ids", cfg.pinned_example_ids);
    if (j.contains("endpoints")) {
      const auto& e = j.at("endpoints");
      read_field(e, "chat_base_url", cfg.endpoints.chat_base_url);
      read_field(e, "chat_path", cfg.endpoints.chat_path);
      read_field(e, "chat_api_key_env", cfg.endpoints.chat_api_key_env);
      read_field(e, "embedding_base_url", cfg.endpoints.embedding_base_url);
      read_field(e, "embedding_path", cfg.endpoints.embedding_path);
      read_field(e, "embedding_model", cfg.endpoints.embedding_model);
      read_field(e, "embedding_api_key_env", cfg.endpoints.embedding_api_key_env);
      read_field(e, "grobid_base_url", cfg.endpoints.grobid_base_url);
      read_field(e, "search_base_url", cfg.endpoints.search_base_url);
      read_field(e, "search_api_key_env", cfg.endpoints.search_api_key_env);
      read_field(e, "provider", cfg.endpoints.provider);
    }
  } catch (const std::exception& e) {
    result.errors.push_back(std::string("config: type error: ") + e.what());
    return result;
  }

  auto& errors = result.errors;
  if (cfg.expansions_per_seed < 1) errors.push_back("expansions_per_seed: must be >= 1");
  if (cfg.crawl_limit_per_keyword < 1) errors.push_back("crawl_limit_per_keyword: must be >= 1");
  if (cfg.min_citations_crawl < 0) errors.push_back("min_citations_crawl: must be >= 0");
  if (cfg.min_citations_groundtruth < 0) errors.push_back("min_citations_groundtruth: must be >= 0");
  if (cfg.repetitions < 1) errors.push_back("repetitions: must be >= 1");
  if (cfg.few_shot_k < 1) errors.push_back("few_shot_k: must be >= 1");
  if (cfg.num_clusters < 2) errors.push_back("num_clusters: must be >= 2");
  if (cfg.num_clusters < cfg.few_shot_k) {
    errors.push_back("num_clusters: must be >= few_shot_k");
  }
  if (cfg.text_budget < 1) errors.push_back("text_budget: must be >= 1");
  if (cfg.concurrency < 1) errors.push_back("concurrency: must be >= 1");
  if (cfg.embedding_dim < 1) errors.push_back("embedding_dim: must be >= 1");
  if (cfg.models.empty()) errors.push_back("models: must not be empty");
  if (cfg.thresholds.empty()) errors.push_back("thresholds: must not be empty");
  for (std::size_t i = 0; i < cfg.thresholds.size(); ++i) {
    if (cfg.thresholds[i] <= 0.0 || cfg.thresholds[i] >= 1.0) {
      errors.push_back("thresholds[" + std::to_string(i) + "]: must lie in (0,1)");
    }
    if (i > 0 && cfg.thresholds[i] <= cfg.thresholds[i - 1]) {
      errors.push_back("thresholds: must ascend");
      break;
    }
  }
  if (cfg.endpoints.provider != "mock" && cfg.endpoints.provider != "http") {
    errors.push_back("endpoints.provider: must be 'mock' or 'http'");
  }
  const auto known_rel = known_strategy_names(TaskKind::relevance);
  for (const auto& s : cfg.relevance_strategies) {
    if (!known_rel.contains(s)) errors.push_back("relevance_strategies: unknown strategy '" + s + "'");
  }
  const auto known_ext = known_strategy_names(TaskKind::extraction);
  for (const auto& s : cfg.extraction_strategies) {
    if (!known_ext.contains(s)) errors.push_back("extraction_strategies: unknown strategy '" + s + "'");
  }

  if (!errors.empty()) return result;
  if (cfg.relevance_strategies.empty()) {
    for (const auto& s : prompts::relevance_strategies()) cfg.relevance_strategies.push_back(s.name);
  }
  if (cfg.extraction_strategies.empty()) {
    for (const auto& s : prompts::extraction_strategies()) cfg.extraction_strategies.push_back(s.name);
  }
  result.config = std::move(cfg);
  return result;
}

json config_to_json(const PipelineConfig& c) {
  return json{
      {"seed_keywords", c.seed_keywords},
      {"expansions_per_seed", c.expansions_per_seed},
      {"crawl_limit_per_keyword", c.crawl_limit_per_keyword},
      {"min_citations_crawl", c.min_citations_crawl},
      {"min_citations_groundtruth", c.min_citations_groundtruth},
      {"repetitions", c.repetitions},
      {"thresholds", c.thresholds},
      {"few_shot_k", c.few_shot_k},
      {"num_clusters", c.num_clusters},
      {"models", c.models},
      {"relevance_strategies", c.relevance_strategies},
      {"extraction_strategies", c.extraction_strategies},
      {"extraction_model", c.extraction_model},
      {"text_budget", c.text_budget},
      {"concurrency", c.concurrency},
      {"random_seed", c.random_seed},
      {"embedding_dim", c.embedding_dim},
      {"ground_truth_path", c.ground_truth_path},
      {"pinned_example_ids", c.pinned_example_ids},
      {"endpoints",
       {{"chat_base_url", c.endpoints.chat_base_url},
        {"chat_path", c.endpoints.chat_path},
        {"chat_api_key_env", c.endpoints.chat_api_key_env},
        {"embedding_base_url", c.endpoints.embedding_base_url},
        {"embedding_path", c.endpoints.embedding_path},
        {"embedding_model", c.endpoints.embedding_model},
        {"embedding_api_key_env", c.endpoints.embedding_api_key_env},
        {"grobid_base_url", c.endpoints.grobid_base_url},
        {"search_base_url", c.endpoints.search_base_url},
        {"search_api_key_env", c.endpoints.search_api_key_env},
        {"provider", c.endpoints.provider}}}};
}

}  // namespace taxomatic::config
