#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taxomatic/gateway.hpp"
#include "taxomatic/prompts.hpp"
#include "taxomatic/types.hpp"

namespace taxomatic::inference {

// Decision rules, in order: negation ("not relevant"/"irrelevant") wins over
// the bare "relevant" token; a leading yes/no token is the last resort.
std::optional<RelevanceLabel> parse_relevance_response(const std::string& text);

// Strips leading/trailing boilerplate lines matching the configured preamble
// patterns before storing the definition.
std::string strip_preamble(const std::string& response,
                           const std::vector<std::string>& preamble_patterns);

const std::vector<std::string>& default_preamble_patterns();

struct AggregateOutcome {
  std::optional<RelevanceLabel> majority;  // nullopt only when input empty
  bool tie_flag = false;                   // tie or all-unparseable
};

// Majority vote over parseable labels; ties and all-unparseable fall back to
// not_relevant with the flag set.
AggregateOutcome aggregate_label(const std::vector<RunRecord>& records);

struct InferenceOptions {
  int repetitions = 3;
  std::size_t few_shot_k = 4;
  std::size_t num_clusters = 8;
  std::size_t per_label = 2;
  std::uint64_t seed = 7;
  std::size_t text_budget = 24000;
  std::vector<std::string> pinned_example_ids;  // overrides diversity sampling
};

// One relevance cell: renders the prompt (sampling examples for contextual
// strategies), runs every repetition, parses each response. Gateway errors
// become unparseable records; the batch never aborts.
std::vector<RunRecord> classify_relevance(const StructuredDocument& doc,
                                          const ModelSpec& model,
                                          const PromptStrategy& strategy,
                                          const ExamplePool& pool,
                                          gateway::Gateway& gw,
                                          const InferenceOptions& options);

RunRecord extract_definition(const StructuredDocument& doc, const ModelSpec& model,
                             const PromptStrategy& strategy, gateway::Gateway& gw,
                             const InferenceOptions& options);

// Builds the few-shot example pool from ground truth plus parsed documents,
// embedding title + abstract. The target paper is excluded at sampling time.
ExamplePool build_example_pool(const std::vector<StructuredDocument>& docs,
                               const std::map<std::string, GroundTruthEntry>& truth,
                               gateway::Gateway& gw);

}  // namespace taxomatic::inference
