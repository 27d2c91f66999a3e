#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "taxomatic/types.hpp"

namespace taxomatic::prompts {

// The eight relevance strategies and five extraction strategies, with their
// verbatim templates. Contextual relevance strategies carry four example slots.
const std::vector<PromptStrategy>& relevance_strategies();
const std::vector<PromptStrategy>& extraction_strategies();

const PromptStrategy& find_strategy(const std::string& name, TaskKind task);

bool is_contextual(const PromptStrategy& strategy);

// Substitutes [Article Title], [Article Abstract] / [Full Text] and
// [Example i] slots. Example slot format: "Title: ...\nAbstract: ...\nLabel: ...".
std::string render_prompt(const PromptStrategy& strategy, const StructuredDocument& doc,
                          const std::vector<ExampleEntry>& examples,
                          std::size_t full_text_budget = 24000);

// title + abstract + body prefix, truncated to the character budget
std::string full_text_for_llm(const StructuredDocument& doc, std::size_t budget);

// KATE similarity sampling: the k pool entries with highest cosine similarity
// to the target, ties broken by ascending paper_id, ordered by descending
// similarity.
std::vector<ExampleEntry> select_similar_examples(const EmbeddingVector& target,
                                                  const ExamplePool& pool, std::size_t k);

struct KMeansResult {
  std::vector<std::size_t> assignment;
  std::vector<std::vector<double>> centroids;
  std::vector<double> cost_per_iteration;  // within-cluster squared distance
};

// Lloyd iterations with deterministic farthest-point initialization.
KMeansResult kmeans(const std::vector<EmbeddingVector>& vectors, std::size_t k,
                    std::uint64_t seed, std::size_t max_iterations = 100,
                    double tolerance = 1e-6);

struct DiverseSelection {
  std::vector<ExampleEntry> entries;
  std::vector<std::size_t> cluster_ids;  // parallel to entries, all distinct
};

// Diversity sampling: k-means over the pool embeddings, then per_label
// entries per label from distinct clusters, each nearest its centroid.
DiverseSelection select_diverse_examples(const ExamplePool& pool, std::size_t num_clusters,
                                         std::size_t per_label, std::uint64_t seed);

// Pinned-example override: JSON Lines of {"paper_id": ...}; entries are taken
// from the pool in file order instead of running the sampler.
std::vector<ExampleEntry> apply_pinned_examples(const ExamplePool& pool,
                                                const std::vector<std::string>& pinned_ids);

}  // namespace taxomatic::prompts
