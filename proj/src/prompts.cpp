#include "taxomatic/prompts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

#include "taxomatic/evaluation.hpp"

namespace taxomatic::prompts {

namespace {

constexpr const char* kFourExamples = "[Example 1], [Example 2], [Example 3], [Example 4]";

std::vector<PromptStrategy> make_relevance_strategies() {
  auto ctx = [](std::string name, std::string prefix, std::string suffix) {
    return PromptStrategy{std::move(name), TaskKind::relevance,
                          prefix + kFourExamples + suffix, 4};
  };
  return {
      {"zero_shot", TaskKind::relevance,
       "Please determine if the following article is relevant to media bias research: "
       "[Article Title] - [Article Abstract]",
       0},
      ctx("ctx_similar_casual",
          "Here are examples of articles relevant to media bias research: ",
          ". Based on these, is the following article relevant? [Article Title] - "
          "[Article Abstract]"),
      ctx("ctx_similar_academic",
          "Considering the provided scholarly articles on media bias: ",
          ", assess the relevance of this article to media bias research: [Article "
          "Title] - [Article Abstract]"),
      ctx("ctx_diverse_casual",
          "We have diverse articles discussing various aspects of media studies: ",
          ". Does the following article pertain to media bias? [Article Title] - "
          "[Article Abstract]"),
      ctx("ctx_diverse_academic",
          "Given these diverse academic perspectives on media studies: ",
          ", evaluate if the following article is relevant to media bias research: "
          "[Article Title] - [Article Abstract]"),
      {"chain_of_thought", TaskKind::relevance,
       "To determine if the following article is relevant to media bias research, "
       "let's analyze it step-by-step: [Article Title] - [Article Abstract]",
       0},
      {"role", TaskKind::relevance,
       "As a media bias expert, assess the relevance of this article to the field: "
       "[Article Title] - [Article Abstract]",
       0},
      {"emotional", TaskKind::relevance,
       "Imagine you're passionate about uncovering media bias. Does this article "
       "excite your interest in media bias research? [Article Title] - [Article "
       "Abstract]",
       0},
  };
}

std::vector<PromptStrategy> make_extraction_strategies() {
  return {
      {"zero_shot", TaskKind::extraction,
       "Extract the definition of media bias from the following academic text: [Full Text]", 0},
      {"ctx_casual", TaskKind::extraction,
       "People often define media bias in different ways. Based on how it is "
       "discussed here, what is the definition? [Full Text]",
       0},
      {"ctx_academic", TaskKind::extraction,
       "In scholarly research, definitions are often embedded in complex texts. "
       "Please extract a clear, concise definition of media bias from the following "
       "excerpt: [Full Text]",
       0},
      {"chain_of_thought", TaskKind::extraction,
       "Let's identify the definition of media bias step by step. First, find any "
       "sentence that discusses the nature of media bias. Then, summarize that into "
       "a clear definition. Here is the article content: [Full Text]",
       0},
      {"role", TaskKind::extraction,
       "You are a researcher in media studies. Based on the following academic "
       "text, please provide the clearest definition of media bias presented in the "
       "article: [Full Text]",
       0},
  };
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

}  // namespace

const std::vector<PromptStrategy>& relevance_strategies() {
  static const auto strategies = make_relevance_strategies();
  return strategies;
}

const std::vector<PromptStrategy>& extraction_strategies() {
  static const auto strategies = make_extraction_strategies();
  return strategies;
}

const PromptStrategy& find_strategy(const std::string& name, TaskKind task) {
  const auto& list = task == TaskKind::relevance ? relevance_strategies()
                                                 : extraction_strategies();
  for (const auto& s : list) {
    if (s.name == name) return s;
  }
  throw std::invalid_argument("unknown strategy: " + name);
}

bool is_contextual(const PromptStrategy& strategy) { return strategy.example_count > 0; }

std::string full_text_for_llm(const StructuredDocument& doc, std::size_t budget) {
  std::string text = doc.title;
  if (doc.abstract) text += "\n" + *doc.abstract;
  for (const auto& section : doc.body_sections) {
    text += "\n";
    if (section.heading) text += *section.heading + "\n";
    text += section.text;
    if (text.size() > budget) break;
  }
  if (text.size() > budget) text.resize(budget);
  return text;
}

std::string render_prompt(const PromptStrategy& strategy, const StructuredDocument& doc,
                          const std::vector<ExampleEntry>& examples,
                          std::size_t full_text_budget) {
  if (examples.size() != static_cast<std::size_t>(strategy.example_count)) {
    throw std::invalid_argument("render_prompt: expected " +
                                std::to_string(strategy.example_count) + " examples, got " +
                                std::to_string(examples.size()));
  }
  std::string prompt = strategy.template_text;
  for (int i = 0; i < strategy.example_count; ++i) {
    const auto& e = examples[static_cast<std::size_t>(i)];
    const std::string rendered = "Title: " + e.title + "\nAbstract: " + e.abstract +
                                 "\nLabel: " +
                                 (e.label == RelevanceLabel::relevant ? "relevant" : "not relevant");
    replace_all(prompt, "[Example " + std::to_string(i + 1) + "]", rendered);
  }
  if (strategy.task == TaskKind::relevance) {
    replace_all(prompt, "[Article Title]", doc.title);
    replace_all(prompt, "[Article Abstract]", doc.abstract.value_or(""));
  } else {
    replace_all(prompt, "[Full Text]", full_text_for_llm(doc, full_text_budget));
  }
  return prompt;
}

std::vector<ExampleEntry> select_similar_examples(const EmbeddingVector& target,
                                                  const ExamplePool& pool, std::size_t k) {
  if (pool.entries.size() < k) {
    throw std::invalid_argument("select_similar_examples: pool smaller than k");
  }
  std::vector<std::pair<double, const ExampleEntry*>> scored;
  scored.reserve(pool.entries.size());
  for (const auto& e : pool.entries) {
    scored.emplace_back(eval::cosine_similarity(target, e.embedding), &e);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->paper_id < b.second->paper_id;
  });
  std::vector<ExampleEntry> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(*scored[i].second);
  return out;
}

KMeansResult kmeans(const std::vector<EmbeddingVector>& vectors, std::size_t k,
                    std::uint64_t seed, std::size_t max_iterations, double tolerance) {
  const std::size_t n = vectors.size();
  if (k == 0) throw std::invalid_argument("kmeans: k must be positive");
  if (n < k) throw std::invalid_argument("kmeans: fewer points than clusters");
  const std::size_t dim = vectors.front().dimension();
  for (const auto& v : vectors) {
    if (v.dimension() != dim) throw std::invalid_argument("kmeans: mixed dimensions");
  }

  // farthest-point init: seeded first pick, then the point maximizing the
  // distance to its nearest chosen centroid (lowest index on ties)
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> centroids;
  centroids.push_back(vectors[rng() % n].values);
  std::vector<double> nearest(n, std::numeric_limits<double>::max());
  while (centroids.size() < k) {
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(vectors[i].values, centroids.back()));
    }
    std::size_t far = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (nearest[i] > nearest[far]) far = i;
    }
    centroids.push_back(vectors[far].values);
  }

  KMeansResult result;
  result.assignment.assign(n, 0);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(vectors[i].values, centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      result.assignment[i] = best;
      cost += best_d;
    }
    result.cost_per_iteration.push_back(cost);

    std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = result.assignment[i];
      ++counts[c];
      for (std::size_t d = 0; d < dim; ++d) next[c][d] += vectors[i].values[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // reseed an empty cluster to the point farthest from its centroid
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d =
              squared_distance(vectors[i].values, centroids[result.assignment[i]]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        next[c] = vectors[far].values;
        result.assignment[far] = c;
      } else {
        for (std::size_t d = 0; d < dim; ++d) next[c][d] /= static_cast<double>(counts[c]);
      }
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) shift += squared_distance(centroids[c], next[c]);
    centroids = std::move(next);
    if (std::sqrt(shift) < tolerance) break;
  }

  // final assignment against the converged centroids
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::max();
    for (std::size_t c = 0; c < k; ++c) {
      const double d = squared_distance(vectors[i].values, centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    result.assignment[i] = best;
  }
  result.centroids = std::move(centroids);
  return result;
}

DiverseSelection select_diverse_examples(const ExamplePool& pool, std::size_t num_clusters,
                                         std::size_t per_label, std::uint64_t seed) {
  if (per_label == 0) throw std::invalid_argument("select_diverse_examples: per_label >= 1");
  if (num_clusters < 2 * per_label) {
    throw std::invalid_argument("select_diverse_examples: num_clusters must be >= 2*per_label");
  }
  std::size_t n_relevant = 0, n_not = 0;
  for (const auto& e : pool.entries) {
    (e.label == RelevanceLabel::relevant ? n_relevant : n_not) += 1;
  }
  if (n_relevant < per_label) {
    throw std::invalid_argument("select_diverse_examples: not enough relevant entries");
  }
  if (n_not < per_label) {
    throw std::invalid_argument("select_diverse_examples: not enough not_relevant entries");
  }

  std::vector<EmbeddingVector> vectors;
  vectors.reserve(pool.entries.size());
  for (const auto& e : pool.entries) vectors.push_back(e.embedding);
  const auto clusters = kmeans(vectors, std::min(num_clusters, vectors.size()), seed);
  const std::size_t k = clusters.centroids.size();

  // per (cluster, label): index of the entry nearest the centroid
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::array<std::size_t, 2>> best(k, {none, none});
  std::vector<std::array<double, 2>> best_d(k);
  for (auto& d : best_d) d = {0.0, 0.0};
  for (std::size_t i = 0; i < pool.entries.size(); ++i) {
    const auto c = clusters.assignment[i];
    const std::size_t l = pool.entries[i].label == RelevanceLabel::relevant ? 0 : 1;
    const double d = squared_distance(vectors[i].values, clusters.centroids[c]);
    if (best[c][l] == none || d < best_d[c][l] ||
        (d == best_d[c][l] && pool.entries[i].paper_id < pool.entries[best[c][l]].paper_id)) {
      best[c][l] = i;
      best_d[c][l] = d;
    }
  }

  // exhaustive search over disjoint cluster sets per label, minimizing the
  // total centroid distance; cluster count is small so this stays cheap
  std::vector<std::size_t> rel_clusters, not_clusters;
  for (std::size_t c = 0; c < k; ++c) {
    if (best[c][0] != none) rel_clusters.push_back(c);
    if (best[c][1] != none) not_clusters.push_back(c);
  }

  auto combinations = [](const std::vector<std::size_t>& items, std::size_t choose) {
    std::vector<std::vector<std::size_t>> out;
    if (items.size() < choose) return out;
    std::vector<std::size_t> ix(choose);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
      if (depth == choose) {
        std::vector<std::size_t> combo;
        for (auto i : ix) combo.push_back(items[i]);
        out.push_back(std::move(combo));
        return;
      }
      for (std::size_t i = start; i < items.size(); ++i) {
        ix[depth] = i;
        rec(i + 1, depth + 1);
      }
    };
    rec(0, 0);
    return out;
  };

  double best_total = std::numeric_limits<double>::max();
  std::vector<std::size_t> chosen_rel, chosen_not;
  std::vector<std::size_t> rel_ixs(k);
  for (const auto& rel_combo : combinations(rel_clusters, per_label)) {
    double rel_cost = 0.0;
    for (auto c : rel_combo) rel_cost += best_d[c][0];
    for (const auto& not_combo : combinations(not_clusters, per_label)) {
      bool disjoint = true;
      for (auto c : not_combo) {
        if (std::find(rel_combo.begin(), rel_combo.end(), c) != rel_combo.end()) {
          disjoint = false;
          break;
        }
      }
      if (!disjoint) continue;
      double total = rel_cost;
      for (auto c : not_combo) total += best_d[c][1];
      if (total < best_total) {
        best_total = total;
        chosen_rel = rel_combo;
        chosen_not = not_combo;
      }
    }
  }
  if (chosen_rel.empty() && chosen_not.empty()) {
    throw std::invalid_argument(
        "select_diverse_examples: labels too concentrated to draw from distinct clusters");
  }

  DiverseSelection selection;
  for (auto c : chosen_rel) {
    selection.entries.push_back(pool.entries[best[c][0]]);
    selection.cluster_ids.push_back(c);
  }
  for (auto c : chosen_not) {
    selection.entries.push_back(pool.entries[best[c][1]]);
    selection.cluster_ids.push_back(c);
  }
  return selection;
}

std::vector<ExampleEntry> apply_pinned_examples(const ExamplePool& pool,
                                                const std::vector<std::string>& pinned_ids) {
  std::vector<ExampleEntry> out;
  for (const auto& id : pinned_ids) {
    auto it = std::find_if(pool.entries.begin(), pool.entries.end(),
                           [&](const ExampleEntry& e) { return e.paper_id == id; });
    if (it == pool.entries.end()) {
      throw std::invalid_argument("pinned example not in pool: " + id);
    }
    out.push_back(*it);
  }
  return out;
}

}  // namespace taxomatic::prompts
