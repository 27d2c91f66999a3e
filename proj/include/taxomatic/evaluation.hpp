#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taxomatic/types.hpp"

namespace taxomatic::eval {

// ------------------------------------------------------------ primitives

// cos(a,b) = dot/(|a||b|), clamped to [-1,1]. Throws on dimension mismatch
// or zero vectors.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

struct ConfusionCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // zero denominator, reported as 0
  bool recall_undefined = false;
  bool f1_undefined = false;
};

struct ClassificationMetrics {
  ClassMetrics relevant;
  ClassMetrics not_relevant;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  ConfusionCounts counts;  // positive class = relevant
  std::int64_t unparseable = 0;
};

struct LabeledPrediction {
  std::string paper_id;
  std::optional<RelevanceLabel> predicted;  // nullopt = unparseable
};

// Unparseable predictions score as not_relevant and are counted separately.
ClassificationMetrics classification_metrics(
    const std::vector<LabeledPrediction>& predictions,
    const std::map<std::string, RelevanceLabel>& truth);

// -------------------------------------------------- Krippendorff's alpha

struct ReliabilityMatrix {
  std::vector<std::string> units;
  std::vector<std::string> observers;
  // values[(unit index, observer index)] -> nominal label; missing cells absent
  std::map<std::pair<std::size_t, std::size_t>, std::string> values;
};

struct AlphaResult {
  std::optional<double> alpha;
  std::string error;  // set when alpha undefined (De = 0) or no pairable values
};

// Nominal-data alpha from the coincidence matrix over pairable values.
AlphaResult krippendorff_alpha(const ReliabilityMatrix& matrix);

// Aggregated relevance label for one (paper, model, strategy) cell.
struct AggregatedLabel {
  std::string paper_id;
  std::string model_name;
  std::string strategy_name;
  std::optional<RelevanceLabel> label;  // nullopt when every repetition unparseable
  bool tie_flag = false;
};

struct AlphaGroupings {
  AlphaResult overall;
  std::map<std::string, AlphaResult> per_model;     // observers = strategies
  std::map<std::string, AlphaResult> per_strategy;  // observers = models
};

AlphaGroupings alpha_groupings(const std::vector<AggregatedLabel>& labels);

// -------------------------------------------------- extraction scoring

struct SimilarityScore {
  std::string paper_id;
  std::string strategy_name;
  double best_score = 0.0;
};

using SimilarityScoreSet = std::vector<SimilarityScore>;

// max over ground-truth definitions of cosine similarity in embedding space
double score_extraction(const std::string& extracted,
                        const std::vector<std::string>& gt_definitions,
                        const std::function<EmbeddingVector(const std::string&)>& embed);

struct StrategyStats {
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

std::map<std::string, StrategyStats> similarity_stats(const SimilarityScoreSet& scores);

// Strictly-greater-than counts, per strategy per threshold.
std::map<std::string, std::map<double, std::size_t>> threshold_match_counts(
    const SimilarityScoreSet& scores, const std::vector<double>& thresholds);

// -------------------------------------------------------------- report

struct EvaluationInputs {
  std::vector<RunRecord> relevance_records;
  std::vector<RunRecord> extraction_records;
  std::map<std::string, GroundTruthEntry> ground_truth;
  std::vector<double> thresholds = {0.5, 0.6, 0.7};
  std::function<EmbeddingVector(const std::string&)> embed;
};

// Machine-readable report mirroring the published table schemas; throws when
// there is nothing to evaluate.
json build_report(const EvaluationInputs& inputs);

// Plain-text rendering of the report tables.
std::string render_tables(const json& report);

std::vector<AggregatedLabel> aggregate_labels(const std::vector<RunRecord>& relevance_records);

}  // namespace taxomatic::eval
