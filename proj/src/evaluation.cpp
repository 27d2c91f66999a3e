#include "taxomatic/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "taxomatic/inference.hpp"

namespace taxomatic::eval {

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  }
  if (a.dimension() == 0) throw std::invalid_argument("cosine_similarity: empty vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine_similarity: zero vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

namespace {

ClassMetrics class_metrics(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  ClassMetrics m;
  if (tp + fp == 0) {
    m.precision_undefined = true;
  } else {
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    m.recall_undefined = true;
  } else {
    m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  if (m.precision + m.recall == 0.0) {
    m.f1_undefined = m.precision_undefined || m.recall_undefined;
    m.f1 = 0.0;
  } else {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

}  // namespace

ClassificationMetrics classification_metrics(
    const std::vector<LabeledPrediction>& predictions,
    const std::map<std::string, RelevanceLabel>& truth) {
  ClassificationMetrics out;
  for (const auto& p : predictions) {
    auto it = truth.find(p.paper_id);
    if (it == truth.end()) {
      throw std::invalid_argument("classification_metrics: unknown paper_id " + p.paper_id);
    }
    RelevanceLabel predicted = RelevanceLabel::not_relevant;
    if (p.predicted) {
      predicted = *p.predicted;
    } else {
      ++out.unparseable;
    }
    const bool truth_relevant = it->second == RelevanceLabel::relevant;
    const bool pred_relevant = predicted == RelevanceLabel::relevant;
    if (pred_relevant && truth_relevant) ++out.counts.tp;
    else if (pred_relevant && !truth_relevant) ++out.counts.fp;
    else if (!pred_relevant && truth_relevant) ++out.counts.fn;
    else ++out.counts.tn;
  }
  const auto& c = out.counts;
  out.relevant = class_metrics(c.tp, c.fp, c.fn);
  // not_relevant viewed as positive class: tn are its true positives
  out.not_relevant = class_metrics(c.tn, c.fn, c.fp);
  out.macro_precision = (out.relevant.precision + out.not_relevant.precision) / 2.0;
  out.macro_recall = (out.relevant.recall + out.not_relevant.recall) / 2.0;
  out.macro_f1 = (out.relevant.f1 + out.not_relevant.f1) / 2.0;
  const auto total = c.tp + c.fp + c.fn + c.tn;
  out.accuracy = total == 0 ? 0.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
  return out;
}

AlphaResult krippendorff_alpha(const ReliabilityMatrix& matrix) {
  if (matrix.observers.size() < 2) {
    return {std::nullopt, "alpha requires at least 2 observers"};
  }
  // category index
  std::map<std::string, std::size_t> cat_index;
  for (const auto& [cell, value] : matrix.values) {
    cat_index.emplace(value, cat_index.size());
  }
  const std::size_t ncat = cat_index.size();
  std::vector<std::vector<double>> coincidence(ncat, std::vector<double>(ncat, 0.0));

  bool any_pairable = false;
  for (std::size_t u = 0; u < matrix.units.size(); ++u) {
    std::vector<std::size_t> unit_values;
    for (std::size_t o = 0; o < matrix.observers.size(); ++o) {
      auto it = matrix.values.find({u, o});
      if (it != matrix.values.end()) unit_values.push_back(cat_index.at(it->second));
    }
    const std::size_t m = unit_values.size();
    if (m < 2) continue;  // units with fewer than 2 values cannot be paired
    any_pairable = true;
    const double w = 1.0 / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        coincidence[unit_values[i]][unit_values[j]] += w;
      }
    }
  }
  if (!any_pairable) {
    return {std::nullopt, "alpha requires at least one unit with 2 or more values"};
  }

  std::vector<double> marginals(ncat, 0.0);
  double n = 0.0;
  double observed_disagreement = 0.0;
  for (std::size_t c = 0; c < ncat; ++c) {
    for (std::size_t k = 0; k < ncat; ++k) {
      marginals[c] += coincidence[c][k];
      if (c != k) observed_disagreement += coincidence[c][k];
    }
    n += marginals[c];
  }
  double expected_disagreement = 0.0;
  for (std::size_t c = 0; c < ncat; ++c) {
    for (std::size_t k = 0; k < ncat; ++k) {
      if (c != k) expected_disagreement += marginals[c] * marginals[k];
    }
  }
  expected_disagreement /= n * (n - 1.0);
  observed_disagreement /= n;

  if (expected_disagreement == 0.0) {
    return {std::nullopt, "alpha undefined: no value variation"};
  }
  return {1.0 - observed_disagreement / expected_disagreement, ""};
}

std::vector<AggregatedLabel> aggregate_labels(const std::vector<RunRecord>& relevance_records) {
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<RunRecord>> cells;
  for (const auto& r : relevance_records) {
    if (r.task != TaskKind::relevance) continue;
    cells[{r.paper_id, r.model_name, r.strategy_name}].push_back(r);
  }
  std::vector<AggregatedLabel> out;
  out.reserve(cells.size());
  for (const auto& [key, records] : cells) {
    auto agg = inference::aggregate_label(records);
    AggregatedLabel a;
    a.paper_id = std::get<0>(key);
    a.model_name = std::get<1>(key);
    a.strategy_name = std::get<2>(key);
    a.label = agg.majority;
    a.tie_flag = agg.tie_flag;
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

// Builds a units x observers matrix from aggregated labels, with the observer
// identity chosen by the caller.
ReliabilityMatrix build_matrix(
    const std::vector<AggregatedLabel>& labels,
    const std::function<std::optional<std::string>(const AggregatedLabel&)>& observer_of) {
  ReliabilityMatrix m;
  std::map<std::string, std::size_t> unit_ix, obs_ix;
  for (const auto& l : labels) {
    auto obs = observer_of(l);
    if (!obs || !l.label) continue;
    if (!unit_ix.contains(l.paper_id)) {
      unit_ix[l.paper_id] = m.units.size();
      m.units.push_back(l.paper_id);
    }
    if (!obs_ix.contains(*obs)) {
      obs_ix[*obs] = m.observers.size();
      m.observers.push_back(*obs);
    }
    m.values[{unit_ix[l.paper_id], obs_ix[*obs]}] = to_string(*l.label);
  }
  return m;
}

}  // namespace

AlphaGroupings alpha_groupings(const std::vector<AggregatedLabel>& labels) {
  AlphaGroupings out;
  out.overall = krippendorff_alpha(build_matrix(
      labels, [](const AggregatedLabel& l) -> std::optional<std::string> {
        return l.model_name + "|" + l.strategy_name;
      }));

  std::set<std::string> models, strategies;
  for (const auto& l : labels) {
    models.insert(l.model_name);
    strategies.insert(l.strategy_name);
  }
  for (const auto& model : models) {
    out.per_model[model] = krippendorff_alpha(build_matrix(
        labels, [&](const AggregatedLabel& l) -> std::optional<std::string> {
          if (l.model_name != model) return std::nullopt;
          return l.strategy_name;
        }));
  }
  for (const auto& strategy : strategies) {
    out.per_strategy[strategy] = krippendorff_alpha(build_matrix(
        labels, [&](const AggregatedLabel& l) -> std::optional<std::string> {
          if (l.strategy_name != strategy) return std::nullopt;
          return l.model_name;
        }));
  }
  return out;
}

double score_extraction(const std::string& extracted,
                        const std::vector<std::string>& gt_definitions,
                        const std::function<EmbeddingVector(const std::string&)>& embed) {
  if (extracted.empty()) throw std::invalid_argument("score_extraction: empty extraction");
  if (gt_definitions.empty()) {
    throw std::invalid_argument("score_extraction: no ground-truth definitions");
  }
  const auto extracted_vec = embed(extracted);
  double best = -1.0;
  for (const auto& gt : gt_definitions) {
    best = std::max(best, cosine_similarity(extracted_vec, embed(gt)));
  }
  return best;
}

std::map<std::string, StrategyStats> similarity_stats(const SimilarityScoreSet& scores) {
  std::map<std::string, std::vector<double>> grouped;
  for (const auto& s : scores) grouped[s.strategy_name].push_back(s.best_score);
  std::map<std::string, StrategyStats> out;
  for (auto& [strategy, values] : grouped) {
    std::sort(values.begin(), values.end());
    StrategyStats st;
    st.count = values.size();
    st.min = values.front();
    st.max = values.back();
    st.mean = std::accumulate(values.begin(), values.end(), 0.0) /
              static_cast<double>(values.size());
    const auto n = values.size();
    st.median = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
    out[strategy] = st;
  }
  return out;
}

std::map<std::string, std::map<double, std::size_t>> threshold_match_counts(
    const SimilarityScoreSet& scores, const std::vector<double>& thresholds) {
  std::map<std::string, std::map<double, std::size_t>> out;
  for (const auto& s : scores) {
    auto& per_threshold = out[s.strategy_name];
    for (double t : thresholds) {
      per_threshold.emplace(t, 0);
      if (s.best_score > t) ++per_threshold[t];
    }
  }
  return out;
}

namespace {

json metrics_to_json(const ClassificationMetrics& m) {
  auto cls = [](const ClassMetrics& c) {
    return json{{"precision", c.precision},
                {"recall", c.recall},
                {"f1", c.f1},
                {"precision_undefined", c.precision_undefined},
                {"recall_undefined", c.recall_undefined},
                {"f1_undefined", c.f1_undefined}};
  };
  return json{{"f1", m.macro_f1},
              {"accuracy", m.accuracy},
              {"precision", m.macro_precision},
              {"recall", m.macro_recall},
              {"per_class", {{"relevant", cls(m.relevant)}, {"not_relevant", cls(m.not_relevant)}}},
              {"confusion", {{"tp", m.counts.tp}, {"fp", m.counts.fp}, {"fn", m.counts.fn}, {"tn", m.counts.tn}}},
              {"unparseable", m.unparseable}};
}

json alpha_to_json(const AlphaResult& a) {
  if (a.alpha) return json{{"alpha", *a.alpha}};
  return json{{"alpha", nullptr}, {"error", a.error}};
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

json build_report(const EvaluationInputs& inputs) {
  if (inputs.relevance_records.empty() && inputs.extraction_records.empty()) {
    throw std::invalid_argument("nothing to evaluate");
  }
  json report;
  report["absent_sections"] = json::array();

  std::map<std::string, RelevanceLabel> truth_labels;
  for (const auto& [id, gt] : inputs.ground_truth) truth_labels[id] = gt.relevance;

  if (!inputs.relevance_records.empty()) {
    auto aggregated = aggregate_labels(inputs.relevance_records);

    std::set<std::string> models, strategies;
    for (const auto& a : aggregated) {
      models.insert(a.model_name);
      strategies.insert(a.strategy_name);
    }

    auto metrics_for = [&](auto&& keep) {
      std::vector<LabeledPrediction> preds;
      for (const auto& a : aggregated) {
        if (!keep(a)) continue;
        preds.push_back({a.paper_id, a.label});
      }
      return classification_metrics(preds, truth_labels);
    };

    json per_model = json::object();
    for (const auto& m : models) {
      per_model[m] =
          metrics_to_json(metrics_for([&](const AggregatedLabel& a) { return a.model_name == m; }));
    }
    json per_strategy = json::object();
    for (const auto& s : strategies) {
      per_strategy[s] = metrics_to_json(
          metrics_for([&](const AggregatedLabel& a) { return a.strategy_name == s; }));
    }
    // model x strategy F1 matrix mirroring the per-cell run structure
    json matrix = json::object();
    for (const auto& m : models) {
      json row = json::object();
      for (const auto& s : strategies) {
        row[s] = metrics_for([&](const AggregatedLabel& a) {
                   return a.model_name == m && a.strategy_name == s;
                 }).macro_f1;
      }
      matrix[m] = std::move(row);
    }

    // per-repetition metrics, so either the aggregated or the per-run reading
    // of the tables can be recomputed
    std::set<int> reps;
    for (const auto& r : inputs.relevance_records) reps.insert(r.repetition_index);
    json per_repetition = json::object();
    for (int rep : reps) {
      std::vector<LabeledPrediction> preds;
      for (const auto& r : inputs.relevance_records) {
        if (r.repetition_index != rep) continue;
        preds.push_back({r.paper_id, r.parsed_label});
      }
      per_repetition[std::to_string(rep)] =
          metrics_to_json(classification_metrics(preds, truth_labels));
    }

    auto alphas = alpha_groupings(aggregated);
    json alpha{{"overall", alpha_to_json(alphas.overall)},
               {"per_model", json::object()},
               {"per_strategy", json::object()}};
    for (const auto& [m, a] : alphas.per_model) alpha["per_model"][m] = alpha_to_json(a);
    for (const auto& [s, a] : alphas.per_strategy) alpha["per_strategy"][s] = alpha_to_json(a);

    report["relevance"] = {{"per_model", std::move(per_model)},
                           {"per_strategy", std::move(per_strategy)},
                           {"f1_matrix", std::move(matrix)},
                           {"per_repetition", std::move(per_repetition)},
                           {"krippendorff_alpha", std::move(alpha)}};
  } else {
    report["absent_sections"].push_back("relevance");
  }

  if (!inputs.extraction_records.empty()) {
    if (!inputs.embed) throw std::invalid_argument("extraction evaluation requires an embedder");
    SimilarityScoreSet scores;
    std::size_t skipped = 0;
    for (const auto& r : inputs.extraction_records) {
      if (r.parse_status != ParseStatus::ok || !r.extracted_definition) {
        ++skipped;
        continue;
      }
      auto it = inputs.ground_truth.find(r.paper_id);
      if (it == inputs.ground_truth.end() || it->second.definitions.empty()) {
        ++skipped;
        continue;
      }
      scores.push_back({r.paper_id, r.strategy_name,
                        score_extraction(*r.extracted_definition, it->second.definitions,
                                         inputs.embed)});
    }
    json stats = json::object();
    for (const auto& [strategy, st] : similarity_stats(scores)) {
      stats[strategy] = {{"mean", st.mean}, {"median", st.median}, {"min", st.min},
                         {"max", st.max},   {"count", st.count}};
    }
    json counts = json::object();
    json prf = json::object();
    const auto match_counts = threshold_match_counts(scores, inputs.thresholds);
    std::map<std::string, std::size_t> group_sizes;
    for (const auto& s : scores) ++group_sizes[s.strategy_name];
    for (const auto& [strategy, per_threshold] : match_counts) {
      json row = json::object();
      json prf_row = json::object();
      for (const auto& [t, c] : per_threshold) {
        row[format_number(t)] = c;
        // interpretation: thresholded matches as true positives over the
        // evaluated papers, everything unmatched as a miss
        const auto total = group_sizes[strategy];
        const double p = total == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(total);
        prf_row[format_number(t)] = {{"precision", p}, {"recall", p},
                                     {"f1", p}, {"interpretation_flag", true}};
      }
      counts[strategy] = std::move(row);
      prf[strategy] = std::move(prf_row);
    }
    report["extraction"] = {{"similarity_stats", std::move(stats)},
                            {"threshold_counts", std::move(counts)},
                            {"threshold_prf_view", std::move(prf)},
                            {"skipped_records", skipped}};
  } else {
    report["absent_sections"].push_back("extraction");
  }
  return report;
}

std::string render_tables(const json& report) {
  std::string out;
  auto add_metric_table = [&](const std::string& title, const json& table) {
    out += title + "\n";
    out += "  name                              F1     Accuracy  Precision  Recall\n";
    for (auto it = table.begin(); it != table.end(); ++it) {
      char line[160];
      std::snprintf(line, sizeof(line), "  %-32s %-6s %-9s %-10s %-6s\n", it.key().c_str(),
                    format_number(it.value()["f1"].get<double>()).c_str(),
                    format_number(it.value()["accuracy"].get<double>()).c_str(),
                    format_number(it.value()["precision"].get<double>()).c_str(),
                    format_number(it.value()["recall"].get<double>()).c_str());
      out += line;
    }
    out += "\n";
  };
  if (report.contains("relevance")) {
    add_metric_table("Average Relevance Classification Performance by Model",
                     report["relevance"]["per_model"]);
    add_metric_table("Average Relevance Classification Performance by Strategy",
                     report["relevance"]["per_strategy"]);
    out += "Krippendorff's Alpha\n";
    const auto& alpha = report["relevance"]["krippendorff_alpha"];
    auto alpha_str = [&](const json& a) {
      return a["alpha"].is_null() ? "undefined (" + a["error"].get<std::string>() + ")"
                                  : format_number(a["alpha"].get<double>());
    };
    out += "  overall: " + alpha_str(alpha["overall"]) + "\n";
    for (auto it = alpha["per_model"].begin(); it != alpha["per_model"].end(); ++it) {
      out += "  model " + it.key() + ": " + alpha_str(it.value()) + "\n";
    }
    for (auto it = alpha["per_strategy"].begin(); it != alpha["per_strategy"].end(); ++it) {
      out += "  strategy " + it.key() + ": " + alpha_str(it.value()) + "\n";
    }
    out += "\n";
  }
  if (report.contains("extraction")) {
    out += "Cosine Similarity Scores for Definition Extraction\n";
    out += "  strategy                          Mean   Median  Min    Max\n";
    const auto& stats = report["extraction"]["similarity_stats"];
    for (auto it = stats.begin(); it != stats.end(); ++it) {
      char line[160];
      std::snprintf(line, sizeof(line), "  %-32s %-6s %-7s %-6s %-6s\n", it.key().c_str(),
                    format_number(it.value()["mean"].get<double>()).c_str(),
                    format_number(it.value()["median"].get<double>()).c_str(),
                    format_number(it.value()["min"].get<double>()).c_str(),
                    format_number(it.value()["max"].get<double>()).c_str());
      out += line;
    }
    out += "\nCounts of Correct Definitions by Threshold\n";
    const auto& counts = report["extraction"]["threshold_counts"];
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      out += "  " + it.key() + ":";
      for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
        out += " >" + jt.key() + "=" + std::to_string(jt.value().get<std::size_t>());
      }
      out += "\n";
    }
    out += "\n";
  }
  return out;
}

}  // namespace taxomatic::eval
