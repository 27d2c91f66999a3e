#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "taxomatic/evaluation.hpp"
#include "taxomatic/gateway.hpp"

using namespace taxomatic;
using namespace taxomatic::eval;

namespace {

EmbeddingVector vec(std::initializer_list<double> values) {
  return EmbeddingVector{std::vector<double>(values), "test"};
}

}  // namespace

TEST_CASE("cosine similarity basics") {
  CHECK(cosine_similarity(vec({1, 2, 3}), vec({1, 2, 3})) == doctest::Approx(1.0));
  CHECK(cosine_similarity(vec({1, 0}), vec({0, 1})) == doctest::Approx(0.0));
  CHECK(cosine_similarity(vec({1, 1}), vec({1, 0})) == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK_THROWS_AS(cosine_similarity(vec({1, 0}), vec({1, 0, 0})), std::invalid_argument);
  CHECK_THROWS_AS(cosine_similarity(vec({0, 0}), vec({1, 0})), std::invalid_argument);
}

TEST_CASE("cosine similarity properties") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    auto a = oracles::random_vector(rng, 16);
    auto b = oracles::random_vector(rng, 16);
    const double ab = cosine_similarity(a, b);
    CHECK(ab == doctest::Approx(cosine_similarity(b, a)).epsilon(1e-9));
    CHECK(ab >= -1.0);
    CHECK(ab <= 1.0);
    auto scaled = a;
    for (auto& x : scaled.values) x *= 3.5;
    CHECK(ab == doctest::Approx(cosine_similarity(scaled, b)).epsilon(1e-9));
    CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("classification metrics hand-computed cases") {
  std::map<std::string, RelevanceLabel> truth{
      {"a", RelevanceLabel::relevant},
      {"b", RelevanceLabel::relevant},
      {"c", RelevanceLabel::not_relevant},
      {"d", RelevanceLabel::not_relevant}};

  SUBCASE("perfect predictions") {
    std::vector<LabeledPrediction> preds{{"a", RelevanceLabel::relevant},
                                         {"b", RelevanceLabel::relevant},
                                         {"c", RelevanceLabel::not_relevant},
                                         {"d", RelevanceLabel::not_relevant}};
    auto m = classification_metrics(preds, truth);
    CHECK(m.macro_precision == doctest::Approx(1.0));
    CHECK(m.macro_recall == doctest::Approx(1.0));
    CHECK(m.macro_f1 == doctest::Approx(1.0));
    CHECK(m.accuracy == doctest::Approx(1.0));
  }
  SUBCASE("tp=1 fp=1 fn=1 tn=1") {
    std::vector<LabeledPrediction> preds{{"a", RelevanceLabel::relevant},
                                         {"b", RelevanceLabel::not_relevant},
                                         {"c", RelevanceLabel::relevant},
                                         {"d", RelevanceLabel::not_relevant}};
    auto m = classification_metrics(preds, truth);
    CHECK(m.counts.tp == 1);
    CHECK(m.counts.fp == 1);
    CHECK(m.counts.fn == 1);
    CHECK(m.counts.tn == 1);
    CHECK(m.relevant.precision == doctest::Approx(0.5));
    CHECK(m.relevant.recall == doctest::Approx(0.5));
    CHECK(m.relevant.f1 == doctest::Approx(0.5));
    CHECK(m.accuracy == doctest::Approx(0.5));
  }
  SUBCASE("degenerate: everything predicted relevant, truth all not_relevant") {
    std::map<std::string, RelevanceLabel> t{{"c", RelevanceLabel::not_relevant},
                                            {"d", RelevanceLabel::not_relevant}};
    std::vector<LabeledPrediction> preds{{"c", RelevanceLabel::relevant},
                                         {"d", RelevanceLabel::relevant}};
    auto m = classification_metrics(preds, t);
    CHECK(m.accuracy == doctest::Approx(0.0));
    CHECK(m.relevant.precision == doctest::Approx(0.0));
    CHECK(m.relevant.recall_undefined);  // no relevant papers in truth
    CHECK(m.not_relevant.precision_undefined);
  }
  SUBCASE("unknown paper id rejected") {
    std::vector<LabeledPrediction> preds{{"zz", RelevanceLabel::relevant}};
    CHECK_THROWS_AS(classification_metrics(preds, truth), std::invalid_argument);
  }
  SUBCASE("unparseable counted as not_relevant") {
    std::vector<LabeledPrediction> preds{{"a", std::nullopt}, {"c", std::nullopt}};
    auto m = classification_metrics(preds, truth);
    CHECK(m.unparseable == 2);
    CHECK(m.counts.fn == 1);
    CHECK(m.counts.tn == 1);
  }
}

TEST_CASE("classification metrics match confusion arithmetic on random configurations") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> count(0, 30);
  for (int trial = 0; trial < 50; ++trial) {
    const int tp = count(rng), fp = count(rng), fn = count(rng), tn = count(rng);
    if (tp + fp + fn + tn == 0) continue;
    std::map<std::string, RelevanceLabel> truth;
    std::vector<LabeledPrediction> preds;
    int id = 0;
    auto add = [&](RelevanceLabel t, RelevanceLabel p, int n) {
      for (int i = 0; i < n; ++i) {
        const auto pid = "p" + std::to_string(id++);
        truth[pid] = t;
        preds.push_back({pid, p});
      }
    };
    add(RelevanceLabel::relevant, RelevanceLabel::relevant, tp);
    add(RelevanceLabel::not_relevant, RelevanceLabel::relevant, fp);
    add(RelevanceLabel::relevant, RelevanceLabel::not_relevant, fn);
    add(RelevanceLabel::not_relevant, RelevanceLabel::not_relevant, tn);
    auto m = classification_metrics(preds, truth);

    const double p_rel = tp + fp == 0 ? 0.0 : double(tp) / (tp + fp);
    const double r_rel = tp + fn == 0 ? 0.0 : double(tp) / (tp + fn);
    const double f_rel = p_rel + r_rel == 0 ? 0.0 : 2 * p_rel * r_rel / (p_rel + r_rel);
    CHECK(m.relevant.precision == doctest::Approx(p_rel).epsilon(1e-12));
    CHECK(m.relevant.recall == doctest::Approx(r_rel).epsilon(1e-12));
    CHECK(m.relevant.f1 == doctest::Approx(f_rel).epsilon(1e-12));
    CHECK(m.accuracy == doctest::Approx(double(tp + tn) / (tp + fp + fn + tn)).epsilon(1e-12));
    CHECK(m.macro_f1 >= 0.0);
    CHECK(m.macro_f1 <= 1.0);
  }
}

TEST_CASE("krippendorff alpha worked examples") {
  SUBCASE("perfect agreement with value variation across units") {
    ReliabilityMatrix m;
    m.units = {"u1", "u2"};
    m.observers = {"o1", "o2"};
    m.values[{0, 0}] = "A";
    m.values[{0, 1}] = "A";
    m.values[{1, 0}] = "B";
    m.values[{1, 1}] = "B";
    auto r = krippendorff_alpha(m);
    REQUIRE(r.alpha.has_value());
    CHECK(*r.alpha == doctest::Approx(1.0));
  }
  SUBCASE("two units (A,A) and (A,B) give exactly 0") {
    ReliabilityMatrix m;
    m.units = {"u1", "u2"};
    m.observers = {"o1", "o2"};
    m.values[{0, 0}] = "A";
    m.values[{0, 1}] = "A";
    m.values[{1, 0}] = "A";
    m.values[{1, 1}] = "B";
    auto r = krippendorff_alpha(m);
    REQUIRE(r.alpha.has_value());
    CHECK(*r.alpha == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("no value variation is a defined error") {
    ReliabilityMatrix m;
    m.units = {"u1", "u2"};
    m.observers = {"o1", "o2"};
    m.values[{0, 0}] = "A";
    m.values[{0, 1}] = "A";
    m.values[{1, 0}] = "A";
    m.values[{1, 1}] = "A";
    auto r = krippendorff_alpha(m);
    CHECK_FALSE(r.alpha.has_value());
    CHECK(r.error == "alpha undefined: no value variation");
  }
  SUBCASE("units with a single value are excluded from pairing") {
    ReliabilityMatrix m;
    m.units = {"u1", "u2", "u3"};
    m.observers = {"o1", "o2"};
    m.values[{0, 0}] = "A";
    m.values[{0, 1}] = "A";
    m.values[{1, 0}] = "B";
    m.values[{1, 1}] = "B";
    m.values[{2, 0}] = "A";  // lone value, no pair
    auto r = krippendorff_alpha(m);
    REQUIRE(r.alpha.has_value());
    CHECK(*r.alpha == doctest::Approx(1.0));
  }
}

TEST_CASE("krippendorff alpha matches the brute-force oracle") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> n_obs(2, 8), n_units(5, 50), n_cat(2, 4);
  std::uniform_real_distribution<double> missing(0.1, 0.3);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto m = oracles::random_matrix(rng, n_obs(rng), n_units(rng), missing(rng), n_cat(rng));
    auto expected = oracles::brute_force_alpha(m);
    auto actual = krippendorff_alpha(m);
    CHECK(expected.has_value() == actual.alpha.has_value());
    if (expected && actual.alpha) {
      CHECK(*actual.alpha == doctest::Approx(*expected).epsilon(1e-9));
      ++compared;
    }
  }
  CHECK(compared > 150);  // the generator must mostly produce computable matrices
}

TEST_CASE("alpha invariances") {
  std::mt19937_64 rng(31);
  auto m = oracles::random_matrix(rng, 4, 20, 0.2, 3);
  auto base = krippendorff_alpha(m);
  REQUIRE(base.alpha.has_value());

  SUBCASE("category relabeling") {
    auto relabeled = m;
    for (auto& [cell, v] : relabeled.values) v = "renamed_" + v;
    auto r = krippendorff_alpha(relabeled);
    REQUIRE(r.alpha.has_value());
    CHECK(*r.alpha == doctest::Approx(*base.alpha).epsilon(1e-12));
  }
  SUBCASE("observer reordering") {
    ReliabilityMatrix reordered;
    reordered.units = m.units;
    reordered.observers = m.observers;
    std::reverse(reordered.observers.begin(), reordered.observers.end());
    for (const auto& [cell, v] : m.values) {
      reordered.values[{cell.first, m.observers.size() - 1 - cell.second}] = v;
    }
    auto r = krippendorff_alpha(reordered);
    REQUIRE(r.alpha.has_value());
    CHECK(*r.alpha == doctest::Approx(*base.alpha).epsilon(1e-12));
  }
}

TEST_CASE("alpha groupings over aggregated labels") {
  std::vector<AggregatedLabel> labels;
  const std::vector<std::string> models{"m1", "m2"};
  const std::vector<std::string> strategies{"s1", "s2"};
  // m1 labels every paper relevant on s1 and not_relevant on s2 (systematic
  // inversion); m2 agrees with itself everywhere
  for (int p = 0; p < 6; ++p) {
    const auto pid = "p" + std::to_string(p);
    const auto base = p % 2 == 0 ? RelevanceLabel::relevant : RelevanceLabel::not_relevant;
    labels.push_back({pid, "m1", "s1", base, false});
    labels.push_back({pid, "m1", "s2",
                      base == RelevanceLabel::relevant ? RelevanceLabel::not_relevant
                                                       : RelevanceLabel::relevant,
                      false});
    labels.push_back({pid, "m2", "s1", base, false});
    labels.push_back({pid, "m2", "s2", base, false});
  }
  auto groupings = alpha_groupings(labels);
  REQUIRE(groupings.per_model.at("m2").alpha.has_value());
  CHECK(*groupings.per_model.at("m2").alpha == doctest::Approx(1.0));
  REQUIRE(groupings.per_model.at("m1").alpha.has_value());
  CHECK(*groupings.per_model.at("m1").alpha < 0.0);  // systematic inversion
  CHECK(groupings.per_model.size() == 2);
  CHECK(groupings.per_strategy.size() == 2);
}

TEST_CASE("score_extraction") {
  gateway::MockEmbeddingProvider embedder(64, 5);
  auto embed = [&](const std::string& text) { return *embedder.embed_once(text).value; };

  CHECK(score_extraction("media bias is slanted coverage",
                         {"media bias is slanted coverage"}, embed) ==
        doctest::Approx(1.0).epsilon(1e-9));

  const double d1 = cosine_similarity(embed("extracted text"), embed("first definition"));
  const double d2 = cosine_similarity(embed("extracted text"), embed("second one entirely"));
  CHECK(score_extraction("extracted text", {"first definition", "second one entirely"}, embed) ==
        doctest::Approx(std::max(d1, d2)));
  // order invariance
  CHECK(score_extraction("extracted text", {"second one entirely", "first definition"}, embed) ==
        doctest::Approx(std::max(d1, d2)));
  CHECK_THROWS_AS(score_extraction("", {"x"}, embed), std::invalid_argument);
  CHECK_THROWS_AS(score_extraction("x", {}, embed), std::invalid_argument);
}

TEST_CASE("similarity stats") {
  SimilarityScoreSet scores{{"p1", "role", 0.2}, {"p2", "role", 0.4}, {"p3", "role", 0.6},
                            {"p4", "zero_shot", 0.9}};
  auto stats = similarity_stats(scores);
  CHECK(stats.at("role").mean == doctest::Approx(0.4));
  CHECK(stats.at("role").median == doctest::Approx(0.4));
  CHECK(stats.at("role").min == doctest::Approx(0.2));
  CHECK(stats.at("role").max == doctest::Approx(0.6));
  CHECK(stats.at("zero_shot").mean == doctest::Approx(0.9));
  CHECK(stats.at("zero_shot").median == doctest::Approx(0.9));

  SimilarityScoreSet even{{"p1", "s", 0.1}, {"p2", "s", 0.3}};
  CHECK(similarity_stats(even).at("s").median == doctest::Approx(0.2));
}

TEST_CASE("threshold match counts") {
  SimilarityScoreSet scores{{"p1", "s", 0.55}, {"p2", "s", 0.45}, {"p3", "s", 0.72}};
  auto counts = threshold_match_counts(scores, {0.5, 0.6, 0.7});
  CHECK(counts.at("s").at(0.5) == 2);
  CHECK(counts.at("s").at(0.6) == 1);
  CHECK(counts.at("s").at(0.7) == 1);

  SUBCASE("strict greater-than at the boundary") {
    SimilarityScoreSet boundary{{"p1", "s", 0.5}};
    CHECK(threshold_match_counts(boundary, {0.5}).at("s").at(0.5) == 0);
  }
  SUBCASE("monotone non-increasing on random scores") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    SimilarityScoreSet random;
    for (int i = 0; i < 100; ++i) random.push_back({"p" + std::to_string(i), "s", score(rng)});
    auto c = threshold_match_counts(random, {0.5, 0.6, 0.7});
    CHECK(c.at("s").at(0.5) >= c.at("s").at(0.6));
    CHECK(c.at("s").at(0.6) >= c.at("s").at(0.7));
    // against direct counting
    std::size_t direct = 0;
    for (const auto& s : random) {
      if (s.best_score > 0.6) ++direct;
    }
    CHECK(c.at("s").at(0.6) == direct);
  }
}

TEST_CASE("build_report partiality") {
  EvaluationInputs inputs;
  CHECK_THROWS_WITH_AS(build_report(inputs), "nothing to evaluate", std::invalid_argument);

  RunRecord r;
  r.paper_id = "p1";
  r.model_name = "m";
  r.strategy_name = "s";
  r.task = TaskKind::relevance;
  r.parsed_label = RelevanceLabel::relevant;
  inputs.relevance_records = {r};
  inputs.ground_truth["p1"] = {"p1", RelevanceLabel::relevant, {"a definition"}};
  auto report = build_report(inputs);
  CHECK(report.contains("relevance"));
  CHECK_FALSE(report.contains("extraction"));
  CHECK(report["absent_sections"] == json::array({"extraction"}));
}
