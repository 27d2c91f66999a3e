#include "taxomatic/inference.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <sstream>

#include "taxomatic/evaluation.hpp"

namespace taxomatic::inference {

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string leading_word(const std::string& text) {
  std::string word;
  for (char ch : text) {
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else if (!word.empty()) {
      break;
    } else if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '"' && ch != '\'') {
      break;
    }
  }
  return word;
}

}  // namespace

std::optional<RelevanceLabel> parse_relevance_response(const std::string& text) {
  const auto lower = lowercase(text);
  // negation before the bare positive token
  if (lower.find("not relevant") != std::string::npos ||
      lower.find("irrelevant") != std::string::npos) {
    return RelevanceLabel::not_relevant;
  }
  if (lower.find("relevant") != std::string::npos) {
    return RelevanceLabel::relevant;
  }
  const auto word = leading_word(text);
  if (word == "yes") return RelevanceLabel::relevant;
  if (word == "no") return RelevanceLabel::not_relevant;
  return std::nullopt;
}

const std::vector<std::string>& default_preamble_patterns() {
  static const std::vector<std::string> patterns{
      "here is the definition", "here's the definition", "the definition of media bias",
      "based on the text",      "sure,",                 "certainly",
  };
  return patterns;
}

std::string strip_preamble(const std::string& response,
                           const std::vector<std::string>& preamble_patterns) {
  std::vector<std::string> lines;
  std::istringstream stream(response);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);

  auto is_boilerplate = [&](const std::string& l) {
    const auto lower = lowercase(trim(l));
    if (lower.empty()) return true;
    return std::any_of(preamble_patterns.begin(), preamble_patterns.end(),
                       [&](const std::string& p) { return lower.starts_with(lowercase(p)); });
  };
  std::size_t begin = 0, end = lines.size();
  while (begin < end && is_boilerplate(lines[begin])) ++begin;
  while (end > begin && trim(lines[end - 1]).empty()) --end;

  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty()) out += '\n';
    out += lines[i];
  }
  return trim(out);
}

AggregateOutcome aggregate_label(const std::vector<RunRecord>& records) {
  AggregateOutcome outcome;
  if (records.empty()) return outcome;
  int relevant = 0, not_relevant = 0;
  for (const auto& r : records) {
    if (r.parse_status != ParseStatus::ok || !r.parsed_label) continue;
    (*r.parsed_label == RelevanceLabel::relevant ? relevant : not_relevant) += 1;
  }
  if (relevant > not_relevant) {
    outcome.majority = RelevanceLabel::relevant;
  } else if (not_relevant > relevant) {
    outcome.majority = RelevanceLabel::not_relevant;
  } else {
    // tie or all-unparseable: conservative default
    outcome.majority = RelevanceLabel::not_relevant;
    outcome.tie_flag = true;
  }
  return outcome;
}

ExamplePool build_example_pool(const std::vector<StructuredDocument>& docs,
                               const std::map<std::string, GroundTruthEntry>& truth,
                               gateway::Gateway& gw) {
  ExamplePool pool;
  for (const auto& doc : docs) {
    auto it = truth.find(doc.paper_id);
    if (it == truth.end()) continue;
    ExampleEntry entry;
    entry.paper_id = doc.paper_id;
    entry.title = doc.title;
    entry.abstract = doc.abstract.value_or("");
    entry.label = it->second.relevance;
    entry.embedding = gw.embed(entry.title + " " + entry.abstract);
    pool.entries.push_back(std::move(entry));
  }
  return pool;
}

namespace {

ExamplePool without_target(const ExamplePool& pool, const std::string& paper_id) {
  ExamplePool out;
  for (const auto& e : pool.entries) {
    if (e.paper_id != paper_id) out.entries.push_back(e);
  }
  return out;
}

std::vector<ExampleEntry> sample_examples(const StructuredDocument& doc,
                                          const PromptStrategy& strategy,
                                          const ExamplePool& pool, gateway::Gateway& gw,
                                          const InferenceOptions& options) {
  const auto candidates = without_target(pool, doc.paper_id);
  if (!options.pinned_example_ids.empty()) {
    return prompts::apply_pinned_examples(candidates, options.pinned_example_ids);
  }
  if (strategy.name.find("similar") != std::string::npos) {
    const auto target = gw.embed(doc.title + " " + doc.abstract.value_or(""));
    return prompts::select_similar_examples(target, candidates, options.few_shot_k);
  }
  return prompts::select_diverse_examples(candidates, options.num_clusters,
                                          options.few_shot_k / 2, options.seed)
      .entries;
}

}  // namespace

std::vector<RunRecord> classify_relevance(const StructuredDocument& doc,
                                          const ModelSpec& model,
                                          const PromptStrategy& strategy,
                                          const ExamplePool& pool, gateway::Gateway& gw,
                                          const InferenceOptions& options) {
  if (strategy.task != TaskKind::relevance) {
    throw std::invalid_argument("classify_relevance: strategy is not a relevance strategy");
  }
  std::vector<ExampleEntry> examples;
  if (prompts::is_contextual(strategy)) {
    examples = sample_examples(doc, strategy, pool, gw, options);
  }
  const auto prompt = prompts::render_prompt(strategy, doc, examples, options.text_budget);

  CompletionRequest request;
  request.model = model;
  request.prompt_text = prompt;
  request.request_id = doc.paper_id + "|" + model.model_name + "|" + strategy.name;

  std::vector<RunRecord> records;
  for (const auto& outcome : gw.run_repetitions(request, options.repetitions)) {
    RunRecord record;
    record.run_id = request.request_id + "#" + std::to_string(outcome.repetition_index);
    record.paper_id = doc.paper_id;
    record.model_name = model.model_name;
    record.strategy_name = strategy.name;
    record.task = TaskKind::relevance;
    record.repetition_index = outcome.repetition_index;
    record.timestamp = iso_timestamp();
    if (outcome.result.ok()) {
      record.raw_response = outcome.result.value->text;
      record.parsed_label = parse_relevance_response(record.raw_response);
      record.parse_status = record.parsed_label ? ParseStatus::ok : ParseStatus::unparseable;
    } else {
      record.raw_response = "[gateway error] " + outcome.result.error->message;
      record.parse_status = ParseStatus::unparseable;
    }
    records.push_back(std::move(record));
  }
  return records;
}

RunRecord extract_definition(const StructuredDocument& doc, const ModelSpec& model,
                             const PromptStrategy& strategy, gateway::Gateway& gw,
                             const InferenceOptions& options) {
  if (strategy.task != TaskKind::extraction) {
    throw std::invalid_argument("extract_definition: strategy is not an extraction strategy");
  }
  const auto prompt = prompts::render_prompt(strategy, doc, {}, options.text_budget);

  CompletionRequest request;
  request.model = model;
  request.prompt_text = prompt;
  request.repetition_index = 1;
  request.request_id = doc.paper_id + "|" + model.model_name + "|" + strategy.name;

  RunRecord record;
  record.run_id = request.request_id;
  record.paper_id = doc.paper_id;
  record.model_name = model.model_name;
  record.strategy_name = strategy.name;
  record.task = TaskKind::extraction;
  record.repetition_index = 1;
  record.timestamp = iso_timestamp();

  auto result = gw.complete(request);
  if (!result.ok()) {
    record.raw_response = "[gateway error] " + result.error->message;
    record.parse_status = ParseStatus::unparseable;
    return record;
  }
  record.raw_response = result.value->text;
  const auto definition = strip_preamble(record.raw_response, default_preamble_patterns());
  if (definition.empty()) {
    record.parse_status = ParseStatus::unparseable;
  } else {
    record.extracted_definition = definition;
  }
  return record;
}

}  // namespace taxomatic::inference
