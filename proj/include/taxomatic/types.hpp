#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace taxomatic {

using json = nlohmann::json;

// ---------------------------------------------------------------- corpus

struct SeedKeywordSet {
  std::vector<std::string> seeds;
  int expansions_per_seed = 200;

  void validate() const;
};

struct PaperRecord {
  std::string paper_id;
  std::string title;
  std::optional<std::string> abstract;
  std::int64_t citation_count = 0;
  std::optional<std::string> pdf_url;
  std::set<std::string> matched_keywords;
  bool is_open_access = false;
};

struct CorpusManifest {
  std::vector<PaperRecord> records;
  std::int64_t min_citations = 0;
  std::string created_at;
  std::string keyword_list_digest;
};

// ------------------------------------------------------------- documents

enum class TeiStatus { ok, service_error, parse_error };

struct TeiArtifact {
  std::string paper_id;
  std::string xml_bytes;
  TeiStatus status = TeiStatus::ok;
  std::string error_message;
};

struct BodySection {
  std::optional<std::string> heading;
  std::string text;

  bool operator==(const BodySection&) const = default;
};

struct StructuredDocument {
  std::string paper_id;
  std::string title;
  std::optional<std::string> abstract;
  std::vector<BodySection> body_sections;
  std::size_t char_count = 0;

  bool operator==(const StructuredDocument&) const = default;
};

// --------------------------------------------------------------- gateway

enum class ProviderKind { openai_compatible, anthropic_compatible, local_http, mock };

struct ModelSpec {
  ProviderKind provider = ProviderKind::mock;
  std::string model_name;
  double temperature = 0.0;
  int max_output_tokens = 1024;
};

struct CompletionRequest {
  ModelSpec model;
  std::string prompt_text;
  int repetition_index = 1;
  std::string request_id;
};

struct EmbeddingVector {
  std::vector<double> values;
  std::string provider_tag;

  std::size_t dimension() const { return values.size(); }
};

// ---------------------------------------------------------------- prompts

enum class TaskKind { relevance, extraction };

enum class RelevanceLabel { relevant, not_relevant };

inline std::string to_string(RelevanceLabel l) {
  return l == RelevanceLabel::relevant ? "relevant" : "not_relevant";
}

struct PromptStrategy {
  std::string name;
  TaskKind task = TaskKind::relevance;
  std::string template_text;
  int example_count = 0;
};

struct ExampleEntry {
  std::string paper_id;
  std::string title;
  std::string abstract;
  RelevanceLabel label = RelevanceLabel::relevant;
  EmbeddingVector embedding;
};

struct ExamplePool {
  std::vector<ExampleEntry> entries;
};

// -------------------------------------------------------------- inference

struct GroundTruthEntry {
  std::string paper_id;
  RelevanceLabel relevance = RelevanceLabel::not_relevant;
  std::vector<std::string> definitions;
};

enum class ParseStatus { ok, unparseable };

struct RunRecord {
  std::string run_id;
  std::string paper_id;
  std::string model_name;
  std::string strategy_name;
  TaskKind task = TaskKind::relevance;
  int repetition_index = 1;
  std::string raw_response;
  std::optional<RelevanceLabel> parsed_label;
  std::optional<std::string> extracted_definition;
  ParseStatus parse_status = ParseStatus::ok;
  std::string timestamp;
};

// ------------------------------------------------------ JSON conversions

void to_json(json& j, const PaperRecord& r);
void from_json(const json& j, PaperRecord& r);
void to_json(json& j, const CorpusManifest& m);
void from_json(const json& j, CorpusManifest& m);
void to_json(json& j, const StructuredDocument& d);
void from_json(const json& j, StructuredDocument& d);
void to_json(json& j, const GroundTruthEntry& e);
void from_json(const json& j, GroundTruthEntry& e);
void to_json(json& j, const RunRecord& r);
void from_json(const json& j, RunRecord& r);

}  // namespace taxomatic
