#include "taxomatic/types.hpp"

#include <stdexcept>

namespace taxomatic {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

RelevanceLabel label_from_string(const std::string& s) {
  if (s == "relevant") return RelevanceLabel::relevant;
  if (s == "not_relevant") return RelevanceLabel::not_relevant;
  throw std::invalid_argument("unknown relevance label: " + s);
}

}  // namespace

void SeedKeywordSet::validate() const {
  if (seeds.empty()) throw std::invalid_argument("seed keyword set is empty");
  for (const auto& s : seeds) {
    if (trim(s).empty()) throw std::invalid_argument("blank seed keyword");
  }
  if (expansions_per_seed < 1) {
    throw std::invalid_argument("expansions_per_seed must be >= 1");
  }
}

void to_json(json& j, const PaperRecord& r) {
  j = json{{"paper_id", r.paper_id},
           {"title", r.title},
           {"citation_count", r.citation_count},
           {"matched_keywords", r.matched_keywords},
           {"is_open_access", r.is_open_access}};
  if (r.abstract) j["abstract"] = *r.abstract;
  if (r.pdf_url) j["pdf_url"] = *r.pdf_url;
}

void from_json(const json& j, PaperRecord& r) {
  j.at("paper_id").get_to(r.paper_id);
  j.at("title").get_to(r.title);
  j.at("citation_count").get_to(r.citation_count);
  j.at("matched_keywords").get_to(r.matched_keywords);
  j.at("is_open_access").get_to(r.is_open_access);
  if (j.contains("abstract")) r.abstract = j.at("abstract").get<std::string>();
  if (j.contains("pdf_url")) r.pdf_url = j.at("pdf_url").get<std::string>();
}

void to_json(json& j, const CorpusManifest& m) {
  j = json{{"records", m.records},
           {"min_citations", m.min_citations},
           {"created_at", m.created_at},
           {"keyword_list_digest", m.keyword_list_digest}};
}

void from_json(const json& j, CorpusManifest& m) {
  j.at("records").get_to(m.records);
  j.at("min_citations").get_to(m.min_citations);
  j.at("created_at").get_to(m.created_at);
  j.at("keyword_list_digest").get_to(m.keyword_list_digest);
}

void to_json(json& j, const StructuredDocument& d) {
  json sections = json::array();
  for (const auto& s : d.body_sections) {
    json sec{{"text", s.text}};
    if (s.heading) sec["heading"] = *s.heading;
    sections.push_back(std::move(sec));
  }
  j = json{{"paper_id", d.paper_id},
           {"title", d.title},
           {"body_sections", std::move(sections)},
           {"char_count", d.char_count}};
  if (d.abstract) j["abstract"] = *d.abstract;
}

void from_json(const json& j, StructuredDocument& d) {
  j.at("paper_id").get_to(d.paper_id);
  j.at("title").get_to(d.title);
  d.body_sections.clear();
  for (const auto& sec : j.at("body_sections")) {
    BodySection s;
    sec.at("text").get_to(s.text);
    if (sec.contains("heading")) s.heading = sec.at("heading").get<std::string>();
    d.body_sections.push_back(std::move(s));
  }
  j.at("char_count").get_to(d.char_count);
  if (j.contains("abstract")) d.abstract = j.at("abstract").get<std::string>();
}

void to_json(json& j, const GroundTruthEntry& e) {
  j = json{{"paper_id", e.paper_id},
           {"relevance", to_string(e.relevance)},
           {"definitions", e.definitions}};
}

void from_json(const json& j, GroundTruthEntry& e) {
  j.at("paper_id").get_to(e.paper_id);
  e.relevance = label_from_string(j.at("relevance").get<std::string>());
  j.at("definitions").get_to(e.definitions);
  if (e.relevance == RelevanceLabel::not_relevant && !e.definitions.empty()) {
    throw std::invalid_argument("not_relevant entry carries definitions: " + e.paper_id);
  }
}

void to_json(json& j, const RunRecord& r) {
  j = json{{"run_id", r.run_id},
           {"paper_id", r.paper_id},
           {"model_name", r.model_name},
           {"strategy_name", r.strategy_name},
           {"task", r.task == TaskKind::relevance ? "relevance" : "extraction"},
           {"repetition_index", r.repetition_index},
           {"raw_response", r.raw_response},
           {"parse_status", r.parse_status == ParseStatus::ok ? "ok" : "unparseable"},
           {"timestamp", r.timestamp}};
  if (r.parsed_label) j["parsed_label"] = to_string(*r.parsed_label);
  if (r.extracted_definition) j["extracted_definition"] = *r.extracted_definition;
}

void from_json(const json& j, RunRecord& r) {
  j.at("run_id").get_to(r.run_id);
  j.at("paper_id").get_to(r.paper_id);
  j.at("model_name").get_to(r.model_name);
  j.at("strategy_name").get_to(r.strategy_name);
  r.task = j.at("task").get<std::string>() == "relevance" ? TaskKind::relevance
                                                          : TaskKind::extraction;
  j.at("repetition_index").get_to(r.repetition_index);
  j.at("raw_response").get_to(r.raw_response);
  r.parse_status = j.at("parse_status").get<std::string>() == "ok"
                       ? ParseStatus::ok
                       : ParseStatus::unparseable;
  j.at("timestamp").get_to(r.timestamp);
  if (j.contains("parsed_label")) {
    r.parsed_label = label_from_string(j.at("parsed_label").get<std::string>());
  }
  if (j.contains("extracted_definition")) {
    r.extracted_definition = j.at("extracted_definition").get<std::string>();
  }
}

}  // namespace taxomatic
