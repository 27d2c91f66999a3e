#include "taxomatic/tei.hpp"

#include <atomic>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <httplib.h>

#include "taxomatic/jsonl.hpp"

namespace taxomatic::tei {

namespace pt = boost::property_tree;

namespace {

// tolerate namespace prefixes across service versions
std::string local_name(const std::string& qualified) {
  auto colon = qualified.rfind(':');
  return colon == std::string::npos ? qualified : qualified.substr(colon + 1);
}

// non-prose TEI elements excluded from body text
const std::set<std::string>& excluded_elements() {
  static const std::set<std::string> excluded{"ref",   "note",    "figure", "table",
                                              "listBibl", "bibl", "formula", "back"};
  return excluded;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void append_chunk(std::string& out, const std::string& chunk) {
  const auto t = trim(chunk);
  if (t.empty()) return;
  if (!out.empty()) out += ' ';
  out += t;
}

// text nodes concatenated in document order, single-space joined
void collect_text(const pt::ptree& node, std::string& out,
                  const std::set<std::string>& skip = excluded_elements()) {
  for (const auto& [key, child] : node) {
    if (key == "<xmlattr>") continue;
    if (key == "<xmltext>") {
      append_chunk(out, child.data());
      continue;
    }
    if (skip.contains(local_name(key))) continue;
    collect_text(child, out, skip);
  }
}

const pt::ptree* find_child(const pt::ptree& node, const std::string& name) {
  for (const auto& [key, child] : node) {
    if (local_name(key) == name) return &child;
  }
  return nullptr;
}

const pt::ptree* find_descendant(const pt::ptree& node, const std::string& name) {
  for (const auto& [key, child] : node) {
    if (key == "<xmlattr>" || key == "<xmltext>") continue;
    if (local_name(key) == name) return &child;
    if (const auto* found = find_descendant(child, name)) return found;
  }
  return nullptr;
}

bool parse_xml(const std::string& bytes, pt::ptree& out, std::string& error) {
  try {
    std::istringstream stream(bytes);
    pt::read_xml(stream, out, pt::xml_parser::no_comments | pt::xml_parser::no_concat_text);
    return true;
  } catch (const std::exception& e) {
    error = e.what();
    return false;
  }
}

}  // namespace

StructuringService make_grobid_service(const std::string& base_url, int max_attempts) {
  return [base_url, max_attempts](const std::string& pdf_bytes,
                                  std::string& error_out) -> std::optional<std::string> {
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
      httplib::Client client(base_url);
      client.set_read_timeout(300, 0);
      httplib::MultipartFormDataItems items = {
          {"input", pdf_bytes, "document.pdf", "application/pdf"}};
      auto res = client.Post("/api/processFulltextDocument", items);
      if (res && res->status == 200) return res->body;
      error_out = res ? "grobid http " + std::to_string(res->status) + ": " + res->body
                      : "grobid unreachable";
      if (attempt < max_attempts) {
        std::this_thread::sleep_for(std::chrono::seconds(attempt));
      }
    }
    return std::nullopt;
  };
}

TeiArtifact process_pdf(const std::string& paper_id, const std::string& pdf_bytes,
                        const StructuringService& service) {
  if (pdf_bytes.empty()) throw std::invalid_argument("process_pdf: empty pdf bytes");
  TeiArtifact artifact;
  artifact.paper_id = paper_id;
  std::string error;
  auto xml = service(pdf_bytes, error);
  if (!xml) {
    artifact.status = TeiStatus::service_error;
    artifact.error_message = error;
    return artifact;
  }
  pt::ptree unused;
  if (xml->empty() || !parse_xml(*xml, unused, error)) {
    artifact.status = TeiStatus::parse_error;
    artifact.error_message = "malformed TEI: " + error;
    return artifact;
  }
  artifact.xml_bytes = std::move(*xml);
  artifact.status = TeiStatus::ok;
  return artifact;
}

ParseOutcome parse_tei(const TeiArtifact& artifact) {
  if (artifact.status != TeiStatus::ok) {
    throw std::invalid_argument("parse_tei: artifact status is not ok");
  }
  ParseOutcome outcome;
  outcome.document.paper_id = artifact.paper_id;

  pt::ptree tree;
  std::string error;
  if (!parse_xml(artifact.xml_bytes, tree, error)) {
    outcome.status = TeiStatus::parse_error;
    outcome.error_message = "malformed XML: " + error;
    return outcome;
  }
  const pt::ptree* root = find_child(tree, "TEI");
  if (!root) {
    outcome.status = TeiStatus::parse_error;
    outcome.error_message = "no TEI root element";
    return outcome;
  }

  if (const auto* header = find_descendant(*root, "teiHeader")) {
    if (const auto* title_stmt = find_descendant(*header, "titleStmt")) {
      if (const auto* title = find_child(*title_stmt, "title")) {
        std::string text;
        collect_text(*title, text);
        outcome.document.title = text;
      }
    }
    if (const auto* abstract = find_descendant(*header, "abstract")) {
      std::string text;
      collect_text(*abstract, text);
      if (!text.empty()) outcome.document.abstract = text;
    }
  }
  if (outcome.document.title.empty()) {
    outcome.status = TeiStatus::parse_error;
    outcome.error_message = "missing title element";
  }

  if (const auto* body = find_descendant(*root, "body")) {
    for (const auto& [key, div] : *body) {
      if (local_name(key) != "div") continue;
      BodySection section;
      if (const auto* head = find_child(div, "head")) {
        std::string heading;
        collect_text(*head, heading);
        if (!heading.empty()) section.heading = heading;
      }
      auto skip = excluded_elements();
      skip.insert("head");
      collect_text(div, section.text, skip);
      if (!section.text.empty()) {
        outcome.document.body_sections.push_back(std::move(section));
      }
    }
  }

  outcome.document.char_count = outcome.document.abstract.value_or("").size();
  for (const auto& s : outcome.document.body_sections) {
    outcome.document.char_count += s.text.size();
  }
  return outcome;
}

std::optional<double> success_ratio(std::size_t succeeded, std::size_t total) {
  if (total == 0) return std::nullopt;
  return static_cast<double>(succeeded) / static_cast<double>(total);
}

BatchReport batch_process(const CorpusManifest& manifest,
                          const std::filesystem::path& pdf_dir,
                          const StructuringService& service,
                          const std::function<void(const TeiArtifact&)>& tei_sink,
                          const std::function<void(const StructuredDocument&)>& doc_sink,
                          int max_concurrency) {
  BatchReport report;
  report.entries.resize(manifest.records.size());
  std::atomic<std::size_t> next{0};
  std::mutex sink_mu;

  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= manifest.records.size()) return;
      const auto& record = manifest.records[i];
      BatchEntry entry{record.paper_id, TeiStatus::ok, ""};
      const auto pdf_path = pdf_dir / (record.paper_id + ".pdf");
      if (!std::filesystem::exists(pdf_path)) {
        entry.status = TeiStatus::service_error;
        entry.error_message = "pdf not found";
      } else {
        auto artifact = process_pdf(record.paper_id, jsonl::read_text(pdf_path), service);
        if (artifact.status != TeiStatus::ok) {
          entry.status = artifact.status;
          entry.error_message = artifact.error_message;
        } else {
          auto parsed = parse_tei(artifact);
          entry.status = parsed.status;
          entry.error_message = parsed.error_message;
          std::lock_guard lock(sink_mu);
          if (tei_sink) tei_sink(artifact);
          // failed documents are excluded from downstream stages
          if (parsed.status == TeiStatus::ok && doc_sink) doc_sink(parsed.document);
        }
      }
      report.entries[i] = std::move(entry);
    }
  };
  std::vector<std::thread> threads;
  const int n_threads = std::max(1, std::min<int>(max_concurrency,
                                                  static_cast<int>(manifest.records.size())));
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  for (const auto& entry : report.entries) {
    (entry.status == TeiStatus::ok ? report.succeeded : report.failed) += 1;
  }
  report.success_ratio = success_ratio(report.succeeded, report.entries.size());
  return report;
}

}  // namespace taxomatic::tei
