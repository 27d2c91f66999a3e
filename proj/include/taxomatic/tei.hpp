#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "taxomatic/types.hpp"

namespace taxomatic::tei {

// Sends one PDF to the structuring service and returns the TEI XML body, or
// an error message. Implementations wrap GROBID's full-text endpoint.
using StructuringService =
    std::function<std::optional<std::string>(const std::string& pdf_bytes,
                                             std::string& error_out)>;

StructuringService make_grobid_service(const std::string& base_url,
                                       int max_attempts = 3);

// Never throws for per-document failures; service problems and malformed XML
// come back as service_error artifacts.
TeiArtifact process_pdf(const std::string& paper_id, const std::string& pdf_bytes,
                        const StructuringService& service);

struct ParseOutcome {
  StructuredDocument document;
  TeiStatus status = TeiStatus::ok;  // parse_error when the title is missing
  std::string error_message;
};

// Title from the TEI header, abstract from the abstract element, body
// sections from body divisions in document order. Elements are matched by
// local name; references and bibliography are excluded.
ParseOutcome parse_tei(const TeiArtifact& artifact);

struct BatchEntry {
  std::string paper_id;
  TeiStatus status = TeiStatus::ok;
  std::string error_message;
};

struct BatchReport {
  std::vector<BatchEntry> entries;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  std::optional<double> success_ratio;  // absent when no documents were seen
  std::string service_configuration = "grobid processFulltextDocument, default consolidation";
};

std::optional<double> success_ratio(std::size_t succeeded, std::size_t total);

// Runs every PDF under pdf_dir that belongs to the manifest through the
// service, writes TEI XML and parsed documents via the sinks, and reports
// per-paper status.
BatchReport batch_process(const CorpusManifest& manifest,
                          const std::filesystem::path& pdf_dir,
                          const StructuringService& service,
                          const std::function<void(const TeiArtifact&)>& tei_sink,
                          const std::function<void(const StructuredDocument&)>& doc_sink,
                          int max_concurrency = 4);

}  // namespace taxomatic::tei
