#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "taxomatic/types.hpp"

namespace taxomatic::corpus {

// trim, collapse internal whitespace; lowercase only for dedup comparison
std::string normalize_keyword(const std::string& raw);
std::string dedup_key(const std::string& raw);

// Generates expansion terms for one seed. Throws on unrecoverable provider
// failure; partial progress is surfaced by expand_keywords.
using KeywordExpander =
    std::function<std::vector<std::string>(const std::string& seed, int count)>;

struct ExpansionResult {
  std::vector<std::string> keywords;  // seeds first, then expansions in order
  std::vector<std::string> warnings;
  bool partial = false;  // provider failed midway; keywords hold progress so far
  std::string error;
};

ExpansionResult expand_keywords(const SeedKeywordSet& seeds, const KeywordExpander& llm);

struct SearchPage {
  std::vector<PaperRecord> records;
  bool has_more = false;
};

// One page of search results, offset-based. Implementations over the
// Semantic Scholar Graph API request title, abstract, citationCount,
// openAccessPdf and externalIds.
using SearchClient =
    std::function<SearchPage(const std::string& keyword, std::size_t offset, std::size_t page_size)>;

std::vector<PaperRecord> search_papers(const std::string& keyword, std::size_t limit,
                                       const SearchClient& client,
                                       std::size_t page_size = 100);

SearchClient make_semantic_scholar_client(const std::string& base_url,
                                          const std::string& api_key_env);

// Pure: one record per paper_id (union matched_keywords, keep max
// citation_count), then drop records below min_citations.
CorpusManifest dedupe_and_filter(const std::vector<PaperRecord>& records,
                                 std::int64_t min_citations);

std::string keyword_digest(const std::vector<std::string>& keywords);

enum class DownloadStatus { success, failure, skipped_not_open_access, skipped_cached };

struct DownloadOutcome {
  std::string paper_id;
  DownloadStatus status = DownloadStatus::success;
  std::string detail;
};

std::string to_string(DownloadStatus s);

// Fetches one URL; returns the body or throws.
using PdfFetcher = std::function<std::string(const std::string& url)>;

PdfFetcher make_http_fetcher();

// Idempotent: files already present under <dest>/<paper_id>.pdf are skipped.
// Individual failures are recorded, never abort the batch.
std::vector<DownloadOutcome> download_pdfs(const CorpusManifest& manifest,
                                           const std::filesystem::path& dest,
                                           const PdfFetcher& fetch,
                                           int max_concurrency = 4);

}  // namespace taxomatic::corpus
