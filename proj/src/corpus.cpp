#include "taxomatic/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "taxomatic/jsonl.hpp"

namespace taxomatic::corpus {

std::string normalize_keyword(const std::string& raw) {
  std::string out;
  bool in_space = true;  // drop leading whitespace
  for (char ch : raw) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out += ' ';
    in_space = false;
    out += ch;
  }
  return out;
}

std::string dedup_key(const std::string& raw) {
  std::string key = normalize_keyword(raw);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return key;
}

ExpansionResult expand_keywords(const SeedKeywordSet& seeds, const KeywordExpander& llm) {
  seeds.validate();
  ExpansionResult result;
  std::set<std::string> seen;
  auto add = [&](const std::string& raw) {
    const auto key = dedup_key(raw);
    if (key.empty() || seen.contains(key)) return;
    seen.insert(key);
    result.keywords.push_back(normalize_keyword(raw));  // first occurrence keeps its casing
  };
  for (const auto& seed : seeds.seeds) add(seed);
  for (const auto& seed : seeds.seeds) {
    std::vector<std::string> generated;
    try {
      generated = llm(seed, seeds.expansions_per_seed);
    } catch (const std::exception& e) {
      result.partial = true;
      result.error = "expansion failed for seed '" + seed + "': " + e.what();
      return result;
    }
    if (generated.empty()) {
      result.warnings.push_back("no expansions generated for seed '" + seed + "'");
    }
    for (const auto& term : generated) add(term);
  }
  return result;
}

std::vector<PaperRecord> search_papers(const std::string& keyword, std::size_t limit,
                                       const SearchClient& client, std::size_t page_size) {
  if (limit < 1) throw std::invalid_argument("search_papers: limit must be >= 1");
  std::vector<PaperRecord> out;
  std::size_t offset = 0;
  for (;;) {
    const auto want = std::min(page_size, limit - out.size());
    auto page = client(keyword, offset, want);
    for (auto& record : page.records) {
      if (out.size() >= limit) break;
      record.matched_keywords.insert(keyword);
      out.push_back(std::move(record));
    }
    offset += want;
    if (out.size() >= limit || !page.has_more) break;
  }
  return out;
}

SearchClient make_semantic_scholar_client(const std::string& base_url,
                                          const std::string& api_key_env) {
  return [base_url, api_key_env](const std::string& keyword, std::size_t offset,
                                 std::size_t page_size) -> SearchPage {
    httplib::Client client(base_url);
    client.set_read_timeout(60, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(api_key_env.c_str())) {
      headers.emplace("x-api-key", key);
    }
    httplib::Params params{
        {"query", keyword},
        {"offset", std::to_string(offset)},
        {"limit", std::to_string(page_size)},
        {"fields", "title,abstract,citationCount,openAccessPdf,externalIds"}};
    // bounded retry with backoff; 429 waits and retries per gateway policy
    for (int attempt = 1; attempt <= 3; ++attempt) {
      auto res = client.Get("/graph/v1/paper/search", params, headers);
      if (res && res->status == 200) {
        auto body = nlohmann::json::parse(res->body);
        SearchPage page;
        for (const auto& item : body.value("data", nlohmann::json::array())) {
          PaperRecord r;
          r.paper_id = item.value("paperId", "");
          r.title = item.value("title", "");
          if (item.contains("abstract") && item["abstract"].is_string()) {
            r.abstract = item["abstract"].get<std::string>();
          }
          r.citation_count = item.value("citationCount", 0);
          if (item.contains("openAccessPdf") && item["openAccessPdf"].is_object() &&
              item["openAccessPdf"].contains("url")) {
            r.pdf_url = item["openAccessPdf"]["url"].get<std::string>();
            r.is_open_access = true;
          }
          if (!r.paper_id.empty()) page.records.push_back(std::move(r));
        }
        page.has_more = body.contains("next");
        return page;
      }
      const bool rate_limited = res && res->status == 429;
      if (attempt == 3) {
        throw std::runtime_error("semantic scholar search failed: " +
                                 (res ? "http " + std::to_string(res->status)
                                      : std::string("connection error")));
      }
      std::this_thread::sleep_for(std::chrono::seconds(rate_limited ? 2 * attempt : attempt));
    }
    return {};
  };
}

CorpusManifest dedupe_and_filter(const std::vector<PaperRecord>& records,
                                 std::int64_t min_citations) {
  if (min_citations < 0) throw std::invalid_argument("min_citations must be >= 0");
  std::map<std::string, PaperRecord> by_id;
  std::vector<std::string> order;  // first-seen order
  for (const auto& r : records) {
    auto [it, inserted] = by_id.try_emplace(r.paper_id, r);
    if (inserted) {
      order.push_back(r.paper_id);
      continue;
    }
    auto& kept = it->second;
    kept.matched_keywords.insert(r.matched_keywords.begin(), r.matched_keywords.end());
    if (r.citation_count > kept.citation_count) {
      const auto keywords = kept.matched_keywords;
      kept = r;
      kept.matched_keywords = keywords;
    }
  }
  CorpusManifest manifest;
  manifest.min_citations = min_citations;
  for (const auto& id : order) {
    if (by_id.at(id).citation_count >= min_citations) {
      manifest.records.push_back(by_id.at(id));
    }
  }
  return manifest;
}

std::string keyword_digest(const std::vector<std::string>& keywords) {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& k : keywords) {
    for (unsigned char c : k) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= '\n';
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_string(DownloadStatus s) {
  switch (s) {
    case DownloadStatus::success: return "success";
    case DownloadStatus::failure: return "failure";
    case DownloadStatus::skipped_not_open_access: return "skipped: not open access";
    case DownloadStatus::skipped_cached: return "skipped: cached";
  }
  return "unknown";
}

PdfFetcher make_http_fetcher() {
  return [](const std::string& url) -> std::string {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw std::runtime_error("bad url: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    const std::string host = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    httplib::Client client(host);
    client.set_follow_location(true);
    client.set_read_timeout(120, 0);
    auto res = client.Get(path);
    if (!res || res->status != 200) {
      throw std::runtime_error("download failed: " +
                               (res ? "http " + std::to_string(res->status)
                                    : std::string("connection error")));
    }
    return res->body;
  };
}

std::vector<DownloadOutcome> download_pdfs(const CorpusManifest& manifest,
                                           const std::filesystem::path& dest,
                                           const PdfFetcher& fetch, int max_concurrency) {
  std::filesystem::create_directories(dest);
  std::vector<DownloadOutcome> outcomes(manifest.records.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= manifest.records.size()) return;
      const auto& record = manifest.records[i];
      DownloadOutcome outcome{record.paper_id, DownloadStatus::success, ""};
      const auto target = dest / (record.paper_id + ".pdf");
      if (!record.pdf_url) {
        outcome.status = DownloadStatus::skipped_not_open_access;
      } else if (std::filesystem::exists(target)) {
        outcome.status = DownloadStatus::skipped_cached;
      } else {
        try {
          jsonl::write_text(target, fetch(*record.pdf_url));
        } catch (const std::exception& e) {
          outcome.status = DownloadStatus::failure;
          outcome.detail = e.what();
        }
      }
      outcomes[i] = std::move(outcome);
    }
  };
  std::vector<std::thread> threads;
  const int n_threads = std::max(1, std::min<int>(max_concurrency,
                                                  static_cast<int>(manifest.records.size())));
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return outcomes;
}

}  // namespace taxomatic::corpus
