#include "taxomatic/gateway.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace taxomatic::gateway {

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

RateLimiter::RateLimiter(double permits_per_second, double burst)
    : tokens_(burst), rate_(permits_per_second), burst_(burst),
      last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    tokens_ = std::min(burst_, tokens_ + rate_ * std::chrono::duration<double>(now - last_).count());
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::milliseconds(
        static_cast<int>(std::ceil((1.0 - tokens_) / rate_ * 1000.0))));
    lock.lock();
  }
}

struct Gateway::FlightGuard {
  Gateway& gw;
  explicit FlightGuard(Gateway& g) : gw(g) {
    std::unique_lock lock(gw.flight_mu_);
    gw.flight_cv_.wait(lock, [&] { return gw.in_flight_ < gw.config_.max_concurrency; });
    ++gw.in_flight_;
    int peak = gw.peak_in_flight_.load();
    while (gw.in_flight_ > peak && !gw.peak_in_flight_.compare_exchange_weak(peak, gw.in_flight_)) {
    }
  }
  ~FlightGuard() {
    {
      std::lock_guard lock(gw.flight_mu_);
      --gw.in_flight_;
    }
    gw.flight_cv_.notify_one();
  }
};

Gateway::Gateway(std::shared_ptr<ChatProvider> chat, std::shared_ptr<EmbeddingProvider> embedder,
                 GatewayConfig config)
    : chat_(std::move(chat)),
      embedder_(std::move(embedder)),
      config_(config),
      limiter_(config.requests_per_second, std::max(1.0, config.requests_per_second)) {}

Result<CompletionResult> Gateway::complete(const CompletionRequest& request) {
  FlightGuard guard(*this);
  auto backoff = config_.retry.initial_backoff;
  Result<CompletionResult> last;
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    limiter_.acquire();
    const auto start = std::chrono::steady_clock::now();
    last = chat_->complete_once(request);
    if (last.ok()) {
      last.value->latency_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      return last;
    }
    if (last.error->kind == GatewayError::Kind::configuration) return last;  // non-retryable
    if (attempt < config_.retry.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  return last;
}

EmbeddingVector Gateway::embed(const std::string& text) {
  auto trimmed_begin = text.find_first_not_of(" \t\r\n");
  if (trimmed_begin == std::string::npos) {
    throw std::invalid_argument("embed: text empty after trimming");
  }
  FlightGuard guard(*this);
  auto backoff = config_.retry.initial_backoff;
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    limiter_.acquire();
    auto result = embedder_->embed_once(text);
    if (result.ok()) return std::move(*result.value);
    if (attempt == config_.retry.max_attempts) {
      throw std::runtime_error("embedding provider failed: " + result.error->message);
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
  throw std::runtime_error("unreachable");
}

std::vector<Gateway::RepetitionOutcome> Gateway::run_repetitions(
    const CompletionRequest& request_template, int n) {
  if (n < 1) throw std::invalid_argument("run_repetitions: n must be >= 1");
  std::vector<RepetitionOutcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(n));
  for (int rep = 1; rep <= n; ++rep) {
    CompletionRequest request = request_template;
    request.repetition_index = rep;
    request.request_id = request_template.request_id + "#" + std::to_string(rep);
    outcomes.push_back({rep, complete(request)});
  }
  return outcomes;
}

MockChatProvider::MockChatProvider(std::map<std::string, std::string> canned)
    : canned_(std::move(canned)) {}

std::string MockChatProvider::deterministic_response(const std::string& prompt,
                                                     const std::string& model_name,
                                                     int repetition_index) {
  const auto h = fnv1a(prompt, fnv1a(model_name, fnv1a(std::to_string(repetition_index))));
  // Mix of parseable and unparseable shapes so parsing and aggregation paths
  // are all exercised offline.
  static const char* responses[] = {
      "Relevant.",
      "This article is relevant to media bias research.",
      "Yes, the article addresses the topic directly.",
      "Not relevant.",
      "This article is not relevant to media bias research.",
      "No, the article concerns an unrelated field.",
      "The assessment depends on further context.",
  };
  return responses[h % (sizeof(responses) / sizeof(responses[0]))];
}

Result<CompletionResult> MockChatProvider::complete_once(const CompletionRequest& req) {
  calls_.fetch_add(1);
  CompletionResult result;
  auto it = canned_.find(req.prompt_text);
  result.text = it != canned_.end()
                    ? it->second
                    : deterministic_response(req.prompt_text, req.model.model_name,
                                             req.repetition_index);
  result.prompt_tokens = static_cast<std::int64_t>(req.prompt_text.size() / 4);
  result.completion_tokens = static_cast<std::int64_t>(result.text.size() / 4);
  return {result, std::nullopt};
}

MockEmbeddingProvider::MockEmbeddingProvider(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {}

Result<EmbeddingVector> MockEmbeddingProvider::embed_once(const std::string& text) {
  // token-count projection: each lowercase token seeds a gaussian direction,
  // scaled by its count; the sum is normalized
  std::map<std::string, int> counts;
  std::string token;
  for (char ch : text + " ") {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      token += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else if (!token.empty()) {
      ++counts[token];
      token.clear();
    }
  }
  EmbeddingVector v;
  v.provider_tag = "mock";
  v.values.assign(dim_, 0.0);
  for (const auto& [tok, count] : counts) {
    std::mt19937_64 rng(fnv1a(tok, seed_));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < dim_; ++i) {
      v.values[i] += static_cast<double>(count) * gauss(rng);
    }
  }
  double norm = 0.0;
  for (double x : v.values) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    v.values[0] = 1.0;  // text with no alphanumeric tokens
  } else {
    for (double& x : v.values) x /= norm;
  }
  return {v, std::nullopt};
}

HttpChatProvider::HttpChatProvider(std::string base_url, std::string path,
                                   std::string api_key_env)
    : base_url_(std::move(base_url)), path_(std::move(path)),
      api_key_env_(std::move(api_key_env)) {}

Result<CompletionResult> HttpChatProvider::complete_once(const CompletionRequest& req) {
  httplib::Client client(base_url_);
  client.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(api_key_env_.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  nlohmann::json body{{"model", req.model.model_name},
                      {"temperature", req.model.temperature},
                      {"max_tokens", req.model.max_output_tokens},
                      {"messages", {{{"role", "user"}, {"content", req.prompt_text}}}}};
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    return {std::nullopt, GatewayError{GatewayError::Kind::transport, "connection failed"}};
  }
  if (res->status == 401 || res->status == 403) {
    return {std::nullopt,
            GatewayError{GatewayError::Kind::configuration, "authentication failed"}};
  }
  if (res->status != 200) {
    return {std::nullopt, GatewayError{GatewayError::Kind::transport,
                                       "http " + std::to_string(res->status)}};
  }
  try {
    auto parsed = nlohmann::json::parse(res->body);
    CompletionResult out;
    out.text = parsed["choices"][0]["message"]["content"].get<std::string>();
    if (parsed.contains("usage")) {
      out.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
      out.completion_tokens = parsed["usage"].value("completion_tokens", 0);
    }
    return {out, std::nullopt};
  } catch (const std::exception& e) {
    return {std::nullopt, GatewayError{GatewayError::Kind::transport,
                                       std::string("bad response body: ") + e.what()}};
  }
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, std::string path,
                                             std::string model, std::size_t dim,
                                             std::string api_key_env)
    : base_url_(std::move(base_url)), path_(std::move(path)), model_(std::move(model)),
      dim_(dim), api_key_env_(std::move(api_key_env)) {}

Result<EmbeddingVector> HttpEmbeddingProvider::embed_once(const std::string& text) {
  httplib::Client client(base_url_);
  client.set_read_timeout(60, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(api_key_env_.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  nlohmann::json body{{"model", model_}, {"input", text}};
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res || res->status != 200) {
    return {std::nullopt,
            GatewayError{GatewayError::Kind::transport,
                         res ? "http " + std::to_string(res->status) : "connection failed"}};
  }
  try {
    auto parsed = nlohmann::json::parse(res->body);
    EmbeddingVector v;
    v.provider_tag = model_;
    v.values = parsed["data"][0]["embedding"].get<std::vector<double>>();
    if (v.values.size() != dim_) {
      return {std::nullopt,
              GatewayError{GatewayError::Kind::transport, "unexpected embedding dimension"}};
    }
    return {v, std::nullopt};
  } catch (const std::exception& e) {
    return {std::nullopt, GatewayError{GatewayError::Kind::transport,
                                       std::string("bad response body: ") + e.what()}};
  }
}

}  // namespace taxomatic::gateway
