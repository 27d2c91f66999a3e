#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "taxomatic/types.hpp"

namespace taxomatic::gateway {

struct CompletionResult {
  std::string text;
  double latency_ms = 0.0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct GatewayError {
  enum class Kind { transport, configuration };
  Kind kind = Kind::transport;
  std::string message;
};

template <typename T>
struct Result {
  std::optional<T> value;
  std::optional<GatewayError> error;

  bool ok() const { return value.has_value(); }
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  // A single attempt; transient failures are signalled via the error result
  // and retried by the gateway.
  virtual Result<CompletionResult> complete_once(const CompletionRequest& req) = 0;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual Result<EmbeddingVector> embed_once(const std::string& text) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  // Tests shrink the backoff; live runs keep the 1s default.
};

// Token-bucket limiter shared across worker threads.
class RateLimiter {
 public:
  RateLimiter(double permits_per_second, double burst);
  void acquire();

 private:
  std::mutex mu_;
  double tokens_;
  double rate_;
  double burst_;
  std::chrono::steady_clock::time_point last_;
};

struct GatewayConfig {
  RetryPolicy retry;
  int max_concurrency = 4;
  double requests_per_second = 10.0;
};

// Uniform entry point for chat completion and embeddings with retry,
// rate limiting and a concurrency bound.
class Gateway {
 public:
  Gateway(std::shared_ptr<ChatProvider> chat,
          std::shared_ptr<EmbeddingProvider> embedder,
          GatewayConfig config = {});

  Result<CompletionResult> complete(const CompletionRequest& request);
  EmbeddingVector embed(const std::string& text);

  struct RepetitionOutcome {
    int repetition_index = 1;
    Result<CompletionResult> result;
  };
  std::vector<RepetitionOutcome> run_repetitions(const CompletionRequest& request_template,
                                                 int n);

  int peak_in_flight() const { return peak_in_flight_.load(); }

 private:
  struct FlightGuard;

  std::shared_ptr<ChatProvider> chat_;
  std::shared_ptr<EmbeddingProvider> embedder_;
  GatewayConfig config_;
  RateLimiter limiter_;
  std::mutex flight_mu_;
  std::condition_variable flight_cv_;
  int in_flight_ = 0;
  std::atomic<int> peak_in_flight_{0};
};

// Deterministic pure function of (prompt_text, model_name, repetition_index).
class MockChatProvider : public ChatProvider {
 public:
  explicit MockChatProvider(std::map<std::string, std::string> canned = {});
  Result<CompletionResult> complete_once(const CompletionRequest& req) override;

  std::int64_t call_count() const { return calls_.load(); }

  static std::string deterministic_response(const std::string& prompt,
                                            const std::string& model_name,
                                            int repetition_index);

 private:
  std::map<std::string, std::string> canned_;
  std::atomic<std::int64_t> calls_{0};
};

// Seeded hash-projection of token counts; fixed dimension, unit norm.
class MockEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit MockEmbeddingProvider(std::size_t dim = 384, std::uint64_t seed = 42);
  std::size_t dimension() const override { return dim_; }
  Result<EmbeddingVector> embed_once(const std::string& text) override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// Generic JSON chat-completion adapter (openai-compatible shape).
class HttpChatProvider : public ChatProvider {
 public:
  HttpChatProvider(std::string base_url, std::string path, std::string api_key_env);
  Result<CompletionResult> complete_once(const CompletionRequest& req) override;

 private:
  std::string base_url_;
  std::string path_;
  std::string api_key_env_;
};

class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string base_url, std::string path, std::string model,
                        std::size_t dim, std::string api_key_env);
  std::size_t dimension() const override { return dim_; }
  Result<EmbeddingVector> embed_once(const std::string& text) override;

 private:
  std::string base_url_;
  std::string path_;
  std::string model_;
  std::size_t dim_;
  std::string api_key_env_;
};

}  // namespace taxomatic::gateway
