#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "scenfuzz/error.h"

namespace scenfuzz {

struct ChatMessage {
  std::string role;  // "system" or "user"
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 1.0;
};

// One failed round trip to a remote model (connection refused, timeout,
// retryable status after the backend's own backoff).
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what)
      : Error(ErrorCode::kBackendUnreachable, what) {}
};

// Chat-completion style text generator. Implementations must tolerate
// concurrent Complete() calls.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string_view name() const = 0;
  // Returns the assistant message text; throws TransportError on transport
  // failure.
  virtual std::string Complete(const ChatRequest& request) = 0;
};

// Replays canned responses in order, repeating the last one once exhausted.
class MockBackend : public LlmBackend {
 public:
  explicit MockBackend(std::vector<std::string> responses);

  std::string_view name() const override { return "mock"; }
  std::string Complete(const ChatRequest& request) override;

  // Every request seen so far, in order.
  std::vector<ChatRequest> requests() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> responses_;
  size_t next_ = 0;
  std::vector<ChatRequest> requests_;
};

// Offline stand-in for a language model. Reads the seed scenario from the
// prompt and answers with an adversarial edit computed analytically for the
// environment. Replies are a pure function of the prompt text.
class HeuristicBackend : public LlmBackend {
 public:
  // Computes new parameters for a seed; `salt` is a hash of the prompt used
  // for deterministic variety between calls.
  using Strategy = std::function<std::vector<double>(
      const std::vector<double>& seed, uint64_t salt)>;

  // Throws Error(kConfig) when no strategy exists for `env_name`.
  explicit HeuristicBackend(const std::string& env_name);
  HeuristicBackend(std::string env_name, Strategy strategy);

  std::string_view name() const override { return "heuristic"; }
  std::string Complete(const ChatRequest& request) override;

  static void RegisterStrategy(const std::string& env_name, Strategy strategy);
  static bool HasStrategy(const std::string& env_name);

 private:
  std::string env_name_;
  Strategy strategy_;
};

// Built-in strategies, exposed for tests.
// Collision avoidance: keeps the geometry but steers the intruder onto an
// intercept course with the ownship's unturned path.
std::vector<double> CollisionCourseEdit(const std::vector<double>& seed,
                                        uint64_t salt);
// Coop-nav: rearranges landmarks so two agents' greedy targets make them
// travel head-on toward each other.
std::vector<double> CoopNavCrossingEdit(const std::vector<double>& seed,
                                        uint64_t salt);

// 64-bit FNV-1a.
uint64_t HashText(std::string_view text);

struct HttpBackendOptions {
  // e.g. "https://api.openai.com/v1"; requests go to {base_url}/chat/completions.
  std::string base_url;
  std::string model;
  std::string api_key;
  std::chrono::milliseconds timeout{60000};
  // Retries on HTTP 429/5xx, with exponential backoff.
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  // Test hook; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// OpenAI-compatible chat completions client.
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  std::string_view name() const override { return "http"; }
  std::string Complete(const ChatRequest& request) override;

  // JSON body sent for `request`.
  std::string RequestBody(const ChatRequest& request) const;
  // Extracts choices[0].message.content; throws Error(kGeneration) when the
  // payload lacks it.
  static std::string ExtractContent(std::string_view response_body);

 private:
  HttpBackendOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

}  // namespace scenfuzz
