#pragma once

#include "iclef/jsonl.hpp"

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace iclef {

enum class Role { System, User, Assistant };
std::string_view role_name(Role r);

struct ChatMessage {
  Role role = Role::User;
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

struct DecodingParams {
  double temperature = 0.7;
  double top_p = 0.9;
  int max_new_tokens = 256;

  /// Generation defaults: temperature 0.7, top_p 0.9, 256 new tokens.
  static DecodingParams generation() { return {}; }
  /// Critic calls decode greedily so critiques are reproducible.
  static DecodingParams critic() { return {0.0, 1.0, 256}; }
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  std::string model_id;
  double temperature = 0.7;
  double top_p = 0.9;
  int max_new_tokens = 256;

  /// Throws SchemaViolation if the first message is an assistant turn, the
  /// request is empty, or a parameter is out of range.
  void validate() const;

  /// OpenAI-compatible chat-completions body (`max_tokens` on the wire).
  json to_json() const;
  static ChatRequest from_json(const json& j);

  /// Compact dump of to_json() with sorted keys.
  std::string canonical() const;
  /// SHA-256 over canonical(); the replay cache key.
  std::string digest() const;
};

struct FewShot {
  std::string input;
  std::string output;
};

/// [system] + (user, assistant) per shot in order + final user query.
ChatRequest assemble_fewshot(std::string_view system_instruction, std::span<const FewShot> shots,
                             std::string_view query, std::string model_id,
                             DecodingParams params = DecodingParams::generation());

/// Something that can answer a chat request: an HTTP endpoint, a fixture
/// table, a test double. Implementations throw TransportError/RateLimited for
/// retryable failures and GatewayError for permanent ones.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string send(const ChatRequest& req) = 0;
};

/// Directory of `<digest>.json` files, one per recorded request.
class ReplayCache {
 public:
  explicit ReplayCache(std::filesystem::path dir);

  std::optional<std::string> lookup(const std::string& digest) const;
  void store(const ChatRequest& req, const std::string& response);
  std::size_t size() const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path file_for(const std::string& digest) const;

  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
};

enum class GatewayMode { Live, Record, Replay };
std::string_view mode_name(GatewayMode m);
GatewayMode parse_mode(std::string_view name);

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30'000};

  /// Delay before retry number `attempt` (1-based).
  std::chrono::milliseconds backoff(int attempt) const;
};

struct GatewayOptions {
  GatewayMode mode = GatewayMode::Live;
  std::size_t max_inflight = 4;
  RetryPolicy retry;
  /// Injected for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct GatewayStats {
  std::size_t cache_hits = 0;
  std::size_t transport_calls = 0;
  std::size_t retries = 0;
};

/// Uniform entry point for chat completions.
///
/// Live calls the transport. Record serves cached responses and records new
/// ones. Replay only reads the cache and raises CacheMiss otherwise; it never
/// touches the transport, which may be null. At most `max_inflight` transport
/// calls run at once across all callers.
class Gateway {
 public:
  Gateway(GatewayOptions options, std::shared_ptr<ChatTransport> transport, std::shared_ptr<ReplayCache> cache);

  std::string complete(const ChatRequest& req);
  std::string complete(const ChatRequest& req, const RetryPolicy& policy);

  GatewayMode mode() const { return options_.mode; }
  std::size_t max_inflight() const { return options_.max_inflight; }
  GatewayStats stats() const;

 private:
  std::string call_with_retries(const ChatRequest& req, const RetryPolicy& policy);

  GatewayOptions options_;
  std::shared_ptr<ChatTransport> transport_;
  std::shared_ptr<ReplayCache> cache_;

  std::mutex slot_mu_;
  std::condition_variable slot_cv_;
  std::size_t inflight_ = 0;

  mutable std::mutex stats_mu_;
  GatewayStats stats_;
};

/// POSTs to `<base>/chat/completions` and returns choices[0].message.content.
class HttpChatTransport : public ChatTransport {
 public:
  HttpChatTransport(std::string base_url, std::string api_key,
                    std::chrono::seconds timeout = std::chrono::seconds(120));

  /// Reads ICLEF_API_BASE (required) and ICLEF_API_KEY.
  static std::shared_ptr<HttpChatTransport> from_environment();

  std::string send(const ChatRequest& req) override;

 private:
  std::string origin_;
  std::string path_prefix_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

/// Serves responses from a JSONL table of {"query", "response"} rows keyed on
/// the final user message. Used to record fixture caches offline.
class TableTransport : public ChatTransport {
 public:
  explicit TableTransport(const std::filesystem::path& table);
  TableTransport(std::vector<std::pair<std::string, std::string>> rows);

  std::string send(const ChatRequest& req) override;
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::string, std::string> table_;
};

}  // namespace iclef
