#include "iclef/gateway.hpp"

#include "iclef/digest.hpp"
#include "iclef/error.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace iclef {

std::string_view role_name(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

namespace {

Role parse_role(std::string_view s) {
  if (s == "system") return Role::System;
  if (s == "user") return Role::User;
  if (s == "assistant") return Role::Assistant;
  throw SchemaViolation("unknown chat role '" + std::string(s) + "'");
}

}  // namespace

void ChatRequest::validate() const {
  if (messages.empty()) throw SchemaViolation("chat request without messages");
  if (messages.front().role == Role::Assistant) {
    throw SchemaViolation("first chat message must be system or user");
  }
  if (model_id.empty()) throw SchemaViolation("chat request without model id");
  if (!(temperature >= 0.0)) throw SchemaViolation("temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw SchemaViolation("top_p must be in (0, 1]");
  if (max_new_tokens < 1) throw SchemaViolation("max_new_tokens must be >= 1");
}

json ChatRequest::to_json() const {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  return {{"model", model_id},
          {"messages", std::move(msgs)},
          {"temperature", temperature},
          {"top_p", top_p},
          {"max_tokens", max_new_tokens}};
}

ChatRequest ChatRequest::from_json(const json& j) {
  try {
    ChatRequest r;
    r.model_id = j.at("model").get<std::string>();
    for (const auto& m : j.at("messages")) {
      r.messages.push_back({parse_role(m.at("role").get<std::string>()), m.at("content").get<std::string>()});
    }
    r.temperature = j.value("temperature", 0.7);
    r.top_p = j.value("top_p", 0.9);
    r.max_new_tokens = j.value("max_tokens", 256);
    r.validate();
    return r;
  } catch (const json::exception& e) {
    throw SchemaViolation(std::string("malformed chat request: ") + e.what());
  }
}

std::string ChatRequest::canonical() const { return to_json().dump(); }

std::string ChatRequest::digest() const { return sha256_hex(canonical()); }

ChatRequest assemble_fewshot(std::string_view system_instruction, std::span<const FewShot> shots,
                             std::string_view query, std::string model_id, DecodingParams params) {
  ChatRequest req;
  req.messages.reserve(2 + 2 * shots.size());
  req.messages.push_back({Role::System, std::string(system_instruction)});
  for (const auto& shot : shots) {
    req.messages.push_back({Role::User, shot.input});
    req.messages.push_back({Role::Assistant, shot.output});
  }
  req.messages.push_back({Role::User, std::string(query)});
  req.model_id = std::move(model_id);
  req.temperature = params.temperature;
  req.top_p = params.top_p;
  req.max_new_tokens = params.max_new_tokens;
  return req;
}

std::string_view mode_name(GatewayMode m) {
  switch (m) {
    case GatewayMode::Live: return "live";
    case GatewayMode::Record: return "record";
    case GatewayMode::Replay: return "replay";
  }
  return "live";
}

GatewayMode parse_mode(std::string_view name) {
  if (name == "live") return GatewayMode::Live;
  if (name == "record") return GatewayMode::Record;
  if (name == "replay") return GatewayMode::Replay;
  throw UsageError("unknown mode '" + std::string(name) + "' (expected live|record|replay)");
}

std::chrono::milliseconds RetryPolicy::backoff(int attempt) const {
  double ms = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, std::max(0, attempt - 1));
  ms = std::min(ms, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

Gateway::Gateway(GatewayOptions options, std::shared_ptr<ChatTransport> transport,
                 std::shared_ptr<ReplayCache> cache)
    : options_(std::move(options)), transport_(std::move(transport)), cache_(std::move(cache)) {
  if (options_.max_inflight == 0) options_.max_inflight = 1;
  if (!options_.sleep) options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (options_.mode != GatewayMode::Live && !cache_) {
    throw UsageError(std::string(mode_name(options_.mode)) + " mode needs a cache directory");
  }
  if (options_.mode != GatewayMode::Replay && !transport_) {
    throw UsageError(std::string(mode_name(options_.mode)) + " mode needs an endpoint");
  }
}

std::string Gateway::complete(const ChatRequest& req) { return complete(req, options_.retry); }

std::string Gateway::complete(const ChatRequest& req, const RetryPolicy& policy) {
  req.validate();
  if (options_.mode == GatewayMode::Live) return call_with_retries(req, policy);

  const auto digest = req.digest();
  if (auto hit = cache_->lookup(digest)) {
    std::lock_guard lock(stats_mu_);
    ++stats_.cache_hits;
    return *hit;
  }
  if (options_.mode == GatewayMode::Replay) throw CacheMiss("no cached response for request " + digest);

  auto response = call_with_retries(req, policy);
  cache_->store(req, response);
  return response;
}

std::string Gateway::call_with_retries(const ChatRequest& req, const RetryPolicy& policy) {
  const int attempts = std::max(1, policy.max_attempts);
  for (int attempt = 1;; ++attempt) {
    std::chrono::milliseconds delay{0};
    try {
      {
        std::unique_lock lock(slot_mu_);
        slot_cv_.wait(lock, [&] { return inflight_ < options_.max_inflight; });
        ++inflight_;
      }
      struct SlotRelease {
        Gateway* g;
        ~SlotRelease() {
          {
            std::lock_guard lock(g->slot_mu_);
            --g->inflight_;
          }
          g->slot_cv_.notify_one();
        }
      } release{this};
      {
        std::lock_guard lock(stats_mu_);
        ++stats_.transport_calls;
      }
      return transport_->send(req);
    } catch (const RateLimited& e) {
      if (attempt >= attempts) throw;
      delay = e.retry_after().count() > 0 ? e.retry_after() : policy.backoff(attempt);
    } catch (const TransportError&) {
      if (attempt >= attempts) throw;
      delay = policy.backoff(attempt);
    }
    {
      std::lock_guard lock(stats_mu_);
      ++stats_.retries;
    }
    options_.sleep(delay);
  }
}

GatewayStats Gateway::stats() const {
  std::lock_guard lock(stats_mu_);
  return stats_;
}

TableTransport::TableTransport(const std::filesystem::path& table) {
  for (const auto& row : read_jsonl(table)) {
    table_[row.at("query").get<std::string>()] = row.at("response").get<std::string>();
  }
}

TableTransport::TableTransport(std::vector<std::pair<std::string, std::string>> rows) {
  for (auto& [q, r] : rows) table_[std::move(q)] = std::move(r);
}

std::string TableTransport::send(const ChatRequest& req) {
  const auto& query = req.messages.back().content;
  auto it = table_.find(query);
  if (it == table_.end()) {
    throw GatewayError("fixture table has no response for query: " + query.substr(0, 80));
  }
  return it->second;
}

}  // namespace iclef
