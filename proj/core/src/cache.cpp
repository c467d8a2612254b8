#include "iclef/error.hpp"
#include "iclef/gateway.hpp"
#include "iclef/text.hpp"

#include <mutex>

namespace iclef {

namespace fs = std::filesystem;

ReplayCache::ReplayCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

fs::path ReplayCache::file_for(const std::string& digest) const { return dir_ / (digest + ".json"); }

std::optional<std::string> ReplayCache::lookup(const std::string& digest) const {
  std::shared_lock lock(mu_);
  auto path = file_for(digest);
  if (!fs::exists(path)) return std::nullopt;
  auto entry = json::parse(read_file(path), nullptr, false);
  if (entry.is_discarded() || !entry.contains("response") || !entry["response"].is_string()) {
    throw SchemaViolation("corrupt cache entry " + path.string());
  }
  return entry["response"].get<std::string>();
}

void ReplayCache::store(const ChatRequest& req, const std::string& response) {
  const auto digest = req.digest();
  ordered_json entry;
  entry["request_digest"] = digest;
  entry["request"] = req.to_json();
  entry["response"] = response;
  entry["timestamp"] = utc_timestamp();
  std::unique_lock lock(mu_);
  write_file_atomic(file_for(digest), entry.dump(2) + "\n");
}

std::size_t ReplayCache::size() const {
  std::shared_lock lock(mu_);
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir_)) {
    if (e.path().extension() == ".json") ++n;
  }
  return n;
}

}  // namespace iclef
