#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace iclef {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Reads one JSON value per non-blank line. A trailing line without a
/// newline terminator is treated as a torn write and skipped when
/// `tolerate_torn_tail` is set; otherwise it must parse.
std::vector<json> read_jsonl(const std::filesystem::path& path, bool tolerate_torn_tail = false);

void write_jsonl(const std::filesystem::path& path, const std::vector<ordered_json>& rows);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
/// Writes to a sibling temp file and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Cuts a file back to its last newline, dropping a torn final line.
void truncate_torn_tail(const std::filesystem::path& path);

/// Append-only line log. Each `append` writes one full line and flushes it to
/// stable storage before returning. Appends are serialized internally.
class AppendLog {
 public:
  explicit AppendLog(std::filesystem::path path, bool sync = true);
  ~AppendLog();
  AppendLog(const AppendLog&) = delete;
  AppendLog& operator=(const AppendLog&) = delete;

  void append(std::string_view line);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  bool sync_;
  std::mutex mu_;
};

}  // namespace iclef
