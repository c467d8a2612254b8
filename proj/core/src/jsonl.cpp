#include "iclef/jsonl.hpp"

#include "iclef/error.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace iclef {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("short write to " + path.string());
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  write_file(tmp, content);
  fs::rename(tmp, path);
}

std::vector<json> read_jsonl(const fs::path& path, bool tolerate_torn_tail) {
  auto content = read_file(path);
  std::vector<json> rows;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < content.size()) {
    ++line_no;
    auto end = content.find('\n', start);
    bool terminated = end != std::string::npos;
    if (!terminated) end = content.size();
    std::string_view line(content.data() + start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    if (!terminated && tolerate_torn_tail) {
      auto parsed = json::parse(line, nullptr, false);
      if (parsed.is_discarded()) break;
      rows.push_back(std::move(parsed));
      break;
    }
    try {
      rows.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw SchemaViolation(path.string() + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
  }
  return rows;
}

void write_jsonl(const fs::path& path, const std::vector<ordered_json>& rows) {
  std::string out;
  for (const auto& row : rows) {
    out += row.dump();
    out += '\n';
  }
  write_file(path, out);
}

void truncate_torn_tail(const fs::path& path) {
  if (!fs::exists(path)) return;
  auto content = read_file(path);
  if (content.empty() || content.back() == '\n') return;
  auto last = content.rfind('\n');
  fs::resize_file(path, last == std::string::npos ? 0 : last + 1);
}

AppendLog::AppendLog(fs::path path, bool sync) : path_(std::move(path)), sync_(sync) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  truncate_torn_tail(path_);
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open " + path_.string() + ": " + std::strerror(errno));
}

AppendLog::~AppendLog() {
  if (fd_ >= 0) ::close(fd_);
}

void AppendLog::append(std::string_view line) {
  std::string buf(line);
  buf.push_back('\n');
  std::lock_guard lock(mu_);
  const char* p = buf.data();
  std::size_t left = buf.size();
  while (left > 0) {
    auto n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("append to " + path_.string() + " failed: " + std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (sync_ && ::fdatasync(fd_) != 0) {
    throw IoError("fdatasync " + path_.string() + " failed: " + std::strerror(errno));
  }
}

}  // namespace iclef
