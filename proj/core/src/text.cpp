#include "iclef/text.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>

namespace iclef {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

struct QuoteMapping {
  std::string_view from;
  char to;
};

constexpr QuoteMapping kQuoteMappings[] = {
    {"\xE2\x80\x9C", '"'},   // left double
    {"\xE2\x80\x9D", '"'},   // right double
    {"\xE2\x80\x9E", '"'},   // low double
    {"\xE2\x80\x9F", '"'},   // reversed double
    {"\xE2\x80\xB3", '"'},   // double prime
    {"\xE2\x80\x98", '\''},  // left single
    {"\xE2\x80\x99", '\''},  // right single
    {"\xE2\x80\x9A", '\''},  // low single
    {"\xE2\x80\x9B", '\''},  // reversed single
};

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string straighten_quotes(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    bool mapped = false;
    if (static_cast<unsigned char>(s[i]) == 0xE2) {
      for (const auto& m : kQuoteMappings) {
        if (s.substr(i, m.from.size()) == m.from) {
          out.push_back(m.to);
          i += m.from.size();
          mapped = true;
          break;
        }
      }
    }
    if (!mapped) out.push_back(s[i++]);
  }
  return out;
}

std::string normalize_surface(std::string_view s) { return collapse_whitespace(straighten_quotes(s)); }

bool istarts_with(std::string_view s, std::string_view prefix) {
  if (prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (lower(s[i]) != lower(prefix[i])) return false;
  }
  return true;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return true;
  auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                        [](char a, char b) { return lower(a) == lower(b); });
  return it != haystack.end();
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      return parts;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view document) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    auto sentence = collapse_whitespace(document.substr(start, end - start));
    if (!sentence.empty()) sentences.push_back(std::move(sentence));
  };
  for (std::size_t i = 0; i < document.size(); ++i) {
    char c = document[i];
    if ((c == '.' || c == '!' || c == '?') && i + 1 < document.size() && is_space(document[i + 1])) {
      flush(i + 1);
      start = i + 1;
    }
  }
  flush(document.size());
  return sentences;
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace iclef
