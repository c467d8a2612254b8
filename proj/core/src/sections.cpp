#include "iclef/sections.hpp"

#include "iclef/text.hpp"

namespace iclef {
namespace {

std::string_view strip_markers(std::string_view line) {
  while (!line.empty()) {
    char c = line.front();
    if (c == ' ' || c == '\t' || c == '-' || c == '*' || c == '#' || c == '`') {
      line.remove_prefix(1);
    } else {
      break;
    }
  }
  return line;
}

struct HeaderMatch {
  const std::string* key = nullptr;
  std::string_view rest;
};

HeaderMatch match_header(std::string_view line, const std::vector<SectionSpec>& specs) {
  auto body = strip_markers(line);
  HeaderMatch best;
  std::size_t best_len = 0;
  for (const auto& spec : specs) {
    for (const auto& h : spec.headers) {
      if (h.size() <= best_len || !istarts_with(body, h)) continue;
      auto rest = body.substr(h.size());
      // Allow "**Header**:" and "`Header`:" spellings.
      while (!rest.empty() && (rest.front() == '*' || rest.front() == '`' || rest.front() == ' ')) {
        rest.remove_prefix(1);
      }
      if (rest.empty() || rest.front() != ':') continue;
      rest.remove_prefix(1);
      best = {&spec.key, rest};
      best_len = h.size();
    }
  }
  return best;
}

}  // namespace

std::map<std::string, std::string> parse_sections(std::string_view text, const std::vector<SectionSpec>& specs) {
  std::map<std::string, std::string> out;
  const std::string* current = nullptr;
  bool current_is_new = false;
  for (const auto& raw_line : split(text, '\n')) {
    auto m = match_header(raw_line, specs);
    if (m.key) {
      current_is_new = !out.contains(*m.key);
      current = m.key;
      if (current_is_new) out[*current] = trim(m.rest);
      continue;
    }
    if (!current || !current_is_new) continue;
    auto cont = trim(raw_line);
    if (cont.empty()) continue;
    auto& value = out[*current];
    if (!value.empty()) value += ' ';
    value += cont;
  }
  return out;
}

std::string render_sections(const std::vector<std::pair<std::string_view, std::string>>& sections) {
  std::string out;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (i > 0) out += '\n';
    out.append(sections[i].first);
    out += ": ";
    out += sections[i].second;
  }
  return out;
}

}  // namespace iclef
