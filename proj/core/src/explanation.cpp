#include "iclef/explanation.hpp"

#include "iclef/error.hpp"
#include "iclef/text.hpp"

#include <cctype>

namespace iclef {
namespace {

constexpr std::string_view kSentinelBody = "this sentence does not contain bias";

bool is_sentinel(std::string_view normalized) {
  auto lowered = to_lower(normalized);
  if (!lowered.empty() && lowered.back() == '.') lowered.pop_back();
  return lowered == kSentinelBody;
}

class Parser {
 public:
  Parser(std::string text, ExplanationKind kind) : t_(std::move(text)), kind_(kind) {}

  Explanation run() {
    Explanation out;
    out.kind = kind_ == ExplanationKind::NoBias ? ExplanationKind::Bias : kind_;
    while (true) {
      skip_spaces();
      out.attributes.push_back(attribute());
      skip_spaces();
      if (at_end()) break;
      if (t_[pos_] != ',') fail("expected ',' between attributes");
      ++pos_;
      skip_spaces();
      if (at_end()) fail("trailing ','");
    }
    if (out.is_bias_task()) {
      for (const auto& a : out.attributes) {
        if (!is_bias_label(a.name)) {
          throw ParseError(0, "unknown bias label '" + a.name + "'");
        }
      }
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= t_.size(); }

  void skip_spaces() {
    while (!at_end() && t_[pos_] == ' ') ++pos_;
  }

  [[noreturn]] void fail(const std::string& reason) const { throw ParseError(pos_, reason); }

  // Returns the index of the quote closing the one at `open`.
  std::size_t closing_quote(std::size_t open) const {
    auto close = t_.find('"', open + 1);
    if (close == std::string::npos) throw ParseError(open, "unbalanced quote");
    return close;
  }

  Attribute attribute() {
    const std::size_t start = pos_;
    while (!at_end()) {
      char c = t_[pos_];
      if (c == '"') {
        pos_ = closing_quote(pos_) + 1;
        continue;
      }
      if (c == '(' || c == ',') break;
      if (c == ')') fail("unexpected ')'");
      ++pos_;
    }
    Attribute attr;
    attr.name = normalize_attribute_name(std::string_view(t_).substr(start, pos_ - start));
    if (attr.name.empty()) throw ParseError(start, "empty attribute name");
    if (!at_end() && t_[pos_] == '(') {
      ++pos_;
      body(attr);
    }
    return attr;
  }

  void body(Attribute& attr) {
    skip_spaces();
    while (!at_end() && t_[pos_] == '"') {
      const std::size_t open = pos_;
      const std::size_t close = closing_quote(open);
      auto evidence = trim(std::string_view(t_).substr(open + 1, close - open - 1));
      if (evidence.empty()) throw ParseError(open, "empty evidence");
      attr.evidences.push_back(std::move(evidence));
      pos_ = close + 1;
      skip_spaces();
      // Another evidence only when a comma is followed by a quote.
      if (!at_end() && t_[pos_] == ',') {
        std::size_t look = pos_ + 1;
        while (look < t_.size() && t_[look] == ' ') ++look;
        if (look < t_.size() && t_[look] == '"') {
          pos_ = look;
          continue;
        }
      }
      break;
    }
    const std::size_t reason_start = pos_;
    int depth = 0;
    while (true) {
      if (at_end()) throw ParseError(reason_start, "unbalanced parenthesis");
      char c = t_[pos_];
      if (c == '"') {
        pos_ = closing_quote(pos_) + 1;
        continue;
      }
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) break;
        --depth;
      }
      ++pos_;
    }
    std::string reasoning = trim(std::string_view(t_).substr(reason_start, pos_ - reason_start));
    if (!attr.evidences.empty() && !reasoning.empty() && reasoning.front() == ',') {
      reasoning = trim(std::string_view(reasoning).substr(1));
    }
    if (!reasoning.empty()) attr.reasoning = std::move(reasoning);
    ++pos_;  // ')'
  }

  std::string t_;
  ExplanationKind kind_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string normalize_attribute_name(std::string_view name) { return to_lower(normalize_surface(name)); }

std::string normalize_explanation_text(std::string_view text) {
  auto t = normalize_surface(text);
  if (is_sentinel(t)) return std::string(kNoBiasSentinel);
  if (!t.empty() && t.back() == '.') {
    t.pop_back();
    while (!t.empty() && t.back() == ' ') t.pop_back();
  }
  return t;
}

Explanation parse_explanation(std::string_view text, ExplanationKind kind) {
  auto t = normalize_explanation_text(text);
  if (t.empty()) throw ParseError(0, "empty explanation");
  if (t == kNoBiasSentinel) return Explanation::no_bias();
  return Parser(std::move(t), kind).run();
}

std::string display_name(std::string_view normalized_name, ExplanationKind kind) {
  std::string out(normalized_name);
  if ((kind == ExplanationKind::Bias || kind == ExplanationKind::NoBias) && is_bias_label(normalized_name)) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

std::string render_explanation(const Explanation& expl) {
  if (expl.kind == ExplanationKind::NoBias) return std::string(kNoBiasSentinel);
  std::string out;
  for (std::size_t i = 0; i < expl.attributes.size(); ++i) {
    const auto& a = expl.attributes[i];
    if (i > 0) out += ", ";
    out += display_name(a.name, expl.kind);
    if (a.evidences.empty() && !a.reasoning) continue;
    out += " (";
    for (std::size_t e = 0; e < a.evidences.size(); ++e) {
      if (e > 0) out += ", ";
      out += '"';
      out += a.evidences[e];
      out += '"';
    }
    if (a.reasoning) {
      if (!a.evidences.empty()) out += ' ';
      out += *a.reasoning;
    }
    out += ')';
  }
  return out;
}

double trustworthiness(const Explanation& expl, std::string_view sentence) {
  const auto haystack = normalize_surface(sentence);
  std::size_t total = 0;
  std::size_t found = 0;
  for (const auto& a : expl.attributes) {
    for (const auto& e : a.evidences) {
      ++total;
      if (contains_ci(haystack, normalize_surface(e))) ++found;
    }
  }
  if (total == 0) return 1.0;
  return static_cast<double>(found) / static_cast<double>(total);
}

std::set<std::string> attribute_set(const Explanation& expl) {
  std::set<std::string> names;
  for (const auto& a : expl.attributes) names.insert(a.name);
  return names;
}

bool is_bias_label(std::string_view n) { return n == kFraming || n == kEpistemological || n == kDemographic; }

std::string primary_bias_label(const Explanation& expl) {
  if (expl.kind == ExplanationKind::NoBias || expl.attributes.empty()) return "No Bias";
  return display_name(expl.attributes.front().name, ExplanationKind::Bias);
}

std::string_view kind_name(ExplanationKind kind) {
  switch (kind) {
    case ExplanationKind::Informality: return "informality";
    case ExplanationKind::Formality: return "formality";
    case ExplanationKind::Bias: return "bias";
    case ExplanationKind::NoBias: return "no_bias";
  }
  return "unknown";
}

}  // namespace iclef
