#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iclef {

// Section headers of the line-oriented output format shared by teacher
// completions, instruction exports and student outputs:
//
//   Informal Attributes: textese ("asap"), colloquialism ("throw out")
//   Formal Paraphrase: I would dispose of them promptly.
//   Formal Attributes: lexical sophistication ("dispose", "promptly")
namespace section {
inline constexpr std::string_view kInformalAttributes = "Informal Attributes";
inline constexpr std::string_view kFormalAttributes = "Formal Attributes";
inline constexpr std::string_view kFormalParaphrase = "Formal Paraphrase";
inline constexpr std::string_view kInformalParaphrase = "Informal Paraphrase";
inline constexpr std::string_view kBiasAttributes = "Bias Attributes";
inline constexpr std::string_view kNeutralizedParaphrase = "Neutralized Paraphrase";
}  // namespace section

/// A section key plus every header spelling that introduces it.
struct SectionSpec {
  std::string key;
  std::vector<std::string> headers;
};

/// Splits `text` into sections. A line starts a section when, after optional
/// list markers (`-`, `*`) and `**` emphasis, it begins with one of the
/// headers (case-insensitive, longest match wins) followed by `:`. Following
/// lines without a header continue the current section. Text before the
/// first header is ignored. Repeated keys keep the first occurrence.
std::map<std::string, std::string> parse_sections(std::string_view text, const std::vector<SectionSpec>& specs);

/// `header: value` lines joined by newlines.
std::string render_sections(const std::vector<std::pair<std::string_view, std::string>>& sections);

}  // namespace iclef
