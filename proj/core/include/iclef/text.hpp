#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace iclef {

// ASCII-only helpers; multilingual normalization is out of scope.

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
/// Trims and collapses every run of whitespace into one space.
std::string collapse_whitespace(std::string_view s);
/// Maps typographic double quotes to `"` and single quotes to `'`.
std::string straighten_quotes(std::string_view s);
/// straighten_quotes + collapse_whitespace.
std::string normalize_surface(std::string_view s);

bool istarts_with(std::string_view s, std::string_view prefix);
bool contains_ci(std::string_view haystack, std::string_view needle);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Splits a document into sentences at terminal punctuation (. ! ?) that is
/// followed by whitespace. Empty fragments are dropped.
std::vector<std::string> split_sentences(std::string_view document);

/// Current UTC time as ISO-8601 with second precision.
std::string utc_timestamp();

}  // namespace iclef
