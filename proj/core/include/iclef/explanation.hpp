#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace iclef {

/// Which rationale an explanation describes. NoBias is the bias-task verdict
/// for a neutral sentence and carries no attributes.
enum class ExplanationKind { Informality, Formality, Bias, NoBias };

inline constexpr std::string_view kNoBiasSentinel = "This sentence does not contain bias.";

/// Canonical bias type names, normalized form.
inline constexpr std::string_view kFraming = "framing";
inline constexpr std::string_view kEpistemological = "epistemological";
inline constexpr std::string_view kDemographic = "demographic";

/// One named stylistic property with the excerpts supporting it.
///
/// `name` is normalized (lowercase, trimmed, single-spaced, straight quotes).
/// `reasoning` is the free text that follows the evidence inside the
/// parentheses, e.g. `"integral" implies a subjective evaluation` yields
/// evidence `integral` and reasoning `implies a subjective evaluation`.
struct Attribute {
  std::string name;
  std::vector<std::string> evidences;
  std::optional<std::string> reasoning;

  bool operator==(const Attribute&) const = default;
};

struct Explanation {
  ExplanationKind kind = ExplanationKind::Informality;
  std::vector<Attribute> attributes;

  bool operator==(const Explanation&) const = default;

  static Explanation no_bias() { return {ExplanationKind::NoBias, {}}; }
  bool is_bias_task() const { return kind == ExplanationKind::Bias || kind == ExplanationKind::NoBias; }
};

/// Parses the semi-structured format
///
///     expl := sentinel | attr ("," attr)*
///     attr := name [ "(" body ")" ]
///     body := evidence ("," evidence)* [reasoning] | reasoning
///
/// where evidence is a double-quoted excerpt. Names may contain quoted text
/// (`use of verb "to be"`). Input is surface-normalized first and a single
/// trailing period is dropped. The exact sentinel yields NoBias whatever
/// `kind` is; for Bias/NoBias every name must be a known bias type.
///
/// Throws ParseError on empty input, unbalanced quotes or parentheses, empty
/// names or evidences, and unknown bias labels.
Explanation parse_explanation(std::string_view text, ExplanationKind kind);

/// Canonical rendering, the inverse of parse_explanation. Bias names are
/// capitalized (`Framing`), other names stay lowercase.
std::string render_explanation(const Explanation& expl);

/// Surface form that render(parse(s)) reproduces for well-formed input:
/// straight quotes, collapsed whitespace, no trailing period (except on the
/// NoBias sentinel).
std::string normalize_explanation_text(std::string_view text);

std::string normalize_attribute_name(std::string_view name);

/// Fraction of evidence excerpts that occur (case-insensitively) in the
/// surface-normalized sentence. Explanations with no evidences, NoBias
/// included, score 1.0.
double trustworthiness(const Explanation& expl, std::string_view sentence);

std::set<std::string> attribute_set(const Explanation& expl);

/// Class used for bias statistics and F1: the first attribute's type
/// ("Framing", "Epistemological", "Demographic") or "No Bias".
std::string primary_bias_label(const Explanation& expl);

bool is_bias_label(std::string_view normalized_name);
/// "framing" -> "Framing"; other names are returned unchanged.
std::string display_name(std::string_view normalized_name, ExplanationKind kind);

std::string_view kind_name(ExplanationKind kind);

}  // namespace iclef
