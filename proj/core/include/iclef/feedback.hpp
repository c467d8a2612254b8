#pragma once

#include "iclef/jsonl.hpp"
#include "iclef/record.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace iclef {

enum class Verdict { Correct, Incorrect };

std::string_view verdict_name(Verdict v);  // "correct" | "incorrect"
Verdict parse_verdict(std::string_view name);

struct FlaggedAttribute {
  std::string name;  // normalized
  std::string reason;
  bool operator==(const FlaggedAttribute&) const = default;
};

/// One expert correction of a teacher explanation.
///
/// Formality feedback lists the attributes of `shown_explanation` that are
/// wrong; bias feedback carries a replacement explanation instead.
struct ExpertFeedback {
  std::string record_id;
  Task task = Task::Formality;
  std::string shown_sentence;
  std::string shown_explanation;  // rendered
  Verdict verdict = Verdict::Correct;
  std::vector<FlaggedAttribute> flagged_attributes;
  std::optional<std::string> corrected_explanation;  // rendered
  std::string annotator_id;
  std::string created_at;
  std::optional<std::string> note;
  /// Set when the row was derived from an annotation-service judgment.
  std::optional<std::string> judgment_id;

  bool operator==(const ExpertFeedback&) const = default;

  /// Throws SchemaViolation unless: annotator_id is set; a Correct verdict
  /// carries no corrections; an Incorrect formality verdict flags at least
  /// one attribute; an Incorrect bias verdict carries a parseable
  /// corrected_explanation.
  void validate() const;

  /// Class used to stratify bias feedback: the corrected label for an
  /// Incorrect verdict, the shown label otherwise.
  std::string bias_class() const;
};

ordered_json to_json(const ExpertFeedback& f);
ExpertFeedback feedback_from_json(const json& j);

/// Reads an append-only feedback file. A torn final line is ignored.
std::vector<ExpertFeedback> read_feedback(const std::filesystem::path& path);

/// Draws `k` distinct entries of `task` from `store`, deterministically under
/// `seed`. Bias draws are stratified by bias_class(). Throws
/// InsufficientFeedback when fewer than `k` entries match.
std::vector<ExpertFeedback> select_feedback_shots(const std::vector<ExpertFeedback>& store, std::size_t k, Task task,
                                                  std::uint64_t seed);

}  // namespace iclef
