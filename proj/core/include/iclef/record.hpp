#pragma once

#include "iclef/explanation.hpp"
#include "iclef/jsonl.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iclef {

enum class Task { Formality, BiasNeutralization };
enum class Provenance { TeacherRaw, IclefFixed };

std::string_view task_name(Task task);  // "formality" | "bias"
Task parse_task(std::string_view name);
std::string_view provenance_name(Provenance p);  // "teacher_raw" | "iclef_fixed"
Provenance parse_provenance(std::string_view name);

/// Explanation kind of the source sentence's rationale for a task.
ExplanationKind source_kind(Task task);

/// One dataset row.
///
/// Formality: source = informal s_i, source_expl = e_i, paraphrase = formal
/// s_f, paraphrase_expl = e_f. Bias: source = s_b, source_expl = e_b,
/// paraphrase = s_n and no paraphrase_expl.
struct StyleRecord {
  std::string id;
  Task task = Task::Formality;
  std::string source;
  Explanation source_expl;
  std::string paraphrase;
  std::optional<Explanation> paraphrase_expl;
  Provenance provenance = Provenance::TeacherRaw;
  std::optional<std::string> critic_note;
  /// Corpus reference paraphrase, kept when the input had one.
  std::optional<std::string> reference;

  bool operator==(const StyleRecord&) const = default;

  /// Throws SchemaViolation when a record invariant does not hold.
  void validate() const;
};

/// Canonical JSONL row. Explanations are stored rendered.
ordered_json to_json(const StyleRecord& r);
/// Parses a row; explanation strings go through the grammar, so a malformed
/// explanation surfaces as ParseError and a missing field as SchemaViolation.
StyleRecord record_from_json(const json& j);

std::vector<StyleRecord> read_records(const std::filesystem::path& path);
void write_records(const std::filesystem::path& path, const std::vector<StyleRecord>& records);

}  // namespace iclef
