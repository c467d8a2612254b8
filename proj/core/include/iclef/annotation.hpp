#pragma once

#include "iclef/feedback.hpp"
#include "iclef/jsonl.hpp"
#include "iclef/record.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace iclef {

enum class TaskKind { FeedbackCorrection, Preference, Acceptability };
enum class TaskStatus { Open, Done };

std::string_view task_kind_name(TaskKind k);  // "feedback" | "preference" | "acceptability"
TaskKind parse_task_kind(std::string_view name);
std::string_view task_status_name(TaskStatus s);  // "open" | "done"
TaskStatus parse_task_status(std::string_view name);

/// An instance queued for review. `payload` holds the record and, for
/// preference tasks, exactly two candidate renderings; an optional
/// `category` string groups tasks in reports. A task is Done once `quota`
/// distinct annotators have judged it.
struct AnnotationTask {
  std::string task_id;
  TaskKind kind = TaskKind::FeedbackCorrection;
  json payload;
  std::size_t quota = 1;

  /// Throws SchemaViolation on a malformed payload.
  void validate() const;
  std::string category() const;
};

ordered_json to_json(const AnnotationTask& t);
AnnotationTask task_from_json(const json& j);

/// Choice domains: feedback {Correct, Incorrect}, preference {A, B, Equal},
/// acceptability {Acceptable, Unacceptable}. An Incorrect feedback judgment
/// carries a correction: {"flagged_attributes": [{"name", "reason"}]} for
/// formality or {"corrected_explanation": "..."} for bias, plus an
/// optional "note".
struct Judgment {
  std::string task_id;
  std::string annotator_id;
  std::string choice;
  std::optional<json> correction;
  std::string timestamp;

  std::string judgment_id() const { return task_id + ":" + annotator_id; }
};

ordered_json to_json(const Judgment& j);
Judgment judgment_from_json(const json& j);

/// Samples `n` records into Open tasks with ids task-NNNNNN starting at
/// `first_index`. Bias feedback tasks are stratified by bias class.
/// Preference tasks pair the paraphrase (candidate A) with the reference
/// (candidate B). Throws SampleExceedsCorpus when n exceeds the records.
std::vector<AnnotationTask> enqueue_sample(const std::vector<StyleRecord>& records, std::size_t n, TaskKind kind,
                                           std::uint64_t seed, std::size_t quota = 1, std::size_t first_index = 1);

/// Converts a feedback judgment into the critic's ExpertFeedback row.
ExpertFeedback feedback_from_judgment(const AnnotationTask& task, const Judgment& j);

struct SubmitResult {
  std::string judgment_id;
  TaskStatus status = TaskStatus::Open;
  bool feedback_written = false;
};

struct TaskFilter {
  std::optional<TaskKind> kind;
  std::optional<TaskStatus> status;
  /// Only tasks this annotator has not judged yet.
  std::optional<std::string> annotator;
};

/// Flat-file annotation store in a directory:
///   tasks.jsonl      one AnnotationTask per line
///   judgments.jsonl  one Judgment per line, the commit log
///   feedback.jsonl   ExpertFeedback rows derived from feedback judgments
/// Every write reaches stable storage before the call returns. Opening a
/// store drops torn final lines and rewrites feedback rows missing for
/// committed judgments.
class AnnotationStore {
 public:
  explicit AnnotationStore(std::filesystem::path dir);

  /// Appends tasks; throws SchemaViolation on duplicate ids.
  void add_tasks(const std::vector<AnnotationTask>& tasks);
  std::vector<AnnotationTask> list_tasks(const TaskFilter& filter) const;
  AnnotationTask get_task(const std::string& task_id) const;
  TaskStatus status(const std::string& task_id) const;
  std::size_t task_count() const;

  /// Throws TaskNotFound, TaskAlreadyDone (repeat by the same annotator or
  /// a Done task) or SchemaViolation (choice outside the task's domain,
  /// malformed correction).
  SubmitResult submit(Judgment j);

  std::vector<Judgment> judgments() const;
  std::vector<ExpertFeedback> feedback() const;
  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path feedback_path() const { return dir_ / "feedback.jsonl"; }

 private:
  TaskStatus status_locked(const AnnotationTask& t) const;

  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
  std::vector<AnnotationTask> tasks_;
  std::map<std::string, std::size_t> task_index_;
  std::vector<Judgment> judgments_;
  std::map<std::string, std::set<std::string>> judged_by_;  // task -> annotators
  std::vector<ExpertFeedback> feedback_;
  std::unique_ptr<AppendLog> tasks_log_;
  std::unique_ptr<AppendLog> judgments_log_;
  std::unique_ptr<AppendLog> feedback_log_;
};

struct CategoryAgreement {
  std::string category;
  std::size_t pairs = 0;
  std::size_t agreements = 0;
  double accuracy() const { return pairs ? static_cast<double>(agreements) / static_cast<double>(pairs) : 0.0; }
};

struct AgreementReport {
  std::vector<CategoryAgreement> categories;
  double macro_average = 0.0;
};

/// Pairwise accuracy between annotators on shared tasks, per category.
/// Throws NoOverlap when no task has two annotators.
AgreementReport agreement_report(const std::vector<AnnotationTask>& tasks, const std::vector<Judgment>& judgments);
ordered_json to_json(const AgreementReport& r);

struct PreferenceCounts {
  std::string category;
  std::size_t a = 0, b = 0, equal = 0;
  std::size_t acceptable = 0, unacceptable = 0;
  /// (A + Equal) / preference judgments.
  double preferred_or_equal() const;
  /// Acceptable / acceptability judgments; with `dispreferred_as_unacceptable`
  /// a B preference also counts as one unacceptable judgment.
  double acceptability(bool dispreferred_as_unacceptable = false) const;
};

std::vector<PreferenceCounts> preference_report(const std::vector<AnnotationTask>& tasks,
                                                const std::vector<Judgment>& judgments);
ordered_json to_json(const std::vector<PreferenceCounts>& r, bool dispreferred_as_unacceptable);

}  // namespace iclef
