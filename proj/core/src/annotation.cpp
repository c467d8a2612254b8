#include "iclef/annotation.hpp"

#include "iclef/error.hpp"
#include "iclef/rng.hpp"
#include "iclef/text.hpp"

#include <cstdio>
#include <mutex>

namespace iclef {

namespace fs = std::filesystem;

std::string_view task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::FeedbackCorrection: return "feedback";
    case TaskKind::Preference: return "preference";
    case TaskKind::Acceptability: return "acceptability";
  }
  return "feedback";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "feedback") return TaskKind::FeedbackCorrection;
  if (name == "preference") return TaskKind::Preference;
  if (name == "acceptability") return TaskKind::Acceptability;
  throw SchemaViolation("unknown task kind '" + std::string(name) + "'");
}

std::string_view task_status_name(TaskStatus s) { return s == TaskStatus::Open ? "open" : "done"; }

TaskStatus parse_task_status(std::string_view name) {
  if (name == "open") return TaskStatus::Open;
  if (name == "done") return TaskStatus::Done;
  throw SchemaViolation("unknown task status '" + std::string(name) + "'");
}

void AnnotationTask::validate() const {
  if (task_id.empty()) throw SchemaViolation("task without id");
  if (quota == 0) throw SchemaViolation("task " + task_id + " has a zero quota");
  if (!payload.is_object() || !payload.contains("record")) {
    throw SchemaViolation("task " + task_id + " payload has no record");
  }
  try {
    record_from_json(payload["record"]);
  } catch (const ParseError& e) {
    throw SchemaViolation("task " + task_id + " record: " + e.what());
  }
  if (kind == TaskKind::Preference) {
    const auto& c = payload.contains("candidates") ? payload["candidates"] : json();
    if (!c.is_array() || c.size() != 2 || !c[0].is_string() || !c[1].is_string()) {
      throw SchemaViolation("preference task " + task_id + " needs exactly two candidates");
    }
  }
  if (kind == TaskKind::Acceptability && !(payload.contains("candidate") && payload["candidate"].is_string())) {
    throw SchemaViolation("acceptability task " + task_id + " needs a candidate");
  }
}

std::string AnnotationTask::category() const {
  if (payload.contains("category") && payload["category"].is_string()) return payload["category"].get<std::string>();
  return std::string(task_kind_name(kind));
}

ordered_json to_json(const AnnotationTask& t) {
  ordered_json j;
  j["task_id"] = t.task_id;
  j["kind"] = task_kind_name(t.kind);
  j["quota"] = t.quota;
  j["payload"] = ordered_json::parse(t.payload.dump());
  return j;
}

AnnotationTask task_from_json(const json& j) {
  try {
    AnnotationTask t;
    t.task_id = j.at("task_id").get<std::string>();
    t.kind = parse_task_kind(j.at("kind").get<std::string>());
    t.quota = j.value("quota", std::size_t{1});
    t.payload = j.at("payload");
    t.validate();
    return t;
  } catch (const json::exception& e) {
    throw SchemaViolation(std::string("malformed task: ") + e.what());
  }
}

ordered_json to_json(const Judgment& j) {
  ordered_json o;
  o["judgment_id"] = j.judgment_id();
  o["task_id"] = j.task_id;
  o["annotator_id"] = j.annotator_id;
  o["choice"] = j.choice;
  o["correction"] = j.correction ? ordered_json::parse(j.correction->dump()) : ordered_json();
  o["timestamp"] = j.timestamp;
  return o;
}

Judgment judgment_from_json(const json& j) {
  if (!j.is_object()) throw SchemaViolation("judgment must be a JSON object");
  auto str = [&](const char* key, bool required) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      if (required) throw SchemaViolation(std::string("judgment needs '") + key + "'");
      return "";
    }
    if (!it->is_string()) throw SchemaViolation(std::string("judgment field '") + key + "' must be a string");
    return it->get<std::string>();
  };
  Judgment out;
  out.task_id = str("task_id", true);
  out.annotator_id = trim(str("annotator_id", true));
  out.choice = str("choice", true);
  out.timestamp = str("timestamp", false);
  if (auto it = j.find("correction"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw SchemaViolation("judgment correction must be an object");
    out.correction = *it;
  }
  if (out.annotator_id.empty()) throw SchemaViolation("judgment needs a non-empty annotator_id");
  return out;
}

namespace {

std::string task_id_for(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "task-%06zu", index);
  return buf;
}

const std::set<std::string>& choice_domain(TaskKind k) {
  static const std::set<std::string> feedback = {"Correct", "Incorrect"};
  static const std::set<std::string> preference = {"A", "B", "Equal"};
  static const std::set<std::string> acceptability = {"Acceptable", "Unacceptable"};
  switch (k) {
    case TaskKind::FeedbackCorrection: return feedback;
    case TaskKind::Preference: return preference;
    case TaskKind::Acceptability: return acceptability;
  }
  return feedback;
}

}  // namespace

std::vector<AnnotationTask> enqueue_sample(const std::vector<StyleRecord>& records, std::size_t n, TaskKind kind,
                                           std::uint64_t seed, std::size_t quota, std::size_t first_index) {
  if (n > records.size()) {
    throw SampleExceedsCorpus("cannot sample " + std::to_string(n) + " of " + std::to_string(records.size()) +
                              " records");
  }
  Rng rng(seed);
  std::vector<std::size_t> picked;
  const bool stratify = kind == TaskKind::FeedbackCorrection && !records.empty() &&
                        records.front().task == Task::BiasNeutralization;
  if (stratify) {
    std::map<std::string, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < records.size(); ++i) strata[primary_bias_label(records[i].source_expl)].push_back(i);
    picked = stratified_sample(std::move(strata), n, rng);
  } else {
    picked = sample_indices(records.size(), n, rng);
  }
  std::vector<AnnotationTask> tasks;
  tasks.reserve(n);
  for (std::size_t t = 0; t < picked.size(); ++t) {
    const auto& r = records[picked[t]];
    AnnotationTask task;
    task.task_id = task_id_for(first_index + t);
    task.kind = kind;
    task.quota = quota;
    task.payload = {{"task", task_name(r.task)}, {"record", json::parse(to_json(r).dump())}};
    if (kind == TaskKind::Preference) {
      if (!r.reference) throw MissingField("record " + r.id + " has no reference for a preference task");
      task.payload["candidates"] = {r.paraphrase, *r.reference};
    } else if (kind == TaskKind::Acceptability) {
      task.payload["candidate"] = r.paraphrase;
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

ExpertFeedback feedback_from_judgment(const AnnotationTask& task, const Judgment& j) {
  if (task.kind != TaskKind::FeedbackCorrection) throw SchemaViolation("task " + task.task_id + " is not a feedback task");
  auto record = record_from_json(task.payload.at("record"));
  ExpertFeedback f;
  f.record_id = record.id;
  f.task = record.task;
  f.shown_sentence = record.source;
  f.shown_explanation = render_explanation(record.source_expl);
  f.verdict = j.choice == "Incorrect" ? Verdict::Incorrect : Verdict::Correct;
  f.annotator_id = j.annotator_id;
  f.created_at = j.timestamp;
  f.judgment_id = j.judgment_id();
  if (j.correction) {
    const auto& c = *j.correction;
    if (c.contains("note") && c["note"].is_string()) f.note = c["note"].get<std::string>();
    if (f.verdict == Verdict::Incorrect) {
      if (c.contains("flagged_attributes")) {
        if (!c["flagged_attributes"].is_array()) throw SchemaViolation("flagged_attributes must be an array");
        auto names = attribute_set(record.source_expl);
        for (const auto& a : c["flagged_attributes"]) {
          if (!a.is_object() || !a.contains("name") || !a["name"].is_string()) {
            throw SchemaViolation("flagged attribute needs a string name");
          }
          auto name = normalize_attribute_name(a["name"].get<std::string>());
          if (!names.contains(name)) {
            throw SchemaViolation("flagged attribute '" + name + "' is not in the shown explanation");
          }
          f.flagged_attributes.push_back({name, a.value("reason", std::string())});
        }
      }
      if (c.contains("corrected_explanation")) {
        if (!c["corrected_explanation"].is_string()) throw SchemaViolation("corrected_explanation must be a string");
        try {
          f.corrected_explanation =
              render_explanation(parse_explanation(c["corrected_explanation"].get<std::string>(), ExplanationKind::Bias));
        } catch (const ParseError& e) {
          throw SchemaViolation(std::string("corrected_explanation: ") + e.what());
        }
      }
    }
  }
  f.validate();
  return f;
}

AnnotationStore::AnnotationStore(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  tasks_log_ = std::make_unique<AppendLog>(dir_ / "tasks.jsonl");
  judgments_log_ = std::make_unique<AppendLog>(dir_ / "judgments.jsonl");
  feedback_log_ = std::make_unique<AppendLog>(dir_ / "feedback.jsonl");

  for (const auto& row : read_jsonl(dir_ / "tasks.jsonl", true)) {
    auto t = task_from_json(row);
    if (task_index_.contains(t.task_id)) continue;
    task_index_[t.task_id] = tasks_.size();
    tasks_.push_back(std::move(t));
  }
  for (const auto& row : read_jsonl(dir_ / "judgments.jsonl", true)) {
    auto j = judgment_from_json(row);
    if (!judged_by_[j.task_id].insert(j.annotator_id).second) continue;
    judgments_.push_back(std::move(j));
  }
  std::set<std::string> covered;
  for (const auto& row : read_jsonl(dir_ / "feedback.jsonl", true)) {
    auto f = feedback_from_json(row);
    if (f.judgment_id) covered.insert(*f.judgment_id);
    feedback_.push_back(std::move(f));
  }
  for (const auto& j : judgments_) {
    auto it = task_index_.find(j.task_id);
    if (it == task_index_.end() || tasks_[it->second].kind != TaskKind::FeedbackCorrection) continue;
    if (covered.contains(j.judgment_id())) continue;
    auto f = feedback_from_judgment(tasks_[it->second], j);
    feedback_log_->append(to_json(f).dump());
    feedback_.push_back(std::move(f));
  }
}

void AnnotationStore::add_tasks(const std::vector<AnnotationTask>& tasks) {
  std::unique_lock lock(mu_);
  std::set<std::string> incoming;
  for (const auto& t : tasks) {
    t.validate();
    if (task_index_.contains(t.task_id) || !incoming.insert(t.task_id).second) {
      throw SchemaViolation("duplicate task id " + t.task_id);
    }
  }
  for (const auto& t : tasks) {
    tasks_log_->append(to_json(t).dump());
    task_index_[t.task_id] = tasks_.size();
    tasks_.push_back(t);
  }
}

TaskStatus AnnotationStore::status_locked(const AnnotationTask& t) const {
  auto it = judged_by_.find(t.task_id);
  std::size_t n = it == judged_by_.end() ? 0 : it->second.size();
  return n >= t.quota ? TaskStatus::Done : TaskStatus::Open;
}

std::vector<AnnotationTask> AnnotationStore::list_tasks(const TaskFilter& filter) const {
  std::shared_lock lock(mu_);
  std::vector<AnnotationTask> out;
  for (const auto& t : tasks_) {
    if (filter.kind && t.kind != *filter.kind) continue;
    if (filter.status && status_locked(t) != *filter.status) continue;
    if (filter.annotator) {
      auto it = judged_by_.find(t.task_id);
      if (it != judged_by_.end() && it->second.contains(*filter.annotator)) continue;
    }
    out.push_back(t);
  }
  return out;
}

AnnotationTask AnnotationStore::get_task(const std::string& task_id) const {
  std::shared_lock lock(mu_);
  auto it = task_index_.find(task_id);
  if (it == task_index_.end()) throw TaskNotFound("no task " + task_id);
  return tasks_[it->second];
}

TaskStatus AnnotationStore::status(const std::string& task_id) const {
  std::shared_lock lock(mu_);
  auto it = task_index_.find(task_id);
  if (it == task_index_.end()) throw TaskNotFound("no task " + task_id);
  return status_locked(tasks_[it->second]);
}

std::size_t AnnotationStore::task_count() const {
  std::shared_lock lock(mu_);
  return tasks_.size();
}

SubmitResult AnnotationStore::submit(Judgment j) {
  std::unique_lock lock(mu_);
  auto it = task_index_.find(j.task_id);
  if (it == task_index_.end()) throw TaskNotFound("no task " + j.task_id);
  const AnnotationTask& task = tasks_[it->second];
  auto& judged = judged_by_[j.task_id];
  if (judged.contains(j.annotator_id)) {
    throw TaskAlreadyDone("annotator " + j.annotator_id + " already judged " + j.task_id);
  }
  if (status_locked(task) == TaskStatus::Done) throw TaskAlreadyDone("task " + j.task_id + " is done");
  if (!choice_domain(task.kind).contains(j.choice)) {
    throw SchemaViolation("choice '" + j.choice + "' is not valid for a " + std::string(task_kind_name(task.kind)) +
                          " task");
  }
  if (j.timestamp.empty()) j.timestamp = utc_timestamp();
  std::optional<ExpertFeedback> fb;
  if (task.kind == TaskKind::FeedbackCorrection) fb = feedback_from_judgment(task, j);

  judgments_log_->append(to_json(j).dump());
  judged.insert(j.annotator_id);
  judgments_.push_back(j);

  SubmitResult result;
  result.judgment_id = j.judgment_id();
  if (fb) {
    feedback_log_->append(to_json(*fb).dump());
    feedback_.push_back(std::move(*fb));
    result.feedback_written = true;
  }
  result.status = status_locked(task);
  return result;
}

std::vector<Judgment> AnnotationStore::judgments() const {
  std::shared_lock lock(mu_);
  return judgments_;
}

std::vector<ExpertFeedback> AnnotationStore::feedback() const {
  std::shared_lock lock(mu_);
  return feedback_;
}

AgreementReport agreement_report(const std::vector<AnnotationTask>& tasks, const std::vector<Judgment>& judgments) {
  std::map<std::string, const AnnotationTask*> by_id;
  for (const auto& t : tasks) by_id[t.task_id] = &t;
  std::map<std::string, std::vector<const Judgment*>> per_task;
  for (const auto& j : judgments) per_task[j.task_id].push_back(&j);

  std::map<std::string, CategoryAgreement> cats;
  for (const auto& [task_id, js] : per_task) {
    if (js.size() < 2) continue;
    auto t = by_id.find(task_id);
    const std::string category = t == by_id.end() ? "unknown" : t->second->category();
    auto& c = cats[category];
    c.category = category;
    for (std::size_t a = 0; a < js.size(); ++a) {
      for (std::size_t b = a + 1; b < js.size(); ++b) {
        ++c.pairs;
        if (js[a]->choice == js[b]->choice) ++c.agreements;
      }
    }
  }
  if (cats.empty()) throw NoOverlap("no task was judged by two annotators");
  AgreementReport r;
  double sum = 0.0;
  for (auto& [name, c] : cats) {
    sum += c.accuracy();
    r.categories.push_back(c);
  }
  r.macro_average = sum / static_cast<double>(r.categories.size());
  return r;
}

ordered_json to_json(const AgreementReport& r) {
  ordered_json j;
  auto cats = ordered_json::array();
  for (const auto& c : r.categories) {
    cats.push_back({{"category", c.category}, {"pairs", c.pairs}, {"agreements", c.agreements}, {"accuracy", c.accuracy()}});
  }
  j["categories"] = std::move(cats);
  j["macro_average"] = r.macro_average;
  return j;
}

double PreferenceCounts::preferred_or_equal() const {
  const auto n = a + b + equal;
  return n ? static_cast<double>(a + equal) / static_cast<double>(n) : 0.0;
}

double PreferenceCounts::acceptability(bool dispreferred_as_unacceptable) const {
  auto bad = unacceptable + (dispreferred_as_unacceptable ? b : 0);
  auto n = acceptable + bad;
  return n ? static_cast<double>(acceptable) / static_cast<double>(n) : 0.0;
}

std::vector<PreferenceCounts> preference_report(const std::vector<AnnotationTask>& tasks,
                                                const std::vector<Judgment>& judgments) {
  std::map<std::string, const AnnotationTask*> by_id;
  for (const auto& t : tasks) by_id[t.task_id] = &t;
  std::map<std::string, PreferenceCounts> cats;
  for (const auto& j : judgments) {
    auto it = by_id.find(j.task_id);
    if (it == by_id.end() || it->second->kind == TaskKind::FeedbackCorrection) continue;
    auto& c = cats[it->second->category()];
    c.category = it->second->category();
    if (j.choice == "A") ++c.a;
    else if (j.choice == "B") ++c.b;
    else if (j.choice == "Equal") ++c.equal;
    else if (j.choice == "Acceptable") ++c.acceptable;
    else if (j.choice == "Unacceptable") ++c.unacceptable;
  }
  std::vector<PreferenceCounts> out;
  for (auto& [name, c] : cats) out.push_back(c);
  return out;
}

ordered_json to_json(const std::vector<PreferenceCounts>& r, bool dispreferred_as_unacceptable) {
  auto out = ordered_json::array();
  for (const auto& c : r) {
    out.push_back({{"category", c.category},
                   {"a", c.a},
                   {"b", c.b},
                   {"equal", c.equal},
                   {"preferred_or_equal", c.preferred_or_equal()},
                   {"acceptable", c.acceptable},
                   {"unacceptable", c.unacceptable},
                   {"acceptability", c.acceptability(dispreferred_as_unacceptable)}});
  }
  return out;
}

}  // namespace iclef
