#include "iclef/feedback.hpp"

#include "iclef/error.hpp"
#include "iclef/rng.hpp"

#include <map>

namespace iclef {

std::string_view verdict_name(Verdict v) { return v == Verdict::Correct ? "correct" : "incorrect"; }

Verdict parse_verdict(std::string_view name) {
  if (name == "correct") return Verdict::Correct;
  if (name == "incorrect") return Verdict::Incorrect;
  throw SchemaViolation("unknown verdict '" + std::string(name) + "'");
}

void ExpertFeedback::validate() const {
  if (record_id.empty()) throw SchemaViolation("feedback without record_id");
  if (annotator_id.empty()) throw SchemaViolation("feedback for " + record_id + " without annotator_id");
  if (verdict == Verdict::Correct) {
    if (!flagged_attributes.empty() || corrected_explanation) {
      throw SchemaViolation("feedback for " + record_id + " is marked correct but carries corrections");
    }
    return;
  }
  if (task == Task::Formality) {
    if (flagged_attributes.empty()) {
      throw SchemaViolation("formality feedback for " + record_id + " flags no attributes");
    }
    if (corrected_explanation) {
      throw SchemaViolation("formality feedback for " + record_id + " carries a corrected explanation");
    }
  } else {
    if (!corrected_explanation) {
      throw SchemaViolation("bias feedback for " + record_id + " has no corrected explanation");
    }
    if (!flagged_attributes.empty()) {
      throw SchemaViolation("bias feedback for " + record_id + " flags attributes");
    }
    try {
      parse_explanation(*corrected_explanation, ExplanationKind::Bias);
    } catch (const ParseError& e) {
      throw SchemaViolation("bias feedback for " + record_id + ": corrected explanation: " + e.what());
    }
  }
}

std::string ExpertFeedback::bias_class() const {
  const auto& text = verdict == Verdict::Incorrect && corrected_explanation ? *corrected_explanation : shown_explanation;
  try {
    return primary_bias_label(parse_explanation(text, ExplanationKind::Bias));
  } catch (const ParseError&) {
    return "unparseable";
  }
}

ordered_json to_json(const ExpertFeedback& f) {
  ordered_json j;
  j["record_id"] = f.record_id;
  j["task"] = task_name(f.task);
  j["shown_sentence"] = f.shown_sentence;
  j["shown_explanation"] = f.shown_explanation;
  j["verdict"] = verdict_name(f.verdict);
  auto flagged = ordered_json::array();
  for (const auto& a : f.flagged_attributes) flagged.push_back({{"name", a.name}, {"reason", a.reason}});
  j["flagged_attributes"] = std::move(flagged);
  j["corrected_explanation"] = f.corrected_explanation ? ordered_json(*f.corrected_explanation) : ordered_json();
  j["annotator_id"] = f.annotator_id;
  j["created_at"] = f.created_at;
  j["note"] = f.note ? ordered_json(*f.note) : ordered_json();
  if (f.judgment_id) j["judgment_id"] = *f.judgment_id;
  return j;
}

ExpertFeedback feedback_from_json(const json& j) {
  try {
    ExpertFeedback f;
    f.record_id = j.at("record_id").get<std::string>();
    f.task = parse_task(j.at("task").get<std::string>());
    f.shown_sentence = j.at("shown_sentence").get<std::string>();
    f.shown_explanation = j.at("shown_explanation").get<std::string>();
    f.verdict = parse_verdict(j.at("verdict").get<std::string>());
    if (auto it = j.find("flagged_attributes"); it != j.end() && !it->is_null()) {
      for (const auto& a : *it) {
        f.flagged_attributes.push_back(
            {normalize_attribute_name(a.at("name").get<std::string>()), a.value("reason", std::string())});
      }
    }
    if (auto it = j.find("corrected_explanation"); it != j.end() && !it->is_null()) {
      f.corrected_explanation = it->get<std::string>();
    }
    f.annotator_id = j.value("annotator_id", std::string());
    f.created_at = j.value("created_at", std::string());
    if (auto it = j.find("note"); it != j.end() && !it->is_null()) f.note = it->get<std::string>();
    if (auto it = j.find("judgment_id"); it != j.end() && !it->is_null()) f.judgment_id = it->get<std::string>();
    f.validate();
    return f;
  } catch (const json::exception& e) {
    throw SchemaViolation(std::string("malformed feedback row: ") + e.what());
  }
}

std::vector<ExpertFeedback> read_feedback(const std::filesystem::path& path) {
  std::vector<ExpertFeedback> out;
  for (const auto& row : read_jsonl(path, true)) out.push_back(feedback_from_json(row));
  return out;
}

std::vector<ExpertFeedback> select_feedback_shots(const std::vector<ExpertFeedback>& store, std::size_t k, Task task,
                                                  std::uint64_t seed) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (store[i].task == task) eligible.push_back(i);
  }
  if (k == 0) throw InsufficientFeedback("k must be positive");
  if (eligible.size() < k) {
    throw InsufficientFeedback("requested " + std::to_string(k) + " shots but the store holds " +
                               std::to_string(eligible.size()) + " " + std::string(task_name(task)) + " entries");
  }
  Rng rng(seed);
  std::vector<std::size_t> picked;
  if (task == Task::BiasNeutralization) {
    std::map<std::string, std::vector<std::size_t>> strata;
    for (auto i : eligible) strata[store[i].bias_class()].push_back(i);
    picked = stratified_sample(std::move(strata), k, rng);
  } else {
    for (auto p : sample_indices(eligible.size(), k, rng)) picked.push_back(eligible[p]);
  }
  std::vector<ExpertFeedback> out;
  out.reserve(k);
  for (auto i : picked) out.push_back(store[i]);
  return out;
}

}  // namespace iclef
