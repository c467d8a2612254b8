#include "iclef/record.hpp"

#include "iclef/error.hpp"

namespace iclef {

std::string_view task_name(Task task) { return task == Task::Formality ? "formality" : "bias"; }

Task parse_task(std::string_view name) {
  if (name == "formality") return Task::Formality;
  if (name == "bias") return Task::BiasNeutralization;
  throw SchemaViolation("unknown task '" + std::string(name) + "'");
}

std::string_view provenance_name(Provenance p) { return p == Provenance::TeacherRaw ? "teacher_raw" : "iclef_fixed"; }

Provenance parse_provenance(std::string_view name) {
  if (name == "teacher_raw") return Provenance::TeacherRaw;
  if (name == "iclef_fixed") return Provenance::IclefFixed;
  throw SchemaViolation("unknown provenance '" + std::string(name) + "'");
}

ExplanationKind source_kind(Task task) {
  return task == Task::Formality ? ExplanationKind::Informality : ExplanationKind::Bias;
}

void StyleRecord::validate() const {
  if (id.empty()) throw SchemaViolation("record without id");
  if (task == Task::BiasNeutralization && paraphrase_expl) {
    throw SchemaViolation("bias record " + id + " carries a paraphrase explanation");
  }
  if (task == Task::Formality && source_expl.is_bias_task()) {
    throw SchemaViolation("formality record " + id + " carries a bias explanation");
  }
  if (task == Task::BiasNeutralization && !source_expl.is_bias_task()) {
    throw SchemaViolation("bias record " + id + " carries a non-bias explanation");
  }
  if (provenance == Provenance::IclefFixed && !critic_note) {
    throw SchemaViolation("fixed record " + id + " has no critic note");
  }
}

ordered_json to_json(const StyleRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["task"] = task_name(r.task);
  j["source"] = r.source;
  j["source_expl"] = render_explanation(r.source_expl);
  j["paraphrase"] = r.paraphrase;
  j["paraphrase_expl"] = r.paraphrase_expl ? ordered_json(render_explanation(*r.paraphrase_expl)) : ordered_json();
  j["provenance"] = provenance_name(r.provenance);
  j["critic_note"] = r.critic_note ? ordered_json(*r.critic_note) : ordered_json();
  if (r.reference) j["reference"] = *r.reference;
  return j;
}

namespace {

std::string required_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw SchemaViolation(std::string("record field '") + key + "' missing or not a string");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw SchemaViolation(std::string("record field '") + key + "' is not a string");
  return it->get<std::string>();
}

}  // namespace

StyleRecord record_from_json(const json& j) {
  if (!j.is_object()) throw SchemaViolation("record is not a JSON object");
  StyleRecord r;
  r.id = required_string(j, "id");
  r.task = parse_task(required_string(j, "task"));
  r.source = required_string(j, "source");
  r.source_expl = parse_explanation(required_string(j, "source_expl"), source_kind(r.task));
  r.paraphrase = required_string(j, "paraphrase");
  if (auto pe = optional_string(j, "paraphrase_expl")) {
    r.paraphrase_expl = parse_explanation(*pe, ExplanationKind::Formality);
  }
  r.provenance = parse_provenance(optional_string(j, "provenance").value_or("teacher_raw"));
  r.critic_note = optional_string(j, "critic_note");
  r.reference = optional_string(j, "reference");
  r.validate();
  return r;
}

std::vector<StyleRecord> read_records(const std::filesystem::path& path) {
  std::vector<StyleRecord> out;
  for (const auto& row : read_jsonl(path)) out.push_back(record_from_json(row));
  return out;
}

void write_records(const std::filesystem::path& path, const std::vector<StyleRecord>& records) {
  std::vector<ordered_json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  write_jsonl(path, rows);
}

}  // namespace iclef
