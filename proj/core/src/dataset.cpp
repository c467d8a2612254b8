#include "iclef/dataset.hpp"

#include "iclef/error.hpp"
#include "iclef/rng.hpp"
#include "iclef/sections.hpp"
#include "iclef/text.hpp"

#include <algorithm>
#include <cstdio>

namespace iclef {

Split split(const std::vector<StyleRecord>& records, const SplitSpec& spec) {
  if (spec.train_count + spec.test_count > records.size()) {
    throw SpecExceedsCorpus("split asks for " + std::to_string(spec.train_count) + "+" +
                            std::to_string(spec.test_count) + " records but the corpus has " +
                            std::to_string(records.size()));
  }
  Rng rng(spec.seed);
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.train_count));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(spec.train_count),
                                order.begin() + static_cast<std::ptrdiff_t>(spec.train_count + spec.test_count));
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  Split out;
  for (auto i : train) out.train.push_back(records[i]);
  for (auto i : test) out.test.push_back(records[i]);
  return out;
}

std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::InformalToFormal: return "i2f";
    case Direction::FormalToInformal: return "f2i";
    case Direction::BiasToNeutral: return "bias";
    case Direction::MultiTask: return "multi";
  }
  return "i2f";
}

Direction parse_direction(std::string_view name) {
  if (name == "i2f") return Direction::InformalToFormal;
  if (name == "f2i") return Direction::FormalToInformal;
  if (name == "bias") return Direction::BiasToNeutral;
  if (name == "multi") return Direction::MultiTask;
  throw UsageError("unknown direction '" + std::string(name) + "' (expected i2f|f2i|bias|multi)");
}

std::string_view instruction_template(Direction d) {
  switch (d) {
    case Direction::InformalToFormal:
    case Direction::MultiTask:
      return "Identify informal attributes in a given sentence, modify them to create a formal sentence, and then "
             "output the attributes of the generated formal sentence.";
    case Direction::FormalToInformal:
      return "Identify formal attributes in a given sentence, modify them to create an informal sentence, and then "
             "output the attributes of the generated informal sentence.";
    case Direction::BiasToNeutral:
      return "Identify the type of bias in a given sentence and explain it with evidence from the sentence, then "
             "rewrite the sentence so that it follows the neutral point of view.";
  }
  return "";
}

namespace {

InstructionRow i2f_row(const StyleRecord& r) {
  if (r.task != Task::Formality) throw MissingField("record " + r.id + " is not a formality record");
  if (!r.paraphrase_expl) throw MissingField("record " + r.id + " has no formal attributes");
  if (trim(r.paraphrase).empty()) throw MissingField("record " + r.id + " has no formal paraphrase");
  return {std::string(instruction_template(Direction::InformalToFormal)), "Informal: " + r.source,
          render_sections({{section::kInformalAttributes, render_explanation(r.source_expl)},
                           {section::kFormalParaphrase, r.paraphrase},
                           {section::kFormalAttributes, render_explanation(*r.paraphrase_expl)}})};
}

InstructionRow f2i_row(const StyleRecord& r) {
  if (r.task != Task::Formality) throw MissingField("record " + r.id + " is not a formality record");
  if (!r.paraphrase_expl) throw MissingField("record " + r.id + " has no formal attributes");
  if (trim(r.paraphrase).empty()) throw MissingField("record " + r.id + " has no formal paraphrase");
  return {std::string(instruction_template(Direction::FormalToInformal)), "Formal: " + r.paraphrase,
          render_sections({{section::kFormalAttributes, render_explanation(*r.paraphrase_expl)},
                           {section::kInformalParaphrase, r.source},
                           {section::kInformalAttributes, render_explanation(r.source_expl)}})};
}

InstructionRow bias_row(const StyleRecord& r) {
  if (r.task != Task::BiasNeutralization) throw MissingField("record " + r.id + " is not a bias record");
  if (trim(r.paraphrase).empty()) throw MissingField("record " + r.id + " has no neutralized paraphrase");
  return {std::string(instruction_template(Direction::BiasToNeutral)), "Biased: " + r.source,
          render_sections({{section::kBiasAttributes, render_explanation(r.source_expl)},
                           {section::kNeutralizedParaphrase, r.paraphrase}})};
}

}  // namespace

std::vector<InstructionRow> export_instructions(const std::vector<StyleRecord>& records, Direction direction) {
  std::vector<InstructionRow> rows;
  rows.reserve(direction == Direction::MultiTask ? 2 * records.size() : records.size());
  for (const auto& r : records) {
    switch (direction) {
      case Direction::InformalToFormal: rows.push_back(i2f_row(r)); break;
      case Direction::FormalToInformal: rows.push_back(f2i_row(r)); break;
      case Direction::BiasToNeutral: rows.push_back(bias_row(r)); break;
      case Direction::MultiTask:
        rows.push_back(i2f_row(r));
        rows.push_back(f2i_row(r));
        break;
    }
  }
  return rows;
}

ordered_json to_json(const std::vector<InstructionRow>& rows) {
  auto out = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["instruction"] = r.instruction;
    j["input"] = r.input;
    j["output"] = r.output;
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<InstructionRow> instruction_rows_from_json(const json& array) {
  if (!array.is_array()) throw SchemaViolation("instruction export must be a JSON array");
  std::vector<InstructionRow> rows;
  for (const auto& j : array) {
    try {
      rows.push_back({j.at("instruction").get<std::string>(), j.at("input").get<std::string>(),
                      j.at("output").get<std::string>()});
    } catch (const json::exception& e) {
      throw SchemaViolation(std::string("malformed instruction row: ") + e.what());
    }
  }
  return rows;
}

ParsedInstructionOutput parse_instruction_output(const InstructionRow& row, Direction direction) {
  struct Slot {
    std::string_view header;
    ExplanationKind kind;
  };
  std::vector<Slot> explanations;
  std::string_view paraphrase_header;
  bool from_formal = direction == Direction::FormalToInformal || istarts_with(row.input, "Formal:");
  if (direction == Direction::BiasToNeutral) {
    explanations = {{section::kBiasAttributes, ExplanationKind::Bias}};
    paraphrase_header = section::kNeutralizedParaphrase;
  } else if (from_formal) {
    explanations = {{section::kFormalAttributes, ExplanationKind::Formality},
                    {section::kInformalAttributes, ExplanationKind::Informality}};
    paraphrase_header = section::kInformalParaphrase;
  } else {
    explanations = {{section::kInformalAttributes, ExplanationKind::Informality},
                    {section::kFormalAttributes, ExplanationKind::Formality}};
    paraphrase_header = section::kFormalParaphrase;
  }
  std::vector<SectionSpec> specs;
  for (const auto& s : explanations) specs.push_back({std::string(s.header), {std::string(s.header)}});
  specs.push_back({std::string(paraphrase_header), {std::string(paraphrase_header)}});
  auto sections = parse_sections(row.output, specs);

  ParsedInstructionOutput out;
  for (const auto& s : explanations) {
    auto it = sections.find(std::string(s.header));
    if (it == sections.end()) throw MissingField("instruction output has no '" + std::string(s.header) + "' section");
    out.explanations.emplace(std::string(s.header), parse_explanation(it->second, s.kind));
  }
  if (auto it = sections.find(std::string(paraphrase_header)); it != sections.end()) out.paraphrase = it->second;
  return out;
}

DatasetStats compute_stats(const std::vector<StyleRecord>& records, std::size_t top_n) {
  DatasetStats s;
  s.records = records.size();
  std::map<std::string, std::size_t> counts;
  std::size_t bias_records = 0;
  for (const auto& r : records) {
    for (const auto& name : attribute_set(r.source_expl)) ++counts[name];
    if (r.task == Task::BiasNeutralization) {
      ++bias_records;
      ++s.class_counts[primary_bias_label(r.source_expl)];
    }
  }
  s.attribute_counts.assign(counts.begin(), counts.end());
  std::stable_sort(s.attribute_counts.begin(), s.attribute_counts.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (s.attribute_counts.size() > top_n) s.attribute_counts.resize(top_n);
  if (bias_records > 0) {
    for (const char* label : {"Demographic", "Epistemological", "Framing", "No Bias"}) s.class_counts.try_emplace(label, 0);
    for (const auto& [label, n] : s.class_counts) {
      s.class_percentages.emplace_back(label, 100.0 * static_cast<double>(n) / static_cast<double>(bias_records));
    }
  }
  return s;
}

namespace {

std::string csv_field(std::string_view v) {
  if (v.find_first_of(",\"\n") == std::string_view::npos) return std::string(v);
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string attribute_counts_csv(const DatasetStats& s) {
  std::string out = "attribute,count\n";
  for (const auto& [name, n] : s.attribute_counts) out += csv_field(name) + "," + std::to_string(n) + "\n";
  return out;
}

std::string class_percentages_csv(const DatasetStats& s) {
  std::string out = "class,percent\n";
  for (const auto& [label, pct] : s.class_percentages) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", pct);
    out += csv_field(label) + "," + buf + "\n";
  }
  return out;
}

ordered_json to_json(const DatasetStats& s) {
  ordered_json j;
  j["records"] = s.records;
  auto attrs = ordered_json::array();
  for (const auto& [name, n] : s.attribute_counts) attrs.push_back({{"attribute", name}, {"count", n}});
  j["attribute_counts"] = std::move(attrs);
  auto classes = ordered_json::array();
  for (const auto& [label, pct] : s.class_percentages) {
    classes.push_back({{"class", label}, {"count", s.class_counts.at(label)}, {"percent", pct}});
  }
  j["class_percentages"] = std::move(classes);
  return j;
}

}  // namespace iclef
