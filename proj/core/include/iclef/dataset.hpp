#pragma once

#include "iclef/jsonl.hpp"
#include "iclef/record.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace iclef {

struct SplitSpec {
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<StyleRecord> train;
  std::vector<StyleRecord> test;
};

/// Seeded shuffle of record positions; the first train_count go to train
/// and the next test_count to test. Each side keeps corpus order. Throws
/// SpecExceedsCorpus when the spec asks for more records than exist.
Split split(const std::vector<StyleRecord>& records, const SplitSpec& spec);

enum class Direction { InformalToFormal, FormalToInformal, BiasToNeutral, MultiTask };

std::string_view direction_name(Direction d);  // "i2f" | "f2i" | "bias" | "multi"
Direction parse_direction(std::string_view name);

struct InstructionRow {
  std::string instruction;
  std::string input;
  std::string output;
  bool operator==(const InstructionRow&) const = default;
};

std::string_view instruction_template(Direction d);

/// One row per record (two for MultiTask: informal-to-formal then
/// formal-to-informal). Throws MissingField when a record lacks what the
/// direction needs.
std::vector<InstructionRow> export_instructions(const std::vector<StyleRecord>& records, Direction direction);

ordered_json to_json(const std::vector<InstructionRow>& rows);
std::vector<InstructionRow> instruction_rows_from_json(const json& array);

/// Source sentence of an instruction input (strips the "Informal: " style
/// prefix) and the explanations found in the output sections.
struct ParsedInstructionOutput {
  std::map<std::string, Explanation> explanations;  // keyed by section header
  std::string paraphrase;
};
ParsedInstructionOutput parse_instruction_output(const InstructionRow& row, Direction direction);

struct DatasetStats {
  std::size_t records = 0;
  /// Attribute name -> number of records listing it in source_expl,
  /// sorted by count descending then name, truncated to top_n.
  std::vector<std::pair<std::string, std::size_t>> attribute_counts;
  /// Bias class -> percentage of bias records (empty without bias records).
  std::vector<std::pair<std::string, double>> class_percentages;
  std::map<std::string, std::size_t> class_counts;
};

DatasetStats compute_stats(const std::vector<StyleRecord>& records, std::size_t top_n = 50);

std::string attribute_counts_csv(const DatasetStats& s);
std::string class_percentages_csv(const DatasetStats& s);
ordered_json to_json(const DatasetStats& s);

}  // namespace iclef
