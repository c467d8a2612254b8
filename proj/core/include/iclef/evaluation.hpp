#pragma once

#include "iclef/dataset.hpp"
#include "iclef/record.hpp"
#include "iclef/scorer.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace iclef {

/// Model output for one test record: the sectioned text a student produced.
struct ModelOutput {
  std::string id;
  std::string output;
};

/// Reads JSONL rows {id, output}.
std::vector<ModelOutput> read_model_outputs(const std::filesystem::path& path);

/// Pooled evidence rate: evidences found in their sentence over all
/// evidences, e_i against s_i and e_f against s_f (bias: e_b against s_b).
/// 1.0 when no evidence is claimed.
struct TrustworthinessTally {
  std::size_t found = 0;
  std::size_t total = 0;
  void add(const Explanation& expl, std::string_view sentence);
  double rate() const;
};

double dataset_trustworthiness(const std::vector<StyleRecord>& records);

struct RecordScore {
  std::string id;
  bool malformed = false;
  bool missing = false;
  std::optional<double> input_attrs_bleu;
  std::optional<double> output_attrs_bleu;
  std::optional<double> mis;
  std::optional<double> style;
  std::string predicted_label;  // bias only
  std::string gold_label;       // bias only
  double trustworthiness = 1.0;
};

/// Metric suite for one direction. Scores are on [0, 100]; a metric whose
/// scorer was unavailable is absent. `average` is the mean of the present
/// headline metrics: the two attribute BLEUs, MIS and the style score for
/// formality directions; attribute BLEU, MIS and neutrality for bias. Bias
/// F1 and trustworthiness are reported but not averaged.
struct MetricsReport {
  Direction direction = Direction::InformalToFormal;
  std::size_t output_count = 0;
  std::size_t scored_count = 0;
  std::size_t malformed_count = 0;
  std::size_t missing_count = 0;
  std::optional<double> input_attrs_bleu;   // e_i (i2f), e_f (f2i), e_b (bias)
  std::optional<double> output_attrs_bleu;  // e_f (i2f), e_i (f2i)
  std::optional<double> mis;
  std::optional<double> style_score;
  std::string style_metric;  // formality | informality | neutrality
  std::optional<double> bias_f1;
  double trustworthiness = 100.0;
  std::optional<double> average;
  std::vector<std::string> warnings;
  std::vector<RecordScore> records;
};

/// Scores outputs against the test set. Never throws on malformed output:
/// unparseable or unknown-id outputs are counted as malformed and the
/// affected test records are scored as empty predictions.
MetricsReport evaluate_run(const std::vector<ModelOutput>& outputs, const std::vector<StyleRecord>& test_set,
                           Direction direction, Scorer& scorer);

/// Mean of the eight direction metrics of an i2f and an f2i report.
std::optional<double> combined_average(const MetricsReport& i2f, const MetricsReport& f2i);

ordered_json to_json(const MetricsReport& report);
std::string per_record_csv(const MetricsReport& report);

/// The gold sectioned output for a record, i.e. what a perfect model emits.
std::string gold_output(const StyleRecord& record, Direction direction);

}  // namespace iclef
