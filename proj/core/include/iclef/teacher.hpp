#pragma once

#include "iclef/gateway.hpp"
#include "iclef/record.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iclef {

/// Prompt configuration for one teacher call type. `shots` hold raw
/// sentences as input and full completions as output; the pipeline applies
/// the query framing to both.
struct TeacherPrompt {
  std::string system;
  std::vector<FewShot> shots;
  std::string model_id;
  DecodingParams decoding = DecodingParams::generation();
};

/// Built-in prompts. The formality prompt carries six demonstrations.
TeacherPrompt default_formality_prompt();
TeacherPrompt default_bias_prompt();
TeacherPrompt default_regeneration_prompt();

std::string formality_query(std::string_view informal);
std::string bias_query(std::string_view biased);
std::string regeneration_query(std::string_view biased, const Explanation& e_b);

/// Splits a formality completion into e_i, s_f, e_f. Throws QuarantinedRecord
/// (carrying `raw`) when a section is missing or an explanation is malformed.
struct FormalityCompletion {
  Explanation informal_attributes;
  std::string formal_paraphrase;
  Explanation formal_attributes;
};
FormalityCompletion parse_formality_completion(const std::string& raw);

struct BiasCompletion {
  Explanation bias_attributes;
  std::string neutral_paraphrase;
};
BiasCompletion parse_bias_completion(const std::string& raw);

/// Drives the multi-step teacher generation. Formality asks for e_i, s_f and
/// e_f in one completion; bias asks for e_b and s_n.
class TeacherPipeline {
 public:
  TeacherPipeline(Gateway& gateway, TeacherPrompt formality = default_formality_prompt(),
                  TeacherPrompt bias = default_bias_prompt(),
                  TeacherPrompt regeneration = default_regeneration_prompt());

  /// Throws GenerationError when the endpoint keeps failing, QuarantinedRecord
  /// when the completion does not parse, CacheMiss in replay mode.
  StyleRecord generate_formality_record(std::string id, std::string_view informal);
  StyleRecord generate_bias_record(std::string id, std::string_view biased);
  /// Rewrites s_b conditioned on a (possibly corrected) bias explanation.
  std::string regenerate_neutral_paraphrase(std::string_view biased, const Explanation& e_b);

  ChatRequest formality_request(std::string_view informal) const;
  ChatRequest bias_request(std::string_view biased) const;
  ChatRequest regeneration_request(std::string_view biased, const Explanation& e_b) const;

  Gateway& gateway() { return gateway_; }

 private:
  std::string complete(const ChatRequest& req);

  Gateway& gateway_;
  TeacherPrompt formality_;
  TeacherPrompt bias_;
  TeacherPrompt regeneration_;
};

/// One corpus line: source sentence plus optional TAB-separated reference.
struct CorpusItem {
  std::string id;
  std::string source;
  std::optional<std::string> reference;
};

/// Reads a one-sentence-per-line text file or a two-column TSV. Ids are
/// `<prefix>-NNNNNN` over non-blank lines, 1-based.
std::vector<CorpusItem> read_corpus(const std::filesystem::path& path, std::string_view id_prefix);

struct GenerationJob {
  Task task = Task::Formality;
  std::filesystem::path input;
  std::filesystem::path output;
  std::filesystem::path checkpoint;  // default: <output>.checkpoint.json
  std::filesystem::path quarantine;  // default: <output>.quarantine.jsonl
  std::string id_prefix;             // default: task name
  std::size_t batch_size = 16;
  std::size_t workers = 4;
  /// Stop after this many newly processed inputs (simulates interruption).
  std::optional<std::size_t> stop_after;
};

struct GenerationSummary {
  std::size_t inputs = 0;
  std::size_t resumed = 0;  // already done before this invocation
  std::size_t processed = 0;
  std::size_t emitted = 0;      // cumulative records in the output
  std::size_t quarantined = 0;  // cumulative rows in quarantine
};

/// Batch generation with checkpoint/resume. Output order follows input order;
/// a resumed run skips every id already present in output or quarantine and
/// appends the rest, so interrupted-then-resumed output equals an
/// uninterrupted run. Unparseable completions and exhausted retries go to the
/// quarantine file with the raw text.
GenerationSummary run_generation(const GenerationJob& job, TeacherPipeline& pipeline);

}  // namespace iclef
