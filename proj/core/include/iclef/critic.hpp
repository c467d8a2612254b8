#pragma once

#include "iclef/feedback.hpp"
#include "iclef/gateway.hpp"
#include "iclef/record.hpp"
#include "iclef/teacher.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace iclef {

/// A parsed critic verdict. Formality critiques list attribute names to
/// remove; bias critiques carry a replacement explanation.
struct Critique {
  bool needs_fix = false;
  std::vector<std::string> removals;
  std::optional<Explanation> replacement;
  std::string raw_text;
  /// Set when the critic output did not follow the answer format. Such a
  /// critique never changes data.
  bool unparseable = false;
  std::vector<std::string> warnings;
};

struct CriticPrompt {
  std::string system;
  std::string model_id;
  DecodingParams decoding = DecodingParams::critic();
};

CriticPrompt default_critic_prompt(Task task);

/// User turn shown to the critic. `kind` selects the field labels:
/// "Informal Sentence"/"Informal Attributes", "Formal Sentence"/"Formal
/// Attributes" or "Biased Sentence"/"Bias Attributes".
std::string critic_query(ExplanationKind kind, std::string_view sentence, std::string_view rendered_explanation);

/// Assistant turn demonstrating an expert's verdict, e.g.
/// `Attributes Listed Incorrectly: contraction ("If you" is not a contraction)`
/// or `Verdict: Incorrect\nCorrected Bias Attributes: Framing (...)`.
std::string critic_answer(const ExpertFeedback& feedback);

/// Few-shot critic request: system prompt, one user/assistant pair per
/// feedback shot, then the query.
ChatRequest critic_request(const CriticPrompt& prompt, std::span<const ExpertFeedback> shots, ExplanationKind kind,
                           std::string_view sentence, const Explanation& shown);

/// Parses raw critic text. Never throws; malformed text yields
/// `unparseable` with needs_fix false.
Critique parse_critique(Task task, std::string raw);

/// Reconciles a critique with the explanation it judged: removals that name
/// no attribute are dropped with a warning, and a bias replacement equal to
/// the shown explanation is a no-op. needs_fix is true afterwards exactly
/// when applying the critique changes the explanation.
Critique resolve_critique(Critique c, const Explanation& shown);

/// Removes the critique's attributes, keeping order. Never adds attributes.
/// Throws EmptyExplanation when nothing would remain.
Explanation apply_critique_formality(const Explanation& expl, const Critique& c);

/// Replaces e_b and regenerates s_n through the teacher. A critique without
/// needs_fix returns the record unchanged.
StyleRecord apply_critique_bias(const StyleRecord& record, const Critique& c, TeacherPipeline& teacher);

class Critic {
 public:
  virtual ~Critic() = default;
  virtual Critique critique(ExplanationKind kind, std::string_view sentence, const Explanation& shown,
                            std::span<const ExpertFeedback> shots) = 0;
};

/// Critic backed by a chat model through the gateway.
class GatewayCritic : public Critic {
 public:
  explicit GatewayCritic(Gateway& gateway, std::optional<CriticPrompt> formality = std::nullopt,
                         std::optional<CriticPrompt> bias = std::nullopt);
  Critique critique(ExplanationKind kind, std::string_view sentence, const Explanation& shown,
                    std::span<const ExpertFeedback> shots) override;

 private:
  Gateway& gateway_;
  CriticPrompt formality_;
  CriticPrompt bias_;
};

struct CritiqueJob {
  Task task = Task::Formality;
  std::filesystem::path input;
  std::filesystem::path output;
  std::filesystem::path quarantine;  // default: <output>.quarantine.jsonl
  std::filesystem::path feedback;
  std::size_t k = 35;
  std::uint64_t seed = 0;
  std::size_t workers = 4;
  /// Also critique e_f for formality records.
  bool critique_formal = false;
};

struct CritiqueSummary {
  std::size_t records = 0;
  std::size_t needs_fix = 0;
  std::size_t fixed = 0;
  std::size_t quarantined = 0;
  std::size_t unparseable = 0;
  std::size_t warnings = 0;
  std::vector<std::string> shot_ids;

  double fix_rate() const { return records ? static_cast<double>(fixed) / static_cast<double>(records) : 0.0; }
  double needs_fix_rate() const {
    return records ? static_cast<double>(needs_fix) / static_cast<double>(records) : 0.0;
  }
};

ordered_json to_json(const CritiqueSummary& s);

/// Critiques every record with one shot set drawn from the feedback file
/// and writes the (possibly fixed) records in input order. Records whose fix
/// empties the explanation or whose regenerated paraphrase is unusable go to
/// quarantine. `teacher` is required for the bias task.
CritiqueSummary run_critique_pass(const CritiqueJob& job, Critic& critic, TeacherPipeline* teacher);

}  // namespace iclef
