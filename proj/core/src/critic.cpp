#include "iclef/critic.hpp"

#include "iclef/error.hpp"
#include "iclef/parallel.hpp"
#include "iclef/sections.hpp"
#include "iclef/text.hpp"

#include <algorithm>
#include <set>
#include <variant>

namespace iclef {

namespace {

constexpr std::string_view kIncorrectHeader = "Attributes Listed Incorrectly";
constexpr std::string_view kVerdictHeader = "Verdict";
constexpr std::string_view kCorrectedHeader = "Corrected Bias Attributes";

constexpr const char* kFormalityCriticSystem =
    "You are an extremely attentive and critical annotator with background in stylometry and linguistics. "
    "You will be provided with an informal sentence. You will also be provided with an explanation of its "
    "informality attributes. Decide whether the explanation is incorrect, and if so, describe what "
    "attributes were listed incorrectly.\n"
    "Answer with one line: \"Attributes Listed Incorrectly: attribute (reason), ...\" or "
    "\"Attributes Listed Incorrectly: None\".";

constexpr const char* kBiasCriticSystem =
    "You are an extremely attentive and critical annotator with background in ethics, journalism, critical "
    "thinking and bias identification. You will be provided with a possibly biased sentence. You will also "
    "be provided with an explanation of its bias attributes. Decide whether the explanation is correct. If "
    "the explanation is incorrect, reply with a correction. Focus on three main types of bias in a "
    "sentence: Framing (subjective words or phrases linked to a particular point of view), Epistemological "
    "(linguistic features that subtly presuppose, assert or cast doubt on the truth of a proposition), and "
    "Demographic (presupposing truths about people of a particular gender, race or other demographic "
    "category). A neutral sentence is explained as: This sentence does not contain bias.\n"
    "Answer with \"Verdict: Correct\", or with \"Verdict: Incorrect\" followed by a line "
    "\"Corrected Bias Attributes: <explanation>\".";

const std::vector<SectionSpec>& formality_answer_specs() {
  static const std::vector<SectionSpec> specs = {
      {"incorrect", {std::string(kIncorrectHeader), "Incorrect Attributes", "Incorrectly Listed Attributes"}},
  };
  return specs;
}

const std::vector<SectionSpec>& bias_answer_specs() {
  static const std::vector<SectionSpec> specs = {
      {"verdict", {std::string(kVerdictHeader)}},
      {"corrected", {std::string(kCorrectedHeader), "Corrected Explanation", "Correction"}},
  };
  return specs;
}

bool means_none(std::string_view value) {
  auto v = to_lower(trim(value));
  while (!v.empty() && (v.back() == '.' || v.back() == '!')) v.pop_back();
  return v == "none" || v == "n/a" || v == "no" || v.empty();
}

Critique unparseable(std::string raw, std::string why) {
  Critique c;
  c.raw_text = std::move(raw);
  c.unparseable = true;
  c.warnings.push_back(std::move(why));
  return c;
}

}  // namespace

CriticPrompt default_critic_prompt(Task task) {
  CriticPrompt p;
  p.model_id = "gpt-3.5-turbo-1106";
  p.system = task == Task::Formality ? kFormalityCriticSystem : kBiasCriticSystem;
  return p;
}

std::string critic_query(ExplanationKind kind, std::string_view sentence, std::string_view rendered_explanation) {
  std::string_view sentence_label = "Informal Sentence";
  std::string_view expl_label = section::kInformalAttributes;
  if (kind == ExplanationKind::Formality) {
    sentence_label = "Formal Sentence";
    expl_label = section::kFormalAttributes;
  } else if (kind == ExplanationKind::Bias || kind == ExplanationKind::NoBias) {
    sentence_label = "Biased Sentence";
    expl_label = section::kBiasAttributes;
  }
  return render_sections({{sentence_label, collapse_whitespace(sentence)}, {expl_label, std::string(rendered_explanation)}});
}

std::string critic_answer(const ExpertFeedback& f) {
  if (f.task == Task::Formality) {
    if (f.verdict == Verdict::Correct) return std::string(kIncorrectHeader) + ": None";
    std::vector<std::string> parts;
    for (const auto& a : f.flagged_attributes) {
      parts.push_back(a.reason.empty() ? a.name : a.name + " (" + a.reason + ")");
    }
    return std::string(kIncorrectHeader) + ": " + join(parts, ", ");
  }
  if (f.verdict == Verdict::Correct) return std::string(kVerdictHeader) + ": Correct";
  return render_sections({{kVerdictHeader, "Incorrect"}, {kCorrectedHeader, f.corrected_explanation.value_or("")}});
}

ChatRequest critic_request(const CriticPrompt& prompt, std::span<const ExpertFeedback> shots, ExplanationKind kind,
                           std::string_view sentence, const Explanation& shown) {
  std::vector<FewShot> turns;
  turns.reserve(shots.size());
  for (const auto& f : shots) {
    auto shot_kind = f.task == Task::Formality ? ExplanationKind::Informality : ExplanationKind::Bias;
    turns.push_back({critic_query(shot_kind, f.shown_sentence, f.shown_explanation), critic_answer(f)});
  }
  return assemble_fewshot(prompt.system, turns, critic_query(kind, sentence, render_explanation(shown)),
                          prompt.model_id, prompt.decoding);
}

Critique parse_critique(Task task, std::string raw) {
  if (task == Task::Formality) {
    auto sections = parse_sections(raw, formality_answer_specs());
    auto it = sections.find("incorrect");
    if (it == sections.end()) return unparseable(std::move(raw), "critique has no incorrect-attributes line");
    Critique c;
    c.raw_text = std::move(raw);
    if (means_none(it->second)) return c;
    try {
      auto flagged = parse_explanation(it->second, ExplanationKind::Informality);
      if (flagged.kind != ExplanationKind::Informality) {
        return unparseable(std::move(c.raw_text), "critique lists the no-bias sentinel");
      }
      for (const auto& a : flagged.attributes) {
        if (std::find(c.removals.begin(), c.removals.end(), a.name) == c.removals.end()) c.removals.push_back(a.name);
      }
    } catch (const ParseError& e) {
      return unparseable(std::move(c.raw_text), std::string("critique attributes: ") + e.what());
    }
    c.needs_fix = !c.removals.empty();
    return c;
  }

  auto sections = parse_sections(raw, bias_answer_specs());
  auto verdict = sections.find("verdict");
  if (verdict == sections.end()) return unparseable(std::move(raw), "critique has no verdict line");
  auto v = to_lower(trim(verdict->second));
  Critique c;
  c.raw_text = std::move(raw);
  if (v.starts_with("correct")) return c;
  if (!v.starts_with("incorrect")) return unparseable(std::move(c.raw_text), "unknown verdict '" + v + "'");
  auto corrected = sections.find("corrected");
  if (corrected == sections.end()) return unparseable(std::move(c.raw_text), "incorrect verdict without a correction");
  try {
    c.replacement = parse_explanation(corrected->second, ExplanationKind::Bias);
  } catch (const ParseError& e) {
    return unparseable(std::move(c.raw_text), std::string("corrected explanation: ") + e.what());
  }
  c.needs_fix = true;
  return c;
}

Critique resolve_critique(Critique c, const Explanation& shown) {
  if (c.unparseable) {
    c.needs_fix = false;
    c.removals.clear();
    c.replacement.reset();
    return c;
  }
  if (c.replacement) {
    if (*c.replacement == shown) {
      c.warnings.push_back("correction equals the shown explanation");
      c.replacement.reset();
    }
    c.needs_fix = c.replacement.has_value();
    return c;
  }
  auto names = attribute_set(shown);
  std::vector<std::string> kept;
  for (auto& r : c.removals) {
    if (names.contains(r)) {
      kept.push_back(std::move(r));
    } else {
      c.warnings.push_back("critic flagged '" + r + "', which the explanation does not list");
    }
  }
  c.removals = std::move(kept);
  c.needs_fix = !c.removals.empty();
  return c;
}

Explanation apply_critique_formality(const Explanation& expl, const Critique& c) {
  if (!c.needs_fix) return expl;
  std::set<std::string> drop(c.removals.begin(), c.removals.end());
  Explanation out{expl.kind, {}};
  for (const auto& a : expl.attributes) {
    if (!drop.contains(a.name)) out.attributes.push_back(a);
  }
  if (out.attributes.empty() && !expl.attributes.empty()) {
    throw EmptyExplanation("critique removes every attribute");
  }
  return out;
}

StyleRecord apply_critique_bias(const StyleRecord& record, const Critique& c, TeacherPipeline& teacher) {
  if (!c.needs_fix || !c.replacement) return record;
  StyleRecord out = record;
  out.source_expl = *c.replacement;
  out.paraphrase = teacher.regenerate_neutral_paraphrase(record.source, out.source_expl);
  out.provenance = Provenance::IclefFixed;
  out.critic_note = c.raw_text;
  out.validate();
  return out;
}

GatewayCritic::GatewayCritic(Gateway& gateway, std::optional<CriticPrompt> formality, std::optional<CriticPrompt> bias)
    : gateway_(gateway),
      formality_(formality.value_or(default_critic_prompt(Task::Formality))),
      bias_(bias.value_or(default_critic_prompt(Task::BiasNeutralization))) {}

Critique GatewayCritic::critique(ExplanationKind kind, std::string_view sentence, const Explanation& shown,
                                 std::span<const ExpertFeedback> shots) {
  const bool bias = kind == ExplanationKind::Bias || kind == ExplanationKind::NoBias;
  const auto& prompt = bias ? bias_ : formality_;
  auto raw = gateway_.complete(critic_request(prompt, shots, kind, sentence, shown));
  return parse_critique(bias ? Task::BiasNeutralization : Task::Formality, std::move(raw));
}

ordered_json to_json(const CritiqueSummary& s) {
  ordered_json j;
  j["records"] = s.records;
  j["needs_fix"] = s.needs_fix;
  j["fixed"] = s.fixed;
  j["quarantined"] = s.quarantined;
  j["unparseable"] = s.unparseable;
  j["warnings"] = s.warnings;
  j["fix_rate"] = s.fix_rate();
  j["needs_fix_rate"] = s.needs_fix_rate();
  j["shot_ids"] = s.shot_ids;
  return j;
}

namespace {

struct Quarantined {
  std::string reason;
  std::string raw;
};

struct Outcome {
  std::variant<StyleRecord, Quarantined> result;
  bool needs_fix = false;
  bool unparseable = false;
  std::size_t warnings = 0;
};

void tally(Outcome& o, const Critique& c) {
  o.needs_fix = o.needs_fix || c.needs_fix;
  o.unparseable = o.unparseable || c.unparseable;
  if (!c.unparseable) o.warnings += c.warnings.size();
}

}  // namespace

CritiqueSummary run_critique_pass(const CritiqueJob& job, Critic& critic, TeacherPipeline* teacher) {
  if (job.task == Task::BiasNeutralization && !teacher) {
    throw UsageError("bias critique needs a teacher to regenerate paraphrases");
  }
  const auto quarantine =
      job.quarantine.empty() ? std::filesystem::path(job.output.string() + ".quarantine.jsonl") : job.quarantine;

  auto records = read_records(job.input);
  for (const auto& r : records) {
    if (r.task != job.task) throw SchemaViolation("record " + r.id + " is not a " + std::string(task_name(job.task)) + " record");
  }
  auto shots = select_feedback_shots(read_feedback(job.feedback), job.k, job.task, job.seed);

  std::vector<Outcome> outcomes(records.size());
  parallel_for(records.size(), job.workers, [&](std::size_t i) {
    const StyleRecord& rec = records[i];
    Outcome& o = outcomes[i];
    try {
      auto c = resolve_critique(critic.critique(rec.source_expl.kind, rec.source, rec.source_expl, shots), rec.source_expl);
      tally(o, c);
      if (job.task == Task::BiasNeutralization) {
        o.result = apply_critique_bias(rec, c, *teacher);
        return;
      }
      StyleRecord out = rec;
      std::vector<std::string> notes;
      if (c.needs_fix) {
        out.source_expl = apply_critique_formality(rec.source_expl, c);
        notes.push_back(c.raw_text);
      }
      if (job.critique_formal && rec.paraphrase_expl) {
        auto cf = resolve_critique(critic.critique(ExplanationKind::Formality, rec.paraphrase, *rec.paraphrase_expl, shots),
                                   *rec.paraphrase_expl);
        tally(o, cf);
        if (cf.needs_fix) {
          out.paraphrase_expl = apply_critique_formality(*rec.paraphrase_expl, cf);
          notes.push_back(cf.raw_text);
        }
      }
      if (!notes.empty()) {
        out.provenance = Provenance::IclefFixed;
        out.critic_note = join(notes, "\n");
      }
      o.result = std::move(out);
    } catch (const EmptyExplanation& e) {
      o.result = Quarantined{e.what(), ""};
    } catch (const QuarantinedRecord& e) {
      o.result = Quarantined{e.what(), e.raw_text()};
    } catch (const GenerationError& e) {
      o.result = Quarantined{e.what(), ""};
    }
  });

  CritiqueSummary summary;
  summary.records = records.size();
  for (const auto& s : shots) summary.shot_ids.push_back(s.record_id);
  std::vector<ordered_json> kept;
  std::vector<ordered_json> dropped;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& o = outcomes[i];
    summary.needs_fix += o.needs_fix;
    summary.unparseable += o.unparseable;
    summary.warnings += o.warnings;
    if (const auto* r = std::get_if<StyleRecord>(&o.result)) {
      if (r->provenance == Provenance::IclefFixed && records[i].provenance != Provenance::IclefFixed) ++summary.fixed;
      kept.push_back(to_json(*r));
    } else {
      const auto& q = std::get<Quarantined>(o.result);
      ordered_json row;
      row["id"] = records[i].id;
      row["task"] = task_name(job.task);
      row["source"] = records[i].source;
      row["reason"] = q.reason;
      row["raw_completion"] = q.raw;
      dropped.push_back(std::move(row));
    }
  }
  summary.quarantined = dropped.size();
  write_jsonl(job.output, kept);
  if (!dropped.empty() || std::filesystem::exists(quarantine)) write_jsonl(quarantine, dropped);
  return summary;
}

}  // namespace iclef
