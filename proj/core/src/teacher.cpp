#include "iclef/teacher.hpp"

#include "iclef/error.hpp"
#include "iclef/parallel.hpp"
#include "iclef/sections.hpp"
#include "iclef/text.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <variant>

namespace iclef {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFormalitySystem =
    "You are an expert forensic linguist. Your task is to identify informal attributes in a sentence, "
    "modify them to create a formal sentence, and then output the attributes of the generated formal "
    "sentence. Use the following format: attribute (\"excerpt from text in quotation marks\"). Make sure "
    "to provide a complete list of informal and formal attributes. Focus on what has changed between "
    "formal and informal sentences. Informal writing tends to be more casual, personal, and "
    "conversational than formal writing. Here are some common features of informal writing:\n"
    "Contractions: informal writing often uses contractions such as \"I'm\", \"can't\", \"won't\" and "
    "\"they've\", which are generally avoided in formal writing.\n"
    "Informal greetings and sign-offs: casual greetings such as \"Hi\" or \"Hey\" and sign-offs like "
    "\"Cheers\" or \"Take care\".\n"
    "Textese and abbreviations: \"u\", \"ur\", \"lol\", \"asap\", \"info\".\n"
    "Slang and colloquialisms, non-standard capitalization and punctuation, and first-person "
    "conversational asides.\n"
    "Answer with exactly three lines:\n"
    "Informal Attributes: <attributes of the informal sentence>\n"
    "Formal Paraphrase: <formal rewrite>\n"
    "Formal Attributes: <attributes of the formal rewrite>";

constexpr const char* kBiasTypes =
    "Focus on three main types of bias in a sentence: Framing (subjective words or phrases linked to a "
    "particular point of view), Epistemological (linguistic features that subtly presuppose, assert or "
    "cast doubt on the truth of a proposition), and Demographic (presupposing truths about people of a "
    "particular gender, race or other demographic category).";

constexpr const char* kBiasSystemHead =
    "You are an expert in ethics, journalism, critical thinking and bias identification. You will be "
    "provided with a possibly biased sentence. Identify the type of bias it contains and explain it, "
    "then rewrite the sentence so that it follows the neutral point of view. ";

constexpr const char* kBiasSystemTail =
    " Use the format: Type of Bias (\"evidence\" reasoning). If the sentence does not contain bias, the "
    "explanation is: This sentence does not contain bias.\n"
    "Answer with exactly two lines:\n"
    "Bias Attributes: <explanation>\n"
    "Neutralized Paraphrase: <neutral rewrite>";

constexpr const char* kRegenerationSystem =
    "You are an expert in ethics, journalism, critical thinking and bias identification. You will be "
    "provided with a possibly biased sentence and an explanation of its bias attributes. Rewrite the "
    "sentence so that it follows the neutral point of view, removing the bias the explanation "
    "describes and changing nothing else. If the explanation says the sentence does not contain bias, "
    "repeat the sentence unchanged.\n"
    "Answer with exactly one line:\n"
    "Neutralized Paraphrase: <neutral rewrite>";

std::string formality_completion(std::string_view ei, std::string_view sf, std::string_view ef) {
  return render_sections({{section::kInformalAttributes, std::string(ei)},
                          {section::kFormalParaphrase, std::string(sf)},
                          {section::kFormalAttributes, std::string(ef)}});
}

std::string bias_completion(std::string_view eb, std::string_view sn) {
  return render_sections({{section::kBiasAttributes, std::string(eb)}, {section::kNeutralizedParaphrase, std::string(sn)}});
}

struct BiasDemo {
  const char* biased;
  const char* explanation;
  const char* neutral;
};

constexpr BiasDemo kBiasDemos[] = {
    {"some cacti produce beautiful flowers, which like spines and branches arise from areoles.",
     "Framing (\"beautiful\" adds subjectivity and implies a positive evaluation of the flowers)",
     "some cacti produce flowers, which like spines and branches arise from areoles."},
    {"the senator falsely claimed that the bill would lower taxes.",
     "Epistemological (\"falsely claimed\" presupposes that the statement is untrue)",
     "the senator stated that the bill would lower taxes."},
    {"the chairman of the committee will announce the results on monday.",
     "Demographic (\"chairman\" presupposes that the person holding the role is male)",
     "the chair of the committee will announce the results on monday."},
    {"the river flows through three provinces before reaching the sea.", "This sentence does not contain bias.",
     "the river flows through three provinces before reaching the sea."},
};

const std::vector<SectionSpec>& formality_specs() {
  static const std::vector<SectionSpec> specs = {
      {"ei", {std::string(section::kInformalAttributes), "Attributes of Informal Style"}},
      {"sf", {std::string(section::kFormalParaphrase), "Formal Sentence", "Formal"}},
      {"ef", {std::string(section::kFormalAttributes), "Attributes of Formal Style"}},
  };
  return specs;
}

const std::vector<SectionSpec>& bias_specs() {
  static const std::vector<SectionSpec> specs = {
      {"eb", {std::string(section::kBiasAttributes), "Type of Bias", "Bias Explanation"}},
      {"sn", {std::string(section::kNeutralizedParaphrase), "Neutral Paraphrase", "Unbiased Paraphrase"}},
  };
  return specs;
}

const std::string& require_section(const std::map<std::string, std::string>& sections, const std::string& key,
                                   std::string_view label, const std::string& raw) {
  auto it = sections.find(key);
  if (it == sections.end() || it->second.empty()) {
    throw QuarantinedRecord("completion has no '" + std::string(label) + "' section", raw);
  }
  return it->second;
}

Explanation parse_or_quarantine(const std::string& text, ExplanationKind kind, std::string_view label,
                                const std::string& raw) {
  try {
    return parse_explanation(text, kind);
  } catch (const ParseError& e) {
    throw QuarantinedRecord(std::string(label) + ": " + e.what(), raw);
  }
}

std::vector<FewShot> frame_shots(const std::vector<FewShot>& shots, std::string (*frame)(std::string_view)) {
  std::vector<FewShot> out;
  out.reserve(shots.size());
  for (const auto& s : shots) out.push_back({frame(s.input), s.output});
  return out;
}

}  // namespace

TeacherPrompt default_formality_prompt() {
  TeacherPrompt p;
  p.system = kFormalitySystem;
  p.model_id = "gpt-3.5-turbo-1106";
  p.shots = {
      {"if ur under 18 u have a BIG PROBLEM.",
       formality_completion(R"(textese ("ur", "u"), capitalization ("BIG PROBLEM"), colloquialism ("BIG PROBLEM"))",
                            "If you are under 18, you have a significant problem.",
                            R"(complete words ("you are"), lexical sophistication ("significant problem"))")},
      {"how can you tell if a girl likes you or not?",
       formality_completion(R"(direct question form ("how can you tell"), informal language ("girl", "likes you"))",
                            "What are some indications that a woman may be interested in you?",
                            R"(indirect question form ("what are some indications"), lexical sophistication ("woman", "interested in you"))")},
      {"hopefully you aren't too old or you are screwed.",
       formality_completion(R"(slang ("screwed"), contraction ("aren't"))",
                            "I hope that you are not too old; otherwise, you will be in a difficult situation.",
                            R"(full verb forms ("are not"), lexical sophistication ("difficult situation"))")},
      {"more info, we are both in our very late twenties.",
       formality_completion(R"(abbreviation ("info"), colloquialism ("very late twenties"))",
                            "For further information, we are both in our late twenties.",
                            R"(complete words ("information"), precise language ("late twenties"))")},
      {"Look, If you really like this person, just tell her.",
       formality_completion(R"(discourse marker ("Look"), colloquialism ("just tell her"))",
                            "If you genuinely care for this person, you should tell her.",
                            R"(lexical sophistication ("genuinely care for"), modal construction ("you should tell her"))")},
      {"lol thats so true, i totally agree w/ u",
       formality_completion(R"(textese ("lol", "w/", "u"), missing apostrophe ("thats"), lowercase pronoun ("i"), intensifier ("totally"))",
                            "That is very true; I completely agree with you.",
                            R"(complete words ("with you"), standard capitalization ("I"), lexical sophistication ("completely agree"))")},
  };
  return p;
}

TeacherPrompt default_bias_prompt() {
  TeacherPrompt p;
  p.system = std::string(kBiasSystemHead) + kBiasTypes + kBiasSystemTail;
  p.model_id = "gpt-4";
  for (const auto& d : kBiasDemos) p.shots.push_back({d.biased, bias_completion(d.explanation, d.neutral)});
  return p;
}

TeacherPrompt default_regeneration_prompt() {
  TeacherPrompt p;
  p.system = kRegenerationSystem;
  p.model_id = "gpt-4";
  for (const auto& d : kBiasDemos) {
    auto e = parse_explanation(d.explanation, ExplanationKind::Bias);
    p.shots.push_back({regeneration_query(d.biased, e),
                       render_sections({{section::kNeutralizedParaphrase, d.neutral}})});
  }
  return p;
}

std::string formality_query(std::string_view informal) { return "Informal: " + collapse_whitespace(informal); }

std::string bias_query(std::string_view biased) { return "Biased: " + collapse_whitespace(biased); }

std::string regeneration_query(std::string_view biased, const Explanation& e_b) {
  return "Biased: " + collapse_whitespace(biased) + "\n" + std::string(section::kBiasAttributes) + ": " +
         render_explanation(e_b);
}

FormalityCompletion parse_formality_completion(const std::string& raw) {
  auto sections = parse_sections(raw, formality_specs());
  const auto& ei = require_section(sections, "ei", section::kInformalAttributes, raw);
  const auto& sf = require_section(sections, "sf", section::kFormalParaphrase, raw);
  const auto& ef = require_section(sections, "ef", section::kFormalAttributes, raw);
  FormalityCompletion c;
  c.informal_attributes = parse_or_quarantine(ei, ExplanationKind::Informality, section::kInformalAttributes, raw);
  c.formal_paraphrase = collapse_whitespace(sf);
  c.formal_attributes = parse_or_quarantine(ef, ExplanationKind::Formality, section::kFormalAttributes, raw);
  if (c.informal_attributes.is_bias_task() || c.formal_attributes.is_bias_task()) {
    throw QuarantinedRecord("formality completion used the no-bias sentinel", raw);
  }
  return c;
}

BiasCompletion parse_bias_completion(const std::string& raw) {
  auto sections = parse_sections(raw, bias_specs());
  const auto& eb = require_section(sections, "eb", section::kBiasAttributes, raw);
  const auto& sn = require_section(sections, "sn", section::kNeutralizedParaphrase, raw);
  return {parse_or_quarantine(eb, ExplanationKind::Bias, section::kBiasAttributes, raw), collapse_whitespace(sn)};
}

TeacherPipeline::TeacherPipeline(Gateway& gateway, TeacherPrompt formality, TeacherPrompt bias,
                                 TeacherPrompt regeneration)
    : gateway_(gateway),
      formality_(std::move(formality)),
      bias_(std::move(bias)),
      regeneration_(std::move(regeneration)) {}

ChatRequest TeacherPipeline::formality_request(std::string_view informal) const {
  auto shots = frame_shots(formality_.shots, formality_query);
  return assemble_fewshot(formality_.system, shots, formality_query(informal), formality_.model_id,
                          formality_.decoding);
}

ChatRequest TeacherPipeline::bias_request(std::string_view biased) const {
  auto shots = frame_shots(bias_.shots, bias_query);
  return assemble_fewshot(bias_.system, shots, bias_query(biased), bias_.model_id, bias_.decoding);
}

ChatRequest TeacherPipeline::regeneration_request(std::string_view biased, const Explanation& e_b) const {
  return assemble_fewshot(regeneration_.system, regeneration_.shots, regeneration_query(biased, e_b),
                          regeneration_.model_id, regeneration_.decoding);
}

std::string TeacherPipeline::complete(const ChatRequest& req) {
  try {
    return gateway_.complete(req);
  } catch (const TransportError& e) {
    throw GenerationError(std::string("teacher endpoint failed after retries: ") + e.what());
  } catch (const GatewayError& e) {
    throw GenerationError(std::string("teacher endpoint rejected request: ") + e.what());
  }
}

StyleRecord TeacherPipeline::generate_formality_record(std::string id, std::string_view informal) {
  if (trim(informal).empty()) throw SchemaViolation("empty informal sentence for " + id);
  auto raw = complete(formality_request(informal));
  auto c = parse_formality_completion(raw);
  StyleRecord r;
  r.id = std::move(id);
  r.task = Task::Formality;
  r.source = collapse_whitespace(informal);
  r.source_expl = std::move(c.informal_attributes);
  r.paraphrase = std::move(c.formal_paraphrase);
  r.paraphrase_expl = std::move(c.formal_attributes);
  r.validate();
  return r;
}

StyleRecord TeacherPipeline::generate_bias_record(std::string id, std::string_view biased) {
  if (trim(biased).empty()) throw SchemaViolation("empty biased sentence for " + id);
  auto raw = complete(bias_request(biased));
  auto c = parse_bias_completion(raw);
  StyleRecord r;
  r.id = std::move(id);
  r.task = Task::BiasNeutralization;
  r.source = collapse_whitespace(biased);
  r.source_expl = std::move(c.bias_attributes);
  r.paraphrase = std::move(c.neutral_paraphrase);
  r.validate();
  return r;
}

std::string TeacherPipeline::regenerate_neutral_paraphrase(std::string_view biased, const Explanation& e_b) {
  auto raw = complete(regeneration_request(biased, e_b));
  auto sections = parse_sections(raw, {bias_specs()[1]});
  auto it = sections.find("sn");
  auto paraphrase = collapse_whitespace(it != sections.end() ? it->second : raw);
  if (paraphrase.empty()) throw QuarantinedRecord("empty regenerated paraphrase", raw);
  return paraphrase;
}

std::vector<CorpusItem> read_corpus(const fs::path& path, std::string_view id_prefix) {
  auto content = read_file(path);
  std::vector<CorpusItem> items;
  std::size_t n = 0;
  for (auto& line : split(content, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++n;
    char id[32];
    std::snprintf(id, sizeof(id), "-%06zu", n);
    CorpusItem item;
    item.id = std::string(id_prefix) + id;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      item.source = collapse_whitespace(line);
    } else {
      item.source = collapse_whitespace(line.substr(0, tab));
      auto ref = collapse_whitespace(line.substr(tab + 1));
      if (!ref.empty()) item.reference = std::move(ref);
    }
    items.push_back(std::move(item));
  }
  return items;
}

namespace {

struct QuarantineRow {
  std::string id;
  std::string source;
  std::string reason;
  std::string raw;
};

std::set<std::string> ids_in(const fs::path& path) {
  std::set<std::string> ids;
  if (!fs::exists(path)) return ids;
  for (const auto& row : read_jsonl(path, true)) ids.insert(row.at("id").get<std::string>());
  return ids;
}

std::size_t count_rows(const fs::path& path) { return fs::exists(path) ? read_jsonl(path, true).size() : 0; }

}  // namespace

GenerationSummary run_generation(const GenerationJob& job, TeacherPipeline& pipeline) {
  const std::string prefix = job.id_prefix.empty() ? std::string(task_name(job.task)) : job.id_prefix;
  const fs::path checkpoint = job.checkpoint.empty() ? fs::path(job.output.string() + ".checkpoint.json") : job.checkpoint;
  const fs::path quarantine =
      job.quarantine.empty() ? fs::path(job.output.string() + ".quarantine.jsonl") : job.quarantine;

  auto items = read_corpus(job.input, prefix);
  truncate_torn_tail(job.output);
  truncate_torn_tail(quarantine);

  auto done = ids_in(job.output);
  done.merge(ids_in(quarantine));

  GenerationSummary summary;
  summary.inputs = items.size();
  std::vector<const CorpusItem*> pending;
  for (const auto& item : items) {
    if (done.contains(item.id)) {
      ++summary.resumed;
    } else {
      pending.push_back(&item);
    }
  }
  std::size_t completed = summary.resumed;
  if (fs::exists(checkpoint)) {
    auto cp = json::parse(read_file(checkpoint), nullptr, false);
    if (!cp.is_discarded()) completed = std::max<std::size_t>(completed, cp.value("completed", std::size_t{0}));
  }

  AppendLog out_log(job.output, false);
  AppendLog q_log(quarantine, false);

  std::size_t budget = job.stop_after.value_or(pending.size());
  std::size_t next = 0;
  while (next < pending.size() && summary.processed < budget) {
    const std::size_t batch =
        std::min({std::max<std::size_t>(1, job.batch_size), pending.size() - next, budget - summary.processed});
    std::vector<std::variant<StyleRecord, QuarantineRow>> results(batch);
    parallel_for(batch, job.workers, [&](std::size_t i) {
      const CorpusItem& item = *pending[next + i];
      try {
        auto r = job.task == Task::Formality ? pipeline.generate_formality_record(item.id, item.source)
                                             : pipeline.generate_bias_record(item.id, item.source);
        r.reference = item.reference;
        results[i] = std::move(r);
      } catch (const QuarantinedRecord& e) {
        results[i] = QuarantineRow{item.id, item.source, e.what(), e.raw_text()};
      } catch (const GenerationError& e) {
        results[i] = QuarantineRow{item.id, item.source, e.what(), ""};
      }
    });
    for (auto& res : results) {
      if (auto* r = std::get_if<StyleRecord>(&res)) {
        out_log.append(to_json(*r).dump());
      } else {
        const auto& q = std::get<QuarantineRow>(res);
        ordered_json row;
        row["id"] = q.id;
        row["task"] = task_name(job.task);
        row["source"] = q.source;
        row["reason"] = q.reason;
        row["raw_completion"] = q.raw;
        q_log.append(row.dump());
      }
    }
    next += batch;
    summary.processed += batch;
    completed += batch;
    const auto& last_id = pending[next - 1]->id;
    write_file_atomic(checkpoint, json{{"completed", completed}, {"last_id", last_id}}.dump() + "\n");
  }

  summary.emitted = count_rows(job.output);
  summary.quarantined = count_rows(quarantine);
  return summary;
}

}  // namespace iclef
