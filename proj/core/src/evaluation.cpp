#include "iclef/evaluation.hpp"

#include "iclef/bleu.hpp"
#include "iclef/error.hpp"
#include "iclef/sections.hpp"

#include <cstdio>
#include <map>
#include <numeric>

namespace iclef {

std::vector<ModelOutput> read_model_outputs(const std::filesystem::path& path) {
  std::vector<ModelOutput> out;
  for (const auto& row : read_jsonl(path)) {
    if (!row.is_object() || !row.contains("id") || !row["id"].is_string()) {
      throw SchemaViolation("model output row without string id in " + path.string());
    }
    auto text = row.contains("output") && row["output"].is_string() ? row["output"].get<std::string>() : std::string();
    out.push_back({row["id"].get<std::string>(), std::move(text)});
  }
  return out;
}

void TrustworthinessTally::add(const Explanation& expl, std::string_view sentence) {
  for (const auto& a : expl.attributes) {
    for (const auto& e : a.evidences) {
      ++total;
      Explanation one{expl.kind, {{a.name, {e}, std::nullopt}}};
      if (trustworthiness(one, sentence) == 1.0) ++found;
    }
  }
}

double TrustworthinessTally::rate() const {
  return total == 0 ? 1.0 : static_cast<double>(found) / static_cast<double>(total);
}

double dataset_trustworthiness(const std::vector<StyleRecord>& records) {
  TrustworthinessTally t;
  for (const auto& r : records) {
    t.add(r.source_expl, r.source);
    if (r.paraphrase_expl) t.add(*r.paraphrase_expl, r.paraphrase);
  }
  return t.rate();
}

namespace {

struct Layout {
  std::string_view in_header;
  ExplanationKind in_kind;
  std::string_view para_header;
  std::optional<std::string_view> out_header;
  ExplanationKind out_kind = ExplanationKind::Formality;
  Metric style_metric;
  bool invert_style = false;
  std::string_view style_name;
};

Layout layout_for(Direction d) {
  switch (d) {
    case Direction::InformalToFormal:
      return {section::kInformalAttributes, ExplanationKind::Informality, section::kFormalParaphrase,
              section::kFormalAttributes, ExplanationKind::Formality, Metric::Formality, false, "formality"};
    case Direction::FormalToInformal:
      return {section::kFormalAttributes, ExplanationKind::Formality, section::kInformalParaphrase,
              section::kInformalAttributes, ExplanationKind::Informality, Metric::Formality, true, "informality"};
    case Direction::BiasToNeutral:
      return {section::kBiasAttributes, ExplanationKind::Bias, section::kNeutralizedParaphrase, std::nullopt,
              ExplanationKind::Bias, Metric::Neutrality, false, "neutrality"};
    case Direction::MultiTask: break;
  }
  throw UsageError("evaluation needs a single direction (i2f, f2i or bias)");
}

struct Prediction {
  std::optional<Explanation> in_expl;
  std::optional<Explanation> out_expl;
  std::string paraphrase;
  bool malformed = false;
};

Prediction parse_prediction(const std::string& text, const Layout& l) {
  std::vector<SectionSpec> specs = {{"in", {std::string(l.in_header)}}, {"para", {std::string(l.para_header)}}};
  if (l.out_header) specs.push_back({"out", {std::string(*l.out_header)}});
  auto sections = parse_sections(text, specs);
  Prediction p;
  auto take = [&](const char* key, ExplanationKind kind, std::optional<Explanation>& slot) {
    auto it = sections.find(key);
    if (it == sections.end()) {
      p.malformed = true;
      return;
    }
    try {
      slot = parse_explanation(it->second, kind);
    } catch (const ParseError&) {
      p.malformed = true;
    }
  };
  take("in", l.in_kind, p.in_expl);
  if (l.out_header) take("out", l.out_kind, p.out_expl);
  if (auto it = sections.find("para"); it != sections.end()) {
    p.paraphrase = it->second;
  } else {
    p.malformed = true;
  }
  return p;
}

std::optional<double> mean_of(std::initializer_list<std::optional<double>> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<std::vector<double>> try_score(Scorer& scorer, Metric metric, const std::vector<ScoreItem>& items,
                                             std::vector<std::string>& warnings) {
  try {
    return scorer.score(metric, items);
  } catch (const ScorerUnavailable& e) {
    warnings.push_back(std::string(metric_name(metric)) + " absent: " + e.what());
  } catch (const MalformedResponse& e) {
    warnings.push_back(std::string(metric_name(metric)) + " absent: " + e.what());
  }
  return std::nullopt;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

MetricsReport evaluate_run(const std::vector<ModelOutput>& outputs, const std::vector<StyleRecord>& test_set,
                           Direction direction, Scorer& scorer) {
  const Layout l = layout_for(direction);
  const bool bias = direction == Direction::BiasToNeutral;
  MetricsReport rep;
  rep.direction = direction;
  rep.style_metric = std::string(l.style_name);
  rep.output_count = outputs.size();

  std::map<std::string, std::size_t> test_index;
  for (std::size_t i = 0; i < test_set.size(); ++i) test_index.emplace(test_set[i].id, i);

  std::vector<std::optional<Prediction>> preds(test_set.size());
  for (const auto& o : outputs) {
    auto it = test_index.find(o.id);
    if (it == test_index.end() || preds[it->second]) {
      ++rep.malformed_count;
      rep.warnings.push_back(it == test_index.end() ? "output for unknown id " + o.id : "duplicate output for " + o.id);
      continue;
    }
    auto p = parse_prediction(o.output, l);
    if (p.malformed) {
      ++rep.malformed_count;
    } else {
      ++rep.scored_count;
    }
    preds[it->second] = std::move(p);
  }

  std::vector<std::string> in_cands, in_refs, out_cands, out_refs, pred_labels, gold_labels;
  std::vector<ScoreItem> mis_items, style_items;
  TrustworthinessTally trust;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const auto& r = test_set[i];
    if (bias != (r.task == Task::BiasNeutralization)) {
      throw SchemaViolation("test record " + r.id + " does not match direction " + std::string(direction_name(direction)));
    }
    if (!bias && !r.paraphrase_expl) throw MissingField("test record " + r.id + " has no formal attributes");
    const Prediction p = preds[i].value_or(Prediction{});
    const std::string& input_sentence = direction == Direction::FormalToInformal ? r.paraphrase : r.source;
    const Explanation& gold_in = direction == Direction::FormalToInformal ? *r.paraphrase_expl : r.source_expl;

    RecordScore rs;
    rs.id = r.id;
    rs.missing = !preds[i].has_value();
    rs.malformed = preds[i] && preds[i]->malformed;
    if (rs.missing) ++rep.missing_count;

    std::string in_cand = p.in_expl ? render_explanation(*p.in_expl) : "";
    std::string in_ref = render_explanation(gold_in);
    rs.input_attrs_bleu = bleu_score(bleu_stats(whitespace_tokens(in_cand), whitespace_tokens(in_ref)));
    in_cands.push_back(std::move(in_cand));
    in_refs.push_back(std::move(in_ref));

    TrustworthinessTally local;
    if (p.in_expl) local.add(*p.in_expl, input_sentence);
    if (!bias) {
      const Explanation& gold_out = direction == Direction::FormalToInformal ? r.source_expl : *r.paraphrase_expl;
      std::string out_cand = p.out_expl ? render_explanation(*p.out_expl) : "";
      std::string out_ref = render_explanation(gold_out);
      rs.output_attrs_bleu = bleu_score(bleu_stats(whitespace_tokens(out_cand), whitespace_tokens(out_ref)));
      out_cands.push_back(std::move(out_cand));
      out_refs.push_back(std::move(out_ref));
      if (p.out_expl) local.add(*p.out_expl, p.paraphrase);
    } else {
      rs.predicted_label = p.in_expl ? primary_bias_label(*p.in_expl) : "";
      rs.gold_label = primary_bias_label(r.source_expl);
      pred_labels.push_back(rs.predicted_label);
      gold_labels.push_back(rs.gold_label);
    }
    rs.trustworthiness = local.rate();
    trust.found += local.found;
    trust.total += local.total;

    mis_items.push_back({input_sentence, p.paraphrase});
    style_items.push_back({p.paraphrase, std::nullopt});
    rep.records.push_back(std::move(rs));
  }

  rep.input_attrs_bleu = corpus_bleu(in_cands, in_refs);
  if (!bias) rep.output_attrs_bleu = corpus_bleu(out_cands, out_refs);
  if (bias) rep.bias_f1 = bias_f1(pred_labels, gold_labels);
  rep.trustworthiness = 100.0 * trust.rate();

  if (auto mis = try_score(scorer, Metric::Mis, mis_items, rep.warnings)) {
    for (std::size_t i = 0; i < mis->size(); ++i) rep.records[i].mis = (*mis)[i];
    rep.mis = mean(*mis);
  }
  if (auto style = try_score(scorer, l.style_metric, style_items, rep.warnings)) {
    for (auto& s : *style) {
      if (l.invert_style) s = 100.0 - s;
    }
    for (std::size_t i = 0; i < style->size(); ++i) rep.records[i].style = (*style)[i];
    rep.style_score = mean(*style);
  }

  if (bias) {
    rep.average = mean_of({rep.input_attrs_bleu, rep.mis, rep.style_score});
  } else {
    rep.average = mean_of({rep.input_attrs_bleu, rep.mis, rep.style_score, rep.output_attrs_bleu});
  }
  return rep;
}

std::optional<double> combined_average(const MetricsReport& a, const MetricsReport& b) {
  return mean_of({a.input_attrs_bleu, a.mis, a.style_score, a.output_attrs_bleu, b.input_attrs_bleu, b.mis,
                  b.style_score, b.output_attrs_bleu});
}

namespace {

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(); }

std::string fmt(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

}  // namespace

ordered_json to_json(const MetricsReport& r) {
  const bool bias = r.direction == Direction::BiasToNeutral;
  ordered_json j;
  j["direction"] = direction_name(r.direction);
  j["output_count"] = r.output_count;
  j["scored_count"] = r.scored_count;
  j["malformed_count"] = r.malformed_count;
  j["missing_count"] = r.missing_count;
  ordered_json m;
  if (bias) {
    m["bias_f1"] = opt(r.bias_f1);
    m["attrs_bleu"] = opt(r.input_attrs_bleu);
  } else {
    m["input_attrs_bleu"] = opt(r.input_attrs_bleu);
  }
  m["mis"] = opt(r.mis);
  m[r.style_metric] = opt(r.style_score);
  if (!bias) m["output_attrs_bleu"] = opt(r.output_attrs_bleu);
  m["average"] = opt(r.average);
  m["trustworthiness"] = r.trustworthiness;
  j["metrics"] = std::move(m);
  j["warnings"] = r.warnings;
  return j;
}

std::string per_record_csv(const MetricsReport& r) {
  const bool bias = r.direction == Direction::BiasToNeutral;
  std::string out = bias ? "id,status,predicted_label,gold_label,attrs_bleu,mis," + r.style_metric + ",trustworthiness\n"
                         : "id,status,input_attrs_bleu,output_attrs_bleu,mis," + r.style_metric + ",trustworthiness\n";
  for (const auto& rs : r.records) {
    std::string status = rs.missing ? "missing" : rs.malformed ? "malformed" : "ok";
    out += rs.id + "," + status + ",";
    if (bias) {
      out += rs.predicted_label + "," + rs.gold_label + "," + fmt(rs.input_attrs_bleu) + ",";
    } else {
      out += fmt(rs.input_attrs_bleu) + "," + fmt(rs.output_attrs_bleu) + ",";
    }
    out += fmt(rs.mis) + "," + fmt(rs.style) + "," + fmt(rs.trustworthiness) + "\n";
  }
  return out;
}

std::string gold_output(const StyleRecord& record, Direction direction) {
  return export_instructions({record}, direction).front().output;
}

}  // namespace iclef
