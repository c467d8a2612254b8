#include "iclef/sweep.hpp"

#include "iclef/error.hpp"
#include "iclef/text.hpp"

#include <set>

namespace iclef {

Critique gold_critique(const ExpertFeedback& f) {
  Critique c;
  c.raw_text = "gold:" + f.record_id;
  if (f.verdict == Verdict::Correct) return c;
  c.needs_fix = true;
  if (f.task == Task::Formality) {
    for (const auto& a : f.flagged_attributes) c.removals.push_back(a.name);
  } else {
    c.replacement = parse_explanation(*f.corrected_explanation, ExplanationKind::Bias);
  }
  return c;
}

bool critique_matches(const Critique& predicted, const Critique& gold) {
  if (predicted.needs_fix != gold.needs_fix) return false;
  if (!gold.needs_fix) return true;
  if (gold.replacement) {
    return predicted.replacement && attribute_set(*predicted.replacement) == attribute_set(*gold.replacement);
  }
  std::set<std::string> p(predicted.removals.begin(), predicted.removals.end());
  std::set<std::string> g(gold.removals.begin(), gold.removals.end());
  return p == g;
}

std::vector<SweepRow> sweep_feedback_counts(const std::vector<ExpertFeedback>& store,
                                            const std::vector<ExpertFeedback>& eval_set, Task task,
                                            const SweepOptions& options, Critic& critic) {
  std::set<std::string> held_out;
  for (const auto& f : eval_set) held_out.insert(f.record_id);
  std::vector<ExpertFeedback> pool;
  for (const auto& f : store) {
    if (f.task == task && !held_out.contains(f.record_id)) pool.push_back(f);
  }
  for (auto k : options.ks) {
    if (k == 0 || k > pool.size()) {
      throw InsufficientFeedback("k=" + std::to_string(k) + " exceeds the " + std::to_string(pool.size()) +
                                 " feedback entries outside the eval set");
    }
  }

  struct Instance {
    ExplanationKind kind;
    std::string sentence;
    Explanation shown;
    Critique gold;
  };
  std::vector<Instance> instances;
  for (const auto& f : eval_set) {
    if (f.task != task) continue;
    auto kind = task == Task::Formality ? ExplanationKind::Informality : ExplanationKind::Bias;
    auto shown = parse_explanation(f.shown_explanation, kind);
    instances.push_back({shown.kind, f.shown_sentence, shown, gold_critique(f)});
  }

  std::vector<SweepRow> rows;
  for (auto k : options.ks) {
    SweepRow row;
    row.k = k;
    row.trials = options.trials;
    for (std::size_t t = 0; t < options.trials; ++t) {
      auto shots = select_feedback_shots(pool, k, task, options.seed + t);
      for (const auto& inst : instances) {
        auto c = resolve_critique(critic.critique(inst.kind, inst.sentence, inst.shown, shots), inst.shown);
        ++row.evaluated;
        if (critique_matches(c, inst.gold)) ++row.correct;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

ordered_json to_json(const std::vector<SweepRow>& rows) {
  auto out = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["k"] = r.k;
    j["trials"] = r.trials;
    j["evaluated"] = r.evaluated;
    j["correct"] = r.correct;
    j["correctness"] = r.correctness();
    out.push_back(std::move(j));
  }
  return out;
}

SimulatedCritic::SimulatedCritic(double accuracy, const std::vector<ExpertFeedback>& eval_set, std::uint64_t seed)
    : accuracy_(accuracy), rng_(seed) {
  for (const auto& f : eval_set) gold_[collapse_whitespace(f.shown_sentence)] = gold_critique(f);
}

Critique SimulatedCritic::critique(ExplanationKind kind, std::string_view sentence, const Explanation& shown,
                                   std::span<const ExpertFeedback>) {
  auto it = gold_.find(collapse_whitespace(sentence));
  if (it == gold_.end()) throw UsageError("simulated critic has no gold answer for: " + std::string(sentence));
  bool right;
  {
    std::lock_guard lock(mu_);
    right = rng_.uniform_real() < accuracy_;
  }
  if (right) return it->second;

  const Critique& gold = it->second;
  Critique wrong;
  wrong.raw_text = "simulated wrong critique";
  const bool bias = kind == ExplanationKind::Bias || kind == ExplanationKind::NoBias;
  if (gold.needs_fix) return wrong;  // misses the error
  wrong.needs_fix = true;
  if (bias) {
    auto current = primary_bias_label(shown);
    std::string_view label = current == "Framing" ? kEpistemological : kFraming;
    wrong.replacement = Explanation{ExplanationKind::Bias, {{std::string(label), {}, std::nullopt}}};
  } else if (!shown.attributes.empty()) {
    wrong.removals.push_back(shown.attributes.front().name);
  } else {
    wrong.removals.push_back("nonexistent attribute");
  }
  return wrong;
}

}  // namespace iclef
