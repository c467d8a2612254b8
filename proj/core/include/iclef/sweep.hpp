#pragma once

#include "iclef/critic.hpp"
#include "iclef/feedback.hpp"
#include "iclef/rng.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace iclef {

/// Gold critique implied by an expert's feedback on an instance.
Critique gold_critique(const ExpertFeedback& feedback);

/// True when `predicted` flags exactly the gold-incorrect attributes (bias:
/// same verdict and, for Incorrect, the same label set).
bool critique_matches(const Critique& predicted, const Critique& gold);

struct SweepRow {
  std::size_t k = 0;
  std::size_t trials = 0;
  std::size_t evaluated = 0;  // critiques scored across all trials
  std::size_t correct = 0;
  double correctness() const { return evaluated ? static_cast<double>(correct) / static_cast<double>(evaluated) : 0.0; }
};

struct SweepOptions {
  std::vector<std::size_t> ks = {1, 10, 35};
  std::size_t trials = 1;
  std::uint64_t seed = 0;
};

/// For every k, draws a fresh shot set per trial (seed + trial) from the
/// store entries not in `eval_set`, critiques every eval instance and
/// counts exact matches against its gold critique. Throws
/// InsufficientFeedback when a k exceeds the available shots.
std::vector<SweepRow> sweep_feedback_counts(const std::vector<ExpertFeedback>& store,
                                            const std::vector<ExpertFeedback>& eval_set, Task task,
                                            const SweepOptions& options, Critic& critic);

ordered_json to_json(const std::vector<SweepRow>& rows);

/// Stand-in critic that answers each query correctly with probability
/// `accuracy` and otherwise returns a wrong critique. Gold answers come
/// from the eval set, looked up by sentence. Draws are sequential from one
/// seeded stream, so a sweep is reproducible.
class SimulatedCritic : public Critic {
 public:
  SimulatedCritic(double accuracy, const std::vector<ExpertFeedback>& eval_set, std::uint64_t seed);
  Critique critique(ExplanationKind kind, std::string_view sentence, const Explanation& shown,
                    std::span<const ExpertFeedback> shots) override;

 private:
  double accuracy_;
  std::map<std::string, Critique> gold_;
  std::mutex mu_;
  Rng rng_;
};

}  // namespace iclef
