#include "iclef/error.hpp"
#include "iclef/sweep.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace iclef;

namespace {

struct Split {
  std::vector<ExpertFeedback> store;
  std::vector<ExpertFeedback> eval;
};

Split formality_split(std::size_t eval_size = 15) {
  Split s;
  s.store = read_feedback(test::fixture("formality_feedback.jsonl"));
  s.eval.assign(s.store.end() - static_cast<std::ptrdiff_t>(eval_size), s.store.end());
  return s;
}

}  // namespace

TEST_SUITE("sweep") {
  TEST_CASE("gold critiques") {
    auto fb = read_feedback(test::fixture("formality_feedback.jsonl"));
    auto g = gold_critique(fb.front());
    CHECK(g.needs_fix);
    CHECK(g.removals == std::vector<std::string>{"contraction"});
    auto bias = read_feedback(test::fixture("bias_feedback.jsonl"));
    CHECK_FALSE(gold_critique(bias[0]).needs_fix);
    REQUIRE(gold_critique(bias[1]).replacement);
  }

  TEST_CASE("match semantics") {
    Critique none;
    Critique a;
    a.needs_fix = true;
    a.removals = {"slang", "textese"};
    Critique b = a;
    b.removals = {"textese", "slang"};
    Critique c = a;
    c.removals = {"slang"};
    CHECK(critique_matches(none, none));
    CHECK(critique_matches(a, b));
    CHECK_FALSE(critique_matches(c, a));
    CHECK_FALSE(critique_matches(none, a));
    CHECK_FALSE(critique_matches(a, none));
  }

  TEST_CASE("perfect critic scores 1 and useless critic scores 0") {
    auto s = formality_split();
    SweepOptions o;
    o.ks = {1, 10, 35};
    o.trials = 2;
    SimulatedCritic perfect(1.0, s.eval, 1);
    auto rows = sweep_feedback_counts(s.store, s.eval, Task::Formality, o, perfect);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
      CHECK(r.evaluated == 30);
      CHECK(r.correctness() == 1.0);
    }
    SimulatedCritic never(0.0, s.eval, 1);
    for (const auto& r : sweep_feedback_counts(s.store, s.eval, Task::Formality, o, never)) {
      CHECK(r.correctness() == 0.0);
    }
  }

  TEST_CASE("deterministic under a seed") {
    auto s = formality_split();
    SweepOptions o;
    o.trials = 5;
    SimulatedCritic a(0.6, s.eval, 42), b(0.6, s.eval, 42);
    auto ra = sweep_feedback_counts(s.store, s.eval, Task::Formality, o, a);
    auto rb = sweep_feedback_counts(s.store, s.eval, Task::Formality, o, b);
    CHECK(to_json(ra) == to_json(rb));
  }

  TEST_CASE("held-out pool limits k") {
    auto s = formality_split();
    SweepOptions o;
    o.ks = {36};
    SimulatedCritic c(1.0, s.eval, 0);
    CHECK_THROWS_AS(sweep_feedback_counts(s.store, s.eval, Task::Formality, o, c), InsufficientFeedback);
  }

  TEST_CASE("bias sweep") {
    auto store = read_feedback(test::fixture("bias_feedback.jsonl"));
    std::vector<ExpertFeedback> eval(store.begin(), store.begin() + 8);
    SweepOptions o;
    o.ks = {4, 12};
    SimulatedCritic perfect(1.0, eval, 3);
    for (const auto& r : sweep_feedback_counts(store, eval, Task::BiasNeutralization, o, perfect)) {
      CHECK(r.correctness() == 1.0);
    }
  }

  TEST_CASE("unknown sentence") {
    auto s = formality_split();
    SimulatedCritic c(1.0, s.eval, 0);
    CHECK_THROWS_AS(c.critique(ExplanationKind::Informality, "never seen", Explanation{}, {}), UsageError);
  }

  TEST_CASE("report json") {
    std::vector<SweepRow> rows = {{1, 2, 30, 15}};
    auto j = to_json(rows);
    CHECK(j[0]["k"] == 1);
    CHECK(j[0]["correctness"] == 0.5);
  }
}
