#include "cli.hpp"
#include "iclef/annotation.hpp"
#include "iclef/evaluation.hpp"
#include "iclef/jsonl.hpp"
#include "iclef/record.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <sstream>

using namespace iclef;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const std::filesystem::path& path) { return path.string(); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and usage errors") {
    auto help = invoke({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("generate") != std::string::npos);

    auto sub_help = invoke({"split", "--help"});
    CHECK(sub_help.code == 0);
    CHECK(sub_help.out.find("--train") != std::string::npos);

    auto none = invoke({});
    CHECK(none.code == 2);

    auto missing = invoke({"split", "--in", "x.jsonl"});
    CHECK(missing.code == 2);
    auto e = json::parse(missing.err);
    CHECK(e["error"] == "UsageError");

    auto bad_choice = invoke({"export", "--in", "a", "--out", "b", "--direction", "sideways"});
    CHECK(bad_choice.code == 2);
  }

  TEST_CASE("replay refuses endpoint flags") {
    test::TempDir dir;
    auto r = invoke({"generate", "--in", p(test::fixture("formality_corpus.txt")), "--out", p(dir / "g.jsonl"),
                  "--fixture-responses", p(test::fixture("formality_responses.jsonl"))});
    CHECK(r.code == 2);
    CHECK(json::parse(r.err)["error"] == "UsageError");
  }

  TEST_CASE("task errors exit 1") {
    test::TempDir dir;
    auto r = invoke({"stats", "--in", p(dir / "absent.jsonl"), "--out", p(dir / "s")});
    CHECK(r.code == 1);
    CHECK(json::parse(r.err).contains("message"));

    auto big = invoke({"split", "--in", p(test::fixture("formality_50.jsonl")), "--train", "40", "--test", "20",
                    "--train-out", p(dir / "a.jsonl"), "--test-out", p(dir / "b.jsonl")});
    CHECK(big.code == 1);
    CHECK(json::parse(big.err)["error"] == "SpecExceedsCorpus");
  }

  TEST_CASE("dry run writes nothing") {
    test::TempDir dir;
    auto r = invoke({"split", "--in", p(test::fixture("formality_50.jsonl")), "--train", "40", "--test", "10",
                  "--train-out", p(dir / "a.jsonl"), "--test-out", p(dir / "b.jsonl"), "--dry-run"});
    REQUIRE(r.code == 0);
    auto plan = json::parse(r.out);
    CHECK(plan["command"] == "split");
    CHECK(plan["dry_run"] == true);
    CHECK(plan["options"]["train"] == "40");
    CHECK(plan["options"]["seed"] == "0");
    CHECK(plan["would_write"].size() == 2);
    CHECK_FALSE(std::filesystem::exists(dir / "a.jsonl"));
  }

  TEST_CASE("generate, critique, split, export, eval") {
    test::TempDir dir;
    auto gen = invoke({"generate", "--in", p(test::fixture("formality_corpus.txt")), "--out", p(dir / "gen.jsonl"),
                    "--mode", "record", "--cache", p(dir / "cache"), "--fixture-responses",
                    p(test::fixture("formality_responses.jsonl"))});
    REQUIRE(gen.code == 0);
    CHECK(json::parse(gen.out)["emitted"] == 100);
    CHECK(std::filesystem::exists(dir / "gen.jsonl.config.json"));

    auto again = invoke({"generate", "--in", p(test::fixture("formality_corpus.txt")), "--out", p(dir / "gen2.jsonl"),
                      "--cache", p(dir / "cache")});
    REQUIRE(again.code == 0);
    CHECK(read_file(dir / "gen.jsonl") == read_file(dir / "gen2.jsonl"));

    auto crit = invoke({"critique", "--in", p(dir / "gen.jsonl"), "--out", p(dir / "fixed.jsonl"), "--feedback",
                     p(test::fixture("formality_feedback.jsonl")), "--seed", "11", "--mode", "record", "--cache",
                     p(dir / "cache"), "--fixture-responses", p(test::fixture("formality_responses.jsonl"))});
    REQUIRE(crit.code == 0);
    auto summary = json::parse(read_file(dir / "fixed.jsonl.summary.json"));
    CHECK(summary["needs_fix"] == 33);

    auto spl = invoke({"split", "--in", p(dir / "fixed.jsonl"), "--train", "80", "--test", "20"});
    REQUIRE(spl.code == 0);
    CHECK(read_records(dir / "fixed.train.jsonl").size() == 80);
    CHECK(read_records(dir / "fixed.test.jsonl").size() == 20);
    auto snap = json::parse(read_file(dir / "fixed.train.jsonl.config.json"));
    CHECK(snap["command"] == "split");
    CHECK(snap["options"]["test"] == "20");

    auto ex = invoke({"export", "--in", p(dir / "fixed.train.jsonl"), "--out", p(dir / "multi.json"), "--direction",
                   "multi"});
    REQUIRE(ex.code == 0);
    CHECK(json::parse(read_file(dir / "multi.json")).size() == 160);

    std::string outputs;
    for (const auto& r : read_records(dir / "fixed.test.jsonl")) {
      outputs += json{{"id", r.id}, {"output", gold_output(r, Direction::InformalToFormal)}}.dump() + "\n";
    }
    write_file(dir / "outputs.jsonl", outputs);
    auto ev = invoke({"eval", "--outputs", p(dir / "outputs.jsonl"), "--test", p(dir / "fixed.test.jsonl"), "--out",
                   p(dir / "report.json")});
    REQUIRE(ev.code == 0);
    auto report = json::parse(read_file(dir / "report.json"));
    CHECK(report["scored_count"] == 20);
    CHECK(report["metrics"]["output_attrs_bleu"].get<double>() == doctest::Approx(100.0));
    CHECK(read_file(dir / "report.json.csv").rfind("id,status,", 0) == 0);
  }

  TEST_CASE("stats and authorship") {
    test::TempDir dir;
    auto st = invoke({"stats", "--in", p(test::fixture("formality_50.jsonl")), "--out", p(dir / "stats")});
    REQUIRE(st.code == 0);
    CHECK(json::parse(st.out)["records"] == 50);
    CHECK(read_file(dir / "stats.attributes.csv").rfind("attribute,count", 0) == 0);
    CHECK(std::filesystem::exists(dir / "stats.classes.csv"));

    auto au = invoke({"authorship", "--pairs", p(test::fixture("authorship_pairs.jsonl")), "--explainer",
                   p(test::fixture("authorship_explanations.jsonl")), "--out", p(dir / "pairs.csv")});
    REQUIRE(au.code == 0);
    auto summary = json::parse(read_file(dir / "pairs.csv.summary.json"));
    CHECK(summary["auc"] == 1.0);
    CHECK(summary["pairs"] == 12);
  }

  TEST_CASE("sweep with a simulated critic") {
    test::TempDir dir;
    auto r = invoke({"sweep", "--feedback", p(test::fixture("formality_feedback.jsonl")), "--ks", "1,10", "--trials",
                  "20", "--critic", "simulated:1.0", "--out", p(dir / "sweep.json")});
    REQUIRE(r.code == 0);
    auto j = json::parse(read_file(dir / "sweep.json"));
    CHECK(j["eval_instances"] == 15);
    REQUIRE(j["rows"].size() == 2);
    for (const auto& row : j["rows"]) CHECK(row["correctness"].get<double>() == 1.0);

    auto bad = invoke({"sweep", "--feedback", p(test::fixture("formality_feedback.jsonl")), "--critic",
                    "simulated:1.5", "--out", p(dir / "x.json")});
    CHECK(bad.code == 2);
    auto big = invoke({"sweep", "--feedback", p(test::fixture("formality_feedback.jsonl")), "--ks", "36", "--critic",
                    "simulated:0.5", "--out", p(dir / "y.json")});
    CHECK(big.code == 1);
    CHECK(json::parse(big.err)["error"] == "InsufficientFeedback");
  }

  TEST_CASE("enqueue appends tasks") {
    test::TempDir dir;
    auto a = invoke({"enqueue", "--in", p(test::fixture("formality_50.jsonl")), "--store", p(dir / "store"), "--n", "10"});
    REQUIRE(a.code == 0);
    CHECK(json::parse(a.out)["enqueued"] == 10);
    auto b = invoke({"enqueue", "--in", p(test::fixture("formality_50.jsonl")), "--store", p(dir / "store"), "--n", "5",
                  "--kind", "acceptability"});
    REQUIRE(b.code == 0);
    CHECK(json::parse(b.out)["total_tasks"] == 15);
    AnnotationStore store(dir / "store");
    CHECK(store.task_count() == 15);
    auto pref = invoke({"enqueue", "--in", p(test::fixture("formality_50.jsonl")), "--store", p(dir / "store"), "--n",
                        "1", "--kind", "preference"});
    CHECK(pref.code == 1);
    CHECK(json::parse(pref.err)["error"] == "MissingField");
  }

  TEST_CASE("config file supplies defaults") {
    test::TempDir dir;
    write_file(dir / "c.toml", "[split]\ntrain = 30\ntest = 5\n");
    auto r = invoke({"--config", p(dir / "c.toml"), "split", "--in", p(test::fixture("formality_50.jsonl")), "--test",
                  "7", "--train-out", p(dir / "a.jsonl"), "--test-out", p(dir / "b.jsonl")});
    REQUIRE(r.code == 0);
    CHECK(read_records(dir / "a.jsonl").size() == 30);
    CHECK(read_records(dir / "b.jsonl").size() == 7);
  }
}
