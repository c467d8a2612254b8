#include "fake_servers.hpp"
#include "iclef/error.hpp"
#include "iclef/evaluation.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace iclef;

namespace {

json expected() { return json::parse(read_file(test::fixture("expected.json"))); }

StyleRecord bias_record(const std::string& id, const std::string& expl, const std::string& neutral) {
  StyleRecord r;
  r.id = id;
  r.task = Task::BiasNeutralization;
  r.source = "the popular series was loved.";
  r.source_expl = parse_explanation(expl, ExplanationKind::Bias);
  r.paraphrase = neutral;
  return r;
}

}  // namespace

TEST_SUITE("trustworthiness") {
  TEST_CASE("k of n evidences present") {
    for (std::size_t n = 1; n <= 10; ++n) {
      for (std::size_t k = 0; k <= n; ++k) {
        std::string sentence = "words";
        Explanation e;
        Attribute a{"slang", {}, std::nullopt};
        for (std::size_t i = 0; i < n; ++i) {
          std::string ev = (i < k ? "here" : "gone") + std::to_string(i);
          a.evidences.push_back(ev);
          if (i < k) sentence += " " + ev;
        }
        e.attributes.push_back(a);
        CHECK(trustworthiness(e, sentence) == static_cast<double>(k) / static_cast<double>(n));
        TrustworthinessTally t;
        t.add(e, sentence);
        CHECK(t.found == k);
        CHECK(t.total == n);
      }
    }
  }

  TEST_CASE("empty tally is perfect") {
    TrustworthinessTally t;
    CHECK(t.rate() == 1.0);
    t.add(Explanation::no_bias(), "x");
    CHECK(t.total == 0);
  }

  TEST_CASE("shipped fixture aggregate") {
    auto records = read_records(test::fixture("formality_50.jsonl"));
    REQUIRE(records.size() == 50);
    TrustworthinessTally t;
    for (const auto& r : records) {
      t.add(r.source_expl, r.source);
      t.add(*r.paraphrase_expl, r.paraphrase);
    }
    auto e = expected()["trustworthiness_50"];
    CHECK(t.found == e["found"].get<std::size_t>());
    CHECK(t.total == e["total"].get<std::size_t>());
    CHECK(std::abs(dataset_trustworthiness(records) - 335.0 / 351.0) < 1e-9);
  }
}

TEST_SUITE("evaluate_run") {
  TEST_CASE("perfect outputs") {
    auto records = read_records(test::fixture("formality_50.jsonl"));
    std::vector<ModelOutput> outputs;
    for (const auto& r : records) outputs.push_back({r.id, gold_output(r, Direction::InformalToFormal)});
    StubScorer stub;
    auto rep = evaluate_run(outputs, records, Direction::InformalToFormal, stub);
    CHECK(rep.scored_count == 50);
    CHECK(rep.malformed_count == 0);
    CHECK(*rep.input_attrs_bleu == doctest::Approx(100.0));
    CHECK(*rep.output_attrs_bleu == doctest::Approx(100.0));
    CHECK(rep.style_metric == "formality");
    CHECK(rep.trustworthiness == doctest::Approx(100.0 * 335.0 / 351.0));
  }

  TEST_CASE("planted errors in the i2f fixture") {
    auto records = read_records(test::fixture("formality_50.jsonl"));
    auto outputs = read_model_outputs(test::fixture("eval_outputs_i2f.jsonl"));
    StubScorer stub;
    auto rep = evaluate_run(outputs, records, Direction::InformalToFormal, stub);
    auto e = expected()["eval_i2f"];
    CHECK(rep.output_count == e["output_count"].get<std::size_t>());
    CHECK(rep.scored_count == e["scored_count"].get<std::size_t>());
    CHECK(rep.malformed_count == e["malformed_count"].get<std::size_t>());
    CHECK(rep.missing_count == e["missing_count"].get<std::size_t>());
    CHECK(*rep.input_attrs_bleu == doctest::Approx(e["input_attrs_bleu"].get<double>()).epsilon(1e-9));
    CHECK(*rep.output_attrs_bleu == doctest::Approx(e["output_attrs_bleu"].get<double>()).epsilon(1e-9));
    CHECK(*rep.mis == doctest::Approx(e["mis"].get<double>()).epsilon(1e-9));
    CHECK(*rep.style_score == doctest::Approx(e["formality"].get<double>()).epsilon(1e-9));
    CHECK(rep.trustworthiness == doctest::Approx(e["trustworthiness"].get<double>()).epsilon(1e-9));
    CHECK(*rep.average == doctest::Approx(e["average"].get<double>()).epsilon(1e-9));
    CHECK(rep.records.size() == 50);
    auto j = to_json(rep);
    CHECK(j["metrics"].contains("output_attrs_bleu"));
    auto csv = per_record_csv(rep);
    CHECK(csv.rfind("id,status,input_attrs_bleu,output_attrs_bleu,mis,formality,trustworthiness\n", 0) == 0);
    CHECK(csv.find(",missing,") != std::string::npos);
    CHECK(csv.find(",malformed,") != std::string::npos);
  }

  TEST_CASE("scorer outage leaves metrics absent") {
    auto records = read_records(test::fixture("formality_50.jsonl"));
    std::vector<ModelOutput> outputs;
    for (const auto& r : records) outputs.push_back({r.id, gold_output(r, Direction::InformalToFormal)});
    test::FakeScorerServer server(test::FakeScorerServer::Mode::ServerError);
    HttpScorer http(server.base_url());
    auto rep = evaluate_run(outputs, records, Direction::InformalToFormal, http);
    CHECK_FALSE(rep.mis);
    CHECK_FALSE(rep.style_score);
    CHECK(rep.input_attrs_bleu);
    REQUIRE(rep.average);
    CHECK(*rep.average == doctest::Approx(100.0));
    CHECK_FALSE(rep.warnings.empty());
  }

  TEST_CASE("f2i direction") {
    auto records = read_records(test::fixture("formality_50.jsonl"));
    std::vector<ModelOutput> outputs;
    for (const auto& r : records) outputs.push_back({r.id, gold_output(r, Direction::FormalToInformal)});
    StubScorer stub;
    auto rep = evaluate_run(outputs, records, Direction::FormalToInformal, stub);
    CHECK(rep.style_metric == "informality");
    CHECK(*rep.input_attrs_bleu == doctest::Approx(100.0));
    auto i2f = evaluate_run(outputs, records, Direction::InformalToFormal, stub);
    REQUIRE(combined_average(i2f, rep));
  }

  TEST_CASE("bias direction averages three metrics") {
    std::vector<StyleRecord> test_set = {
        bias_record("b1", R"(Framing ("popular" is subjective))", "the series was loved."),
        bias_record("b2", "This sentence does not contain bias.", "the popular series was loved."),
    };
    std::vector<ModelOutput> outputs = {
        {"b1", "Bias Attributes: Framing (\"popular\" is subjective)\nNeutralized Paraphrase: the series was loved."},
        {"b2", "Bias Attributes: Epistemological (\"loved\")\nNeutralized Paraphrase: the series was loved."},
    };
    StubScorer stub;
    auto rep = evaluate_run(outputs, test_set, Direction::BiasToNeutral, stub);
    CHECK(rep.style_metric == "neutrality");
    REQUIRE(rep.bias_f1);
    CHECK(*rep.bias_f1 == doctest::Approx(50.0));
    REQUIRE(rep.average);
    CHECK(*rep.average == doctest::Approx((*rep.input_attrs_bleu + *rep.mis + *rep.style_score) / 3.0));
    CHECK(rep.records[1].predicted_label == "Epistemological");
    CHECK(rep.records[1].gold_label == "No Bias");
  }

  TEST_CASE("model outputs file") {
    test::TempDir dir;
    write_file(dir / "o.jsonl", "{\"id\":\"a\",\"output\":\"x\"}\n");
    auto o = read_model_outputs(dir / "o.jsonl");
    REQUIRE(o.size() == 1);
    CHECK(o[0].output == "x");
    write_file(dir / "blank.jsonl", "{\"id\":\"a\"}\n");
    CHECK(read_model_outputs(dir / "blank.jsonl")[0].output.empty());
    write_file(dir / "bad.jsonl", "{\"output\":\"x\"}\n");
    CHECK_THROWS_AS(read_model_outputs(dir / "bad.jsonl"), SchemaViolation);
  }
}
