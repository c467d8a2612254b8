#include "iclef/error.hpp"
#include "iclef/explanation.hpp"
#include "iclef/jsonl.hpp"
#include "iclef/sections.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace iclef;

namespace {

ExplanationKind kind_from(const std::string& s) {
  if (s == "formality") return ExplanationKind::Formality;
  if (s == "bias") return ExplanationKind::Bias;
  return ExplanationKind::Informality;
}

}  // namespace

TEST_SUITE("explanation grammar") {
  TEST_CASE("two attributes with one evidence each") {
    auto e = parse_explanation(R"(slang ("screwed"), contraction ("aren't"))", ExplanationKind::Informality);
    REQUIRE(e.attributes.size() == 2);
    CHECK(e.attributes[0].name == "slang");
    CHECK(e.attributes[0].evidences == std::vector<std::string>{"screwed"});
    CHECK(e.attributes[1].name == "contraction");
    CHECK(e.attributes[1].evidences == std::vector<std::string>{"aren't"});
    CHECK_FALSE(e.attributes[0].reasoning);
  }

  TEST_CASE("first attribute carries two evidences") {
    auto e = parse_explanation(R"(textese ("ur", "u"), capitalization ("BIG PROBLEM"), colloquialism ("BIG PROBLEM"))",
                               ExplanationKind::Informality);
    REQUIRE(e.attributes.size() == 3);
    CHECK(e.attributes[0].evidences == std::vector<std::string>{"ur", "u"});
    CHECK(e.attributes[1].evidences == std::vector<std::string>{"BIG PROBLEM"});
  }

  TEST_CASE("sentinel is NoBias whatever kind is requested") {
    for (auto k : {ExplanationKind::Bias, ExplanationKind::Informality}) {
      auto e = parse_explanation("This sentence does not contain bias.", k);
      CHECK(e.kind == ExplanationKind::NoBias);
      CHECK(e.attributes.empty());
    }
    CHECK(parse_explanation("this sentence does not contain bias", ExplanationKind::Bias).kind ==
          ExplanationKind::NoBias);
    CHECK(render_explanation(Explanation::no_bias()) == "This sentence does not contain bias.");
  }

  TEST_CASE("evidence followed by reasoning") {
    auto e = parse_explanation(R"(Framing ("beautiful" suggests a subjective evaluation of the flowers))",
                               ExplanationKind::Bias);
    REQUIRE(e.attributes.size() == 1);
    CHECK(e.attributes[0].name == "framing");
    CHECK(e.attributes[0].evidences == std::vector<std::string>{"beautiful"});
    CHECK(e.attributes[0].reasoning == "suggests a subjective evaluation of the flowers");
    CHECK(render_explanation(e) == R"(Framing ("beautiful" suggests a subjective evaluation of the flowers))");
  }

  TEST_CASE("reasoning without leading evidence keeps inner quotes") {
    auto e = parse_explanation(R"(Framing (using "some" suggests that not all cacti produce beautiful flowers))",
                               ExplanationKind::Bias);
    REQUIRE(e.attributes.size() == 1);
    CHECK(e.attributes[0].evidences.empty());
    CHECK(e.attributes[0].reasoning == R"(using "some" suggests that not all cacti produce beautiful flowers)");
  }

  TEST_CASE("names may contain quoted text and bare names are allowed") {
    auto e = parse_explanation(R"(use of verb "to be" ("is feasible", "prevail"), simple sentence structure.)",
                               ExplanationKind::Formality);
    REQUIRE(e.attributes.size() == 2);
    CHECK(e.attributes[0].name == R"(use of verb "to be")");
    CHECK(e.attributes[1].name == "simple sentence structure");
    CHECK(e.attributes[1].evidences.empty());
    CHECK(render_explanation(e) == R"(use of verb "to be" ("is feasible", "prevail"), simple sentence structure)");
  }

  TEST_CASE("surface normalization") {
    auto e = parse_explanation("  Slang   (“screwed”) ,contraction (\"aren’t\").  ", ExplanationKind::Informality);
    CHECK(render_explanation(e) == R"(slang ("screwed"), contraction ("aren't"))");
  }

  TEST_CASE("malformed input raises ParseError") {
    CHECK_THROWS_AS(parse_explanation("", ExplanationKind::Informality), ParseError);
    CHECK_THROWS_AS(parse_explanation("   ", ExplanationKind::Informality), ParseError);
    CHECK_THROWS_AS(parse_explanation(R"(slang ("screwed))", ExplanationKind::Informality), ParseError);
    CHECK_THROWS_AS(parse_explanation(R"(slang ("screwed")", ExplanationKind::Informality), ParseError);
    CHECK_THROWS_AS(parse_explanation(R"(slang ("screwed")), x)", ExplanationKind::Informality), ParseError);
    CHECK_THROWS_AS(parse_explanation(R"(, slang ("screwed"))", ExplanationKind::Informality), ParseError);
    CHECK_THROWS_AS(parse_explanation(R"(slang (""))", ExplanationKind::Informality), ParseError);
    CHECK_THROWS_AS(parse_explanation(R"(slang ("a"),)", ExplanationKind::Informality), ParseError);
    CHECK_THROWS_AS(parse_explanation(R"(Sarcasm ("x"))", ExplanationKind::Bias), ParseError);
  }

  TEST_CASE("parse error reports a position") {
    try {
      parse_explanation(R"(slang ("screwed), contraction)", ExplanationKind::Informality);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.position() == 7);
      CHECK(e.reason() == "unbalanced quote");
    }
  }

  TEST_CASE("fixture corpus round trips") {
    auto rows = read_jsonl(test::fixture("explanations.jsonl"));
    REQUIRE(rows.size() >= 50);
    for (const auto& row : rows) {
      auto text = row["text"].get<std::string>();
      auto parsed = parse_explanation(text, kind_from(row["kind"].get<std::string>()));
      CAPTURE(text);
      CHECK(render_explanation(parsed) == normalize_explanation_text(text));
      CHECK(parse_explanation(render_explanation(parsed), parsed.kind) == parsed);
    }
  }
}

TEST_SUITE("explanation helpers") {
  TEST_CASE("trustworthiness") {
    auto e = parse_explanation(R"(slang ("screwed"), contraction ("aren't"))", ExplanationKind::Informality);
    CHECK(trustworthiness(e, "hopefully you aren't too old or you are screwed.") == 1.0);
    auto asap = parse_explanation(R"(textese ("asap"))", ExplanationKind::Informality);
    CHECK(trustworthiness(asap, "I would dispose of them promptly.") == 0.0);
    auto half = parse_explanation(R"(abbreviation ("info", "banana"))", ExplanationKind::Informality);
    CHECK(trustworthiness(half, "more info, we are both in our very late twenties.") == 0.5);
    CHECK(trustworthiness(Explanation::no_bias(), "anything") == 1.0);
    auto curly = parse_explanation(R"(contraction ("aren't"))", ExplanationKind::Informality);
    CHECK(trustworthiness(curly, "you AREN’T   old") == 1.0);
  }

  TEST_CASE("attribute_set") {
    auto e = parse_explanation(R"(colloquialism ("throw out"), textese ("asap"), colloquialism ("gonna"))",
                               ExplanationKind::Informality);
    CHECK(attribute_set(e) == std::set<std::string>{"colloquialism", "textese"});
    CHECK(attribute_set(Explanation::no_bias()).empty());
  }

  TEST_CASE("bias labels") {
    CHECK(primary_bias_label(Explanation::no_bias()) == "No Bias");
    auto e = parse_explanation(R"(Epistemological ("claimed"), Framing ("x"))", ExplanationKind::Bias);
    CHECK(primary_bias_label(e) == "Epistemological");
    CHECK(display_name("framing", ExplanationKind::Bias) == "Framing");
    CHECK(display_name("framing", ExplanationKind::Informality) == "framing");
  }
}

TEST_SUITE("sections") {
  TEST_CASE("headers with list markers and continuation lines") {
    std::vector<SectionSpec> specs = {{"a", {"Informal Attributes"}}, {"p", {"Formal Paraphrase", "Formal"}}};
    auto s = parse_sections("preamble\n- Informal Attributes: x (\"y\")\n* formal paraphrase: One\ntwo\n", specs);
    CHECK(s["a"] == "x (\"y\")");
    CHECK(s["p"] == "One two");
  }

  TEST_CASE("longest header wins and repeats keep the first") {
    std::vector<SectionSpec> specs = {{"f", {"Formal"}}, {"fa", {"Formal Attributes"}}};
    auto s = parse_sections("Formal Attributes: a\nFormal: b\nFormal: c", specs);
    CHECK(s["fa"] == "a");
    CHECK(s["f"] == "b");
  }

  TEST_CASE("render") {
    CHECK(render_sections({{"A", "1"}, {"B", "2"}}) == "A: 1\nB: 2");
  }
}
