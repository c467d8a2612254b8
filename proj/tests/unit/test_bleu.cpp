#include "iclef/bleu.hpp"
#include "iclef/error.hpp"
#include "iclef/explanation.hpp"
#include "iclef/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace iclef;

TEST_SUITE("bleu") {
  TEST_CASE("hand-computed values") {
    CHECK(corpus_bleu({"a b c d"}, {"a b c e"}) == doctest::Approx(39.51882613244048).epsilon(1e-12));
    CHECK(corpus_bleu({"a b"}, {"a b c d"}) == doctest::Approx(36.787944117144235).epsilon(1e-12));
    CHECK(corpus_bleu({"the cat sat on the mat"}, {"the cat sat on the mat"}) == doctest::Approx(100.0));
    CHECK(corpus_bleu({""}, {"a"}) == 0.0);
  }

  TEST_CASE("clipping") {
    auto s = bleu_stats(whitespace_tokens("the the the"), whitespace_tokens("the cat"));
    CHECK(s.matches[0] == 1);
    CHECK(s.totals[0] == 3);
    CHECK(s.totals[3] == 0);
  }

  TEST_CASE("statistics sum over the corpus") {
    auto a = bleu_stats(whitespace_tokens("x y"), whitespace_tokens("x y"));
    auto b = bleu_stats(whitespace_tokens("p q r"), whitespace_tokens("p r q"));
    auto sum = a;
    sum += b;
    CHECK(sum.candidate_length == 5);
    CHECK(sum.matches[0] == 5);
    CHECK(bleu_score(sum) == doctest::Approx(corpus_bleu({"x y", "p q r"}, {"x y", "p r q"})));
  }

  TEST_CASE("agrees with the oracle on random explanation pairs") {
    const std::vector<std::string> names = {"slang", "textese", "contraction", "colloquialism", "abbreviation"};
    const std::vector<std::string> words = {"u", "r", "asap", "gonna", "aren't", "lol", "info", "kinda"};
    Rng rng(99);
    auto random_expl = [&] {
      Explanation e;
      std::size_t n = 1 + rng.uniform_index(4);
      for (std::size_t i = 0; i < n; ++i) {
        Attribute a{names[rng.uniform_index(names.size())], {}, std::nullopt};
        std::size_t ev = 1 + rng.uniform_index(2);
        for (std::size_t k = 0; k < ev; ++k) a.evidences.push_back(words[rng.uniform_index(words.size())]);
        e.attributes.push_back(a);
      }
      return render_explanation(e);
    };
    std::vector<std::string> cands, refs;
    for (int i = 0; i < 20; ++i) {
      cands.push_back(random_expl());
      refs.push_back(random_expl());
      CHECK(attrs_bleu({cands.back()}, {refs.back()}) ==
            doctest::Approx(test::oracle_corpus_bleu({cands.back()}, {refs.back()})).epsilon(1e-9));
    }
    CHECK(attrs_bleu(cands, refs) == doctest::Approx(test::oracle_corpus_bleu(cands, refs)).epsilon(1e-9));
    CHECK(attrs_bleu(cands, cands) == doctest::Approx(100.0));
  }

  TEST_CASE("length mismatch") {
    CHECK_THROWS_AS(corpus_bleu({"a"}, {}), LengthMismatch);
    CHECK_THROWS_AS(bias_f1({"a"}, {}), LengthMismatch);
  }
}

TEST_SUITE("bias f1") {
  TEST_CASE("macro average over gold classes") {
    std::vector<std::string> pred = {"Framing", "Framing", "Epistemological", "No Bias"};
    std::vector<std::string> gold = {"Framing", "Epistemological", "Epistemological", "No Bias"};
    CHECK(bias_f1(pred, gold) == doctest::Approx(700.0 / 9.0));
    CHECK(bias_f1(gold, gold) == 100.0);
    CHECK(bias_f1({}, {}) == 0.0);
  }
}
