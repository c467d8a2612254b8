#include "iclef/digest.hpp"
#include "iclef/error.hpp"
#include "iclef/jsonl.hpp"
#include "iclef/parallel.hpp"
#include "iclef/record.hpp"
#include "iclef/rng.hpp"
#include "iclef/text.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <atomic>
#include <fstream>
#include <set>

using namespace iclef;

TEST_SUITE("text") {
  TEST_CASE("normalization") {
    CHECK(to_lower("AbC") == "abc");
    CHECK(trim("  a b \n") == "a b");
    CHECK(collapse_whitespace(" a \t b\n\nc ") == "a b c");
    CHECK(straighten_quotes("“x” ‘y’") == "\"x\" 'y'");
    CHECK(normalize_surface("  “Hi”\tthere ") == "\"Hi\" there");
    CHECK(contains_ci("Hello World", "o w"));
    CHECK_FALSE(contains_ci("Hello", "xyz"));
    CHECK(istarts_with("Formal Attributes: x", "formal"));
  }

  TEST_CASE("split and join") {
    CHECK(split("a,b,,c", ',') == std::vector<std::string>{"a", "b", "", "c"});
    CHECK(join({"a", "b"}, ", ") == "a, b");
  }

  TEST_CASE("sentences") {
    auto s = split_sentences("One. Two!  Three? four");
    CHECK(s == std::vector<std::string>{"One.", "Two!", "Three?", "four"});
    CHECK(split_sentences("3.5 is a number.") == std::vector<std::string>{"3.5 is a number."});
  }

  TEST_CASE("timestamp shape") {
    auto ts = utc_timestamp();
    CHECK(ts.size() == 20);
    CHECK(ts.back() == 'Z');
    CHECK(ts[10] == 'T');
  }
}

TEST_SUITE("digest") {
  TEST_CASE("known vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_u64("abc") == 0xba7816bf8f01cfeaULL);
  }
}

TEST_SUITE("rng") {
  TEST_CASE("seeded streams repeat") {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  }

  TEST_CASE("sample without replacement") {
    Rng r(1);
    auto idx = sample_indices(50, 20, r);
    CHECK(idx.size() == 20);
    CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 20);
  }

  TEST_CASE("stratified sample balances equal strata") {
    std::map<int, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < 40; ++i) strata[static_cast<int>(i % 4)].push_back(i);
    Rng r(3);
    auto picked = stratified_sample(strata, 12, r);
    std::map<int, int> per;
    for (auto i : picked) per[static_cast<int>(i % 4)]++;
    for (int k = 0; k < 4; ++k) CHECK(per[k] == 3);
  }

  TEST_CASE("uniform_real range") {
    Rng r(9);
    for (int i = 0; i < 1000; ++i) {
      double v = r.uniform_real();
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_SUITE("jsonl") {
  TEST_CASE("round trip and torn tail") {
    test::TempDir dir;
    auto p = dir / "rows.jsonl";
    write_jsonl(p, {ordered_json{{"a", 1}}, ordered_json{{"a", 2}}});
    CHECK(read_jsonl(p).size() == 2);
    {
      std::ofstream f(p, std::ios::app);
      f << "{\"a\": 3";
    }
    CHECK_THROWS(read_jsonl(p));
    CHECK(read_jsonl(p, true).size() == 2);
    truncate_torn_tail(p);
    CHECK(read_file(p) == "{\"a\":1}\n{\"a\":2}\n");
  }

  TEST_CASE("atomic write replaces content") {
    test::TempDir dir;
    auto p = dir / "f.txt";
    write_file_atomic(p, "one");
    write_file_atomic(p, "two");
    CHECK(read_file(p) == "two");
  }

  TEST_CASE("append log from many threads") {
    test::TempDir dir;
    auto p = dir / "log.jsonl";
    {
      AppendLog log(p, false);
      parallel_for(200, 8, [&](std::size_t i) { log.append(ordered_json{{"i", i}}.dump()); });
    }
    auto rows = read_jsonl(p);
    CHECK(rows.size() == 200);
    std::set<int> seen;
    for (auto& r : rows) seen.insert(r["i"].get<int>());
    CHECK(seen.size() == 200);
  }

  TEST_CASE("missing file is IoError") {
    CHECK_THROWS_AS(read_file("/nonexistent/iclef/file"), IoError);
  }
}

TEST_SUITE("parallel") {
  TEST_CASE("every index once and exceptions propagate") {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                      if (i == 5) throw IoError("boom");
                    }),
                    IoError);
  }
}

TEST_SUITE("records") {
  StyleRecord sample() {
    StyleRecord r;
    r.id = "formality-000001";
    r.task = Task::Formality;
    r.source = "I would throw them out asap !";
    r.source_expl = parse_explanation(R"(textese ("asap"), colloquialism ("throw out"))", ExplanationKind::Informality);
    r.paraphrase = "I would dispose of them promptly.";
    r.paraphrase_expl =
        parse_explanation(R"(lexical sophistication ("dispose", "promptly"))", ExplanationKind::Formality);
    return r;
  }

  TEST_CASE("json round trip") {
    auto r = sample();
    r.critic_note = "fixed";
    r.provenance = Provenance::IclefFixed;
    auto j = to_json(r);
    CHECK(j["source_expl"] == R"(textese ("asap"), colloquialism ("throw out"))");
    CHECK(record_from_json(json::parse(j.dump())) == r);
  }

  TEST_CASE("invariants") {
    auto r = sample();
    CHECK_NOTHROW(r.validate());
    r.provenance = Provenance::IclefFixed;
    CHECK_THROWS_AS(r.validate(), SchemaViolation);
    auto b = sample();
    b.task = Task::BiasNeutralization;
    b.source_expl = Explanation::no_bias();
    CHECK_THROWS_AS(b.validate(), SchemaViolation);
    b.paraphrase_expl.reset();
    CHECK_NOTHROW(b.validate());
    auto f = sample();
    f.source_expl = Explanation::no_bias();
    CHECK_THROWS_AS(f.validate(), SchemaViolation);
  }

  TEST_CASE("missing field and bad explanation") {
    auto j = json::parse(to_json(sample()).dump());
    j.erase("paraphrase");
    CHECK_THROWS_AS(record_from_json(j), SchemaViolation);
    auto k = json::parse(to_json(sample()).dump());
    k["source_expl"] = "textese (\"asap";
    CHECK_THROWS_AS(record_from_json(k), ParseError);
  }

  TEST_CASE("names") {
    CHECK(task_name(parse_task("bias")) == "bias");
    CHECK(provenance_name(parse_provenance("iclef_fixed")) == "iclef_fixed");
    CHECK_THROWS(parse_task("nope"));
  }
}
