#include <doctest.h>

#include "ao/common.hpp"

using namespace ao;

TEST_CASE("normalize_text lowercases ascii and collapses whitespace") {
  CHECK(normalize_text("  Hello   World ") == "hello world");
  CHECK(normalize_text("A\tB\nC") == "a b c");
  CHECK(normalize_text("") == "");
  CHECK(normalize_text("   ") == "");
}

TEST_CASE("normalize_text leaves multi-byte sequences untouched") {
  CHECK(normalize_text("周杰伦 演唱会") == "周杰伦 演唱会");
  CHECK(normalize_text("Tokyo 東京") == "tokyo 東京");
}

TEST_CASE("split_ws splits on runs of whitespace") {
  CHECK(split_ws("a b  c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_ws("") == std::vector<std::string>{});
  CHECK(split_ws("  x  ") == std::vector<std::string>{"x"});
}

TEST_CASE("utf8_chars decodes mixed input") {
  auto chars = utf8_chars("a東b");
  REQUIRE(chars.size() == 3);
  CHECK(chars[0] == "a");
  CHECK(chars[1] == "東");
  CHECK(chars[2] == "b");
  CHECK(utf8_length("周杰伦") == 3);
  CHECK(utf8_length("abc") == 3);
  CHECK(utf8_length("") == 0);
}

TEST_CASE("join concatenates with separator") {
  CHECK(join({"a", "b"}, " ") == "a b");
  CHECK(join({"a"}, "-") == "a");
  CHECK(join({}, " ") == "");
}

TEST_CASE("is_contiguous_subsequence finds runs") {
  std::vector<std::string> hay{"a", "b", "c", "d"};
  CHECK(is_contiguous_subsequence({"b", "c"}, hay));
  CHECK(is_contiguous_subsequence({"a"}, hay));
  CHECK(is_contiguous_subsequence({"a", "b", "c", "d"}, hay));
  CHECK_FALSE(is_contiguous_subsequence({"b", "d"}, hay));
  CHECK_FALSE(is_contiguous_subsequence({"e"}, hay));
  CHECK_FALSE(is_contiguous_subsequence({"a", "b", "c", "d", "e"}, hay));
  CHECK_FALSE(is_contiguous_subsequence({}, hay));
}

TEST_CASE("is_proper_token_suffix requires strictly shorter tail match") {
  CHECK(is_proper_token_suffix({"animated", "film"},
                               {"japanese", "animated", "film"}));
  CHECK_FALSE(is_proper_token_suffix({"animated", "film"}, {"animated", "film"}));
  CHECK_FALSE(is_proper_token_suffix({"japanese", "animated", "film"},
                                     {"animated", "film"}));
  CHECK_FALSE(is_proper_token_suffix({"animated"}, {"animated", "films"}));
}

TEST_CASE("fnv1a64 is stable across calls") {
  CHECK(fnv1a64("abc") == fnv1a64("abc"));
  CHECK(fnv1a64("abc") != fnv1a64("abd"));
  // Frozen 64-bit FNV-1a of "a": offset basis xor 0x61, times the prime.
  CHECK(fnv1a64("a") == 0x44bd8ad473cd9906ULL);
}

TEST_CASE("punctuation classifier covers ascii and cjk marks") {
  CHECK(is_punct_char(","));
  CHECK(is_punct_char("."));
  CHECK(is_punct_char("，"));
  CHECK_FALSE(is_punct_char("a"));
  CHECK_FALSE(is_punct_char("東"));
}

TEST_CASE("rng is deterministic per seed") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) {
    auto va = a.next();
    CHECK(va == b.next());
  }
  bool all_equal = true;
  Rng a2(42);
  for (int i = 0; i < 10; ++i) {
    if (a2.next() != c.next()) all_equal = false;
  }
  CHECK_FALSE(all_equal);
}

TEST_CASE("rng below stays in range and real in [0,1)") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.below(13) < 13);
    double r = rng.real();
    CHECK(r >= 0.0);
    CHECK(r < 1.0);
  }
}

TEST_CASE("rng shuffle permutes deterministically") {
  std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> w = v;
  Rng a(5), b(5);
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);
  std::sort(v.begin(), v.end());
  CHECK(v == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
}

TEST_CASE("error taxonomy preserves messages") {
  CHECK_THROWS_WITH_AS(throw DataError("bad"), "bad", DataError);
  DataError with_line("f.jsonl", 3, "oops");
  CHECK(std::string(with_line.what()) == "f.jsonl:3: oops");
  CHECK(with_line.line_number == 3);
  CHECK_THROWS_AS(throw UsageError("u"), Error);
  CHECK_THROWS_AS(throw InvariantError("i"), Error);
}
