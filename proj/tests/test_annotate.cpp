#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "ao/annotate.hpp"

using namespace ao;

TEST_CASE("primitive tokens split alnum runs, cjk chars, and punctuation") {
  CHECK(primitive_tokens("jackie chan") ==
        std::vector<std::string>{"jackie", "chan"});
  CHECK(primitive_tokens("周杰伦") == std::vector<std::string>{"周", "杰", "伦"});
  CHECK(primitive_tokens("abc123") == std::vector<std::string>{"abc123"});
  CHECK(primitive_tokens("a,b") == std::vector<std::string>{"a", ",", "b"});
  CHECK(primitive_tokens("") == std::vector<std::string>{});
  CHECK(primitive_tokens("东京 tour") == std::vector<std::string>{"东", "京", "tour"});
}

TEST_CASE("lexicon merges longest matching windows") {
  Lexicon lex;
  lex.add({"jackie chan", Pos::noun, Ner::person});
  lex.add({"jackie", Pos::noun, Ner::person});
  Stoplist stops;
  LexiconAnnotator ann(lex, stops);
  AnnotatedText at = ann.annotate("jackie chan movies");
  REQUIRE(at.tokens.size() == 2);
  CHECK(at.tokens[0].text == "jackie chan");
  CHECK(at.tokens[0].ner == Ner::person);
  CHECK(at.tokens[1].text == "movies");
}

TEST_CASE("annotation normalizes before matching") {
  Lexicon lex;
  lex.add({"jackie chan", Pos::noun, Ner::person});
  LexiconAnnotator ann(lex, Stoplist{});
  AnnotatedText at = ann.annotate("  Jackie   CHAN  ");
  REQUIRE(at.tokens.size() == 1);
  CHECK(at.tokens[0].text == "jackie chan");
}

TEST_CASE("char_len counts code points") {
  LexiconAnnotator ann;
  AnnotatedText at = ann.annotate("周杰伦 abc");
  for (const auto& tok : at.tokens) {
    CHECK(tok.char_len == utf8_length(tok.text));
  }
}

TEST_CASE("stopwords are flagged") {
  Stoplist stops;
  stops.add("the");
  LexiconAnnotator ann(Lexicon{}, stops);
  AnnotatedText at = ann.annotate("the movie");
  REQUIRE(at.tokens.size() == 2);
  CHECK(at.tokens[0].is_stop);
  CHECK_FALSE(at.tokens[1].is_stop);
  CHECK(ann.is_stopword("the"));
  CHECK_FALSE(ann.is_stopword("movie"));
}

TEST_CASE("dependency arcs attach modifiers to the next noun") {
  LexiconAnnotator ann;
  AnnotatedText at = ann.annotate("big red car");
  // All three default to noun, so each token attaches to its right neighbor.
  REQUIRE(at.deps.size() == 2);
  CHECK(at.deps[0].dependent == 0);
  CHECK(at.deps[0].head == 1);
  CHECK(at.deps[1].dependent == 1);
  CHECK(at.deps[1].head == 2);
  validate_annotation(at);
}

TEST_CASE("validate_annotation rejects out-of-range arcs and self loops") {
  AnnotatedText at;
  at.tokens.push_back(Token{"a", Pos::noun, Ner::none, false, 1});
  at.deps.push_back(DepArc{5, 0, "mod"});
  CHECK_THROWS_AS(validate_annotation(at), DataError);
  at.deps.clear();
  at.deps.push_back(DepArc{0, 0, "mod"});
  CHECK_THROWS_AS(validate_annotation(at), DataError);
}

TEST_CASE("lexicon and stoplist files round trip") {
  std::string lex_path = "ao_test_lexicon.tsv";
  std::string stop_path = "ao_test_stop.txt";
  {
    std::ofstream out(lex_path);
    out << "# comment line\n";
    out << "jackie chan\tnoun\tperson\n";
    out << "tokyo\tnoun\tlocation\n";
  }
  {
    std::ofstream out(stop_path);
    out << "the\nof\n";
  }
  Lexicon lex = load_lexicon(lex_path);
  CHECK(lex.size() == 2);
  Stoplist stops = load_stoplist(stop_path);
  CHECK(stops.size() == 2);
  CHECK(stops.contains("the"));
  LexiconAnnotator ann(lex, stops);
  AnnotatedText at = ann.annotate("jackie chan in tokyo");
  REQUIRE(at.tokens.size() == 3);
  CHECK(at.tokens[0].ner == Ner::person);
  CHECK(at.tokens[2].ner == Ner::location);
  std::remove(lex_path.c_str());
  std::remove(stop_path.c_str());
}

TEST_CASE("pos and ner names round trip") {
  for (Pos p : {Pos::noun, Pos::verb, Pos::adj, Pos::num, Pos::punct, Pos::other}) {
    CHECK(pos_from_name(pos_name(p)) == p);
  }
  for (Ner n : {Ner::person, Ner::org, Ner::location, Ner::work, Ner::other,
                Ner::none}) {
    CHECK(ner_from_name(ner_name(n)) == n);
  }
  CHECK_THROWS_AS(pos_from_name("bogus"), DataError);
  CHECK_THROWS_AS(ner_from_name("bogus"), DataError);
}

TEST_CASE("smart_join inserts spaces only between ascii alnum neighbors") {
  CHECK(smart_join({"jackie", "chan"}) == "jackie chan");
  CHECK(smart_join({"周", "杰", "伦"}) == "周杰伦");
  CHECK(smart_join({"tokyo", "演", "唱"}) == "tokyo演唱");
  CHECK(smart_join({}) == "");
  CHECK(smart_join({"solo"}) == "solo");
}

TEST_CASE("nonstop_token_set drops stops and punctuation") {
  Stoplist stops;
  stops.add("the");
  LexiconAnnotator ann(Lexicon{}, stops);
  AnnotatedText at = ann.annotate("the movie, remastered");
  std::set<std::string> s = nonstop_token_set(at);
  CHECK(s.count("movie") == 1);
  CHECK(s.count("remastered") == 1);
  CHECK(s.count("the") == 0);
  CHECK(s.count(",") == 0);
}
