// Pluggable text annotation: tokens with POS/NER/stopword/length features plus
// dependency arcs. The default annotator is lexicon-driven and deterministic;
// real parsers plug in behind the same interface.
#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ao/common.hpp"

namespace ao {

// Closed tag sets so downstream embedding tables have known sizes.
enum class Pos { noun, verb, adj, num, punct, other };
enum class Ner { person, org, location, work, other, none };

const char* pos_name(Pos p);
const char* ner_name(Ner n);
Pos pos_from_name(const std::string& s);
Ner ner_from_name(const std::string& s);

struct Token {
  std::string text;
  Pos pos = Pos::noun;
  Ner ner = Ner::none;
  bool is_stop = false;
  std::size_t char_len = 0;  // UTF-8 code points in text
};

struct DepArc {
  std::size_t head = 0;
  std::size_t dependent = 0;
  std::string label;
};

struct AnnotatedText {
  std::vector<Token> tokens;
  std::vector<DepArc> deps;

  std::vector<std::string> token_texts() const;
};

struct LexiconEntry {
  std::string phrase;
  Pos pos = Pos::noun;
  Ner ner = Ner::none;
};

// Phrase lexicon keyed for longest-match lookup over primitive token windows.
class Lexicon {
public:
  void add(const LexiconEntry& entry);
  const LexiconEntry* lookup_key(const std::string& key) const;
  std::size_t max_window() const { return max_window_; }
  std::size_t size() const { return entries_.size(); }

  // Normalized primitive-token key for a phrase ("jay chou", CJK chars split).
  static std::string make_key(const std::string& phrase);

private:
  std::map<std::string, LexiconEntry> entries_;
  std::size_t max_window_ = 0;
};

class Stoplist {
public:
  void add(const std::string& word);
  bool contains(const std::string& word) const { return words_.count(word) > 0; }
  std::size_t size() const { return words_.size(); }

private:
  std::set<std::string> words_;
};

// One entry per line: phrase<TAB>pos<TAB>ner. Blank lines and #-comments skipped.
Lexicon load_lexicon(const std::string& path);
// One word per line.
Stoplist load_stoplist(const std::string& path);

class Annotator {
public:
  virtual ~Annotator() = default;
  virtual AnnotatedText annotate(const std::string& text) const = 0;
  virtual bool is_stopword(const std::string& word) const = 0;
};

// Deterministic default: whitespace/punctuation primitive split (single CJK
// chars are primitives), longest-match merge against the lexicon, tag lookup
// with fallbacks (punct/num/noun), stoplist flags, and a stand-in dependency
// rule: every token attaches to the nearest following noun with label "mod".
class LexiconAnnotator : public Annotator {
public:
  LexiconAnnotator() = default;
  LexiconAnnotator(Lexicon lexicon, Stoplist stoplist)
      : lexicon_(std::move(lexicon)), stoplist_(std::move(stoplist)) {}

  AnnotatedText annotate(const std::string& text) const override;
  bool is_stopword(const std::string& word) const override {
    return stoplist_.contains(word);
  }

  const Lexicon& lexicon() const { return lexicon_; }
  const Stoplist& stoplist() const { return stoplist_; }

private:
  Lexicon lexicon_;
  Stoplist stoplist_;
};

// Primitive tokenization shared with Lexicon::make_key: maximal ASCII
// alphanumeric runs, single non-ASCII characters, single punctuation marks.
std::vector<std::string> primitive_tokens(const std::string& normalized);

// Inverse-direction join: a space lands only between two ASCII-alphanumeric
// neighbors, so CJK token runs reassemble without separators.
std::string smart_join(const std::vector<std::string>& pieces);

// Conformance check every Annotator implementation must pass: in-range arcs,
// at most one head per dependent, no self-loops, correct char_len.
void validate_annotation(const AnnotatedText& at);

// Non-stop token texts of an annotated text, as a set.
std::set<std::string> nonstop_token_set(const AnnotatedText& at);

}  // namespace ao
