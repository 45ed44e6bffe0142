#include "ao/annotate.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace ao {
namespace {

bool is_ascii_alnum(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u < 0x80 && std::isalnum(u) != 0;
}

bool all_ascii_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return u < 0x80 && std::isdigit(u) != 0;
  });
}

// Insert a space between adjacent pieces only when both sides are ASCII
// alphanumeric; CJK pieces rejoin without separators.
std::string join_pieces(const std::vector<std::string>& pieces, std::size_t begin,
                        std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty() && is_ascii_alnum(out.back()) && is_ascii_alnum(pieces[i].front())) {
      out += ' ';
    }
    out += pieces[i];
  }
  return out;
}

}  // namespace

const char* pos_name(Pos p) {
  switch (p) {
    case Pos::noun: return "noun";
    case Pos::verb: return "verb";
    case Pos::adj: return "adj";
    case Pos::num: return "num";
    case Pos::punct: return "punct";
    case Pos::other: return "other";
  }
  return "other";
}

const char* ner_name(Ner n) {
  switch (n) {
    case Ner::person: return "person";
    case Ner::org: return "org";
    case Ner::location: return "location";
    case Ner::work: return "work";
    case Ner::other: return "other";
    case Ner::none: return "none";
  }
  return "none";
}

Pos pos_from_name(const std::string& s) {
  if (s == "noun") return Pos::noun;
  if (s == "verb") return Pos::verb;
  if (s == "adj") return Pos::adj;
  if (s == "num") return Pos::num;
  if (s == "punct") return Pos::punct;
  if (s == "other") return Pos::other;
  throw DataError("unknown pos tag: " + s);
}

Ner ner_from_name(const std::string& s) {
  if (s == "person") return Ner::person;
  if (s == "org") return Ner::org;
  if (s == "location") return Ner::location;
  if (s == "work") return Ner::work;
  if (s == "other") return Ner::other;
  if (s == "none") return Ner::none;
  throw DataError("unknown ner tag: " + s);
}

std::vector<std::string> AnnotatedText::token_texts() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

std::vector<std::string> primitive_tokens(const std::string& normalized) {
  std::vector<std::string> out;
  std::vector<std::string> chars = utf8_chars(normalized);
  std::string run;
  auto flush = [&]() {
    if (!run.empty()) {
      out.push_back(run);
      run.clear();
    }
  };
  for (const auto& ch : chars) {
    if (ch.size() == 1 && is_ascii_space(ch[0])) {
      flush();
    } else if (is_punct_char(ch)) {
      flush();
      out.push_back(ch);
    } else if (ch.size() == 1) {
      run += ch;
    } else {
      // Multi-byte character: its own primitive so lexicon matching can
      // segment unspaced scripts.
      flush();
      out.push_back(ch);
    }
  }
  flush();
  return out;
}

std::string smart_join(const std::vector<std::string>& pieces) {
  return join_pieces(pieces, 0, pieces.size());
}

std::string Lexicon::make_key(const std::string& phrase) {
  std::vector<std::string> prims = primitive_tokens(normalize_text(phrase));
  return join(prims, " ");
}

void Lexicon::add(const LexiconEntry& entry) {
  std::string key = make_key(entry.phrase);
  if (key.empty()) throw DataError("lexicon entry with empty phrase");
  std::size_t window = primitive_tokens(normalize_text(entry.phrase)).size();
  max_window_ = std::max(max_window_, window);
  entries_[key] = entry;
}

const LexiconEntry* Lexicon::lookup_key(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void Stoplist::add(const std::string& word) {
  std::string norm = normalize_text(word);
  if (!norm.empty()) words_.insert(norm);
}

Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path);
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw DataError(path, line_no, "expected phrase<TAB>pos<TAB>ner");
    }
    LexiconEntry e;
    e.phrase = line.substr(0, t1);
    try {
      e.pos = pos_from_name(line.substr(t1 + 1, t2 - t1 - 1));
      e.ner = ner_from_name(line.substr(t2 + 1));
    } catch (const DataError& err) {
      throw DataError(path, line_no, err.what());
    }
    if (normalize_text(e.phrase).empty()) {
      throw DataError(path, line_no, "empty phrase");
    }
    lex.add(e);
  }
  return lex;
}

Stoplist load_stoplist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stoplist file: " + path);
  Stoplist stop;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    stop.add(line);
  }
  return stop;
}

AnnotatedText LexiconAnnotator::annotate(const std::string& text) const {
  std::string norm = normalize_text(text);
  if (norm.empty()) throw DataError("cannot annotate empty text");
  std::vector<std::string> prims = primitive_tokens(norm);

  AnnotatedText at;
  std::size_t i = 0;
  while (i < prims.size()) {
    // Longest lexicon match over primitive windows starting at i.
    std::size_t best_len = 0;
    const LexiconEntry* best = nullptr;
    std::size_t cap = std::min(lexicon_.max_window(), prims.size() - i);
    for (std::size_t w = cap; w >= 1; --w) {
      std::string key;
      for (std::size_t k = i; k < i + w; ++k) {
        if (!key.empty()) key += ' ';
        key += prims[k];
      }
      if (const LexiconEntry* e = lexicon_.lookup_key(key)) {
        best_len = w;
        best = e;
        break;
      }
      if (w == 1) break;
    }

    Token tok;
    if (best != nullptr) {
      tok.text = join_pieces(prims, i, i + best_len);
      tok.pos = best->pos;
      tok.ner = best->ner;
      i += best_len;
    } else {
      tok.text = prims[i];
      if (is_punct_char(prims[i])) {
        tok.pos = Pos::punct;
      } else if (all_ascii_digits(prims[i])) {
        tok.pos = Pos::num;
      } else {
        tok.pos = Pos::noun;
      }
      tok.ner = Ner::none;
      i += 1;
    }
    tok.is_stop = stoplist_.contains(tok.text);
    tok.char_len = utf8_length(tok.text);
    at.tokens.push_back(std::move(tok));
  }

  // Stand-in dependency structure: attach each token to the nearest following
  // noun. The final noun collects modifiers the way a phrase head would.
  for (std::size_t d = 0; d < at.tokens.size(); ++d) {
    for (std::size_t h = d + 1; h < at.tokens.size(); ++h) {
      if (at.tokens[h].pos == Pos::noun) {
        at.deps.push_back(DepArc{h, d, "mod"});
        break;
      }
    }
  }

  validate_annotation(at);
  return at;
}

void validate_annotation(const AnnotatedText& at) {
  std::vector<bool> has_head(at.tokens.size(), false);
  for (const auto& t : at.tokens) {
    if (t.text.empty()) throw InvariantError("annotation token with empty text");
    if (t.char_len != utf8_length(t.text)) {
      throw InvariantError("annotation char_len mismatch for token: " + t.text);
    }
  }
  for (const auto& arc : at.deps) {
    if (arc.head >= at.tokens.size() || arc.dependent >= at.tokens.size()) {
      throw InvariantError("dependency arc index out of range");
    }
    if (arc.head == arc.dependent) {
      throw InvariantError("dependency self-loop at token " + std::to_string(arc.head));
    }
    if (has_head[arc.dependent]) {
      throw InvariantError("token " + std::to_string(arc.dependent) +
                           " has more than one dependency head");
    }
    has_head[arc.dependent] = true;
  }
}

std::set<std::string> nonstop_token_set(const AnnotatedText& at) {
  std::set<std::string> out;
  for (const auto& t : at.tokens) {
    if (!t.is_stop && t.pos != Pos::punct) out.insert(t.text);
  }
  return out;
}

}  // namespace ao
