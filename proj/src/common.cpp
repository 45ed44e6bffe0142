#include "ao/common.hpp"

#include <cctype>
#include <cmath>
#include <unordered_set>

namespace ao {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct_char(const std::string& utf8_char) {
  if (utf8_char.size() == 1) {
    unsigned char c = static_cast<unsigned char>(utf8_char[0]);
    return std::ispunct(c) != 0;
  }
  // Common CJK punctuation; everything else multi-byte is a word character.
  static const std::unordered_set<std::string> kCjkPunct = {
      "。", "，", "！", "？", "：", "；", "、",
      "“", "”", "‘", "’", "（", "）", "《",
      "》", "〈", "〉", "—", "…", "·"};
  return kCjkPunct.count(utf8_char) > 0;
}

std::string normalize_text(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    if (is_ascii_space(ch)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    unsigned char c = static_cast<unsigned char>(ch);
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
  }
  return out;
}

std::vector<std::string> split_ws(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (is_ascii_space(ch)) {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

std::vector<std::string> utf8_chars(const std::string& text) {
  std::vector<std::string> chars;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if ((c & 0x80) == 0x00) len = 1;
    else if ((c & 0xE0) == 0xC0) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0) len = 4;
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    chars.push_back(text.substr(i, len));
    i += len;
  }
  return chars;
}

std::size_t utf8_length(const std::string& text) { return utf8_chars(text).size(); }

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool is_contiguous_subsequence(const std::vector<std::string>& needle,
                               const std::vector<std::string>& haystack) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t start = 0; start + needle.size() <= haystack.size(); ++start) {
    bool ok = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (haystack[start + k] != needle[k]) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

bool is_proper_token_suffix(const std::vector<std::string>& suffix,
                            const std::vector<std::string>& tokens) {
  if (suffix.empty() || suffix.size() >= tokens.size()) return false;
  std::size_t off = tokens.size() - suffix.size();
  for (std::size_t k = 0; k < suffix.size(); ++k) {
    if (tokens[off + k] != suffix[k]) return false;
  }
  return true;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t Rng::next() {
  // splitmix64 step.
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvariantError("Rng::below requires n > 0");
  return next() % n;
}

double Rng::real() {
  return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = real();
  } while (u1 <= 0.0);
  double u2 = real();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace ao
