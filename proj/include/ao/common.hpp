// Shared error types and small string/text utilities.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ao {

// Error taxonomy mirrored by the CLI exit codes: usage 1, data 2, invariant 3.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class UsageError : public Error {
public:
  explicit UsageError(const std::string& msg) : Error(msg) {}
};

class DataError : public Error {
public:
  explicit DataError(const std::string& msg) : Error(msg) {}
  DataError(const std::string& file, std::size_t line, const std::string& msg)
      : Error(file + ":" + std::to_string(line) + ": " + msg), line_number(line) {}
  std::size_t line_number = 0;
};

class InvariantError : public Error {
public:
  explicit InvariantError(const std::string& msg) : Error(msg) {}
};

// ---------------------------------------------------------------------------
// Text helpers. Normalization is ASCII lowercasing plus whitespace collapse;
// non-ASCII bytes pass through untouched so CJK input survives round trips.

bool is_ascii_space(char c);
bool is_punct_char(const std::string& utf8_char);

// Lowercase ASCII letters, collapse whitespace runs to single spaces, trim.
std::string normalize_text(const std::string& text);

// Split into whitespace-separated pieces (no punctuation handling).
std::vector<std::string> split_ws(const std::string& text);

// Number of UTF-8 code points (falls back to byte count on malformed input).
std::size_t utf8_length(const std::string& text);

// Decode into code-point substrings; malformed bytes become single-byte units.
std::vector<std::string> utf8_chars(const std::string& text);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

// True if `needle` occurs as a contiguous run inside `haystack`.
bool is_contiguous_subsequence(const std::vector<std::string>& needle,
                               const std::vector<std::string>& haystack);

// True if `suffix` is a proper token suffix of `tokens`.
bool is_proper_token_suffix(const std::vector<std::string>& suffix,
                            const std::vector<std::string>& tokens);

// FNV-1a, used where hashes must be stable across platforms and runs.
std::uint64_t fnv1a64(const std::string& text);

// ---------------------------------------------------------------------------
// Portable deterministic randomness. Standard distributions have
// implementation-defined output, so anything that must reproduce byte-for-byte
// across toolchains goes through these.

class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Uniform real in [0, 1) with 53 bits of precision.
  double real();
  // Gaussian via Box-Muller on portable uniforms.
  double gaussian();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  // xorshift-style splitmix64; tiny, seedable, and stable everywhere.
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ao
