#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace moran {

// Index word i1.i2...ik with 1-based digits; the empty word is the root.
struct Word {
  std::vector<int32_t> digits;

  Word() = default;
  explicit Word(std::vector<int32_t> d) : digits(std::move(d)) {}

  int depth() const { return static_cast<int>(digits.size()); }
  bool empty() const { return digits.empty(); }

  Word parent() const;          // drop the last digit
  Word prefix(int len) const;   // first len digits
  Word child(int32_t i) const;  // append a digit

  bool is_prefix_of(const Word& w) const;
  // Length of the longest common prefix.
  int common_prefix(const Word& w) const;

  // Dot-joined key: "" for the root, else "1.2.1".
  std::string key() const;
  static Word from_key(const std::string& key);  // throws ConfigError

  auto operator<=>(const Word&) const = default;
};

}  // namespace moran
