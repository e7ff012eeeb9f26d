#include "moran/word.hpp"

#include "moran/errors.hpp"

namespace moran {

Word Word::parent() const {
  Word w = *this;
  if (!w.digits.empty()) w.digits.pop_back();
  return w;
}

Word Word::prefix(int len) const {
  Word w;
  w.digits.assign(digits.begin(), digits.begin() + len);
  return w;
}

Word Word::child(int32_t i) const {
  Word w = *this;
  w.digits.push_back(i);
  return w;
}

bool Word::is_prefix_of(const Word& w) const {
  if (depth() > w.depth()) return false;
  for (int i = 0; i < depth(); ++i)
    if (digits[i] != w.digits[i]) return false;
  return true;
}

int Word::common_prefix(const Word& w) const {
  int n = std::min(depth(), w.depth());
  int i = 0;
  while (i < n && digits[i] == w.digits[i]) ++i;
  return i;
}

std::string Word::key() const {
  std::string s;
  for (int i = 0; i < depth(); ++i) {
    if (i) s += '.';
    s += std::to_string(digits[i]);
  }
  return s;
}

Word Word::from_key(const std::string& key) {
  Word w;
  if (key.empty()) return w;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    std::size_t dot = key.find('.', pos);
    std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) throw ConfigError("malformed word key '" + key + "'");
    int32_t v = 0;
    for (char c : part) {
      if (c < '0' || c > '9') throw ConfigError("malformed word key '" + key + "'");
      v = v * 10 + (c - '0');
      if (v > 1'000'000) throw ConfigError("word digit out of range in '" + key + "'");
    }
    if (v < 1) throw ConfigError("word digits are 1-based in '" + key + "'");
    w.digits.push_back(v);
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return w;
}

}  // namespace moran
