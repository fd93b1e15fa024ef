#include "meqa/text.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <tuple>

#include "meqa/error.hpp"

namespace meqa::text {

namespace {

struct CodePoint {
  char32_t value;
  std::size_t begin;
  std::size_t end;
};

std::vector<CodePoint> decode_with_offsets(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = c0;
    if (c0 >= 0xF0 && c0 < 0xF8) {
      len = 4;
      cp = c0 & 0x07;
    } else if (c0 >= 0xE0) {
      len = 3;
      cp = c0 & 0x0F;
    } else if (c0 >= 0xC0) {
      len = 2;
      cp = c0 & 0x1F;
    }
    bool ok = i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto ck = static_cast<unsigned char>(s[i + k]);
      if ((ck & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (ck & 0x3F);
      }
    }
    if (!ok || (c0 >= 0x80 && c0 < 0xC0) || c0 >= 0xF8) {
      // Invalid byte: pass through as U+FFFD.
      out.push_back({0xFFFD, i, i + 1});
      ++i;
      continue;
    }
    out.push_back({cp, i, i + len});
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

char32_t lower_cp(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  return c;
}

char32_t fold_accent(char32_t c) {
  switch (c) {
    case 0xE1: case 0xE4: return U'a';
    case 0xE9: case 0xEB: return U'e';
    case 0xED: case 0xEF: return U'i';
    case 0xF3: case 0xF6: return U'o';
    case 0xFA: case 0xFC: return U'u';
    case 0xC1: case 0xC4: return U'A';
    case 0xC9: case 0xCB: return U'E';
    case 0xCD: case 0xCF: return U'I';
    case 0xD3: case 0xD6: return U'O';
    case 0xDA: case 0xDC: return U'U';
    default: return c;
  }
}

bool is_digit_cp(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_letter_cp(char32_t c) {
  if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) return true;
  if (c >= 0xC0 && c <= 0xFF && c != 0xD7 && c != 0xF7) return true;
  // Latin Extended and beyond, excluding general punctuation and symbols.
  if (c >= 0x100 && c < 0x2000) return true;
  return false;
}

bool is_word_cp(char32_t c) { return is_digit_cp(c) || is_letter_cp(c); }

bool is_space_cp(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == 0xA0;
}

bool is_upper_start(char32_t c) {
  if (c >= U'A' && c <= U'Z') return true;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return true;
  return is_digit_cp(c) || c == 0xBF || c == 0xA1;  // ¿ ¡
}

// Lowercased abbreviations (without the final period) that never end a sentence.
constexpr std::array<std::string_view, 15> kAbbreviations = {
    "mg", "ml", "mcg", "dr", "dra", "sr", "sra", "srta", "ej", "aprox", "etc", "ud", "uds", "nº", "vs"};

}  // namespace

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  for (const auto& cp : decode_with_offsets(s)) out.push_back(cp.value);
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) append_utf8(out, c);
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const auto& cp : decode_with_offsets(s)) append_utf8(out, lower_cp(cp.value));
  return out;
}

std::string strip_accents(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const auto& cp : decode_with_offsets(s)) append_utf8(out, fold_accent(cp.value));
  return out;
}

std::vector<Token> tokenize(std::string_view s) {
  auto cps = decode_with_offsets(s);
  for (auto& cp : cps) cp.value = lower_cp(cp.value);

  auto at = [&](std::ptrdiff_t i) -> char32_t {
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(cps.size())) return U' ';
    return cps[static_cast<std::size_t>(i)].value;
  };

  std::vector<Token> tokens;
  Token current;
  bool open = false;
  auto flush = [&] {
    if (open) tokens.push_back(std::move(current));
    current = Token{};
    open = false;
  };

  for (std::size_t idx = 0; idx < cps.size(); ++idx) {
    const auto i = static_cast<std::ptrdiff_t>(idx);
    const char32_t c = cps[idx].value;
    bool keep = is_word_cp(c);
    if (!keep) {
      if (c == U'/') {
        keep = is_word_cp(at(i - 1)) && is_word_cp(at(i + 1));
      } else if (c == U'%') {
        keep = is_digit_cp(at(i - 1)) || (at(i - 1) == U' ' && is_digit_cp(at(i - 2)));
      } else if (c == U'.' || c == U',') {
        keep = is_digit_cp(at(i - 1)) && is_digit_cp(at(i + 1));
      }
    }
    if (!keep) {
      flush();
      continue;
    }
    if (!open) {
      current.begin = cps[idx].begin;
      open = true;
    }
    append_utf8(current.text, fold_accent(c));
    current.end = cps[idx].end;
  }
  flush();
  return tokens;
}

std::vector<std::string> tokens_of(std::string_view s) {
  std::vector<std::string> out;
  for (auto& t : tokenize(s)) out.push_back(std::move(t.text));
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string normalize_text(std::string_view s) { return join(tokens_of(s)); }

bool is_alphabetic(std::string_view token) {
  if (token.empty()) return false;
  for (const auto& cp : decode_with_offsets(token)) {
    if (!is_letter_cp(cp.value)) return false;
  }
  return true;
}

bool has_digit(std::string_view token) {
  return std::any_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void Vocabulary::add(const std::string& word, std::uint64_t count) {
  if (word.empty()) return;
  auto [it, inserted] = counts_.try_emplace(word, 0);
  it->second += count;
  if (inserted) {
    auto wide = decode_utf8(word);
    by_length_[wide.size()].emplace_back(word, std::move(wide));
  }
}

void Vocabulary::add_text(std::string_view text) {
  for (const auto& tok : tokens_of(text)) add(tok);
}

std::uint64_t Vocabulary::frequency(const std::string& word) const {
  auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::string> Vocabulary::words() const {
  std::vector<std::string> out;
  out.reserve(counts_.size());
  for (const auto& [w, _] : counts_) out.push_back(w);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
      }
    }
  }
  return d[n][m];
}

std::string spell_correct(const std::string& token, const Vocabulary& vocabulary) {
  if (vocabulary.contains(token) || !is_alphabetic(token)) return token;

  const auto wide = decode_utf8(token);
  const std::size_t bound = wide.size() >= 6 ? 2 : 1;

  const std::string* best = nullptr;
  std::size_t best_dist = std::numeric_limits<std::size_t>::max();
  std::uint64_t best_freq = 0;
  const std::size_t lo = wide.size() > bound ? wide.size() - bound : 0;
  for (std::size_t len = lo; len <= wide.size() + bound; ++len) {
    auto bucket = vocabulary.by_length_.find(len);
    if (bucket == vocabulary.by_length_.end()) continue;
    for (const auto& [word, word_wide] : bucket->second) {
      const std::size_t dist = damerau_levenshtein(wide, word_wide);
      if (dist > bound) continue;
      const std::uint64_t freq = vocabulary.frequency(word);
      const bool better = best == nullptr || dist < best_dist ||
                          (dist == best_dist && freq > best_freq) ||
                          (dist == best_dist && freq == best_freq && word < *best);
      if (better) {
        best = &word;
        best_dist = dist;
        best_freq = freq;
      }
    }
  }
  return best ? *best : token;
}

NormalizedQuestion normalize(std::string_view raw, const Vocabulary* vocabulary) {
  NormalizedQuestion nq;
  nq.raw = std::string(raw);
  nq.tokens = tokens_of(raw);
  if (nq.tokens.empty()) throw EmptyQuestion();
  if (vocabulary != nullptr) {
    for (std::size_t i = 0; i < nq.tokens.size(); ++i) {
      auto fixed = spell_correct(nq.tokens[i], *vocabulary);
      if (fixed != nq.tokens[i]) {
        nq.corrections.push_back({i, nq.tokens[i], fixed});
        nq.tokens[i] = std::move(fixed);
      }
    }
  }
  return nq;
}

std::vector<std::string> split_sentences(std::string_view text) {
  const auto cps = decode_with_offsets(text);
  std::vector<std::string> out;
  std::size_t start = 0;  // code point index

  auto emit = [&](std::size_t from, std::size_t to) {
    // [from, to) code point range, trimmed
    while (from < to && is_space_cp(cps[from].value)) ++from;
    while (to > from && is_space_cp(cps[to - 1].value)) --to;
    if (from < to) {
      out.emplace_back(text.substr(cps[from].begin, cps[to - 1].end - cps[from].begin));
    }
  };

  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i].value;
    if (c != U'.' && c != U'!' && c != U'?') continue;
    std::size_t j = i + 1;
    // closing quotes/parentheses stay with the sentence
    while (j < cps.size() && (cps[j].value == U')' || cps[j].value == U'"' || cps[j].value == 0xBB)) ++j;
    if (j >= cps.size() || !is_space_cp(cps[j].value)) continue;
    std::size_t k = j;
    while (k < cps.size() && is_space_cp(cps[k].value)) ++k;
    if (k >= cps.size() || !is_upper_start(cps[k].value)) continue;
    if (c == U'.') {
      // word right before the period
      std::size_t w = i;
      while (w > start && is_word_cp(cps[w - 1].value)) --w;
      std::string word;
      for (std::size_t p = w; p < i; ++p) append_utf8(word, lower_cp(cps[p].value));
      if (std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end()) {
        continue;
      }
    }
    emit(start, j);
    start = k;
    i = k - 1;
  }
  emit(start, cps.size());
  return out;
}

}  // namespace meqa::text
