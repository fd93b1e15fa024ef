#pragma once

// Question and leaflet text normalization for Spanish: lowercasing,
// punctuation removal, accent folding, tokenization, spell correction and
// sentence segmentation.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace meqa::text {

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

std::string to_lower(std::string_view s);

/// Removes acute accents and diaeresis (á→a, ü→u, also uppercase). ñ is kept.
std::string strip_accents(std::string_view s);

/// A normalized token together with the byte range it came from in the
/// source string, so matches can be mapped back to original text.
struct Token {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Lowercase, strip punctuation, strip accents, split on whitespace.
///
/// Punctuation is replaced by a space except: '/' between two word
/// characters ("mg/5"), '%' right after a digit (optionally one space
/// apart), and '.' or ',' between two digits ("0,5").
std::vector<Token> tokenize(std::string_view s);

/// Token strings only.
std::vector<std::string> tokens_of(std::string_view s);

/// Space-joined normalized tokens.
std::string normalize_text(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep = " ");

/// True when every code point of the token is a letter.
bool is_alphabetic(std::string_view token);
bool has_digit(std::string_view token);

/// Word list with corpus frequencies used by the spell corrector.
class Vocabulary {
 public:
  void add(const std::string& word, std::uint64_t count = 1);
  /// Adds every normalized token of `text`.
  void add_text(std::string_view text);

  bool contains(const std::string& word) const { return counts_.count(word) != 0; }
  std::uint64_t frequency(const std::string& word) const;
  std::size_t size() const { return counts_.size(); }

  /// Words sorted lexicographically.
  std::vector<std::string> words() const;

 private:
  friend std::string spell_correct(const std::string&, const Vocabulary&);

  std::unordered_map<std::string, std::uint64_t> counts_;
  // Words grouped by code-point length for the corrector.
  std::unordered_map<std::size_t, std::vector<std::pair<std::string, std::u32string>>> by_length_;
};

/// Optimal-string-alignment Damerau-Levenshtein distance over code points.
std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b);

/// In-vocabulary tokens and tokens that are not purely alphabetic are
/// returned unchanged. Otherwise the closest vocabulary word within distance
/// 1 (2 for tokens of at least 6 code points) is returned; smaller distance,
/// then higher frequency, then lexicographic order decide.
std::string spell_correct(const std::string& token, const Vocabulary& vocabulary);

struct Correction {
  std::size_t position = 0;
  std::string original;
  std::string corrected;

  bool operator==(const Correction&) const = default;
};

struct NormalizedQuestion {
  std::string raw;
  std::vector<std::string> tokens;
  std::vector<Correction> corrections;
};

/// Full question normalization. Throws EmptyQuestion when nothing survives.
/// `vocabulary` may be null to skip spell correction.
NormalizedQuestion normalize(std::string_view raw, const Vocabulary* vocabulary);

/// Splits leaflet text into sentences on '.', '!' or '?' followed by
/// whitespace and an uppercase letter, digit or opening '¿'/'¡'. A period
/// closing a known abbreviation ("mg.", "Dr.") does not end a sentence.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace meqa::text
