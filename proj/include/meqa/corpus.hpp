#pragma once

// Leaflet corpus, disease concept lexicon and medicine registry.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "meqa/text.hpp"

namespace meqa {

/// The six canonical leaflet sections, with stable integer codes 1..6.
enum class Section : int {
  WhatItIsAndUse = 1,
  BeforeYouTake = 2,
  HowToTake = 3,
  SideEffects = 4,
  Storage = 5,
  ContentsAndInfo = 6,
};

inline constexpr std::size_t kSectionCount = 6;

inline constexpr std::array<Section, kSectionCount> kAllSections = {
    Section::WhatItIsAndUse, Section::BeforeYouTake, Section::HowToTake,
    Section::SideEffects,    Section::Storage,       Section::ContentsAndInfo};

constexpr int section_code(Section s) { return static_cast<int>(s); }
constexpr std::size_t section_index(Section s) { return static_cast<std::size_t>(s) - 1; }
constexpr Section section_at(std::size_t index) { return kAllSections[index]; }

/// Throws ValidationError outside 1..6.
Section section_from_code(int code);
/// "s1".."s6"
std::string section_key(Section s);
/// Canonical Spanish heading, e.g. "Qué es y para qué se utiliza".
std::string_view section_title(Section s);

enum class BlockKind { Paragraph, ListItem };

struct Block {
  std::optional<std::string> heading;
  BlockKind kind = BlockKind::Paragraph;
  /// Introductory sentence of the enumerated list this item belongs to.
  std::optional<std::string> list_stem;
  std::vector<std::string> sentences;

  bool operator==(const Block&) const = default;
};

struct Leaflet {
  std::string reference_number;
  std::string medicine_name;
  std::vector<std::string> active_substances;
  std::string dose;
  std::vector<std::string> pharmaceutical_forms;
  bool marketed = true;
  std::array<std::vector<Block>, kSectionCount> sections;

  const std::vector<Block>& section(Section s) const { return sections[section_index(s)]; }

  /// "cinitaprida 1 mg/5 ml solución oral": substances, dose, first form.
  std::string display_name() const;

  bool operator==(const Leaflet&) const = default;
};

struct ConceptEntry {
  std::string concept_id;
  std::string preferred_name;
  std::vector<std::string> synonyms;

  bool operator==(const ConceptEntry&) const = default;
};

/// Disease dictionary: concepts linking synonymous strings.
class ConceptLexicon {
 public:
  ConceptLexicon() = default;
  /// Throws ValidationError on duplicate ids or synonyms empty after normalization.
  explicit ConceptLexicon(std::vector<ConceptEntry> entries);

  const std::vector<ConceptEntry>& entries() const { return entries_; }
  const ConceptEntry* find(const std::string& concept_id) const;

  /// Normalized synonym (preferred name included) -> concept ids, file order.
  const std::unordered_map<std::string, std::vector<std::string>>& synonym_index() const {
    return synonym_index_;
  }

 private:
  std::vector<ConceptEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::string>> synonym_index_;
};

struct RegistryEntry {
  std::string medicine_name;
  std::string dose;
  std::vector<std::string> pharmaceutical_forms;
  std::string reference_number;
  bool marketed = true;

  bool operator==(const RegistryEntry&) const = default;
};

/// Authorized-medicine registry with administration-verb compatibility.
class MedicineRegistry {
 public:
  MedicineRegistry() = default;
  MedicineRegistry(std::vector<RegistryEntry> entries,
                   std::map<std::string, std::set<std::string>> verb_form_compatibility);

  const std::vector<RegistryEntry>& entries() const { return entries_; }
  /// Keys are normalized verb lemmas, values normalized form strings.
  const std::map<std::string, std::set<std::string>>& verb_form_compatibility() const {
    return verb_forms_;
  }

  /// Entries whose normalized name equals `normalized_name`.
  std::vector<const RegistryEntry*> lookup(const std::string& normalized_name) const;
  /// Union of normalized forms over all entries of the medicine, sorted.
  std::vector<std::string> registered_forms(const std::string& normalized_name) const;
  bool is_marketed(const std::string& normalized_name) const;
  /// Normalized medicine names.
  std::vector<std::string> names() const;

 private:
  std::vector<RegistryEntry> entries_;
  std::map<std::string, std::set<std::string>> verb_forms_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_name_;
};

/// Medicine names and forms are compared after text normalization.
std::string normalize_name(std::string_view name);
/// "600 mg", "600mg" and "600 MG" share one key.
std::string dose_key(std::string_view dose);

struct SentenceRef {
  const std::string* sentence;
  const Block* block;
};

/// Flattened sentence stream of one section in document order.
std::vector<SentenceRef> section_text(const Leaflet& leaflet, Section section);

/// Immutable, validated in-memory corpus.
class CorpusStore {
 public:
  CorpusStore(std::vector<Leaflet> leaflets, ConceptLexicon lexicon, MedicineRegistry registry);

  const std::vector<Leaflet>& leaflets() const { return leaflets_; }
  const ConceptLexicon& lexicon() const { return lexicon_; }
  const MedicineRegistry& registry() const { return registry_; }

  /// Exact lookup; nullptr when absent.
  const Leaflet* get_leaflet(const std::string& reference_number) const;

  /// Leaflets sharing the medicine name, optionally narrowed by dose and by
  /// intersecting pharmaceutical forms. Never wider than the name match.
  std::vector<const Leaflet*> candidate_leaflets(
      const std::string& normalized_name, const std::optional<std::string>& dose = std::nullopt,
      const std::optional<std::vector<std::string>>& forms = std::nullopt) const;

  /// Normalized names of leaflets and registry entries.
  std::vector<std::string> medicine_names() const;

 private:
  std::vector<Leaflet> leaflets_;
  ConceptLexicon lexicon_;
  MedicineRegistry registry_;
  std::unordered_map<std::string, std::size_t> by_ref_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_name_;
};

// JSON Lines schemas.
Leaflet leaflet_from_json(const nlohmann::json& j);
nlohmann::json leaflet_to_json(const Leaflet& leaflet);
ConceptEntry concept_from_json(const nlohmann::json& j);
nlohmann::json concept_to_json(const ConceptEntry& entry);

std::vector<Leaflet> load_leaflets(const std::string& path);
ConceptLexicon load_lexicon(const std::string& path);
MedicineRegistry load_registry(const std::string& path);

/// Loads and validates all three files.
CorpusStore load_corpus(const std::string& leaflets_path, const std::string& lexicon_path,
                        const std::string& registry_path);

void write_leaflets(const std::string& path, const std::vector<Leaflet>& leaflets);

/// Spell-correction vocabulary: leaflet text, lexicon synonyms, medicine
/// names and forms, plus optional extra words.
text::Vocabulary build_vocabulary(const CorpusStore& store,
                                  const std::vector<std::string>& extra_words = {});

/// One word per line; blank lines and '#' comments skipped.
std::vector<std::string> load_word_list(const std::string& path);

}  // namespace meqa
