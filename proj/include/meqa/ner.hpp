#pragma once

// Dictionary NER over normalized questions: diseases, medicine names, doses
// and pharmaceutical forms.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "meqa/corpus.hpp"
#include "meqa/text.hpp"

namespace meqa::ner {

enum class EntityKind { Disease, Medicine, Dose, PharmForm };

std::string_view entity_kind_name(EntityKind kind);

struct EntityAnnotation {
  std::size_t start = 0;  ///< first token
  std::size_t end = 0;    ///< one past the last token
  EntityKind kind = EntityKind::Disease;
  std::string surface;      ///< space-joined tokens of [start, end)
  std::string resolved_id;  ///< concept id, registry name key, dose key or form

  bool operator==(const EntityAnnotation&) const = default;
};

struct EntitySet {
  std::vector<EntityAnnotation> diseases;
  std::vector<EntityAnnotation> medicines;
  std::vector<EntityAnnotation> doses;
  std::vector<EntityAnnotation> forms;
  /// Possible pharmaceutical forms for each entry of `medicines`.
  std::vector<std::vector<std::string>> medicine_forms;
  /// Disease surfaces plus every synonym of their concepts.
  std::vector<std::string> expanded_concepts;

  bool operator==(const EntitySet&) const = default;
};

/// Normalized n-gram (space-joined) -> resolved id.
using NgramIndex = std::unordered_map<std::string, std::string>;

/// Greedy left-to-right maximum matching: at each position the longest
/// n-gram (n <= max_n) found in the index is taken and the cursor skips it.
std::vector<EntityAnnotation> max_match(const std::vector<std::string>& tokens, const NgramIndex& index,
                                        std::size_t max_n, EntityKind kind = EntityKind::Disease);

/// number+unit, glued "600mg", and "1 mg/5 ml" style doses.
std::vector<EntityAnnotation> parse_doses(const std::vector<std::string>& tokens);

/// Head lookup over a token sequence. Exactly one token is its own head.
class DependencyProvider {
 public:
  virtual ~DependencyProvider() = default;
  virtual std::size_t head_of(const std::vector<std::string>& tokens, std::size_t index) const = 0;
};

/// Lemma of an inflected administration verb (tomo, tomarlo, aplique...).
std::optional<std::string> administration_verb_lemma(std::string_view token);

/// Heuristic heads: the root is the first administration verb (or token 0
/// when there is none); a non-verb token hangs from the nearest preceding
/// administration verb, otherwise from the root; other verbs hang from the root.
class RuleBasedDependencies final : public DependencyProvider {
 public:
  std::size_t head_of(const std::vector<std::string>& tokens, std::size_t index) const override;
};

std::vector<std::string> expand_concepts(const std::vector<EntityAnnotation>& diseases,
                                         const ConceptLexicon& lexicon);

/// Dictionaries derived from a corpus store.
class EntityRecognizer {
 public:
  static constexpr std::size_t kDiseaseMaxN = 5;
  static constexpr std::size_t kMedicineMaxN = 4;
  static constexpr std::size_t kFormMaxN = 4;

  explicit EntityRecognizer(const CorpusStore& store);

  const NgramIndex& disease_index() const { return diseases_; }
  const NgramIndex& medicine_index() const { return medicines_; }
  const NgramIndex& form_index() const { return forms_; }

  /// Explicit form in the question wins; otherwise the administration verb
  /// heading the medicine restricts its registered forms. Always a subset of
  /// the medicine's registered forms.
  std::vector<std::string> infer_pharm_forms(const text::NormalizedQuestion& nq,
                                             const EntityAnnotation& medicine,
                                             const DependencyProvider& dep) const;

  EntitySet extract_entities(const text::NormalizedQuestion& nq, const DependencyProvider& dep) const;

 private:
  const CorpusStore* store_;
  NgramIndex diseases_;
  NgramIndex medicines_;
  NgramIndex forms_;
};

}  // namespace meqa::ner
