#pragma once

// Answer assembly: refusal rules, passage extraction with context, sentence
// de-duplication, relevance ranking and the end-to-end question pipeline.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "meqa/corpus.hpp"
#include "meqa/ner.hpp"
#include "meqa/retrieval.hpp"
#include "meqa/sectionclf.hpp"
#include "meqa/text.hpp"

namespace meqa::answer {

enum class RefusalReason { NoMedicine, NonMarketedMedicine, NoAnswerFound };

std::string_view refusal_reason_name(RefusalReason reason);

struct Refusal {
  RefusalReason reason = RefusalReason::NoAnswerFound;
  std::string message;

  bool operator==(const Refusal&) const = default;
};

enum class HighlightKind { Concept, Context };

struct Highlight {
  std::string text;
  HighlightKind kind = HighlightKind::Concept;

  bool operator==(const Highlight&) const = default;
};

enum class PassageSource { Classifier, Vsm, Lsi };

std::string_view passage_source_name(PassageSource source);

struct Passage {
  Section section = Section::WhatItIsAndUse;
  std::string section_heading;
  /// Block heading or list stem of the sentences.
  std::optional<std::string> context;
  std::vector<std::string> sentences;
  std::vector<Highlight> highlights;
  double relevance = 0.0;
  PassageSource source = PassageSource::Classifier;

  /// Context (unless the first sentence already starts with it) followed by the sentences.
  std::string text() const;

  bool operator==(const Passage&) const = default;
};

struct AnswerBundle {
  std::string reference_number;
  std::string display_name;
  std::vector<Passage> main;
  std::vector<Passage> additional;
  clf::Probabilities section_probabilities{};

  /// Space-joined text of the main passages.
  std::string main_text() const;
};

/// Ok (nullopt) unless no medicine was found or every medicine found is
/// registered as not marketed. Medicines absent from the registry count as
/// marketed.
std::optional<Refusal> check_answerable(const ner::EntitySet& entities, const MedicineRegistry& registry);

/// Whether the normalized token sequence contains `phrase_tokens` contiguously.
bool contains_phrase(const std::vector<std::string>& tokens, const std::vector<std::string>& phrase_tokens);

/// Sentences of each section containing at least one query term, grouped
/// by consecutive blocks sharing a context. Highlights point at the
/// original spelling of every matched term and at the context.
std::vector<Passage> extract_passages(const Leaflet& leaflet, const std::vector<Section>& sections,
                                      const std::vector<std::string>& query_terms,
                                      PassageSource source = PassageSource::Classifier);

/// Drops sentences whose normalized text was already seen, then passages
/// left empty. Order is otherwise preserved.
std::vector<Passage> dedupe(std::vector<Passage> passages);

/// Sets relevance to the cosine between each passage and the query, then
/// orders section groups by their best passage and passages inside a
/// section by relevance. Both sorts are stable.
std::vector<Passage> rank_relevance(std::vector<Passage> passages, const std::vector<std::string>& query_terms,
                                    const retrieval::TfidfIndex& index);

struct AnswerConfig {
  double threshold = 0.5;
  double extra_floor = retrieval::kExtraScoreFloor;
  std::size_t k_extra = retrieval::kExtraSections;
  std::size_t max_length = 64;
};

/// Everything the pipeline decided, kept for evaluation and debugging.
struct PipelineTrace {
  text::NormalizedQuestion question;
  ner::EntitySet entities;
  std::vector<std::string> query_terms;
  bool fallback_query = false;
  std::vector<std::string> candidates;
  std::optional<std::string> selected_reference;
  double leaflet_score = 0.0;
  std::optional<clf::SectionPrediction> prediction;
  std::vector<Section> main_sections;
  std::vector<retrieval::ExtraSection> extra;
};

struct AnswerResult {
  std::variant<AnswerBundle, Refusal> outcome;
  PipelineTrace trace;

  bool answered() const { return std::holds_alternative<AnswerBundle>(outcome); }
  const AnswerBundle& bundle() const { return std::get<AnswerBundle>(outcome); }
  const Refusal& refusal() const { return std::get<Refusal>(outcome); }
};

using SectionPredictor = std::function<clf::SectionPrediction(const text::NormalizedQuestion&)>;

/// Immutable question answering state over one corpus. Safe for
/// concurrent ask() calls.
class QaSystem {
 public:
  QaSystem(std::shared_ptr<const CorpusStore> store, text::Vocabulary vocabulary, clf::ClassifierParams params,
           AnswerConfig config = {}, std::shared_ptr<const ner::DependencyProvider> dependencies = nullptr);
  QaSystem(std::shared_ptr<const CorpusStore> store, text::Vocabulary vocabulary, SectionPredictor predictor,
           AnswerConfig config = {}, std::shared_ptr<const ner::DependencyProvider> dependencies = nullptr);

  /// Full pipeline. `forced_sections` replaces the classifier output.
  /// Throws EmptyQuestion.
  AnswerResult ask(std::string_view question, const std::optional<std::vector<Section>>& forced_sections = std::nullopt) const;

  const CorpusStore& store() const { return *store_; }
  const text::Vocabulary& vocabulary() const { return vocabulary_; }
  const ner::EntityRecognizer& recognizer() const { return recognizer_; }
  const ner::DependencyProvider& dependencies() const { return *dependencies_; }
  const retrieval::LeafletIndex& leaflet_index() const { return leaflet_index_; }
  const retrieval::SectionModel* section_model(const std::string& reference_number) const;
  const AnswerConfig& config() const { return config_; }
  const clf::ClassifierParams* classifier() const { return params_ ? &*params_ : nullptr; }

  /// Query phrases: disease surfaces and their expansions, else the
  /// content words of the question outside entity spans.
  std::pair<std::vector<std::string>, bool> query_terms(const text::NormalizedQuestion& nq,
                                                        const ner::EntitySet& entities) const;

  /// Marketed candidate leaflets of every medicine mention; drops the form
  /// and then the dose filter when nothing matches.
  std::vector<const Leaflet*> candidates(const ner::EntitySet& entities) const;

 private:
  std::shared_ptr<const CorpusStore> store_;
  text::Vocabulary vocabulary_;
  std::optional<clf::ClassifierParams> params_;
  SectionPredictor predictor_;
  AnswerConfig config_;
  std::shared_ptr<const ner::DependencyProvider> dependencies_;
  ner::EntityRecognizer recognizer_;
  retrieval::LeafletIndex leaflet_index_;
  std::map<std::string, retrieval::SectionModel> section_models_;
};

/// Spanish function words ignored when the question names no disease.
bool is_stopword(std::string_view token);

}  // namespace meqa::answer
