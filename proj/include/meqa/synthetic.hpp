#pragma once

// Seeded generator of labeled Spanish questions for training the section
// classifier. Each section has its own cue templates; slots are filled with
// medicine names and disease strings taken from a corpus.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "meqa/corpus.hpp"
#include "meqa/sectionclf.hpp"
#include "meqa/text.hpp"

namespace meqa::synth {

struct SyntheticQuestion {
  std::string text;
  std::vector<Section> sections;  // ascending

  bool operator==(const SyntheticQuestion&) const = default;
};

struct SlotFillers {
  std::vector<std::string> medicines;  // surface spellings, possibly with dose or form
  std::vector<std::string> diseases;
};

/// Medicine names (alone, with dose, with form) and lexicon strings.
SlotFillers fillers_from_store(const CorpusStore& store);

struct GeneratorOptions {
  std::size_t count = 2000;
  std::uint64_t seed = 7;
  double multi_label_rate = 0.3;
  double noise_rate = 0.2;
};

std::vector<SyntheticQuestion> generate(const SlotFillers& fillers, const GeneratorOptions& options = {});

/// Normalizes every question (spell-corrected against `vocabulary` when given).
std::vector<clf::LabeledQuestion> to_labeled(const std::vector<SyntheticQuestion>& questions,
                                             const text::Vocabulary* vocabulary = nullptr);

nlohmann::json to_json(const SyntheticQuestion& q);
SyntheticQuestion synthetic_from_json(const nlohmann::json& j);
void write_questions(const std::string& path, const std::vector<SyntheticQuestion>& questions);
std::vector<SyntheticQuestion> load_questions(const std::string& path);

}  // namespace meqa::synth
