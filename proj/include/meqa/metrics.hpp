#pragma once

// Answer metrics (exact match and bag-of-tokens F1 with punctuation and
// Spanish articles ignored), multi-label micro-F1 and inter-annotator agreement.

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "meqa/corpus.hpp"

namespace meqa::eval {

/// Text normalization followed by removal of el, la, los, las, un, una, unos, unas.
std::vector<std::string> metric_normalize(std::string_view text);

/// 1 when both sides normalize to the same token sequence.
int exact_match(std::string_view prediction, std::string_view gold);

/// Multiset overlap F1 over normalized tokens; 0 without overlap.
double token_f1(std::string_view prediction, std::string_view gold);

struct F1Counts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;

  template <typename T>
  void add(const std::set<T>& predicted, const std::set<T>& gold) {
    for (const auto& p : predicted) (gold.count(p) ? true_positives : false_positives)++;
    for (const auto& g : gold) {
      if (!predicted.count(g)) ++false_negatives;
    }
  }
  /// 1.0 when there is nothing to find and nothing was predicted.
  double f1() const;
};

double micro_f1(const std::vector<std::set<Section>>& predicted, const std::vector<std::set<Section>>& gold);

/// One annotator's judgement of a question.
struct Annotation {
  std::string question_id;
  std::set<std::string> medicines;
  std::set<Section> sections;
  std::string reference_number;

  bool operator==(const Annotation&) const = default;
};

/// Fraction of questions whose whole annotation agrees. Throws
/// MismatchedQuestionSets unless both sides cover the same question ids.
double iaa(const std::vector<Annotation>& a, const std::vector<Annotation>& b);

inline constexpr double kIaaThreshold = 0.95;

enum class GateDecision { Proceed, Iterate };

GateDecision gate(double agreement);

std::vector<Annotation> load_annotations(const std::string& path);

}  // namespace meqa::eval
