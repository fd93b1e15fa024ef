#pragma once

// Bag-of-words one-vs-rest baselines for the section classifier.

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <unordered_map>
#include <vector>

#include "meqa/sectionclf.hpp"

namespace meqa::clf {

enum class BaselineKind { NaiveBayes, LogisticRegression };

struct BaselineOptions {
  double learning_rate = 0.5;
  double tolerance = 1e-6;  // stop when the loss changes less than this
  std::size_t max_iterations = 2000;
};

class BaselineModel {
 public:
  BaselineKind kind() const { return kind_; }
  Probabilities predict_proba(const std::vector<std::string>& tokens) const;
  SectionPrediction predict(const std::vector<std::string>& tokens, double threshold = 0.5) const;

  /// Log-score of label `k` being positive (naive Bayes) or the logit (LR).
  double positive_score(std::size_t k, const std::vector<std::string>& tokens) const;
  double negative_score(std::size_t k, const std::vector<std::string>& tokens) const;
  std::size_t vocabulary_size() const { return vocab_.size(); }

 private:
  friend BaselineModel train_baseline(const std::vector<LabeledQuestion>&, BaselineKind, const BaselineOptions&);

  std::vector<std::pair<int, double>> features(const std::vector<std::string>& tokens) const;

  BaselineKind kind_ = BaselineKind::NaiveBayes;
  std::unordered_map<std::string, int> vocab_;
  // naive Bayes: per label, log prior and log likelihood rows for the
  // positive (index 0) and negative (index 1) class.
  std::array<std::array<double, 2>, kSectionCount> log_prior_{};
  std::array<std::array<std::vector<double>, 2>, kSectionCount> log_likelihood_;
  // logistic regression
  std::array<std::vector<double>, kSectionCount> weights_;
  std::array<double, kSectionCount> bias_{};
};

/// Multinomial naive Bayes with add-one smoothing, or per-label logistic
/// regression fit by full-batch gradient descent. Throws EmptyCorpus.
BaselineModel train_baseline(const std::vector<LabeledQuestion>& corpus, BaselineKind kind,
                             const BaselineOptions& options = {});

struct LearningCurveRow {
  std::size_t train_size = 0;
  double bilstm_f1 = 0.0;
  double naive_bayes_f1 = 0.0;
  double logistic_f1 = 0.0;
};

/// Trains the three models on the first n questions of `train` for every n
/// in `sizes` and scores micro-F1 on `test`.
std::vector<LearningCurveRow> learning_curve(const std::vector<LabeledQuestion>& train,
                                             const std::vector<LabeledQuestion>& test,
                                             const std::vector<std::size_t>& sizes, const TrainConfig& config);

std::string format_learning_curve(const std::vector<LearningCurveRow>& rows);

}  // namespace meqa::clf
