#include "meqa/baseline.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "meqa/error.hpp"
#include "meqa/metrics.hpp"

namespace meqa::clf {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::set<Section> as_set(const std::vector<Section>& v) { return {v.begin(), v.end()}; }

}  // namespace

std::vector<std::pair<int, double>> BaselineModel::features(const std::vector<std::string>& tokens) const {
  std::map<int, double> counts;
  for (const auto& t : tokens) {
    auto it = vocab_.find(t);
    if (it != vocab_.end()) counts[it->second] += 1.0;
  }
  return {counts.begin(), counts.end()};
}

double BaselineModel::positive_score(std::size_t k, const std::vector<std::string>& tokens) const {
  const auto f = features(tokens);
  if (kind_ == BaselineKind::LogisticRegression) {
    double z = bias_[k];
    for (const auto& [j, x] : f) z += weights_[k][static_cast<std::size_t>(j)] * x;
    return z;
  }
  double s = log_prior_[k][0];
  for (const auto& [j, x] : f) s += x * log_likelihood_[k][0][static_cast<std::size_t>(j)];
  return s;
}

double BaselineModel::negative_score(std::size_t k, const std::vector<std::string>& tokens) const {
  if (kind_ == BaselineKind::LogisticRegression) return 0.0;
  const auto f = features(tokens);
  double s = log_prior_[k][1];
  for (const auto& [j, x] : f) s += x * log_likelihood_[k][1][static_cast<std::size_t>(j)];
  return s;
}

Probabilities BaselineModel::predict_proba(const std::vector<std::string>& tokens) const {
  Probabilities p{};
  for (std::size_t k = 0; k < kSectionCount; ++k) {
    const double pos = positive_score(k, tokens);
    const double neg = negative_score(k, tokens);
    if (std::isinf(pos) && pos < 0) {
      p[k] = 0.0;
    } else if (std::isinf(neg) && neg < 0) {
      p[k] = 1.0;
    } else {
      p[k] = sigmoid(pos - neg);
    }
  }
  return p;
}

SectionPrediction BaselineModel::predict(const std::vector<std::string>& tokens, double threshold) const {
  return decide_sections(predict_proba(tokens), threshold);
}

BaselineModel train_baseline(const std::vector<LabeledQuestion>& corpus, BaselineKind kind,
                             const BaselineOptions& options) {
  if (corpus.empty()) throw EmptyCorpus();
  BaselineModel model;
  model.kind_ = kind;
  std::set<std::string> words;
  for (const auto& q : corpus) words.insert(q.tokens.begin(), q.tokens.end());
  int next = 0;
  for (const auto& w : words) model.vocab_.emplace(w, next++);
  const std::size_t v = words.size();

  std::vector<std::vector<std::pair<int, double>>> x;
  std::vector<Labels> y;
  x.reserve(corpus.size());
  for (const auto& q : corpus) {
    x.push_back(model.features(q.tokens));
    y.push_back(labels_of(q.sections));
  }
  const double n = static_cast<double>(corpus.size());

  if (kind == BaselineKind::NaiveBayes) {
    for (std::size_t k = 0; k < kSectionCount; ++k) {
      std::array<std::vector<double>, 2> counts = {std::vector<double>(v, 0.0), std::vector<double>(v, 0.0)};
      std::array<double, 2> docs{}, totals{};
      for (std::size_t i = 0; i < x.size(); ++i) {
        const int c = y[i][k] > 0.5 ? 0 : 1;
        docs[c] += 1.0;
        for (const auto& [j, cnt] : x[i]) {
          counts[c][static_cast<std::size_t>(j)] += cnt;
          totals[c] += cnt;
        }
      }
      for (int c = 0; c < 2; ++c) {
        model.log_prior_[k][c] = docs[c] > 0 ? std::log(docs[c] / n) : -std::numeric_limits<double>::infinity();
        auto& ll = model.log_likelihood_[k][c];
        ll.resize(v);
        for (std::size_t j = 0; j < v; ++j) {
          ll[j] = std::log((counts[c][j] + 1.0) / (totals[c] + static_cast<double>(v)));
        }
      }
    }
    return model;
  }

  for (std::size_t k = 0; k < kSectionCount; ++k) {
    auto& w = model.weights_[k];
    w.assign(v, 0.0);
    double b = 0.0;
    double prev_loss = std::numeric_limits<double>::infinity();
    std::vector<double> gw(v);
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
      std::fill(gw.begin(), gw.end(), 0.0);
      double gb = 0.0;
      double loss = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        double z = b;
        for (const auto& [j, cnt] : x[i]) z += w[static_cast<std::size_t>(j)] * cnt;
        const double p = std::clamp(sigmoid(z), kProbClamp, 1.0 - kProbClamp);
        loss += -(y[i][k] * std::log(p) + (1.0 - y[i][k]) * std::log(1.0 - p));
        const double r = sigmoid(z) - y[i][k];
        gb += r;
        for (const auto& [j, cnt] : x[i]) gw[static_cast<std::size_t>(j)] += r * cnt;
      }
      loss /= n;
      if (std::abs(prev_loss - loss) < options.tolerance) break;
      prev_loss = loss;
      b -= options.learning_rate * gb / n;
      for (std::size_t j = 0; j < v; ++j) w[j] -= options.learning_rate * gw[j] / n;
    }
    model.bias_[k] = b;
  }
  return model;
}

std::vector<LearningCurveRow> learning_curve(const std::vector<LabeledQuestion>& train_set,
                                             const std::vector<LabeledQuestion>& test,
                                             const std::vector<std::size_t>& sizes, const TrainConfig& config) {
  std::vector<std::set<Section>> gold;
  for (const auto& q : test) gold.push_back(as_set(q.sections));

  std::vector<LearningCurveRow> rows;
  for (std::size_t size : sizes) {
    const std::size_t n = std::min(size, train_set.size());
    std::vector<LabeledQuestion> subset(train_set.begin(), train_set.begin() + static_cast<std::ptrdiff_t>(n));
    LearningCurveRow row;
    row.train_size = n;

    const auto lstm = train(subset, config).params;
    const auto nb = train_baseline(subset, BaselineKind::NaiveBayes);
    const auto lr = train_baseline(subset, BaselineKind::LogisticRegression);
    std::vector<std::set<Section>> p_lstm, p_nb, p_lr;
    for (const auto& q : test) {
      p_lstm.push_back(as_set(predict_sections(lstm, q.tokens, 0.5, config.max_length).predicted));
      p_nb.push_back(as_set(nb.predict(q.tokens).predicted));
      p_lr.push_back(as_set(lr.predict(q.tokens).predicted));
    }
    row.bilstm_f1 = eval::micro_f1(p_lstm, gold);
    row.naive_bayes_f1 = eval::micro_f1(p_nb, gold);
    row.logistic_f1 = eval::micro_f1(p_lr, gold);
    rows.push_back(row);
  }
  return rows;
}

std::string format_learning_curve(const std::vector<LearningCurveRow>& rows) {
  std::string out = "train_size  bi-LSTM  naive_bayes  logistic_regression\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%10zu  %7.4f  %11.4f  %19.4f\n", r.train_size, r.bilstm_f1, r.naive_bayes_f1,
                  r.logistic_f1);
    out += buf;
  }
  return out;
}

}  // namespace meqa::clf
