#include "meqa/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "meqa/error.hpp"

namespace meqa::eval {

namespace {

bool is_article(const std::string& t) {
  static const std::set<std::string> articles = {"el", "la", "los", "las", "un", "una", "unos", "unas"};
  return articles.count(t) != 0;
}

}  // namespace

std::vector<std::string> metric_normalize(std::string_view text) {
  auto tokens = text::tokens_of(text);
  std::erase_if(tokens, is_article);
  return tokens;
}

int exact_match(std::string_view prediction, std::string_view gold) {
  return metric_normalize(prediction) == metric_normalize(gold) ? 1 : 0;
}

double token_f1(std::string_view prediction, std::string_view gold) {
  const auto pred = metric_normalize(prediction);
  const auto ref = metric_normalize(gold);
  std::map<std::string, std::size_t> pred_counts, gold_counts;
  for (const auto& t : pred) ++pred_counts[t];
  for (const auto& t : ref) ++gold_counts[t];
  std::size_t overlap = 0;
  for (const auto& [t, n] : pred_counts) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end()) overlap += std::min(n, it->second);
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

double F1Counts::f1() const {
  const auto denom = 2 * true_positives + false_positives + false_negatives;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(true_positives) / static_cast<double>(denom);
}

double micro_f1(const std::vector<std::set<Section>>& predicted, const std::vector<std::set<Section>>& gold) {
  if (predicted.size() != gold.size()) throw DimensionMismatch("micro_f1: prediction and gold sizes differ");
  F1Counts c;
  for (std::size_t i = 0; i < predicted.size(); ++i) c.add(predicted[i], gold[i]);
  return c.f1();
}

double iaa(const std::vector<Annotation>& a, const std::vector<Annotation>& b) {
  std::map<std::string, const Annotation*> by_id;
  for (const auto& x : a) {
    if (!by_id.emplace(x.question_id, &x).second) {
      throw MismatchedQuestionSets("duplicate question id " + x.question_id);
    }
  }
  if (a.size() != b.size()) throw MismatchedQuestionSets("annotation sets differ in size");
  if (a.empty()) throw MismatchedQuestionSets("annotation sets are empty");
  std::size_t agreed = 0;
  std::set<std::string> seen;
  for (const auto& y : b) {
    auto it = by_id.find(y.question_id);
    if (it == by_id.end() || !seen.insert(y.question_id).second) {
      throw MismatchedQuestionSets("question id " + y.question_id + " not shared by both annotators");
    }
    const auto& x = *it->second;
    if (x.medicines == y.medicines && x.sections == y.sections && x.reference_number == y.reference_number) {
      ++agreed;
    }
  }
  return static_cast<double>(agreed) / static_cast<double>(a.size());
}

GateDecision gate(double agreement) { return agreement >= kIaaThreshold ? GateDecision::Proceed : GateDecision::Iterate; }

std::vector<Annotation> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::vector<Annotation> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Annotation a;
      a.question_id = j.at("question_id").get<std::string>();
      for (const auto& m : j.value("medicines", std::vector<std::string>{})) a.medicines.insert(normalize_name(m));
      for (int s : j.value("sections", std::vector<int>{})) a.sections.insert(section_from_code(s));
      a.reference_number = j.value("reference_number", std::string{});
      out.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, lineno, e.what());
    } catch (const ValidationError& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  return out;
}

}  // namespace meqa::eval
