#pragma once

// Module-level and end-to-end evaluation over a gold question set, plus the
// agreement-gated annotation workflow.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "meqa/answer.hpp"
#include "meqa/metrics.hpp"

namespace meqa::eval {

inline constexpr std::string_view kNoAnswer = "No Answer";
inline constexpr std::string_view kExternalReference = "external";

struct GoldMention {
  std::string medicine_name;
  Section section = Section::WhatItIsAndUse;

  bool operator==(const GoldMention&) const = default;
};

struct EvalRecord {
  std::string question;
  std::vector<GoldMention> gold_medicines_sections;
  std::string gold_answer;
  std::string reference_number;

  bool is_no_answer() const { return gold_answer == kNoAnswer; }
  bool is_external() const { return reference_number == kExternalReference; }
  std::set<std::string> gold_medicines() const;  // normalized
  std::set<Section> gold_sections() const;

  bool operator==(const EvalRecord&) const = default;
};

EvalRecord record_from_json(const nlohmann::json& j);
nlohmann::json record_to_json(const EvalRecord& r);
std::vector<EvalRecord> load_eval_records(const std::string& path);

/// Throws ValidationError for an empty gold answer or a reference number
/// that is neither in the corpus nor the external marker.
void validate_records(const std::vector<EvalRecord>& records, const CorpusStore& store);

struct QuestionScore {
  std::string question;
  bool answered = false;
  std::string refusal;
  std::string predicted_answer;
  std::string selected_reference;
  std::vector<Section> predicted_sections;  // classifier
  std::vector<Section> answer_sections;     // sections with a passage
  int exact_match = 0;
  double f1 = 0.0;
};

struct EvalReport {
  double ner = 0.0;
  double classifier = 0.0;
  double leaflet_selection = 0.0;
  double section_extraction = 0.0;
  double answer_extraction = 0.0;
  double mean_exact_match = 0.0;
  double mean_f1 = 0.0;
  bool gold_sections = false;
  std::vector<QuestionScore> questions;
};

struct EvalOptions {
  /// Replace classifier output by the gold sections (upper bound run).
  bool use_gold_sections = false;
};

/// Throws EmptyEvalSet.
EvalReport evaluate(const answer::QaSystem& system, const std::vector<EvalRecord>& records,
                    const EvalOptions& options = {});

nlohmann::json report_to_json(const EvalReport& report);
std::string format_report(const EvalReport& report);

// Annotation workflow: annotate a random batch with two annotators, compare,
// refine the guide and draw a new batch until agreement reaches the gate.

struct AnnotationRound {
  std::size_t iteration = 0;
  std::vector<std::string> question_ids;
  double agreement = 0.0;
  GateDecision decision = GateDecision::Iterate;
};

using Annotator = std::function<std::vector<Annotation>(const std::vector<std::string>& question_ids,
                                                        std::size_t iteration)>;

struct WorkflowOptions {
  std::size_t batch_size = 50;
  std::size_t max_iterations = 10;
  std::uint64_t seed = 7;
};

/// Batches are drawn without replacement from `pool`. `refine_guide` is
/// called after every Iterate decision. Stops at the first Proceed, when the
/// pool runs out, or after max_iterations.
std::vector<AnnotationRound> run_annotation_workflow(const std::vector<std::string>& pool, const Annotator& a,
                                                     const Annotator& b,
                                                     const std::function<void(const AnnotationRound&)>& refine_guide,
                                                     const WorkflowOptions& options = {});

}  // namespace meqa::eval
