#include "meqa/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "meqa/error.hpp"

namespace meqa::eval {

std::set<std::string> EvalRecord::gold_medicines() const {
  std::set<std::string> out;
  for (const auto& g : gold_medicines_sections) out.insert(normalize_name(g.medicine_name));
  return out;
}

std::set<Section> EvalRecord::gold_sections() const {
  std::set<Section> out;
  for (const auto& g : gold_medicines_sections) out.insert(g.section);
  return out;
}

EvalRecord record_from_json(const nlohmann::json& j) {
  EvalRecord r;
  r.question = j.at("question").get<std::string>();
  for (const auto& g : j.value("gold_medicines_sections", nlohmann::json::array())) {
    r.gold_medicines_sections.push_back({g.at("medicine_name").get<std::string>(),
                                         section_from_code(g.at("section").get<int>())});
  }
  r.gold_answer = j.at("gold_answer").get<std::string>();
  r.reference_number = j.value("reference_number", std::string(kExternalReference));
  return r;
}

nlohmann::json record_to_json(const EvalRecord& r) {
  nlohmann::json gold = nlohmann::json::array();
  for (const auto& g : r.gold_medicines_sections) {
    gold.push_back({{"medicine_name", g.medicine_name}, {"section", section_code(g.section)}});
  }
  return {{"question", r.question},
          {"gold_medicines_sections", gold},
          {"gold_answer", r.gold_answer},
          {"reference_number", r.reference_number}};
}

std::vector<EvalRecord> load_eval_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::vector<EvalRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, lineno, e.what());
    } catch (const ValidationError& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  return out;
}

void validate_records(const std::vector<EvalRecord>& records, const CorpusStore& store) {
  for (const auto& r : records) {
    if (text::tokens_of(r.gold_answer).empty()) throw ValidationError("empty gold answer for: " + r.question);
    if (!r.is_external() && !store.get_leaflet(r.reference_number)) {
      throw ValidationError("unknown reference number " + r.reference_number);
    }
  }
}

namespace {

std::set<Section> as_set(const std::vector<Section>& v) { return {v.begin(), v.end()}; }

std::vector<Section> answer_sections(const answer::AnswerBundle& b) {
  std::set<Section> s;
  for (const auto& p : b.main) s.insert(p.section);
  for (const auto& p : b.additional) s.insert(p.section);
  return {s.begin(), s.end()};
}

}  // namespace

EvalReport evaluate(const answer::QaSystem& system, const std::vector<EvalRecord>& records,
                    const EvalOptions& options) {
  if (records.empty()) throw EmptyEvalSet();
  EvalReport report;
  report.gold_sections = options.use_gold_sections;
  F1Counts ner, classifier, sections;
  std::size_t leaflet_total = 0, leaflet_hits = 0;
  double em_sum = 0.0, f1_sum = 0.0;

  for (const auto& r : records) {
    QuestionScore q;
    q.question = r.question;
    const auto gold_sections = r.gold_sections();
    std::optional<std::vector<Section>> forced;
    if (options.use_gold_sections && !gold_sections.empty()) forced.emplace(gold_sections.begin(), gold_sections.end());

    const auto result = system.ask(r.question, forced);
    const auto& tr = result.trace;

    std::set<std::string> predicted_medicines;
    for (const auto& m : tr.entities.medicines) predicted_medicines.insert(m.resolved_id);
    ner.add(predicted_medicines, r.gold_medicines());

    if (tr.prediction) q.predicted_sections = tr.prediction->predicted;
    if (!gold_sections.empty()) {
      classifier.add(as_set(forced ? *forced : q.predicted_sections), gold_sections);
    }

    if (result.answered()) {
      q.answered = true;
      q.predicted_answer = result.bundle().main_text();
      q.answer_sections = answer_sections(result.bundle());
    } else {
      q.refusal = std::string(answer::refusal_reason_name(result.refusal().reason));
      q.predicted_answer = std::string(kNoAnswer);
    }
    if (tr.selected_reference) q.selected_reference = *tr.selected_reference;
    if (!gold_sections.empty()) sections.add(as_set(q.answer_sections), gold_sections);

    if (!r.is_external() && !r.reference_number.empty()) {
      ++leaflet_total;
      if (q.selected_reference == r.reference_number) ++leaflet_hits;
    }

    q.exact_match = exact_match(q.predicted_answer, r.gold_answer);
    q.f1 = token_f1(q.predicted_answer, r.gold_answer);
    em_sum += q.exact_match;
    f1_sum += q.f1;
    report.questions.push_back(std::move(q));
  }

  const auto n = static_cast<double>(records.size());
  report.ner = ner.f1();
  report.classifier = classifier.f1();
  report.leaflet_selection = leaflet_total ? static_cast<double>(leaflet_hits) / static_cast<double>(leaflet_total) : 1.0;
  report.section_extraction = sections.f1();
  report.mean_exact_match = em_sum / n;
  report.mean_f1 = f1_sum / n;
  report.answer_extraction = report.mean_f1;
  return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
  auto codes = [](const std::vector<Section>& v) {
    std::vector<int> out;
    for (auto s : v) out.push_back(section_code(s));
    return out;
  };
  nlohmann::json questions = nlohmann::json::array();
  for (const auto& q : report.questions) {
    questions.push_back({{"question", q.question},
                         {"answered", q.answered},
                         {"refusal", q.refusal},
                         {"predicted_answer", q.predicted_answer},
                         {"selected_reference", q.selected_reference},
                         {"predicted_sections", codes(q.predicted_sections)},
                         {"answer_sections", codes(q.answer_sections)},
                         {"exact_match", q.exact_match},
                         {"f1", q.f1}});
  }
  return {{"modules",
           {{"ner", report.ner},
            {"classifier", report.classifier},
            {"leaflet_selection", report.leaflet_selection},
            {"section_extraction", report.section_extraction},
            {"answer_extraction", report.answer_extraction}}},
          {"mean_exact_match", report.mean_exact_match},
          {"mean_f1", report.mean_f1},
          {"gold_sections", report.gold_sections},
          {"questions", questions}};
}

std::string format_report(const EvalReport& report) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "questions            %zu%s\n"
                "ner                  %.4f\n"
                "classifier           %.4f\n"
                "leaflet_selection    %.4f\n"
                "section_extraction   %.4f\n"
                "answer_extraction    %.4f\n"
                "exact_match          %.4f\n",
                report.questions.size(), report.gold_sections ? " (gold sections)" : "", report.ner,
                report.classifier, report.leaflet_selection, report.section_extraction, report.answer_extraction,
                report.mean_exact_match);
  return buf;
}

std::vector<AnnotationRound> run_annotation_workflow(const std::vector<std::string>& pool, const Annotator& a,
                                                     const Annotator& b,
                                                     const std::function<void(const AnnotationRound&)>& refine_guide,
                                                     const WorkflowOptions& options) {
  std::vector<std::string> remaining = pool;
  std::mt19937_64 rng(options.seed);
  std::shuffle(remaining.begin(), remaining.end(), rng);
  std::vector<AnnotationRound> rounds;
  std::size_t next = 0;
  for (std::size_t it = 1; it <= options.max_iterations && next < remaining.size(); ++it) {
    AnnotationRound round;
    round.iteration = it;
    const std::size_t stop = std::min(remaining.size(), next + options.batch_size);
    round.question_ids.assign(remaining.begin() + static_cast<std::ptrdiff_t>(next),
                              remaining.begin() + static_cast<std::ptrdiff_t>(stop));
    next = stop;
    round.agreement = iaa(a(round.question_ids, it), b(round.question_ids, it));
    round.decision = gate(round.agreement);
    rounds.push_back(round);
    if (round.decision == GateDecision::Proceed) break;
    if (refine_guide) refine_guide(round);
  }
  return rounds;
}

}  // namespace meqa::eval
