#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>

#include "meqa/baseline.hpp"
#include "meqa/config.hpp"
#include "meqa/error.hpp"
#include "meqa/eval.hpp"
#include "meqa/log.hpp"
#include "meqa/service.hpp"
#include "meqa/synthetic.hpp"

using namespace meqa;

namespace {

struct Overrides {
  std::string config;
  std::string leaflets, lexicon, registry, words, model, feedback_log, host;
  int port = -1;
  double threshold = -1.0;
  bool verbose = false;
};

app::AppConfig resolve_config(const Overrides& o) {
  app::AppConfig c = o.config.empty() ? app::AppConfig{} : app::load_config(o.config);
  auto set = [](std::string& dst, const std::string& v) {
    if (!v.empty()) dst = v;
  };
  set(c.leaflets, o.leaflets);
  set(c.lexicon, o.lexicon);
  set(c.registry, o.registry);
  set(c.words, o.words);
  set(c.model, o.model);
  set(c.feedback_log, o.feedback_log);
  set(c.host, o.host);
  if (o.port >= 0) c.port = o.port;
  if (o.threshold >= 0.0) c.threshold = o.threshold;
  return c;
}

std::shared_ptr<const CorpusStore> load_store(const app::AppConfig& c) {
  return std::make_shared<const CorpusStore>(load_corpus(c.leaflets, c.lexicon, c.registry));
}

text::Vocabulary load_vocabulary(const CorpusStore& store, const app::AppConfig& c) {
  std::vector<std::string> extra;
  if (!c.words.empty()) extra = load_word_list(c.words);
  return build_vocabulary(store, extra);
}

std::shared_ptr<const answer::QaSystem> load_system(const app::AppConfig& c) {
  auto store = load_store(c);
  auto vocab = load_vocabulary(*store, c);
  if (!std::filesystem::exists(c.model)) {
    throw Error("model checkpoint " + c.model + " not found; run `meqa train` first");
  }
  answer::AnswerConfig ac;
  ac.threshold = c.threshold;
  ac.extra_floor = c.extra_floor;
  ac.k_extra = c.k_extra;
  return std::make_shared<const answer::QaSystem>(store, std::move(vocab), clf::load_checkpoint(c.model), ac);
}

std::vector<synth::SyntheticQuestion> questions_for(const CorpusStore& store, const std::string& path,
                                                    std::size_t count, std::uint64_t seed) {
  if (!path.empty()) return synth::load_questions(path);
  synth::GeneratorOptions g;
  g.count = count;
  g.seed = seed;
  return synth::generate(synth::fillers_from_store(store), g);
}

void print_passages(const std::vector<answer::Passage>& ps) {
  for (const auto& p : ps) {
    std::printf("  [%s] %s (%s, %.3f)\n", section_key(p.section).c_str(), p.section_heading.c_str(),
                std::string(answer::passage_source_name(p.source)).c_str(), p.relevance);
    std::printf("    %s\n", p.text().c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Question answering over Spanish medicine leaflets"};
  cli.require_subcommand(1);
  Overrides o;
  cli.add_option("-c,--config", o.config, "JSON configuration file");
  cli.add_option("--leaflets", o.leaflets, "leaflet JSONL");
  cli.add_option("--lexicon", o.lexicon, "concept lexicon JSONL");
  cli.add_option("--registry", o.registry, "medicine registry JSONL");
  cli.add_option("--words", o.words, "extra spell-correction words");
  cli.add_option("--model", o.model, "classifier checkpoint");
  cli.add_option("--threshold", o.threshold, "section decision threshold");
  cli.add_flag("-v,--verbose", o.verbose, "info logging");

  auto* ingest = cli.add_subcommand("ingest", "validate the corpus and print a summary");
  std::string ingest_out;
  ingest->add_option("--out", ingest_out, "write the canonical leaflet JSONL here");

  auto* gen = cli.add_subcommand("gen-synthetic", "generate synthetic training questions");
  std::size_t gen_count = 2000;
  std::uint64_t gen_seed = 7;
  std::string gen_out;
  gen->add_option("-n,--count", gen_count, "number of questions");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("-o,--out", gen_out, "output JSONL")->required();

  auto* train = cli.add_subcommand("train", "train the section classifier");
  std::string train_questions;
  clf::TrainConfig tc;
  std::size_t train_count = 2000;
  train->add_option("--questions", train_questions, "synthetic question JSONL (generated when absent)");
  train->add_option("-n,--count", train_count, "questions to generate");
  train->add_option("--epochs", tc.epochs, "epochs");
  train->add_option("--seed", tc.seed, "random seed");

  auto* ask = cli.add_subcommand("ask", "answer one question");
  std::string question;
  bool ask_json = false;
  ask->add_option("question", question, "question text")->required();
  ask->add_flag("--json", ask_json, "print the JSON answer");

  auto* evaluate = cli.add_subcommand("evaluate", "score the pipeline on annotated questions");
  std::string gold_path;
  bool gold_sections = false, eval_json = false;
  evaluate->add_option("gold", gold_path, "evaluation JSONL")->required();
  evaluate->add_flag("--gold-sections", gold_sections, "replace classifier output with the gold sections");
  evaluate->add_flag("--json", eval_json, "print the JSON report");

  auto* curve = cli.add_subcommand("learning-curve", "compare the classifier against the baselines");
  std::string curve_test;
  std::vector<std::size_t> sizes = {1000, 5000, 10000};
  std::size_t test_count = 500;
  curve->add_option("--sizes", sizes, "training set sizes");
  curve->add_option("--test", curve_test, "held-out synthetic JSONL (generated when absent)");
  curve->add_option("--test-count", test_count, "held-out questions to generate");

  auto* serve = cli.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--host", o.host, "bind address");
  serve->add_option("--port", o.port, "port");
  serve->add_option("--feedback-log", o.feedback_log, "feedback JSONL");

  auto* iaa_cmd = cli.add_subcommand("iaa", "agreement between two annotation files");
  std::string ann_a, ann_b;
  iaa_cmd->add_option("a", ann_a, "first annotator JSONL")->required();
  iaa_cmd->add_option("b", ann_b, "second annotator JSONL")->required();

  CLI11_PARSE(cli, argc, argv);
  log::set_level(o.verbose ? log::Level::Info : log::Level::Warn);

  try {
    const auto config = resolve_config(o);

    if (*ingest) {
      auto store = load_store(config);
      std::size_t marketed = 0;
      for (const auto& l : store->leaflets()) marketed += l.marketed;
      std::printf("leaflets   %zu (%zu marketed)\n", store->leaflets().size(), marketed);
      std::printf("concepts   %zu\n", store->lexicon().entries().size());
      std::printf("registry   %zu\n", store->registry().entries().size());
      std::printf("vocabulary %zu\n", load_vocabulary(*store, config).size());
      if (!ingest_out.empty()) write_leaflets(ingest_out, store->leaflets());
      return 0;
    }

    if (*gen) {
      auto store = load_store(config);
      synth::GeneratorOptions g;
      g.count = gen_count;
      g.seed = gen_seed;
      const auto qs = synth::generate(synth::fillers_from_store(*store), g);
      synth::write_questions(gen_out, qs);
      std::printf("wrote %zu questions to %s\n", qs.size(), gen_out.c_str());
      return 0;
    }

    if (*train) {
      auto store = load_store(config);
      const auto vocab = load_vocabulary(*store, config);
      const auto qs = questions_for(*store, train_questions, train_count, tc.seed);
      const auto result = clf::train(synth::to_labeled(qs, &vocab), tc);
      for (std::size_t e = 0; e < result.epoch_losses.size(); ++e) {
        std::printf("epoch %zu  loss %.5f\n", e + 1, result.epoch_losses[e]);
      }
      clf::save_checkpoint(result.params, config.model);
      std::printf("saved %s\n", config.model.c_str());
      return 0;
    }

    if (*ask) {
      const auto system = load_system(config);
      const auto result = system->ask(question);
      if (ask_json) {
        std::cout << app::answer_to_json(result).dump(2) << '\n';
        return 0;
      }
      if (!result.answered()) {
        std::printf("%s: %s\n", std::string(answer::refusal_reason_name(result.refusal().reason)).c_str(),
                    result.refusal().message.c_str());
        return 0;
      }
      const auto& b = result.bundle();
      std::printf("%s (%s)\n", b.display_name.c_str(), b.reference_number.c_str());
      print_passages(b.main);
      if (!b.additional.empty()) {
        std::printf("additional information\n");
        print_passages(b.additional);
      }
      return 0;
    }

    if (*evaluate) {
      const auto system = load_system(config);
      const auto records = eval::load_eval_records(gold_path);
      eval::validate_records(records, system->store());
      eval::EvalOptions eo;
      eo.use_gold_sections = gold_sections;
      const auto report = eval::evaluate(*system, records, eo);
      if (eval_json) {
        std::cout << eval::report_to_json(report).dump(2) << '\n';
      } else {
        std::cout << eval::format_report(report);
      }
      return 0;
    }

    if (*curve) {
      auto store = load_store(config);
      const auto vocab = load_vocabulary(*store, config);
      std::size_t largest = 0;
      for (auto s : sizes) largest = std::max(largest, s);
      const auto train_set = synth::to_labeled(questions_for(*store, {}, largest, 7), &vocab);
      const auto test_set = synth::to_labeled(questions_for(*store, curve_test, test_count, 11), &vocab);
      std::cout << clf::format_learning_curve(clf::learning_curve(train_set, test_set, sizes, tc));
      return 0;
    }

    if (*serve) {
      auto feedback = std::make_shared<app::FeedbackLog>(config.feedback_log);
      auto questions = std::make_shared<app::QuestionStore>(config.question_capacity,
                                                            std::chrono::seconds(config.question_ttl_seconds));
      app::Service service(feedback, questions);
      service.set_system(load_system(config));
      std::printf("serving on http://%s:%d\n", config.host.c_str(), config.port);
      std::fflush(stdout);
      return app::serve_http(service, config.host, config.port) ? 0 : 1;
    }

    if (*iaa_cmd) {
      const double agreement = eval::iaa(eval::load_annotations(ann_a), eval::load_annotations(ann_b));
      std::printf("agreement %.4f  %s\n", agreement,
                  eval::gate(agreement) == eval::GateDecision::Proceed ? "proceed" : "iterate");
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
