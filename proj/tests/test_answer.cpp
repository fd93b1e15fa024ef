#include <doctest.h>

#include <random>
#include <set>

#include "meqa/answer.hpp"
#include "meqa/error.hpp"
#include "system_fixture.hpp"

using namespace meqa;
using namespace meqa::answer;

namespace {

ner::EntityAnnotation medicine(const std::string& id) { return {0, 1, ner::EntityKind::Medicine, id, id}; }

// Every sentence, heading and list stem of a leaflet.
std::set<std::string> source_strings(const Leaflet& l) {
  std::set<std::string> out;
  for (auto s : kAllSections) {
    for (const auto& b : l.section(s)) {
      out.insert(b.sentences.begin(), b.sentences.end());
      if (b.heading) out.insert(*b.heading);
      if (b.list_stem) out.insert(*b.list_stem);
    }
  }
  return out;
}

Passage passage(Section s, std::vector<std::string> sentences) {
  Passage p;
  p.section = s;
  p.sentences = std::move(sentences);
  return p;
}

}  // namespace

TEST_CASE("check_answerable") {
  const auto& reg = testing::bundled_store()->registry();
  ner::EntitySet none;
  REQUIRE(check_answerable(none, reg).has_value());
  CHECK(check_answerable(none, reg)->reason == RefusalReason::NoMedicine);

  ner::EntitySet off_market;
  off_market.medicines = {medicine("hemicraneal")};
  REQUIRE(check_answerable(off_market, reg).has_value());
  CHECK(check_answerable(off_market, reg)->reason == RefusalReason::NonMarketedMedicine);

  ner::EntitySet mixed = off_market;
  mixed.medicines.push_back(medicine("ibuprofeno"));
  CHECK_FALSE(check_answerable(mixed, reg).has_value());

  ner::EntitySet unregistered;
  unregistered.medicines = {medicine("medicamento desconocido")};
  CHECK_FALSE(check_answerable(unregistered, reg).has_value());
  CHECK(refusal_reason_name(RefusalReason::NoAnswerFound) == "NoAnswerFound");
}

TEST_CASE("contains_phrase") {
  CHECK(contains_phrase({"a", "b", "c"}, {"b", "c"}));
  CHECK_FALSE(contains_phrase({"a", "b", "c"}, {"c", "b"}));
  CHECK_FALSE(contains_phrase({"a"}, {}));
  CHECK_FALSE(contains_phrase({"a"}, {"a", "b"}));
}

TEST_CASE("extract_passages") {
  const auto* cidine = testing::bundled_store()->get_leaflet("60001");
  auto ps = extract_passages(*cidine, {Section::BeforeYouTake}, {"perforacion gastrointestinal"});
  REQUIRE(ps.size() == 1);
  CHECK(ps[0].section == Section::BeforeYouTake);
  CHECK(ps[0].sentences ==
        std::vector<std::string>{"No tome Cidine 1 mg/5 ml Solución oral si padece hemorragia, obstrucción o perforación gastrointestinal."});
  CHECK(ps[0].context == std::optional<std::string>{"No tome Cidine 1 mg/5 ml Solución oral"});
  CHECK(std::find(ps[0].highlights.begin(), ps[0].highlights.end(),
                  Highlight{"perforación gastrointestinal", HighlightKind::Concept}) != ps[0].highlights.end());
  CHECK(std::find(ps[0].highlights.begin(), ps[0].highlights.end(),
                  Highlight{"No tome Cidine 1 mg/5 ml Solución oral", HighlightKind::Context}) != ps[0].highlights.end());
  // The heading is a prefix of the sentence, so it is not repeated.
  CHECK(ps[0].text() == ps[0].sentences[0]);

  ps = extract_passages(*cidine, {Section::SideEffects}, {"estreñimiento"});
  REQUIRE(ps.size() == 1);
  CHECK(ps[0].context == std::optional<std::string>{"Los efectos adversos frecuentes son:"});
  CHECK(ps[0].text() == "Los efectos adversos frecuentes son: Estreñimiento.");

  CHECK(extract_passages(*cidine, {Section::Storage}, {"perforacion gastrointestinal"}).empty());
  CHECK(extract_passages(*cidine, {Section::BeforeYouTake}, {}).empty());

  // Consecutive list items under one stem form a single passage.
  const auto* hirudoid = testing::bundled_store()->get_leaflet("58289");
  ps = extract_passages(*hirudoid, {Section::WhatItIsAndUse}, {"adultos"});
  REQUIRE(ps.size() == 1);
  CHECK(ps[0].sentences.size() == 2);
  CHECK(ps[0].text().rfind("Este medicamento está indicado para: El alivio", 0) == 0);
}

TEST_CASE("dedupe") {
  const auto a = passage(Section::WhatItIsAndUse, {"Uno.", "Dos."});
  const auto b = passage(Section::BeforeYouTake, {"UNO.", "Tres."});
  const auto c = passage(Section::HowToTake, {"dós."});
  const auto out = dedupe({a, b, c});
  REQUIRE(out.size() == 2);
  CHECK(out[0].sentences == a.sentences);
  CHECK(out[1].sentences == std::vector<std::string>{"Tres."});

  // Idempotent, order preserving, never grows.
  std::mt19937_64 rng(3);
  const std::vector<std::string> pool = {"A.", "a.", "B.", "Á.", "c", "C", "d."};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Passage> ps(rng() % 5);
    std::size_t total = 0;
    for (auto& p : ps) {
      p.section = section_at(rng() % kSectionCount);
      for (std::size_t k = rng() % 4; k > 0; --k) p.sentences.push_back(pool[rng() % pool.size()]);
      total += p.sentences.size();
    }
    const auto once = dedupe(ps);
    CHECK(dedupe(once) == once);
    std::size_t kept = 0;
    std::set<std::string> norms;
    for (const auto& p : once) {
      CHECK_FALSE(p.sentences.empty());
      kept += p.sentences.size();
      for (const auto& s : p.sentences) CHECK(norms.insert(text::normalize_text(s)).second);
    }
    CHECK(kept <= total);
  }
}

TEST_CASE("rank_relevance") {
  const auto idx = retrieval::build_tfidf_index({{"reflujo", "dolor", "otro"}, {"dolor", "fiebre"}, {"nada"}});
  const auto one = passage(Section::HowToTake, {"Reflujo y nada más."});
  const auto two = passage(Section::HowToTake, {"Reflujo con dolor."});
  const auto zero = passage(Section::BeforeYouTake, {"Nada."});
  const auto out = rank_relevance({zero, one, two}, {"reflujo", "dolor"}, idx);
  REQUIRE(out.size() == 3);
  CHECK(out[0].sentences == two.sentences);
  CHECK(out[1].sentences == one.sentences);
  CHECK(out[2].sentences == zero.sentences);
  CHECK(out[0].relevance > out[1].relevance);
  CHECK(out[2].relevance == 0.0);

  // Equal scores keep their order.
  const auto tied = rank_relevance({zero, zero}, {"reflujo"}, idx);
  CHECK(tied[0] == tied[1]);
}

TEST_CASE("golden questions") {
  const auto system = testing::trained_system();

  auto r = system->ask("tengo reflujo por perforación gastrointestinal, ¿puedo tomar cidine?");
  REQUIRE(r.answered());
  CHECK(r.bundle().reference_number == "60001");
  REQUIRE_FALSE(r.bundle().main.empty());
  CHECK(r.bundle().main[0].section == Section::BeforeYouTake);
  CHECK(r.bundle().main[0].source == PassageSource::Classifier);
  CHECK(r.bundle().main_text() ==
        "No tome Cidine 1 mg/5 ml Solución oral si padece hemorragia, obstrucción o perforación gastrointestinal.");
  REQUIRE_FALSE(r.bundle().additional.empty());
  CHECK(r.bundle().additional[0].section == Section::WhatItIsAndUse);
  CHECK(r.bundle().additional[0].source != PassageSource::Classifier);

  r = system->ask(
      "Tengo el pie y tobillo hinchado y enrojecido por que extrajeron el yeso a causa de una fractura de tibia y "
      "peroné. Puedo usar pomada hirudoid forte para tratarlo?");
  REQUIRE(r.answered());
  CHECK(r.bundle().reference_number == "58289");
  REQUIRE_FALSE(r.bundle().main.empty());
  CHECK(r.bundle().main[0].section == Section::WhatItIsAndUse);

  r = system->ask("¿El ibuprofeno acelera la pérdida de memoria?");
  REQUIRE_FALSE(r.answered());
  CHECK(r.refusal().reason == RefusalReason::NoAnswerFound);

  r = system->ask("¿Qué puedo tomar para el dolor de cabeza?");
  REQUIRE_FALSE(r.answered());
  CHECK(r.refusal().reason == RefusalReason::NoMedicine);

  r = system->ask("¿Puedo tomar hemicraneal para la migraña?");
  REQUIRE_FALSE(r.answered());
  CHECK(r.refusal().reason == RefusalReason::NonMarketedMedicine);

  CHECK_THROWS_AS(system->ask("  ¿? "), EmptyQuestion);
}

TEST_CASE("forced sections replace the classifier") {
  const auto system = testing::trained_system();
  const auto r = system->ask("tengo reflujo por perforación gastrointestinal, ¿puedo tomar cidine?",
                             std::vector<Section>{Section::WhatItIsAndUse});
  REQUIRE(r.answered());
  CHECK(r.trace.main_sections == std::vector<Section>{Section::WhatItIsAndUse});
  for (const auto& p : r.bundle().main) CHECK(p.section == Section::WhatItIsAndUse);
  for (const auto& p : r.bundle().additional) CHECK(p.section != Section::WhatItIsAndUse);
}

TEST_CASE("answers are verbatim leaflet text") {
  const auto system = testing::trained_system();
  synth::GeneratorOptions g;
  g.count = 200;
  g.seed = 99;
  std::size_t answered = 0;
  for (const auto& q : synth::generate(synth::fillers_from_store(system->store()), g)) {
    const auto r = system->ask(q.text);
    if (!r.answered()) continue;
    ++answered;
    const auto* leaflet = system->store().get_leaflet(r.bundle().reference_number);
    REQUIRE(leaflet != nullptr);
    const auto sources = source_strings(*leaflet);
    for (const auto* group : {&r.bundle().main, &r.bundle().additional}) {
      for (const auto& p : *group) {
        for (const auto& s : p.sentences) CHECK(sources.count(s) == 1);
        if (p.context) CHECK(sources.count(*p.context) == 1);
      }
    }
  }
  CHECK(answered > 0);
}

TEST_CASE("a predictor can replace the classifier") {
  SectionPredictor always_storage = [](const text::NormalizedQuestion&) {
    clf::SectionPrediction p;
    p.probabilities[section_index(Section::Storage)] = 1.0;
    p.predicted = {Section::Storage};
    return p;
  };
  const QaSystem system(testing::bundled_store(), testing::bundled_vocabulary(), always_storage);
  CHECK(system.classifier() == nullptr);
  const auto r = system.ask("¿cómo conservar cidine a temperatura ambiente? no utilice después de la fecha de caducidad");
  CHECK(r.trace.main_sections == std::vector<Section>{Section::Storage});
}
