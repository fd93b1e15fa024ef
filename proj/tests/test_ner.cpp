#include <doctest.h>

#include <random>
#include <set>

#include "meqa/ner.hpp"
#include "support.hpp"

using namespace meqa;
using namespace meqa::ner;

namespace {

const std::string kData = MEQA_DATA_DIR;

const CorpusStore& fixture() {
  static const CorpusStore store =
      load_corpus(kData + "/leaflets.jsonl", kData + "/lexicon.jsonl", kData + "/registry.jsonl");
  return store;
}

text::NormalizedQuestion nq_of(const std::string& s) { return text::normalize(s, nullptr); }

std::set<std::string> surfaces(const std::vector<EntityAnnotation>& v) {
  std::set<std::string> out;
  for (const auto& a : v) out.insert(a.surface);
  return out;
}

}  // namespace

TEST_CASE("max_match examples") {
  NgramIndex idx = {{"tension alta", "C1"}, {"tension", "C2"}};
  auto m = max_match({"la", "tension", "alta"}, idx, 5);
  REQUIRE(m.size() == 1);
  CHECK(m[0].start == 1);
  CHECK(m[0].end == 3);
  CHECK(m[0].resolved_id == "C1");
  CHECK(m[0].surface == "tension alta");

  CHECK(max_match({"la", "tension"}, {}, 5).empty());

  idx = {{"perforacion gastrointestinal", "C0151664"}};
  m = max_match({"perforacion", "gastrointestinal"}, idx, 5);
  REQUIRE(m.size() == 1);
  CHECK(m[0].end - m[0].start == 2);
}

TEST_CASE("max_match equals exhaustive tiling on random instances") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e"};
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<std::string> tokens(rng() % 13);
    for (auto& t : tokens) t = alphabet[rng() % alphabet.size()];
    const std::size_t max_n = 1 + rng() % 5;
    NgramIndex idx;
    for (std::size_t k = rng() % 31; k > 0; --k) {
      std::vector<std::string> g(1 + rng() % 6);
      for (auto& t : g) t = alphabet[rng() % alphabet.size()];
      idx.emplace(text::join(g), "X" + std::to_string(k));
    }
    const auto got = max_match(tokens, idx, max_n);
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (const auto& a : got) spans.push_back({a.start, a.end});
    if (spans != testing::tiling_oracle(tokens, idx, max_n)) ++mismatches;
    for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].end <= got[i].start);
    for (const auto& a : got) {
      std::vector<std::string> part(tokens.begin() + static_cast<std::ptrdiff_t>(a.start),
                                    tokens.begin() + static_cast<std::ptrdiff_t>(a.end));
      CHECK(a.surface == text::join(part));
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("parse_doses") {
  auto d = parse_doses({"ibuprofeno", "600", "mg"});
  REQUIRE(d.size() == 1);
  CHECK(d[0].surface == "600 mg");
  CHECK(d[0].start == 1);
  CHECK(d[0].end == 3);

  d = parse_doses({"cidine", "1", "mg/5", "ml"});
  REQUIRE(d.size() == 1);
  CHECK(d[0].surface == "1 mg/5 ml");

  d = parse_doses({"ibuprofeno", "600mg"});
  REQUIRE(d.size() == 1);
  CHECK(d[0].resolved_id == dose_key("600 mg"));

  CHECK(parse_doses({"puedo", "tomar", "cidine"}).empty());
}

TEST_CASE("administration verbs and rule-based heads") {
  CHECK(administration_verb_lemma("tomar") == "tomar");
  CHECK(administration_verb_lemma("tomo") == "tomar");
  CHECK(administration_verb_lemma("aplique") == "aplicar");
  CHECK_FALSE(administration_verb_lemma("persona").has_value());

  RuleBasedDependencies dep;
  const std::vector<std::string> toks = {"una", "persona", "puede", "tomar", "ibuprofeno", "600", "mg"};
  CHECK(dep.head_of(toks, 4) == 3);
  std::size_t roots = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) roots += dep.head_of(toks, i) == i;
  CHECK(roots == 1);
}

TEST_CASE("infer_pharm_forms") {
  const auto& store = fixture();
  EntityRecognizer rec(store);
  RuleBasedDependencies dep;

  auto nq = nq_of("Una persona mayor con la tensión alta puede tomar Ibuprofeno 600 mg, gracias.");
  auto es = rec.extract_entities(nq, dep);
  REQUIRE(es.medicines.size() == 1);
  auto forms = rec.infer_pharm_forms(nq, es.medicines[0], dep);
  CHECK(std::set<std::string>(forms.begin(), forms.end()) == std::set<std::string>{"capsula blanda", "comprimido"});

  nq = nq_of("Puedo usar pomada hirudoid forte para tratarlo?");
  es = rec.extract_entities(nq, dep);
  REQUIRE(es.medicines.size() == 1);
  CHECK(rec.infer_pharm_forms(nq, es.medicines[0], dep) == std::vector<std::string>{"pomada"});

  nq = nq_of("ibuprofeno y sus efectos");
  es = rec.extract_entities(nq, dep);
  REQUIRE(es.medicines.size() == 1);
  CHECK(rec.infer_pharm_forms(nq, es.medicines[0], dep) == store.registry().registered_forms("ibuprofeno"));

  // Always within the registered forms.
  for (const char* q : {"puedo inyectar ibuprofeno", "puedo beber ventolin", "aplicar gel de paracetamol",
                        "inhalar ventolin", "tomar cidine"}) {
    nq = nq_of(q);
    es = rec.extract_entities(nq, dep);
    for (const auto& m : es.medicines) {
      const auto reg = store.registry().registered_forms(m.resolved_id);
      for (const auto& f : rec.infer_pharm_forms(nq, m, dep)) {
        CHECK(std::find(reg.begin(), reg.end(), f) != reg.end());
      }
    }
  }
}

TEST_CASE("extract_entities") {
  const auto& store = fixture();
  EntityRecognizer rec(store);
  RuleBasedDependencies dep;

  auto nq = nq_of("tengo reflujo por perforacion gastrointestinal puedo tomar cidine");
  auto es = rec.extract_entities(nq, dep);
  REQUIRE(es.medicines.size() == 1);
  CHECK(es.medicines[0].resolved_id == "cidine");
  CHECK(surfaces(es.diseases) == std::set<std::string>{"reflujo", "perforacion gastrointestinal"});
  CHECK(rec.extract_entities(nq, dep) == es);

  es = rec.extract_entities(nq_of("que puedo tomar para el cansancio"), dep);
  CHECK(es.medicines.empty());
  CHECK(es.diseases.size() == 1);

  text::NormalizedQuestion empty;
  CHECK(rec.extract_entities(empty, dep) == EntitySet{});
}

TEST_CASE("expand_concepts") {
  const auto& lex = fixture().lexicon();
  EntityAnnotation reflux{0, 1, EntityKind::Disease, "reflujo", "C0014869"};
  const auto ex = expand_concepts({reflux}, lex);
  CHECK(std::find(ex.begin(), ex.end(), "reflujo gastroesofagico") != ex.end());
  CHECK(std::find(ex.begin(), ex.end(), "reflujo") != ex.end());

  ConceptLexicon single({{"C9", "vertigo", {"vertigo"}}});
  CHECK(expand_concepts({{0, 1, EntityKind::Disease, "vertigo", "C9"}}, single) == std::vector<std::string>{"vertigo"});

  ConceptLexicon shared({{"A", "dolor", {"dolor", "molestia"}}, {"B", "pena", {"pena", "molestia"}}});
  const auto both = expand_concepts({{0, 1, EntityKind::Disease, "dolor", "A"}, {2, 3, EntityKind::Disease, "pena", "B"}}, shared);
  CHECK(std::count(both.begin(), both.end(), "molestia") == 1);
}
