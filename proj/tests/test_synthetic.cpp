#include <doctest.h>

#include <filesystem>

#include "meqa/error.hpp"
#include "system_fixture.hpp"

using namespace meqa;
using namespace meqa::synth;

TEST_CASE("generator is deterministic and labeled") {
  const auto fillers = fillers_from_store(*testing::bundled_store());
  CHECK_FALSE(fillers.medicines.empty());
  CHECK_FALSE(fillers.diseases.empty());

  GeneratorOptions g;
  g.count = 500;
  const auto a = generate(fillers, g);
  CHECK(a.size() == 500);
  CHECK(generate(fillers, g) == a);
  g.seed = 8;
  CHECK(generate(fillers, g) != a);

  std::size_t multi = 0;
  std::array<std::size_t, kSectionCount> per_section{};
  for (const auto& q : a) {
    CHECK_FALSE(q.text.empty());
    REQUIRE_FALSE(q.sections.empty());
    CHECK(std::is_sorted(q.sections.begin(), q.sections.end()));
    CHECK(std::adjacent_find(q.sections.begin(), q.sections.end()) == q.sections.end());
    multi += q.sections.size() > 1;
    for (auto s : q.sections) ++per_section[section_index(s)];
  }
  CHECK(multi > 0);
  CHECK(multi < a.size());
  for (auto n : per_section) CHECK(n > 0);
}

TEST_CASE("synthetic questions round trip") {
  GeneratorOptions g;
  g.count = 50;
  const auto qs = generate(fillers_from_store(*testing::bundled_store()), g);
  for (const auto& q : qs) CHECK(synthetic_from_json(to_json(q)) == q);
  const auto path = (std::filesystem::temp_directory_path() / "meqa_synth.jsonl").string();
  write_questions(path, qs);
  CHECK(load_questions(path) == qs);
  std::filesystem::remove(path);

  const auto labeled = to_labeled(qs);
  REQUIRE(labeled.size() == qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    CHECK(labeled[i].sections == qs[i].sections);
    CHECK_FALSE(labeled[i].tokens.empty());
  }
}
