#include <doctest.h>

#include <cmath>
#include <random>

#include "meqa/error.hpp"
#include "meqa/retrieval.hpp"
#include "support.hpp"

using namespace meqa;
using namespace meqa::retrieval;

namespace {

const std::string kData = MEQA_DATA_DIR;

const CorpusStore& fixture() {
  static const CorpusStore store =
      load_corpus(kData + "/leaflets.jsonl", kData + "/lexicon.jsonl", kData + "/registry.jsonl");
  return store;
}

double weight(const SparseVector& v, std::size_t col) {
  for (const auto& [c, w] : v) {
    if (c == col) return w;
  }
  return 0.0;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = u(rng);
  return m;
}

}  // namespace

TEST_CASE("tf-idf weights by hand") {
  const auto idx = build_tfidf_index({{"a", "a", "b"}, {"b", "c"}});
  REQUIRE(idx.terms() == std::vector<std::string>{"a", "b", "c"});
  const double rare = std::log(3.0 / 2.0) + 1.0;
  CHECK(idx.idf(0) == doctest::Approx(rare).epsilon(1e-12));
  CHECK(idx.idf(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(idx.idf(2) == doctest::Approx(rare).epsilon(1e-12));

  const double n0 = std::hypot(2 * rare, 1.0);
  CHECK(weight(idx.row(0), 0) == doctest::Approx(2 * rare / n0).epsilon(1e-12));
  CHECK(weight(idx.row(0), 1) == doctest::Approx(1.0 / n0).epsilon(1e-12));
  CHECK(weight(idx.row(0), 2) == 0.0);
  const double n1 = std::hypot(1.0, rare);
  CHECK(weight(idx.row(1), 1) == doctest::Approx(1.0 / n1).epsilon(1e-12));
  CHECK(weight(idx.row(1), 2) == doctest::Approx(rare / n1).epsilon(1e-12));
  for (std::size_t d = 0; d < idx.document_count(); ++d) CHECK(norm(idx.row(d)) == doctest::Approx(1.0));

  CHECK(idx.vectorize({"zzz"}).empty());
  CHECK(cosine(idx.vectorize({"a"}), SparseVector{}) == 0.0);
  CHECK(idx.document("1") == std::optional<std::size_t>{1});
}

TEST_CASE("tf-idf rejects empty collections") {
  CHECK_THROWS_AS(build_tfidf_index({}), EmptyCollection);
  CHECK_THROWS_AS(build_tfidf_index({{}, {}}), EmptyCollection);
  CHECK_THROWS_AS(build_tfidf_index({{"a"}}, {"x", "y"}), DimensionMismatch);
}

TEST_CASE("LSI matches a Jacobi SVD oracle") {
  std::mt19937_64 rng(5);
  double worst_sigma = 0.0, worst_projection = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto rows = static_cast<Eigen::Index>(1 + rng() % 12);
    const auto cols = static_cast<Eigen::Index>(1 + rng() % 12);
    const Eigen::MatrixXd a = random_matrix(rows, cols, rng);
    const auto lsi = build_lsi(a);
    const auto oracle = testing::jacobi_svd(a);
    const Eigen::Index k = std::min<Eigen::Index>(6, std::min(rows, cols));
    REQUIRE(lsi.sigma.size() == k);
    worst_sigma = std::max(worst_sigma, (lsi.sigma - oracle.sigma.head(k)).cwiseAbs().maxCoeff());
    const Eigen::VectorXd q = random_matrix(rows, 1, rng);
    const Eigen::VectorXd expected = (oracle.u.leftCols(k).transpose() * q).cwiseQuotient(oracle.sigma.head(k));
    worst_projection = std::max(worst_projection, (project_query(lsi, q) - expected).cwiseAbs().maxCoeff());
    // Orthonormal factors.
    CHECK((lsi.u.transpose() * lsi.u - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index j = 0; j < k; ++j) {
      Eigen::Index arg = 0;
      lsi.u.col(j).cwiseAbs().maxCoeff(&arg);
      CHECK(lsi.u(arg, j) > 0.0);
    }
  }
  CHECK(worst_sigma < 1e-9);
  CHECK(worst_projection < 1e-9);
}

TEST_CASE("LSI reduces k to the numerical rank") {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd a = random_matrix(10, 3, rng) * random_matrix(3, 8, rng);
  const auto lsi = build_lsi(a, 6);
  CHECK(lsi.k() == 3);
  CHECK(lsi.requested_k == 6);
  CHECK((lsi.sigma.array() > 0).all());
  CHECK_THROWS_AS(build_lsi(Eigen::MatrixXd::Zero(3, 3)), EmptyCollection);
}

TEST_CASE("fold-in of a document column recovers its latent row") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = random_matrix(12, 6, rng) * random_matrix(6, 10, rng);
    const auto lsi = build_lsi(a, 6);
    REQUIRE(lsi.k() == 6);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const Eigen::VectorXd got = project_query(lsi, a.col(j));
      CHECK((got - lsi.document_coordinates(static_cast<std::size_t>(j))).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  const auto lsi = build_lsi(Eigen::MatrixXd::Identity(4, 4));
  CHECK_THROWS_AS(project_query(lsi, Eigen::VectorXd::Zero(3)), DimensionMismatch);
}

TEST_CASE("select_leaflet") {
  const auto& store = fixture();
  const LeafletIndex index(store);
  const auto cidine = store.candidate_leaflets("cidine");
  REQUIRE(cidine.size() == 2);
  CHECK_THROWS_AS(index.select_leaflet({}, {"reflujo"}), NoCandidate);

  // No overlap with either leaflet: a tie, broken by the smaller reference.
  const auto tie = index.select_leaflet(cidine, {"qqqq"});
  CHECK(tie.leaflet->reference_number == "60001");
  CHECK(tie.score == 0.0);

  const auto reversed = std::vector<const Leaflet*>{cidine[1], cidine[0]};
  CHECK(index.select_leaflet(reversed, {"qqqq"}).leaflet->reference_number == "60001");

  // The winner has the highest cosine.
  const auto best = index.select_leaflet(cidine, {"reflujo gastroesofagico"});
  for (const auto* l : cidine) {
    const auto q = index.index().vectorize(query_tokens({"reflujo gastroesofagico"}));
    const auto row = index.index().row(*index.index().document(l->reference_number));
    CHECK(cosine(q, row) <= best.score + 1e-12);
  }
}

TEST_CASE("extra_sections") {
  const auto& store = fixture();
  const auto model = build_section_model(*store.get_leaflet("60001"));
  CHECK(model.index.document_count() == 6);
  const std::vector<std::string> terms = {"reflujo gastroesofagico", "perforacion gastrointestinal"};
  const auto extra = extra_sections(model, terms, {Section::BeforeYouTake});
  REQUIRE_FALSE(extra.empty());
  CHECK(extra.size() <= kExtraSections);
  for (std::size_t i = 0; i < extra.size(); ++i) {
    CHECK(extra[i].section != Section::BeforeYouTake);
    CHECK(extra[i].score >= kExtraScoreFloor);
    CHECK(extra[i].score == std::max(extra[i].vsm_score, extra[i].lsi_score));
    if (i) CHECK(extra[i - 1].score >= extra[i].score);
  }
  CHECK(extra[0].section == Section::WhatItIsAndUse);

  // Excluding everything leaves nothing.
  CHECK(extra_sections(model, terms, std::vector<Section>(kAllSections.begin(), kAllSections.end())).empty());
  CHECK(extra_sections(model, {"qqqq"}, {}).empty());
  CHECK(score_source_name(ScoreSource::Lsi) == "LSI");
}
