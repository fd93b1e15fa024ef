#pragma once

// Vector space retrieval: tf-idf document index, leaflet selection, and
// a per-leaflet latent semantic model used to suggest extra sections.

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "meqa/corpus.hpp"

namespace meqa::retrieval {

/// (column, weight) pairs sorted by column.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

double dot(const SparseVector& a, const SparseVector& b);
double norm(const SparseVector& a);
/// 0 when either side is the zero vector.
double cosine(const SparseVector& a, const SparseVector& b);
double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// tf = raw count, idf = ln((1 + N) / (1 + df)) + 1, rows L2-normalized.
class TfidfIndex {
 public:
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::string>& terms() const { return terms_; }
  std::optional<std::size_t> column(const std::string& term) const;
  double idf(std::size_t column) const { return idf_[column]; }
  std::size_t document_count() const { return rows_.size(); }
  const SparseVector& row(std::size_t doc) const { return rows_[doc]; }
  std::optional<std::size_t> document(const std::string& id) const;

  /// Weighted, normalized vector of a token bag; unknown terms are dropped.
  SparseVector vectorize(const std::vector<std::string>& tokens) const;
  /// Un-normalized tf-idf weights of a token bag.
  SparseVector weigh(const std::vector<std::string>& tokens) const;

  /// documents x terms.
  Eigen::MatrixXd dense() const;
  /// Densify a sparse vector over this vocabulary.
  Eigen::VectorXd densify(const SparseVector& v) const;

 private:
  friend TfidfIndex build_tfidf_index(const std::vector<std::vector<std::string>>&, std::vector<std::string>);

  std::vector<std::string> ids_;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> columns_;
  std::unordered_map<std::string, std::size_t> doc_by_id_;
  std::vector<double> idf_;
  std::vector<SparseVector> rows_;
};

/// Documents are token lists. `ids` defaults to "0", "1", ... Throws
/// EmptyCollection unless some document has a token.
TfidfIndex build_tfidf_index(const std::vector<std::vector<std::string>>& documents,
                             std::vector<std::string> ids = {});

/// Truncated SVD A ~ U_k S_k V_k^T of a terms x documents matrix.
struct LsiModel {
  std::size_t requested_k = 6;
  Eigen::MatrixXd u;      // terms x k, orthonormal columns
  Eigen::VectorXd sigma;  // k, descending, positive
  Eigen::MatrixXd v;      // documents x k; row j = latent coordinates of document j

  std::size_t k() const { return static_cast<std::size_t>(sigma.size()); }
  Eigen::VectorXd document_coordinates(std::size_t doc) const { return v.row(static_cast<Eigen::Index>(doc)).transpose(); }
};

inline constexpr std::size_t kLsiTopics = 6;
inline constexpr double kSingularValueTolerance = 1e-10;

/// Sign convention: the largest-magnitude entry of every column of U is
/// positive. k drops to the numerical rank when the matrix has fewer
/// nonzero singular values. Throws EmptyCollection for a zero matrix.
LsiModel build_lsi(const Eigen::MatrixXd& terms_by_documents, std::size_t k = kLsiTopics);
LsiModel build_lsi(const TfidfIndex& index, std::size_t k = kLsiTopics);

/// Fold-in q_hat = S^-1 U^T q.
Eigen::VectorXd project_query(const LsiModel& lsi, const Eigen::VectorXd& query);

// Query terms are phrases; their tokens form the query bag.
std::vector<std::string> query_tokens(const std::vector<std::string>& query_terms);

/// Normalized tokens of every heading, list stem and sentence of a section.
std::vector<std::string> section_tokens(const Leaflet& leaflet, Section section);
std::vector<std::string> leaflet_tokens(const Leaflet& leaflet);

struct LeafletScore {
  const Leaflet* leaflet = nullptr;
  double score = 0.0;
};

/// Full-text index over every leaflet of a corpus.
class LeafletIndex {
 public:
  explicit LeafletIndex(const CorpusStore& store);

  const TfidfIndex& index() const { return index_; }

  /// Highest cosine against the query wins, ties go to the smaller
  /// reference number. Throws NoCandidate for an empty list.
  LeafletScore select_leaflet(const std::vector<const Leaflet*>& candidates,
                              const std::vector<std::string>& query_terms) const;

 private:
  TfidfIndex index_;
};

/// Per-leaflet index over its six sections plus the latent model.
struct SectionModel {
  TfidfIndex index;
  LsiModel lsi;
};

SectionModel build_section_model(const Leaflet& leaflet, std::size_t k = kLsiTopics);

enum class ScoreSource { Vsm, Lsi };

std::string_view score_source_name(ScoreSource source);

struct ExtraSection {
  Section section;
  double score = 0.0;
  ScoreSource source = ScoreSource::Vsm;
  double vsm_score = 0.0;
  double lsi_score = 0.0;
};

inline constexpr double kExtraScoreFloor = 0.05;
inline constexpr std::size_t kExtraSections = 2;

/// Sections outside `main_sections` ordered by max(VSM, LSI) score, at most
/// `k_extra`, each at least `floor`.
std::vector<ExtraSection> extra_sections(const SectionModel& model, const std::vector<std::string>& query_terms,
                                         const std::vector<Section>& main_sections,
                                         std::size_t k_extra = kExtraSections, double floor = kExtraScoreFloor);

}  // namespace meqa::retrieval
