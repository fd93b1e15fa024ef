#include "meqa/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "meqa/error.hpp"
#include "meqa/log.hpp"

namespace meqa::retrieval {

double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      s += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return s;
}

double norm(const SparseVector& a) {
  double s = 0.0;
  for (const auto& [c, w] : a) s += w * w;
  return std::sqrt(s);
}

double cosine(const SparseVector& a, const SparseVector& b) {
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

std::optional<std::size_t> TfidfIndex::column(const std::string& term) const {
  auto it = columns_.find(term);
  if (it == columns_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TfidfIndex::document(const std::string& id) const {
  auto it = doc_by_id_.find(id);
  if (it == doc_by_id_.end()) return std::nullopt;
  return it->second;
}

SparseVector TfidfIndex::weigh(const std::vector<std::string>& tokens) const {
  std::map<std::size_t, double> counts;
  for (const auto& t : tokens) {
    if (auto c = column(t)) counts[*c] += 1.0;
  }
  SparseVector out;
  out.reserve(counts.size());
  for (const auto& [c, tf] : counts) out.emplace_back(c, tf * idf_[c]);
  return out;
}

SparseVector TfidfIndex::vectorize(const std::vector<std::string>& tokens) const {
  auto v = weigh(tokens);
  const double n = norm(v);
  if (n > 0.0) {
    for (auto& [c, w] : v) w /= n;
  }
  return v;
}

Eigen::MatrixXd TfidfIndex::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_.size()),
                                            static_cast<Eigen::Index>(terms_.size()));
  for (std::size_t d = 0; d < rows_.size(); ++d) {
    for (const auto& [c, w] : rows_[d]) m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(c)) = w;
  }
  return m;
}

Eigen::VectorXd TfidfIndex::densify(const SparseVector& v) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(terms_.size()));
  for (const auto& [c, w] : v) out(static_cast<Eigen::Index>(c)) = w;
  return out;
}

TfidfIndex build_tfidf_index(const std::vector<std::vector<std::string>>& documents, std::vector<std::string> ids) {
  if (ids.empty()) {
    for (std::size_t i = 0; i < documents.size(); ++i) ids.push_back(std::to_string(i));
  }
  if (ids.size() != documents.size()) throw DimensionMismatch("tf-idf: ids and documents differ in length");
  bool any = false;
  for (const auto& d : documents) any = any || !d.empty();
  if (!any) throw EmptyCollection();

  TfidfIndex index;
  std::set<std::string> vocab;
  for (const auto& d : documents) vocab.insert(d.begin(), d.end());
  index.terms_.assign(vocab.begin(), vocab.end());
  for (std::size_t c = 0; c < index.terms_.size(); ++c) index.columns_.emplace(index.terms_[c], c);

  std::vector<double> df(index.terms_.size(), 0.0);
  for (const auto& d : documents) {
    std::set<std::size_t> seen;
    for (const auto& t : d) seen.insert(index.columns_.at(t));
    for (auto c : seen) df[c] += 1.0;
  }
  const double n = static_cast<double>(documents.size());
  index.idf_.resize(df.size());
  for (std::size_t c = 0; c < df.size(); ++c) index.idf_[c] = std::log((1.0 + n) / (1.0 + df[c])) + 1.0;

  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (!index.doc_by_id_.emplace(ids[i], i).second) throw ValidationError("tf-idf: duplicate document id " + ids[i]);
  }
  index.ids_ = std::move(ids);
  index.rows_.reserve(documents.size());
  for (const auto& d : documents) index.rows_.push_back(index.vectorize(d));
  return index;
}

LsiModel build_lsi(const Eigen::MatrixXd& a, std::size_t k) {
  if (a.size() == 0 || a.isZero(0.0)) throw EmptyCollection();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > kSingularValueTolerance * s(0)) ++rank;
  const auto kk = std::min<Eigen::Index>(static_cast<Eigen::Index>(k), rank);
  if (kk < static_cast<Eigen::Index>(k)) {
    log::info("lsi: rank " + std::to_string(rank) + " below requested k=" + std::to_string(k) + ", using k=" +
              std::to_string(kk));
  }
  LsiModel m;
  m.requested_k = k;
  m.u = svd.matrixU().leftCols(kk);
  m.sigma = s.head(kk);
  m.v = svd.matrixV().leftCols(kk);
  for (Eigen::Index j = 0; j < kk; ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < m.u.rows(); ++i) {
      if (std::abs(m.u(i, j)) > best) {
        best = std::abs(m.u(i, j));
        arg = i;
      }
    }
    if (m.u(arg, j) < 0.0) {
      m.u.col(j) *= -1.0;
      m.v.col(j) *= -1.0;
    }
  }
  return m;
}

LsiModel build_lsi(const TfidfIndex& index, std::size_t k) { return build_lsi(index.dense().transpose(), k); }

Eigen::VectorXd project_query(const LsiModel& lsi, const Eigen::VectorXd& query) {
  if (query.size() != lsi.u.rows()) throw DimensionMismatch("lsi: query has wrong dimension");
  return (lsi.u.transpose() * query).cwiseQuotient(lsi.sigma);
}

std::vector<std::string> query_tokens(const std::vector<std::string>& query_terms) {
  std::vector<std::string> out;
  for (const auto& term : query_terms) {
    for (auto& t : text::tokens_of(term)) out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::string> section_tokens(const Leaflet& leaflet, Section section) {
  std::vector<std::string> out;
  auto append = [&](std::string_view s) {
    for (auto& t : text::tokens_of(s)) out.push_back(std::move(t));
  };
  const std::string* last_context = nullptr;
  for (const auto& block : leaflet.section(section)) {
    const std::string* context = block.heading ? &*block.heading : (block.list_stem ? &*block.list_stem : nullptr);
    if (context && (!last_context || *context != *last_context)) append(*context);
    last_context = context;
    for (const auto& sentence : block.sentences) append(sentence);
  }
  return out;
}

std::vector<std::string> leaflet_tokens(const Leaflet& leaflet) {
  std::vector<std::string> out;
  for (auto s : kAllSections) {
    auto part = section_tokens(leaflet, s);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

LeafletIndex::LeafletIndex(const CorpusStore& store) {
  std::vector<std::vector<std::string>> docs;
  std::vector<std::string> ids;
  for (const auto& l : store.leaflets()) {
    docs.push_back(leaflet_tokens(l));
    ids.push_back(l.reference_number);
  }
  index_ = build_tfidf_index(docs, ids);
}

LeafletScore LeafletIndex::select_leaflet(const std::vector<const Leaflet*>& candidates,
                                          const std::vector<std::string>& query_terms) const {
  if (candidates.empty()) throw NoCandidate();
  const auto q = index_.vectorize(query_tokens(query_terms));
  LeafletScore best;
  for (const Leaflet* l : candidates) {
    auto doc = index_.document(l->reference_number);
    const double score = doc ? cosine(q, index_.row(*doc)) : 0.0;
    if (!best.leaflet || score > best.score ||
        (score == best.score && l->reference_number < best.leaflet->reference_number)) {
      best = {l, score};
    }
  }
  return best;
}

SectionModel build_section_model(const Leaflet& leaflet, std::size_t k) {
  std::vector<std::vector<std::string>> docs;
  std::vector<std::string> ids;
  for (auto s : kAllSections) {
    docs.push_back(section_tokens(leaflet, s));
    ids.push_back(section_key(s));
  }
  SectionModel m{build_tfidf_index(docs, ids), {}};
  m.lsi = build_lsi(m.index, k);
  return m;
}

std::string_view score_source_name(ScoreSource source) { return source == ScoreSource::Lsi ? "LSI" : "VSM"; }

std::vector<ExtraSection> extra_sections(const SectionModel& model, const std::vector<std::string>& query_terms,
                                         const std::vector<Section>& main_sections, std::size_t k_extra,
                                         double floor) {
  const auto q = model.index.vectorize(query_tokens(query_terms));
  const Eigen::VectorXd q_hat = project_query(model.lsi, model.index.densify(q));
  std::vector<ExtraSection> out;
  for (auto s : kAllSections) {
    if (std::find(main_sections.begin(), main_sections.end(), s) != main_sections.end()) continue;
    const std::size_t doc = section_index(s);
    ExtraSection e{s};
    e.vsm_score = cosine(q, model.index.row(doc));
    e.lsi_score = model.index.row(doc).empty() ? 0.0 : cosine(q_hat, model.lsi.document_coordinates(doc));
    if (e.lsi_score > e.vsm_score) {
      e.score = e.lsi_score;
      e.source = ScoreSource::Lsi;
    } else {
      e.score = e.vsm_score;
      e.source = ScoreSource::Vsm;
    }
    if (e.score >= floor) out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(), [](const ExtraSection& a, const ExtraSection& b) { return a.score > b.score; });
  if (out.size() > k_extra) out.resize(k_extra);
  return out;
}

}  // namespace meqa::retrieval
