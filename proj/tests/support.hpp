#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "meqa/ner.hpp"
#include "meqa/sectionclf.hpp"

namespace meqa::testing {

inline clf::ClassifierParams random_params(std::size_t vocab_words, std::size_t dim, std::size_t hidden,
                                           std::uint64_t seed, double range = 0.5) {
  std::vector<std::string> vocab;
  for (std::size_t i = 0; i < vocab_words; ++i) vocab.push_back("w" + std::to_string(i));
  clf::TrainConfig tc;
  tc.embedding_dim = dim;
  tc.hidden_size = hidden;
  tc.init_range = range;
  std::mt19937_64 rng(seed);
  auto p = clf::ClassifierParams::initialize(vocab, tc, rng);
  // Nonzero biases so every parameter takes part.
  std::uniform_real_distribution<double> u(-range, range);
  for (auto* b : {&p.tensors.fwd.b, &p.tensors.bwd.b, &p.tensors.out_b}) {
    for (Eigen::Index i = 0; i < b->size(); ++i) (*b)(i) = u(rng);
  }
  return p;
}

struct GradCheck {
  double max_relative_error = 0.0;
  std::size_t parameters = 0;
};

/// Central differences over every parameter against the analytic gradient,
/// under fixed dropout masks. Relative error |a - n| / max(|a| + |n|, floor).
inline GradCheck finite_difference_check(const clf::ClassifierParams& params, const std::vector<clf::Example>& batch,
                                         const std::vector<clf::DropoutMasks>& masks, double eps = 1e-5,
                                         double floor = 1e-7) {
  clf::Tensors analytic = params.tensors.zeros_like();
  clf::loss_and_gradients(params, batch, masks, analytic);
  auto probe = params;
  auto views = probe.tensors.views();
  auto grad_views = analytic.views();
  clf::Tensors scratch = params.tensors.zeros_like();
  GradCheck out;
  for (std::size_t v = 0; v < views.size(); ++v) {
    for (Eigen::Index i = 0; i < views[v].size(); ++i) {
      const double orig = views[v](i);
      views[v](i) = orig + eps;
      const double up = clf::loss_and_gradients(probe, batch, masks, scratch);
      views[v](i) = orig - eps;
      const double down = clf::loss_and_gradients(probe, batch, masks, scratch);
      views[v](i) = orig;
      const double numeric = (up - down) / (2 * eps);
      const double a = grad_views[v](i);
      const double rel = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), floor);
      out.max_relative_error = std::max(out.max_relative_error, rel);
      ++out.parameters;
    }
  }
  return out;
}

/// Random batch of `n` examples with lengths in [1, max_len] over ids 0..vocab+1.
inline std::vector<clf::Example> random_batch(std::size_t n, std::size_t min_len, std::size_t max_len,
                                              std::size_t vocab_rows, std::mt19937_64& rng) {
  std::vector<clf::Example> batch(n);
  for (auto& e : batch) {
    const std::size_t len = min_len + rng() % (max_len - min_len + 1);
    for (std::size_t t = 0; t < len; ++t) e.token_ids.push_back(1 + static_cast<int>(rng() % (vocab_rows - 1)));
    for (auto& y : e.labels) y = static_cast<double>(rng() % 2);
  }
  return batch;
}

/// Enumerate every lexicon span first, then tile from the left taking the
/// longest span at each uncovered start.
inline std::vector<std::pair<std::size_t, std::size_t>> tiling_oracle(const std::vector<std::string>& tokens,
                                                                      const ner::NgramIndex& index, std::size_t max_n) {
  std::set<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t j = i + 1; j <= tokens.size() && j - i <= max_n; ++j) {
      std::vector<std::string> part(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                    tokens.begin() + static_cast<std::ptrdiff_t>(j));
      if (index.count(text::join(part))) spans.insert({i, j});
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t cursor = 0;
  while (cursor < tokens.size()) {
    std::size_t best = 0;
    for (const auto& [i, j] : spans) {
      if (i == cursor) best = std::max(best, j);
    }
    if (best) {
      out.push_back({cursor, best});
      cursor = best;
    } else {
      ++cursor;
    }
  }
  return out;
}

struct DenseSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
};

/// One-sided Jacobi SVD (Hestenes): orthogonalize the columns of A by plane
/// rotations, then read off sigma_j = |a_j| and u_j = a_j / sigma_j. Sorted
/// descending, with the largest-magnitude entry of each u column positive.
inline DenseSvd jacobi_svd(const Eigen::MatrixXd& a_in) {
  const bool wide = a_in.cols() > a_in.rows();
  Eigen::MatrixXd a = wide ? Eigen::MatrixXd(a_in.transpose()) : a_in;
  const Eigen::Index n = a.cols();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double gamma = a.col(p).dot(a.col(q));
        if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (auto* m : {&a, &v}) {
          const Eigen::VectorXd cp = m->col(p);
          m->col(p) = c * cp - s * m->col(q);
          m->col(q) = s * cp + c * m->col(q);
        }
      }
    }
    if (off < 1e-15) break;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) order[static_cast<std::size_t>(j)] = j;
  std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a.col(x).norm() > a.col(y).norm(); });
  DenseSvd out;
  out.sigma.resize(n);
  Eigen::MatrixXd left(a.rows(), n), right(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.sigma(j) = a.col(src).norm();
    left.col(j) = out.sigma(j) > 0 ? Eigen::VectorXd(a.col(src) / out.sigma(j)) : Eigen::VectorXd::Zero(a.rows());
    right.col(j) = v.col(src);
  }
  out.u = wide ? right : left;
  out.v = wide ? left : right;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index arg = 0;
    out.u.col(j).cwiseAbs().maxCoeff(&arg);
    if (out.u(arg, j) < 0) {
      out.u.col(j) *= -1.0;
      out.v.col(j) *= -1.0;
    }
  }
  return out;
}

}  // namespace meqa::testing
