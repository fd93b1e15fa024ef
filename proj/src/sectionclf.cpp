#include "meqa/sectionclf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "meqa/error.hpp"

namespace meqa::clf {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
  return x.unaryExpr([](double v) { return sigmoid(v); });
}

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, double range, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-range, range);
  Eigen::MatrixXd m(rows, cols);
  // column-major fill keeps the draw order tied to the storage order
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = dist(rng);
  }
  return m;
}

LstmWeights init_lstm(std::size_t input, std::size_t hidden, const TrainConfig& cfg, std::mt19937_64& rng) {
  const auto h = static_cast<Eigen::Index>(hidden);
  LstmWeights w;
  w.w_x = uniform_matrix(4 * h, static_cast<Eigen::Index>(input), cfg.init_range, rng);
  w.w_h = uniform_matrix(4 * h, h, cfg.init_range, rng);
  w.b = Eigen::VectorXd::Zero(4 * h);
  w.b.segment(h, h).setConstant(cfg.forget_bias);
  return w;
}

LstmWeights zeros_like(const LstmWeights& w) {
  return {Eigen::MatrixXd::Zero(w.w_x.rows(), w.w_x.cols()), Eigen::MatrixXd::Zero(w.w_h.rows(), w.w_h.cols()),
          Eigen::VectorXd::Zero(w.b.size())};
}

// Runs one direction over `ids` (already in processing order).
void run_direction(const LstmWeights& w, const Eigen::MatrixXd& embedding, const std::vector<int>& ids,
                   const Eigen::VectorXd* input_mask, const Eigen::VectorXd* rec_mask, DirectionCache* cache,
                   Eigen::VectorXd& h_out) {
  const Eigen::Index hidden = w.w_h.cols();
  Eigen::VectorXd h = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(hidden);
  if (cache) {
    *cache = DirectionCache{};
    cache->ids = ids;
  }
  for (int id : ids) {
    Eigen::VectorXd x = embedding.row(id).transpose();
    if (input_mask) x = x.cwiseProduct(*input_mask);
    Eigen::VectorXd h_in = rec_mask ? Eigen::VectorXd(h.cwiseProduct(*rec_mask)) : h;
    Eigen::VectorXd a = w.w_x * x + w.w_h * h_in + w.b;
    Eigen::VectorXd gi = sigmoid(a.segment(0, hidden));
    Eigen::VectorXd gf = sigmoid(a.segment(hidden, hidden));
    Eigen::VectorXd go = sigmoid(a.segment(2 * hidden, hidden));
    Eigen::VectorXd gg = a.segment(3 * hidden, hidden).array().tanh().matrix();
    Eigen::VectorXd c_new = gf.cwiseProduct(c) + gi.cwiseProduct(gg);
    Eigen::VectorXd h_new = go.cwiseProduct(c_new.array().tanh().matrix());
    if (cache) {
      cache->x.push_back(std::move(x));
      cache->h_in.push_back(std::move(h_in));
      cache->c_prev.push_back(c);
      cache->gate_i.push_back(std::move(gi));
      cache->gate_f.push_back(std::move(gf));
      cache->gate_o.push_back(std::move(go));
      cache->gate_g.push_back(std::move(gg));
      cache->c.push_back(c_new);
    }
    c = std::move(c_new);
    h = std::move(h_new);
  }
  if (cache) cache->h_last = h;
  h_out = std::move(h);
}

// Backpropagates dL/dh_last through one direction, accumulating into grads.
void backprop_direction(const LstmWeights& w, const DirectionCache& cache, const Eigen::VectorXd& dh_last,
                        const Eigen::VectorXd* input_mask, const Eigen::VectorXd* rec_mask, LstmWeights& gw,
                        Eigen::MatrixXd& g_embedding) {
  const Eigen::Index hidden = w.w_h.cols();
  Eigen::VectorXd dh = dh_last;
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd da(4 * hidden);
  for (std::size_t t = cache.ids.size(); t-- > 0;) {
    const auto& gi = cache.gate_i[t];
    const auto& gf = cache.gate_f[t];
    const auto& go = cache.gate_o[t];
    const auto& gg = cache.gate_g[t];
    const Eigen::ArrayXd tanh_c = cache.c[t].array().tanh();

    const Eigen::ArrayXd d_o = dh.array() * tanh_c;
    dc.array() += dh.array() * go.array() * (1.0 - tanh_c.square());
    const Eigen::ArrayXd d_i = dc.array() * gg.array();
    const Eigen::ArrayXd d_g = dc.array() * gi.array();
    const Eigen::ArrayXd d_f = dc.array() * cache.c_prev[t].array();

    da.segment(0, hidden) = (d_i * gi.array() * (1.0 - gi.array())).matrix();
    da.segment(hidden, hidden) = (d_f * gf.array() * (1.0 - gf.array())).matrix();
    da.segment(2 * hidden, hidden) = (d_o * go.array() * (1.0 - go.array())).matrix();
    da.segment(3 * hidden, hidden) = (d_g * (1.0 - gg.array().square())).matrix();

    gw.w_x.noalias() += da * cache.x[t].transpose();
    gw.w_h.noalias() += da * cache.h_in[t].transpose();
    gw.b += da;

    Eigen::VectorXd dx = w.w_x.transpose() * da;
    if (input_mask) dx = dx.cwiseProduct(*input_mask);
    g_embedding.row(cache.ids[t]) += dx.transpose();

    Eigen::VectorXd dh_prev = w.w_h.transpose() * da;
    if (rec_mask) dh_prev = dh_prev.cwiseProduct(*rec_mask);
    dh = std::move(dh_prev);
    dc = (dc.array() * gf.array()).matrix();
  }
}

const Eigen::VectorXd* mask_or_null(const Eigen::VectorXd& v) { return v.size() ? &v : nullptr; }

std::vector<int> strip_pad(std::span<const int> ids) {
  std::vector<int> out;
  out.reserve(ids.size());
  for (int id : ids) {
    if (id != kPadId) out.push_back(id);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Tensors Tensors::zeros_like() const {
  return {Eigen::MatrixXd::Zero(embedding.rows(), embedding.cols()),
          clf::zeros_like(fwd),
          clf::zeros_like(bwd),
          Eigen::MatrixXd::Zero(out_w.rows(), out_w.cols()),
          Eigen::VectorXd::Zero(out_b.size())};
}

std::vector<Eigen::Map<Eigen::VectorXd>> Tensors::views() {
  std::vector<Eigen::Map<Eigen::VectorXd>> v;
  auto add = [&](auto& m) { v.emplace_back(m.data(), m.size()); };
  add(embedding);
  for (auto* dir : {&fwd, &bwd}) {
    add(dir->w_x);
    add(dir->w_h);
    add(dir->b);
  }
  add(out_w);
  add(out_b);
  return v;
}

std::size_t Tensors::parameter_count() const {
  auto n = embedding.size() + out_w.size() + out_b.size();
  for (const auto* dir : {&fwd, &bwd}) n += dir->w_x.size() + dir->w_h.size() + dir->b.size();
  return static_cast<std::size_t>(n);
}

bool Tensors::all_finite() const {
  bool ok = embedding.allFinite() && out_w.allFinite() && out_b.allFinite();
  for (const auto* dir : {&fwd, &bwd}) ok = ok && dir->w_x.allFinite() && dir->w_h.allFinite() && dir->b.allFinite();
  return ok;
}

ClassifierParams::ClassifierParams(std::vector<std::string> vocabulary, Tensors t)
    : tensors(std::move(t)), vocabulary_(std::move(vocabulary)) {
  if (vocabulary_.size() < 2) throw DimensionMismatch("vocabulary must contain PAD and OOV rows");
  for (std::size_t i = 2; i < vocabulary_.size(); ++i) rows_.emplace(vocabulary_[i], static_cast<int>(i));
  validate();
}

ClassifierParams ClassifierParams::initialize(std::vector<std::string> vocabulary, const TrainConfig& cfg,
                                              std::mt19937_64& rng) {
  std::vector<std::string> rows = {"<pad>", "<oov>"};
  rows.insert(rows.end(), vocabulary.begin(), vocabulary.end());
  const auto v = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(cfg.embedding_dim);
  const auto h = static_cast<Eigen::Index>(cfg.hidden_size);
  Tensors t;
  t.embedding = uniform_matrix(v, d, cfg.init_range, rng);
  t.fwd = init_lstm(cfg.embedding_dim, cfg.hidden_size, cfg, rng);
  t.bwd = init_lstm(cfg.embedding_dim, cfg.hidden_size, cfg, rng);
  t.out_w = uniform_matrix(2 * h, static_cast<Eigen::Index>(kSectionCount), cfg.init_range, rng);
  t.out_b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kSectionCount));
  return ClassifierParams(std::move(rows), std::move(t));
}

int ClassifierParams::token_id(const std::string& token) const {
  auto it = rows_.find(token);
  return it == rows_.end() ? kOovId : it->second;
}

std::vector<int> ClassifierParams::encode(const std::vector<std::string>& tokens, std::size_t max_length) const {
  std::vector<int> ids;
  for (std::size_t i = 0; i < tokens.size() && i < max_length; ++i) ids.push_back(token_id(tokens[i]));
  return ids;
}

void ClassifierParams::validate() const {
  const auto& t = tensors;
  const auto v = static_cast<Eigen::Index>(vocabulary_.size());
  const auto d = t.embedding.cols();
  const auto h = t.fwd.w_h.cols();
  const auto outputs = static_cast<Eigen::Index>(kSectionCount);
  auto check = [](bool ok, const char* what) {
    if (!ok) throw DimensionMismatch(what);
  };
  check(t.embedding.rows() == v, "embedding rows != vocabulary size");
  for (const auto* dir : {&t.fwd, &t.bwd}) {
    check(dir->w_x.rows() == 4 * h && dir->w_x.cols() == d, "input-to-hidden shape");
    check(dir->w_h.rows() == 4 * h && dir->w_h.cols() == h, "hidden-to-hidden shape");
    check(dir->b.size() == 4 * h, "gate bias shape");
  }
  check(t.bwd.w_h.cols() == h, "direction hidden sizes differ");
  check(t.out_w.rows() == 2 * h && t.out_w.cols() == outputs, "output weight shape");
  check(t.out_b.size() == outputs, "output bias shape");
}

DropoutMasks draw_masks(std::size_t embedding_dim, std::size_t hidden_size, double dropout, double recurrent_dropout,
                        std::mt19937_64& rng) {
  auto draw = [&](std::size_t n, double rate) {
    Eigen::VectorXd m(static_cast<Eigen::Index>(n));
    std::bernoulli_distribution keep(1.0 - rate);
    const double scale = 1.0 / (1.0 - rate);
    for (Eigen::Index i = 0; i < m.size(); ++i) m[i] = keep(rng) ? scale : 0.0;
    return m;
  };
  DropoutMasks masks;
  if (dropout > 0.0) {
    masks.input_fwd = draw(embedding_dim, dropout);
    masks.input_bwd = draw(embedding_dim, dropout);
  }
  if (recurrent_dropout > 0.0) {
    masks.recurrent_fwd = draw(hidden_size, recurrent_dropout);
    masks.recurrent_bwd = draw(hidden_size, recurrent_dropout);
  }
  return masks;
}

Probabilities forward(const ClassifierParams& params, std::span<const int> token_ids, const DropoutMasks* masks,
                      ForwardCache* cache) {
  const auto& t = params.tensors;
  std::vector<int> ids = strip_pad(token_ids);
  if (ids.empty()) throw DimensionMismatch("empty token sequence");
  for (int id : ids) {
    if (id < 0 || id >= t.embedding.rows()) throw DimensionMismatch("token id outside vocabulary");
  }
  std::vector<int> reversed(ids.rbegin(), ids.rend());

  const DropoutMasks none;
  const DropoutMasks& m = masks ? *masks : none;
  Eigen::VectorXd h_f, h_b;
  run_direction(t.fwd, t.embedding, ids, mask_or_null(m.input_fwd), mask_or_null(m.recurrent_fwd),
                cache ? &cache->fwd : nullptr, h_f);
  run_direction(t.bwd, t.embedding, reversed, mask_or_null(m.input_bwd), mask_or_null(m.recurrent_bwd),
                cache ? &cache->bwd : nullptr, h_b);

  Eigen::VectorXd rep(h_f.size() + h_b.size());
  rep << h_f, h_b;
  const Eigen::VectorXd z = t.out_w.transpose() * rep + t.out_b;
  Probabilities p{};
  for (std::size_t k = 0; k < kSectionCount; ++k) p[k] = sigmoid(z[static_cast<Eigen::Index>(k)]);
  if (cache) {
    cache->representation = rep;
    cache->probabilities = p;
  }
  return p;
}

Probabilities forward(const ClassifierParams& params, std::span<const int> token_ids, bool train_mode,
                      const TrainConfig& config, std::mt19937_64& rng) {
  if (!train_mode) return forward(params, token_ids, nullptr);
  const auto masks =
      draw_masks(params.embedding_dim(), params.hidden_size(), config.dropout, config.recurrent_dropout, rng);
  return forward(params, token_ids, &masks);
}

Eigen::VectorXd representation(const ClassifierParams& params, std::span<const int> token_ids) {
  ForwardCache cache;
  forward(params, token_ids, nullptr, &cache);
  return cache.representation;
}

double bce_loss(const Probabilities& probs, const Labels& labels) {
  double sum = 0.0;
  for (std::size_t k = 0; k < kSectionCount; ++k) {
    const double p = std::clamp(probs[k], kProbClamp, 1.0 - kProbClamp);
    sum += -(labels[k] * std::log(p) + (1.0 - labels[k]) * std::log(1.0 - p));
  }
  return sum / static_cast<double>(kSectionCount);
}

double loss_and_gradients(const ClassifierParams& params, std::span<const Example> batch,
                          std::span<const DropoutMasks> masks, Tensors& grads) {
  if (!masks.empty() && masks.size() != batch.size()) throw DimensionMismatch("one mask set per example required");
  const auto& t = params.tensors;
  grads = t.zeros_like();
  if (batch.empty()) return 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  ForwardCache cache;
  for (std::size_t e = 0; e < batch.size(); ++e) {
    const DropoutMasks* m = masks.empty() ? nullptr : &masks[e];
    const auto& p = forward(params, batch[e].token_ids, m, &cache);
    total += bce_loss(p, batch[e].labels);

    Eigen::VectorXd dz(static_cast<Eigen::Index>(kSectionCount));
    for (std::size_t k = 0; k < kSectionCount; ++k) {
      const bool clamped = p[k] < kProbClamp || p[k] > 1.0 - kProbClamp;
      dz[static_cast<Eigen::Index>(k)] =
          clamped ? 0.0 : (p[k] - batch[e].labels[k]) * inv_batch / static_cast<double>(kSectionCount);
    }
    grads.out_w.noalias() += cache.representation * dz.transpose();
    grads.out_b += dz;
    const Eigen::VectorXd drep = t.out_w * dz;
    const auto h = static_cast<Eigen::Index>(params.hidden_size());
    const DropoutMasks none;
    const DropoutMasks& mm = m ? *m : none;
    backprop_direction(t.fwd, cache.fwd, drep.head(h), mask_or_null(mm.input_fwd), mask_or_null(mm.recurrent_fwd),
                       grads.fwd, grads.embedding);
    backprop_direction(t.bwd, cache.bwd, drep.tail(h), mask_or_null(mm.input_bwd), mask_or_null(mm.recurrent_bwd),
                       grads.bwd, grads.embedding);
  }
  return total * inv_batch;
}

Tensors gradients(const ClassifierParams& params, std::span<const Example> batch, const TrainConfig& config,
                  std::mt19937_64& rng) {
  std::vector<DropoutMasks> masks;
  masks.reserve(batch.size());
  for (std::size_t e = 0; e < batch.size(); ++e) {
    masks.push_back(
        draw_masks(params.embedding_dim(), params.hidden_size(), config.dropout, config.recurrent_dropout, rng));
  }
  Tensors grads;
  loss_and_gradients(params, batch, masks, grads);
  return grads;
}

Labels labels_of(const std::vector<Section>& sections) {
  Labels y{};
  for (auto s : sections) y[section_index(s)] = 1.0;
  return y;
}

TrainResult train(const std::vector<LabeledQuestion>& corpus, const TrainConfig& config) {
  if (corpus.empty()) throw EmptyCorpus();
  if (config.epochs < 1) throw Error("epochs must be >= 1");
  if (config.dropout < 0.0 || config.dropout >= 1.0 || config.recurrent_dropout < 0.0 ||
      config.recurrent_dropout >= 1.0) {
    throw Error("dropout rates must lie in [0, 1)");
  }

  std::set<std::string> words;
  for (const auto& q : corpus) words.insert(q.tokens.begin(), q.tokens.end());

  std::mt19937_64 rng(config.seed);
  TrainResult result{ClassifierParams::initialize({words.begin(), words.end()}, config, rng), {}};
  auto& params = result.params;

  std::vector<Example> examples;
  for (const auto& q : corpus) {
    auto ids = params.encode(q.tokens, config.max_length);
    if (ids.empty()) continue;
    examples.push_back({std::move(ids), labels_of(q.sections)});
  }
  if (examples.empty()) throw EmptyCorpus();

  Tensors m = params.tensors.zeros_like();
  Tensors v = params.tensors.zeros_like();
  Tensors grads;
  auto param_views = params.tensors.views();
  auto m_views = m.views();
  auto v_views = v.views();

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch_size = std::max<std::size_t>(1, config.batch_size);
  std::uint64_t step = 0;
  std::vector<Example> batch;
  std::vector<DropoutMasks> masks;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t stop = std::min(order.size(), start + batch_size);
      batch.clear();
      masks.clear();
      for (std::size_t k = start; k < stop; ++k) {
        batch.push_back(examples[order[k]]);
        masks.push_back(
            draw_masks(params.embedding_dim(), params.hidden_size(), config.dropout, config.recurrent_dropout, rng));
      }
      const double loss = loss_and_gradients(params, batch, masks, grads);
      epoch_loss += loss * static_cast<double>(batch.size());

      ++step;
      const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      auto g_views = grads.views();
      for (std::size_t k = 0; k < param_views.size(); ++k) {
        auto& mk = m_views[k];
        auto& vk = v_views[k];
        const auto& gk = g_views[k];
        mk = config.beta1 * mk + (1.0 - config.beta1) * gk;
        vk = config.beta2 * vk + (1.0 - config.beta2) * gk.cwiseProduct(gk);
        param_views[k].array() -=
            config.learning_rate * (mk.array() / bc1) / ((vk.array() / bc2).sqrt() + config.adam_epsilon);
      }
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(examples.size()));
  }
  return result;
}

SectionPrediction decide_sections(const Probabilities& probs, double threshold) {
  SectionPrediction pred;
  pred.probabilities = probs;
  for (std::size_t k = 0; k < kSectionCount; ++k) {
    if (probs[k] >= threshold) pred.predicted.push_back(section_at(k));
  }
  if (pred.predicted.empty()) {
    const auto best = std::max_element(probs.begin(), probs.end()) - probs.begin();
    pred.predicted.push_back(section_at(static_cast<std::size_t>(best)));
  }
  return pred;
}

SectionPrediction predict_sections(const ClassifierParams& params, const std::vector<std::string>& tokens,
                                   double threshold, std::size_t max_length) {
  auto ids = params.encode(tokens, max_length);
  if (ids.empty()) ids.push_back(kOovId);
  return decide_sections(forward(params, ids, nullptr), threshold);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[8] = {'M', 'E', 'Q', 'A', 'C', 'L', 'F', '\0'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
    return std::bit_cast<double>(bits);
  }
  std::string str(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw ParseError("checkpoint", 0, "truncated");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const ClassifierParams& params) {
  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(params.embedding_dim()));
  put_u32(out, static_cast<std::uint32_t>(params.hidden_size()));
  put_u32(out, static_cast<std::uint32_t>(kSectionCount));
  put_u32(out, static_cast<std::uint32_t>(params.vocabulary().size()));
  for (const auto& w : params.vocabulary()) {
    put_u32(out, static_cast<std::uint32_t>(w.size()));
    out += w;
  }
  auto tensors = params.tensors;
  for (const auto& view : tensors.views()) {
    put_u32(out, static_cast<std::uint32_t>(view.size()));
    for (Eigen::Index i = 0; i < view.size(); ++i) put_f64(out, view[i]);
  }
  return out;
}

ClassifierParams deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.str(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) throw ParseError("checkpoint", 0, "bad magic");
  const auto version = r.u32();
  if (version != kCheckpointVersion) throw ParseError("checkpoint", 0, "unsupported version " + std::to_string(version));
  const auto d = static_cast<Eigen::Index>(r.u32());
  const auto h = static_cast<Eigen::Index>(r.u32());
  const auto outputs = r.u32();
  if (outputs != kSectionCount) throw DimensionMismatch("checkpoint output count != 6");
  const auto vsize = r.u32();
  std::vector<std::string> vocab;
  vocab.reserve(vsize);
  for (std::uint32_t i = 0; i < vsize; ++i) vocab.push_back(r.str(r.u32()));

  Tensors t;
  const auto v = static_cast<Eigen::Index>(vsize);
  t.embedding.resize(v, d);
  for (auto* dir : {&t.fwd, &t.bwd}) {
    dir->w_x.resize(4 * h, d);
    dir->w_h.resize(4 * h, h);
    dir->b.resize(4 * h);
  }
  t.out_w.resize(2 * h, static_cast<Eigen::Index>(kSectionCount));
  t.out_b.resize(static_cast<Eigen::Index>(kSectionCount));
  for (auto& view : t.views()) {
    if (r.u32() != view.size()) throw DimensionMismatch("checkpoint tensor size");
    for (Eigen::Index i = 0; i < view.size(); ++i) view[i] = r.f64();
  }
  if (!r.done()) throw ParseError("checkpoint", 0, "trailing bytes");
  return ClassifierParams(std::move(vocab), std::move(t));
}

void save_checkpoint(const ClassifierParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  const auto bytes = serialize_checkpoint(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ClassifierParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize_checkpoint(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path, 0, e.reason());
  }
}

}  // namespace meqa::clf
