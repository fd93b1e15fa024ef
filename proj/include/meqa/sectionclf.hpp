#pragma once

// Multi-label section classifier: learned embeddings, a bidirectional LSTM
// whose last forward and backward states are concatenated, and a sigmoid
// output layer with one unit per canonical leaflet section.
//
//   p = sigmoid(W^T [h_fwd(x_1..x_n); h_bwd(x_n..x_1)] + b),  x_t = E[w_t]

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "meqa/corpus.hpp"

namespace meqa::clf {

using Probabilities = std::array<double, kSectionCount>;
using Labels = std::array<double, kSectionCount>;

inline constexpr int kPadId = 0;
inline constexpr int kOovId = 1;
inline constexpr double kProbClamp = 1e-12;

struct TrainConfig {
  std::size_t hidden_size = 32;  // per direction
  std::size_t embedding_dim = 64;
  double dropout = 0.5;
  double recurrent_dropout = 0.5;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t epochs = 4;
  std::size_t batch_size = 8;
  std::uint64_t seed = 7;
  std::size_t max_length = 64;
  double init_range = 0.08;
  double forget_bias = 1.0;
};

/// One direction. Gate rows are stacked as [input; forget; output; candidate].
struct LstmWeights {
  Eigen::MatrixXd w_x;  // 4H x D
  Eigen::MatrixXd w_h;  // 4H x H
  Eigen::VectorXd b;    // 4H

  std::size_t hidden_size() const { return static_cast<std::size_t>(w_h.cols()); }
};

/// Every trainable tensor. Also used for gradients and optimizer moments.
struct Tensors {
  Eigen::MatrixXd embedding;  // V x D
  LstmWeights fwd;
  LstmWeights bwd;
  Eigen::MatrixXd out_w;  // 2H x 6
  Eigen::VectorXd out_b;  // 6

  /// Same shapes, all zeros.
  Tensors zeros_like() const;
  /// Flat views in a fixed order: embedding, fwd (w_x, w_h, b), bwd, out_w, out_b.
  std::vector<Eigen::Map<Eigen::VectorXd>> views();
  std::size_t parameter_count() const;
  bool all_finite() const;
};

class ClassifierParams {
 public:
  ClassifierParams() = default;
  /// Vocabulary rows start at 2; rows 0 and 1 are PAD and OOV.
  ClassifierParams(std::vector<std::string> vocabulary, Tensors tensors);

  /// Allocates and initializes: uniform(-init_range, init_range) weights,
  /// zero biases, forget-gate bias `forget_bias`.
  static ClassifierParams initialize(std::vector<std::string> vocabulary, const TrainConfig& config,
                                     std::mt19937_64& rng);

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  int token_id(const std::string& token) const;
  /// Token ids truncated to `max_length`; unknown tokens map to OOV.
  std::vector<int> encode(const std::vector<std::string>& tokens, std::size_t max_length = 64) const;

  std::size_t embedding_dim() const { return static_cast<std::size_t>(tensors.embedding.cols()); }
  std::size_t hidden_size() const { return tensors.fwd.hidden_size(); }

  /// Throws DimensionMismatch when tensor shapes disagree.
  void validate() const;

  Tensors tensors;

 private:
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, int> rows_;
};

/// Inverted-dropout masks, fixed across time steps for one example.
/// Empty vectors mean no dropout.
struct DropoutMasks {
  Eigen::VectorXd input_fwd, input_bwd;
  Eigen::VectorXd recurrent_fwd, recurrent_bwd;
};

DropoutMasks draw_masks(std::size_t embedding_dim, std::size_t hidden_size, double dropout,
                        double recurrent_dropout, std::mt19937_64& rng);

/// Per-direction activations needed by backpropagation.
struct DirectionCache {
  std::vector<int> ids;             // in processing order
  std::vector<Eigen::VectorXd> x;   // masked inputs
  std::vector<Eigen::VectorXd> h_in;  // masked previous hidden state
  std::vector<Eigen::VectorXd> c_prev, gate_i, gate_f, gate_o, gate_g, c;
  Eigen::VectorXd h_last;
};

struct ForwardCache {
  DirectionCache fwd, bwd;
  Eigen::VectorXd representation;  // 2H
  Probabilities probabilities{};
};

/// Forward pass with explicit masks (nullptr = inference).
Probabilities forward(const ClassifierParams& params, std::span<const int> token_ids, const DropoutMasks* masks,
                      ForwardCache* cache = nullptr);

/// Forward pass drawing fresh masks from `rng` when `train_mode`.
Probabilities forward(const ClassifierParams& params, std::span<const int> token_ids, bool train_mode,
                      const TrainConfig& config, std::mt19937_64& rng);

/// Concatenated final states [h_fwd; h_bwd] in inference mode.
Eigen::VectorXd representation(const ClassifierParams& params, std::span<const int> token_ids);

/// Mean over the six outputs of the binary cross entropy, probabilities
/// clamped to [1e-12, 1 - 1e-12].
double bce_loss(const Probabilities& probs, const Labels& labels);

struct Example {
  std::vector<int> token_ids;
  Labels labels{};
};

/// Mean batch loss and its exact gradient under the given masks (one per
/// example; an empty list means inference mode). `grads` is overwritten.
double loss_and_gradients(const ClassifierParams& params, std::span<const Example> batch,
                          std::span<const DropoutMasks> masks, Tensors& grads);

/// Draws one mask per example from `rng` and backpropagates.
Tensors gradients(const ClassifierParams& params, std::span<const Example> batch, const TrainConfig& config,
                  std::mt19937_64& rng);

struct LabeledQuestion {
  std::vector<std::string> tokens;  // normalized
  std::vector<Section> sections;
};

Labels labels_of(const std::vector<Section>& sections);

struct TrainResult {
  ClassifierParams params;
  std::vector<double> epoch_losses;
};

/// Adam over shuffled minibatches for `config.epochs` epochs. Deterministic
/// given `config.seed`. Throws EmptyCorpus.
TrainResult train(const std::vector<LabeledQuestion>& corpus, const TrainConfig& config);

struct SectionPrediction {
  Probabilities probabilities{};
  std::vector<Section> predicted;  // ascending section order
};

/// Sections with p >= threshold; the argmax section when none reaches it.
SectionPrediction decide_sections(const Probabilities& probs, double threshold = 0.5);

SectionPrediction predict_sections(const ClassifierParams& params, const std::vector<std::string>& tokens,
                                   double threshold = 0.5, std::size_t max_length = 64);

// Checkpoints: "MEQACLF\0", format version, dimensions, vocabulary, then
// every tensor as little-endian IEEE-754 doubles.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void save_checkpoint(const ClassifierParams& params, const std::string& path);
ClassifierParams load_checkpoint(const std::string& path);
std::string serialize_checkpoint(const ClassifierParams& params);
ClassifierParams deserialize_checkpoint(const std::string& bytes);

}  // namespace meqa::clf
