#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bayaaz/tensor.hpp"

namespace bayaaz {

struct ModelConfig {
  std::size_t seq_len = 40;
  std::size_t embed_dim = 100;
  std::size_t lstm_units = 128;
  std::size_t lstm_layers = 3;
  std::size_t vocab_size = 0;

  // Throws Error{shape} when a dimension is zero or vocab_size < 3.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Gate blocks inside the 4*units columns are ordered input, forget,
// candidate, output.
struct LstmLayer {
  Tensor w_input;      // [in x 4u]
  Tensor w_recurrent;  // [u x 4u]
  Tensor bias;         // [4u]

  friend bool operator==(const LstmLayer&, const LstmLayer&) = default;
};

struct ModelParams {
  ModelConfig config;
  Tensor embedding;  // [vocab x embed]
  std::vector<LstmLayer> layers;
  Tensor attention;  // [u]
  Tensor w_out;      // [u x vocab]
  Tensor b_out;      // [vocab]

  static ModelParams zeros(const ModelConfig& config);
  // Uniform(-s, s) with s = 1/sqrt(rows) per matrix, zero biases except the
  // forget gate (1.0).
  static ModelParams initialize(const ModelConfig& config, std::uint64_t seed);

  // Fixed order: embedding, then per layer (w_input, w_recurrent, bias),
  // attention, w_out, b_out. Checkpoints and optimizers rely on it.
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;

  std::size_t parameter_count() const;
  bool all_finite() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

using Gradients = ModelParams;

struct GateRecord {
  std::vector<double> input;
  std::vector<double> forget;
  std::vector<double> candidate;
  std::vector<double> output;
};

struct CellStep {
  std::vector<double> h;
  std::vector<double> c;
  std::vector<double> tanh_c;
  GateRecord gates;
};

CellStep lstm_cell_forward(std::span<const double> x, std::span<const double> h_prev,
                           std::span<const double> c_prev, const LstmLayer& layer);

struct LayerTrace {
  std::vector<std::vector<double>> inputs;
  std::vector<CellStep> steps;
};

struct ForwardCache {
  std::vector<int> context;
  std::vector<LayerTrace> layers;
  std::vector<double> attention_scores;
  std::vector<double> attention_weights;
  std::vector<double> pooled;
  std::vector<double> logits;
  std::vector<double> probabilities;
};

struct ForwardResult {
  std::vector<double> probabilities;
  ForwardCache cache;
};

std::vector<double> softmax(std::span<const double> logits);

// Context length must be in [1, seq_len]; ids must be < vocab_size.
ForwardResult forward(const ModelParams& params, std::span<const int> context);

// Probabilities only, without keeping the cache alive.
std::vector<double> predict(const ModelParams& params, std::span<const int> context);

double cross_entropy(std::span<const double> probabilities, int target);

Gradients backward(const ForwardCache& cache, int target, const ModelParams& params);

// Gradient of the loss with respect to the logits: p - onehot(target).
std::vector<double> logit_gradient(std::span<const double> probabilities, int target);

}  // namespace bayaaz
