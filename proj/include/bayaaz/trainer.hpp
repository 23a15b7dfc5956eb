#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "bayaaz/corpus.hpp"
#include "bayaaz/neuralnet.hpp"

namespace bayaaz {

enum class OptimizerKind { sgd, adam };

struct TrainConfig {
  std::size_t epochs = 100;
  double split = 0.80;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double grad_clip = 5.0;
  std::size_t window_stride = 1;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::sgd;
  // Worker threads for minibatch gradients. Results do not depend on it.
  std::size_t threads = 1;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochLoss {
  double train_loss = 0.0;
  double val_loss = 0.0;

  friend bool operator==(const EpochLoss&, const EpochLoss&) = default;
};

struct TrainHistory {
  std::vector<EpochLoss> epochs;
  // 1-based epoch where val loss rose while train loss fell, if any.
  std::optional<std::size_t> overfit_epoch;

  friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  TrainConfig train_config;
  CharVocab vocab;
  ModelParams params;
  TrainHistory history;
  // Token-id distribution of sample-initial tokens; used when generation
  // starts without a prefix. Length = vocab size.
  std::vector<double> start_distribution;
  std::uint32_t format_version = kCheckpointVersion;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct Window {
  std::vector<int> context;
  int target = 0;

  friend bool operator==(const Window&, const Window&) = default;
};

struct WindowSet {
  std::vector<Window> windows;
  std::size_t skipped_samples = 0;
};

// Each sample is encoded with END appended. A sample of n tokens yields
// full windows (tokens[i, i+seq_len), tokens[i+seq_len]) when n > seq_len,
// and growing prefixes (tokens[0, k), tokens[k]) otherwise. Samples under
// two tokens are skipped.
WindowSet make_windows(const SampleSet& samples, const CharVocab& vocab,
                       std::size_t seq_len, std::size_t stride);

struct DataSplit {
  std::vector<Window> train;
  std::vector<Window> validation;
};

// Shuffles once with `seed`, then cuts at round(split * n), keeping at least
// one window on each side.
DataSplit split_windows(std::vector<Window> windows, double split, std::uint64_t seed);

// Rescales `grads` in place so its global L2 norm is at most `max_norm`.
// Returns the norm before clipping.
double clip_gradients(Gradients& grads, double max_norm);

double global_norm(const Gradients& grads);

// Mean loss and mean gradient over `batch`, reduced in window order.
double batch_gradients(const ModelParams& params, std::span<const Window> batch,
                       Gradients& out, std::size_t threads);

double mean_loss(const ModelParams& params, std::span<const Window> windows);

std::optional<std::size_t> find_overfit_epoch(const std::vector<EpochLoss>& epochs);

struct EpochReport {
  std::size_t epoch = 0;
  EpochLoss loss;
};

using EpochCallback = std::function<void(const EpochReport&)>;

Checkpoint train(const SampleSet& samples, const TrainConfig& config,
                 ModelConfig model_config, const EpochCallback& on_epoch = {});

// Same as train() but with an explicit vocabulary (e.g. shared across modes).
Checkpoint train(const SampleSet& samples, const CharVocab& vocab, const TrainConfig& config,
                 ModelConfig model_config, const EpochCallback& on_epoch = {});

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// In-memory forms of the same file format.
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::string_view bytes);

}  // namespace bayaaz
