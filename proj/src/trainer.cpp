#include "bayaaz/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "bayaaz/error.hpp"

namespace bayaaz {

namespace {

// Windows per partial sum. Fixed so the reduction order never depends on the
// thread count.
constexpr std::size_t kChunk = 8;

void add_into(Gradients& acc, const Gradients& g) {
  auto dst = acc.tensors();
  const auto src = g.tensors();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    auto d = dst[i]->data();
    const auto s = src[i]->data();
    for (std::size_t k = 0; k < d.size(); ++k) d[k] += s[k];
  }
}

void scale(Gradients& g, double factor) {
  for (Tensor* t : g.tensors()) {
    for (double& v : t->data()) v *= factor;
  }
}

class Optimizer {
 public:
  Optimizer(const TrainConfig& config, const ModelConfig& model)
      : config_(config) {
    if (config.optimizer == OptimizerKind::adam) {
      m_ = ModelParams::zeros(model);
      v_ = ModelParams::zeros(model);
    }
  }

  void step(ModelParams& params, const Gradients& grads) {
    auto p = params.tensors();
    const auto g = grads.tensors();
    if (config_.optimizer == OptimizerKind::sgd) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        auto pd = p[i]->data();
        const auto gd = g[i]->data();
        for (std::size_t k = 0; k < pd.size(); ++k) pd[k] -= config_.learning_rate * gd[k];
      }
      return;
    }
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    ++t_;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    auto m = m_.tensors();
    auto v = v_.tensors();
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto pd = p[i]->data();
      auto md = m[i]->data();
      auto vd = v[i]->data();
      const auto gd = g[i]->data();
      for (std::size_t k = 0; k < pd.size(); ++k) {
        md[k] = beta1 * md[k] + (1.0 - beta1) * gd[k];
        vd[k] = beta2 * vd[k] + (1.0 - beta2) * gd[k] * gd[k];
        pd[k] -= config_.learning_rate * (md[k] / c1) / (std::sqrt(vd[k] / c2) + eps);
      }
    }
  }

 private:
  TrainConfig config_;
  ModelParams m_;
  ModelParams v_;
  std::uint64_t t_ = 0;
};

std::vector<double> start_distribution_of(const SampleSet& samples, const CharVocab& vocab) {
  std::vector<double> dist(vocab.size(), 0.0);
  double total = 0.0;
  for (const auto& s : samples.samples) {
    const auto ids = vocab.encode(s);
    if (ids.empty()) continue;
    dist[static_cast<std::size_t>(ids.front())] += 1.0;
    total += 1.0;
  }
  if (total == 0.0) {
    for (std::size_t i = 2; i < dist.size(); ++i) dist[i] = 1.0;
    total = static_cast<double>(dist.size() - 2);
  }
  for (double& d : dist) d /= total;
  return dist;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(split > 0.0 && split < 1.0)) {
    throw Error(ErrorKind::config, "train split must lie strictly between 0 and 1");
  }
  if (epochs == 0 || batch_size == 0 || window_stride == 0 || threads == 0) {
    throw Error(ErrorKind::config, "epochs, batch size, stride and threads must be positive");
  }
  if (!(learning_rate > 0.0) || !(grad_clip > 0.0)) {
    throw Error(ErrorKind::config, "learning rate and gradient clip must be positive");
  }
}

WindowSet make_windows(const SampleSet& samples, const CharVocab& vocab,
                       std::size_t seq_len, std::size_t stride) {
  if (stride == 0) throw Error(ErrorKind::config, "window stride must be at least 1");
  if (seq_len == 0) throw Error(ErrorKind::config, "sequence length must be at least 1");
  WindowSet out;
  for (const auto& sample : samples.samples) {
    std::vector<int> tokens = vocab.encode(sample);
    tokens.push_back(CharVocab::kEnd);
    const std::size_t n = tokens.size();
    if (n < 2) {
      ++out.skipped_samples;
      continue;
    }
    if (n > seq_len) {
      for (std::size_t i = 0; i + seq_len < n; i += stride) {
        out.windows.push_back(
            {std::vector<int>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                              tokens.begin() + static_cast<std::ptrdiff_t>(i + seq_len)),
             tokens[i + seq_len]});
      }
    } else {
      for (std::size_t k = 1; k < n; k += stride) {
        out.windows.push_back(
            {std::vector<int>(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(k)),
             tokens[k]});
      }
    }
  }
  return out;
}

DataSplit split_windows(std::vector<Window> windows, double split, std::uint64_t seed) {
  if (windows.size() < 2) {
    throw Error(ErrorKind::insufficient_data,
                "need at least 2 windows for a train/validation split, got " +
                    std::to_string(windows.size()));
  }
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so the order is portable.
  for (std::size_t i = windows.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(windows[i], windows[j]);
  }
  const auto n = windows.size();
  auto cut = static_cast<std::size_t>(std::llround(split * static_cast<double>(n)));
  cut = std::clamp<std::size_t>(cut, 1, n - 1);
  DataSplit out;
  out.train.assign(std::make_move_iterator(windows.begin()),
                   std::make_move_iterator(windows.begin() + static_cast<std::ptrdiff_t>(cut)));
  out.validation.assign(std::make_move_iterator(windows.begin() + static_cast<std::ptrdiff_t>(cut)),
                        std::make_move_iterator(windows.end()));
  return out;
}

double global_norm(const Gradients& grads) {
  double sq = 0.0;
  for (const Tensor* t : grads.tensors()) {
    for (double v : t->data()) sq += v * v;
  }
  return std::sqrt(sq);
}

double clip_gradients(Gradients& grads, double max_norm) {
  const double norm = global_norm(grads);
  if (norm > max_norm) scale(grads, max_norm / norm);
  return norm;
}

double batch_gradients(const ModelParams& params, std::span<const Window> batch,
                       Gradients& out, std::size_t threads) {
  out = ModelParams::zeros(params.config);
  if (batch.empty()) return 0.0;
  const std::size_t chunks = (batch.size() + kChunk - 1) / kChunk;
  std::vector<Gradients> partial(chunks);
  std::vector<double> partial_loss(chunks, 0.0);

  auto run_chunk = [&](std::size_t c) {
    Gradients acc = ModelParams::zeros(params.config);
    double loss = 0.0;
    const std::size_t end = std::min(batch.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const auto fwd = forward(params, batch[i].context);
      loss += cross_entropy(fwd.probabilities, batch[i].target);
      add_into(acc, backward(fwd.cache, batch[i].target, params));
    }
    partial[c] = std::move(acc);
    partial_loss[c] = loss;
  };

  const std::size_t workers = std::min(threads, chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < chunks; c += workers) run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }

  double loss = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    add_into(out, partial[c]);
    loss += partial_loss[c];
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  scale(out, inv);
  return loss * inv;
}

double mean_loss(const ModelParams& params, std::span<const Window> windows) {
  if (windows.empty()) return 0.0;
  double loss = 0.0;
  for (const auto& w : windows) loss += cross_entropy(predict(params, w.context), w.target);
  return loss / static_cast<double>(windows.size());
}

std::optional<std::size_t> find_overfit_epoch(const std::vector<EpochLoss>& epochs) {
  for (std::size_t e = 1; e < epochs.size(); ++e) {
    if (epochs[e].val_loss > epochs[e - 1].val_loss &&
        epochs[e].train_loss < epochs[e - 1].train_loss) {
      return e + 1;
    }
  }
  return std::nullopt;
}

Checkpoint train(const SampleSet& samples, const TrainConfig& config,
                 ModelConfig model_config, const EpochCallback& on_epoch) {
  return train(samples, build_vocab(samples), config, model_config, on_epoch);
}

Checkpoint train(const SampleSet& samples, const CharVocab& vocab, const TrainConfig& config,
                 ModelConfig model_config, const EpochCallback& on_epoch) {
  config.validate();
  model_config.vocab_size = vocab.size();
  model_config.validate();

  WindowSet windows = make_windows(samples, vocab, model_config.seq_len, config.window_stride);
  DataSplit data = split_windows(std::move(windows.windows), config.split, config.seed);

  Checkpoint ck;
  ck.config = model_config;
  ck.train_config = config;
  ck.vocab = vocab;
  ck.params = ModelParams::initialize(model_config, config.seed);
  ck.start_distribution = start_distribution_of(samples, vocab);

  Optimizer optimizer(config, model_config);
  Gradients grads;
  const std::span<const Window> train_set(data.train);
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < train_set.size(); start += config.batch_size) {
      const auto batch =
          train_set.subspan(start, std::min(config.batch_size, train_set.size() - start));
      const double loss = batch_gradients(ck.params, batch, grads, config.threads);
      loss_sum += loss * static_cast<double>(batch.size());
      clip_gradients(grads, config.grad_clip);
      optimizer.step(ck.params, grads);
    }
    EpochLoss entry;
    entry.train_loss = loss_sum / static_cast<double>(train_set.size());
    entry.val_loss = mean_loss(ck.params, data.validation);
    ck.history.epochs.push_back(entry);
    if (on_epoch) on_epoch({epoch, entry});
  }
  ck.history.overfit_epoch = find_overfit_epoch(ck.history.epochs);
  if (!ck.params.all_finite()) {
    throw Error(ErrorKind::consistency, "training diverged to non-finite parameters");
  }
  return ck;
}

}  // namespace bayaaz
