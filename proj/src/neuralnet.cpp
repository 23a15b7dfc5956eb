#include "bayaaz/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bayaaz/error.hpp"

namespace bayaaz {

namespace {

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::size_t layer_input_dim(const ModelConfig& config, std::size_t layer) {
  return layer == 0 ? config.embed_dim : config.lstm_units;
}

void fill_uniform(Tensor& t, double scale, std::mt19937_64& rng) {
  // 53-bit mantissa draw; avoids implementation-defined distributions.
  for (double& v : t.data()) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = (2.0 * u - 1.0) * scale;
  }
}

void check_same_shapes(const ModelParams& params, const ForwardCache& cache) {
  const auto& cfg = params.config;
  if (cache.layers.size() != params.layers.size() ||
      cache.probabilities.size() != cfg.vocab_size ||
      cache.pooled.size() != cfg.lstm_units ||
      cache.attention_weights.size() != cache.context.size()) {
    throw Error(ErrorKind::consistency,
                "forward cache was not produced by parameters of this shape");
  }
  for (const auto& layer : cache.layers) {
    if (layer.steps.size() != cache.context.size()) {
      throw Error(ErrorKind::consistency, "forward cache has ragged timesteps");
    }
    for (const auto& step : layer.steps) {
      if (step.h.size() != cfg.lstm_units) {
        throw Error(ErrorKind::consistency, "forward cache state width mismatch");
      }
    }
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (seq_len == 0 || embed_dim == 0 || lstm_units == 0 || lstm_layers == 0) {
    throw Error(ErrorKind::shape, "model dimensions must all be positive");
  }
  if (vocab_size < 3) {
    throw Error(ErrorKind::shape, "vocabulary must hold PAD, END and at least one token");
  }
}

ModelParams ModelParams::zeros(const ModelConfig& config) {
  config.validate();
  const std::size_t u = config.lstm_units;
  ModelParams p;
  p.config = config;
  p.embedding = Tensor({config.vocab_size, config.embed_dim});
  for (std::size_t l = 0; l < config.lstm_layers; ++l) {
    p.layers.push_back({Tensor({layer_input_dim(config, l), 4 * u}),
                        Tensor({u, 4 * u}), Tensor({4 * u})});
  }
  p.attention = Tensor({u});
  p.w_out = Tensor({u, config.vocab_size});
  p.b_out = Tensor({config.vocab_size});
  return p;
}

ModelParams ModelParams::initialize(const ModelConfig& config, std::uint64_t seed) {
  ModelParams p = zeros(config);
  std::mt19937_64 rng(seed);
  const std::size_t u = config.lstm_units;
  fill_uniform(p.embedding, 1.0 / std::sqrt(static_cast<double>(config.vocab_size)), rng);
  for (auto& layer : p.layers) {
    fill_uniform(layer.w_input, 1.0 / std::sqrt(static_cast<double>(layer.w_input.rows())),
                 rng);
    fill_uniform(layer.w_recurrent, 1.0 / std::sqrt(static_cast<double>(u)), rng);
    for (std::size_t k = 0; k < u; ++k) layer.bias[u + k] = 1.0;
  }
  fill_uniform(p.attention, 1.0 / std::sqrt(static_cast<double>(u)), rng);
  fill_uniform(p.w_out, 1.0 / std::sqrt(static_cast<double>(u)), rng);
  return p;
}

std::vector<Tensor*> ModelParams::tensors() {
  std::vector<Tensor*> out{&embedding};
  for (auto& layer : layers) {
    out.push_back(&layer.w_input);
    out.push_back(&layer.w_recurrent);
    out.push_back(&layer.bias);
  }
  out.push_back(&attention);
  out.push_back(&w_out);
  out.push_back(&b_out);
  return out;
}

std::vector<const Tensor*> ModelParams::tensors() const {
  std::vector<const Tensor*> out;
  for (Tensor* t : const_cast<ModelParams*>(this)->tensors()) out.push_back(t);
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor* t : tensors()) n += t->size();
  return n;
}

bool ModelParams::all_finite() const {
  const auto all = tensors();
  return std::all_of(all.begin(), all.end(),
                     [](const Tensor* t) { return t->all_finite(); });
}

CellStep lstm_cell_forward(std::span<const double> x, std::span<const double> h_prev,
                           std::span<const double> c_prev, const LstmLayer& layer) {
  const std::size_t u = layer.w_recurrent.rows();
  const std::size_t width = 4 * u;
  if (x.size() != layer.w_input.rows() || h_prev.size() != u || c_prev.size() != u ||
      layer.w_input.cols() != width || layer.w_recurrent.cols() != width ||
      layer.bias.size() != width) {
    throw Error(ErrorKind::shape, "LSTM cell input of width " + std::to_string(x.size()) +
                                      " does not match layer parameters");
  }

  std::vector<double> z(layer.bias.data().begin(), layer.bias.data().end());
  for (std::size_t r = 0; r < x.size(); ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    const auto w = layer.w_input.row(r);
    for (std::size_t c = 0; c < width; ++c) z[c] += xr * w[c];
  }
  for (std::size_t r = 0; r < u; ++r) {
    const double hr = h_prev[r];
    if (hr == 0.0) continue;
    const auto w = layer.w_recurrent.row(r);
    for (std::size_t c = 0; c < width; ++c) z[c] += hr * w[c];
  }

  CellStep step;
  step.h.resize(u);
  step.c.resize(u);
  step.tanh_c.resize(u);
  auto& g = step.gates;
  g.input.resize(u);
  g.forget.resize(u);
  g.candidate.resize(u);
  g.output.resize(u);
  for (std::size_t k = 0; k < u; ++k) {
    g.input[k] = logistic(z[k]);
    g.forget[k] = logistic(z[u + k]);
    g.candidate[k] = std::tanh(z[2 * u + k]);
    g.output[k] = logistic(z[3 * u + k]);
    step.c[k] = g.forget[k] * c_prev[k] + g.input[k] * g.candidate[k];
    step.tanh_c[k] = std::tanh(step.c[k]);
    step.h[k] = g.output[k] * step.tanh_c[k];
  }
  return step;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

ForwardResult forward(const ModelParams& params, std::span<const int> context) {
  const auto& cfg = params.config;
  const std::size_t steps = context.size();
  if (steps == 0 || steps > cfg.seq_len) {
    throw Error(ErrorKind::length, "context length " + std::to_string(steps) +
                                       " outside [1, " + std::to_string(cfg.seq_len) + "]");
  }
  for (int id : context) {
    if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size) {
      throw Error(ErrorKind::vocab, "token id " + std::to_string(id) +
                                        " outside vocabulary of size " +
                                        std::to_string(cfg.vocab_size));
    }
  }

  const std::size_t u = cfg.lstm_units;
  ForwardCache cache;
  cache.context.assign(context.begin(), context.end());
  cache.layers.resize(params.layers.size());

  const std::vector<double> zero(u, 0.0);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    LayerTrace& trace = cache.layers[l];
    trace.inputs.reserve(steps);
    trace.steps.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      if (l == 0) {
        const auto row = params.embedding.row(static_cast<std::size_t>(context[t]));
        trace.inputs.emplace_back(row.begin(), row.end());
      } else {
        trace.inputs.push_back(cache.layers[l - 1].steps[t].h);
      }
      const auto& h_prev = t == 0 ? zero : trace.steps[t - 1].h;
      const auto& c_prev = t == 0 ? zero : trace.steps[t - 1].c;
      trace.steps.push_back(lstm_cell_forward(trace.inputs[t], h_prev, c_prev, params.layers[l]));
    }
  }

  const auto& top = cache.layers.back().steps;
  cache.attention_scores.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    double e = 0.0;
    for (std::size_t k = 0; k < u; ++k) e += params.attention[k] * top[t].h[k];
    cache.attention_scores[t] = e;
  }
  cache.attention_weights = softmax(cache.attention_scores);
  cache.pooled.assign(u, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    const double a = cache.attention_weights[t];
    for (std::size_t k = 0; k < u; ++k) cache.pooled[k] += a * top[t].h[k];
  }

  cache.logits.assign(params.b_out.data().begin(), params.b_out.data().end());
  for (std::size_t k = 0; k < u; ++k) {
    const double v = cache.pooled[k];
    const auto w = params.w_out.row(k);
    for (std::size_t j = 0; j < cfg.vocab_size; ++j) cache.logits[j] += v * w[j];
  }
  cache.probabilities = softmax(cache.logits);

  ForwardResult result;
  result.probabilities = cache.probabilities;
  result.cache = std::move(cache);
  return result;
}

std::vector<double> predict(const ModelParams& params, std::span<const int> context) {
  return std::move(forward(params, context).probabilities);
}

double cross_entropy(std::span<const double> probabilities, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= probabilities.size()) {
    throw Error(ErrorKind::vocab, "target id " + std::to_string(target) + " out of range");
  }
  return -std::log(std::max(probabilities[static_cast<std::size_t>(target)], 1e-12));
}

std::vector<double> logit_gradient(std::span<const double> probabilities, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= probabilities.size()) {
    throw Error(ErrorKind::vocab, "target id " + std::to_string(target) + " out of range");
  }
  std::vector<double> d(probabilities.begin(), probabilities.end());
  d[static_cast<std::size_t>(target)] -= 1.0;
  return d;
}

Gradients backward(const ForwardCache& cache, int target, const ModelParams& params) {
  check_same_shapes(params, cache);
  const auto& cfg = params.config;
  const std::size_t u = cfg.lstm_units;
  const std::size_t steps = cache.context.size();
  Gradients grads = ModelParams::zeros(cfg);

  // Output projection.
  const std::vector<double> dlogits = logit_gradient(cache.probabilities, target);
  std::vector<double> dpooled(u, 0.0);
  for (std::size_t k = 0; k < u; ++k) {
    const auto w = params.w_out.row(k);
    auto gw = grads.w_out.row(k);
    double acc = 0.0;
    for (std::size_t j = 0; j < cfg.vocab_size; ++j) {
      gw[j] = cache.pooled[k] * dlogits[j];
      acc += w[j] * dlogits[j];
    }
    dpooled[k] = acc;
  }
  for (std::size_t j = 0; j < cfg.vocab_size; ++j) grads.b_out[j] = dlogits[j];

  // Attention pooling: pooled = sum_t a_t h_t, a = softmax(v . h_t).
  const auto& top = cache.layers.back().steps;
  const auto& a = cache.attention_weights;
  std::vector<double> da(steps);
  double weighted = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    double s = 0.0;
    for (std::size_t k = 0; k < u; ++k) s += dpooled[k] * top[t].h[k];
    da[t] = s;
    weighted += a[t] * s;
  }
  std::vector<std::vector<double>> dh_external(steps, std::vector<double>(u, 0.0));
  for (std::size_t t = 0; t < steps; ++t) {
    const double de = a[t] * (da[t] - weighted);
    for (std::size_t k = 0; k < u; ++k) {
      grads.attention[k] += de * top[t].h[k];
      dh_external[t][k] = a[t] * dpooled[k] + de * params.attention[k];
    }
  }

  // Backpropagation through time, top layer first.
  const std::vector<double> zero(u, 0.0);
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const LstmLayer& layer = params.layers[l];
    LstmLayer& glayer = grads.layers[l];
    const LayerTrace& trace = cache.layers[l];
    const std::size_t in_dim = layer.w_input.rows();
    std::vector<std::vector<double>> dx(steps, std::vector<double>(in_dim, 0.0));
    std::vector<double> dh_next(u, 0.0);
    std::vector<double> dc_next(u, 0.0);
    std::vector<double> dz(4 * u);

    for (std::size_t t = steps; t-- > 0;) {
      const CellStep& s = trace.steps[t];
      const auto& c_prev = t == 0 ? zero : trace.steps[t - 1].c;
      const auto& h_prev = t == 0 ? zero : trace.steps[t - 1].h;
      for (std::size_t k = 0; k < u; ++k) {
        const double dh = dh_external[t][k] + dh_next[k];
        const double i = s.gates.input[k];
        const double f = s.gates.forget[k];
        const double g = s.gates.candidate[k];
        const double o = s.gates.output[k];
        const double dc = dc_next[k] + dh * o * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
        dz[k] = dc * g * i * (1.0 - i);
        dz[u + k] = dc * c_prev[k] * f * (1.0 - f);
        dz[2 * u + k] = dc * i * (1.0 - g * g);
        dz[3 * u + k] = dh * s.tanh_c[k] * o * (1.0 - o);
        dc_next[k] = dc * f;
      }
      for (std::size_t c = 0; c < 4 * u; ++c) glayer.bias[c] += dz[c];
      const auto& x = trace.inputs[t];
      for (std::size_t r = 0; r < in_dim; ++r) {
        const auto w = layer.w_input.row(r);
        auto gw = glayer.w_input.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < 4 * u; ++c) {
          gw[c] += x[r] * dz[c];
          acc += w[c] * dz[c];
        }
        dx[t][r] = acc;
      }
      for (std::size_t r = 0; r < u; ++r) {
        const auto w = layer.w_recurrent.row(r);
        auto gw = glayer.w_recurrent.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < 4 * u; ++c) {
          gw[c] += h_prev[r] * dz[c];
          acc += w[c] * dz[c];
        }
        dh_next[r] = acc;
      }
    }

    if (l == 0) {
      for (std::size_t t = 0; t < steps; ++t) {
        auto row = grads.embedding.row(static_cast<std::size_t>(cache.context[t]));
        for (std::size_t k = 0; k < in_dim; ++k) row[k] += dx[t][k];
      }
    } else {
      dh_external = std::move(dx);
    }
  }
  return grads;
}

}  // namespace bayaaz
