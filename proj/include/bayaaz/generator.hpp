#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bayaaz/corpus.hpp"
#include "bayaaz/trainer.hpp"

namespace bayaaz {

inline constexpr double kMaxTemperature = 2.0;

struct GenerationRequest {
  DatasetMode mode = DatasetMode::misra;
  std::size_t length = 300;
  // 0 selects greedy decoding.
  double temperature = 0.8;
  std::optional<std::string> prefix;
  std::uint64_t seed = 0;
};

struct GenerationResult {
  std::string text;
  // ln p of each generated token under the untempered model distribution.
  std::vector<double> token_logprobs;
  bool ended = false;
};

// Tempered distribution q ~ p^(1/T). T = 0 puts all mass on the argmax
// (lowest id on ties). Throws Error{config} for T outside [0, 2].
std::vector<double> temper(std::span<const double> probabilities, double temperature);

std::size_t argmax(std::span<const double> values);

double entropy(std::span<const double> distribution);

// Uniform draw in [0, 1) from the top 53 bits.
double unit_draw(std::mt19937_64& rng);

std::size_t draw_index(std::span<const double> distribution, std::mt19937_64& rng);

// Model distribution over the next token for `context` (last seq_len tokens
// are used). An empty context returns the checkpoint's start distribution.
std::vector<double> next_distribution(const Checkpoint& ck, std::span<const int> context);

// Samples from the tempered model distribution with PAD masked out.
int sample_next(const Checkpoint& ck, std::span<const int> context, double temperature,
                std::mt19937_64& rng);

GenerationResult generate(const Checkpoint& ck, const GenerationRequest& request);

struct WordChoice {
  std::string word;
  double score = 0.0;
};

struct WordSearchOptions {
  std::size_t max_word_length = 24;
  // Hypotheses expanded before giving up; each costs one forward pass.
  std::size_t max_expansions = 4096;
};

// Best-first search over character continuations of `context`. A hypothesis
// completes when it emits a space, newline or END after at least one
// character; its score is the summed log-probability including the boundary.
// Words come back distinct and in non-increasing score order.
std::vector<WordChoice> top_n_words(const Checkpoint& ck, std::string_view context,
                                    std::size_t n, const WordSearchOptions& options = {});

// "Choose next word:" followed by a 1-based numbered list.
std::string format_choices(const std::vector<WordChoice>& choices);

}  // namespace bayaaz
