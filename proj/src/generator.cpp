#include "bayaaz/generator.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "bayaaz/error.hpp"
#include "bayaaz/unicode.hpp"

namespace bayaaz {

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::vector<double> temper(std::span<const double> probabilities, double temperature) {
  if (!(temperature >= 0.0 && temperature <= kMaxTemperature)) {
    throw Error(ErrorKind::config, "temperature must lie in [0, 2]");
  }
  std::vector<double> q(probabilities.size(), 0.0);
  if (probabilities.empty()) return q;
  if (temperature == 0.0) {
    q[argmax(probabilities)] = 1.0;
    return q;
  }
  double max_log = -INFINITY;
  for (double p : probabilities) {
    if (p > 0.0) max_log = std::max(max_log, std::log(p) / temperature);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (probabilities[i] > 0.0) {
      q[i] = std::exp(std::log(probabilities[i]) / temperature - max_log);
      sum += q[i];
    }
  }
  for (double& v : q) v /= sum;
  return q;
}

double entropy(std::span<const double> distribution) {
  double h = 0.0;
  for (double p : distribution) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t draw_index(std::span<const double> distribution, std::mt19937_64& rng) {
  double r = unit_draw(rng);
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < distribution.size(); ++i) {
    if (distribution[i] <= 0.0) continue;
    last_positive = i;
    r -= distribution[i];
    if (r < 0.0) return i;
  }
  return last_positive;
}

std::vector<double> next_distribution(const Checkpoint& ck, std::span<const int> context) {
  if (context.empty()) {
    if (ck.start_distribution.size() == ck.vocab.size()) return ck.start_distribution;
    std::vector<double> uniform(ck.vocab.size(), 0.0);
    for (std::size_t i = 2; i < uniform.size(); ++i) {
      uniform[i] = 1.0 / static_cast<double>(uniform.size() - 2);
    }
    return uniform;
  }
  const std::size_t keep = std::min(context.size(), ck.config.seq_len);
  return predict(ck.params, context.subspan(context.size() - keep));
}

namespace {

int choose_token(std::vector<double> p, double temperature, std::mt19937_64& rng) {
  p[CharVocab::kPad] = 0.0;
  const std::vector<double> q = temper(p, temperature);
  return static_cast<int>(temperature == 0.0 ? argmax(q) : draw_index(q, rng));
}

}  // namespace

int sample_next(const Checkpoint& ck, std::span<const int> context, double temperature,
                std::mt19937_64& rng) {
  return choose_token(next_distribution(ck, context), temperature, rng);
}

GenerationResult generate(const Checkpoint& ck, const GenerationRequest& request) {
  if (!(request.temperature >= 0.0 && request.temperature <= kMaxTemperature)) {
    throw Error(ErrorKind::config, "temperature must lie in [0, 2]");
  }
  std::vector<int> tokens;
  if (request.prefix) tokens = ck.vocab.encode(*request.prefix);
  std::mt19937_64 rng(request.seed);

  GenerationResult result;
  for (std::size_t step = 0; step < request.length; ++step) {
    std::vector<double> dist = next_distribution(ck, tokens);
    const int id = choose_token(dist, request.temperature, rng);
    if (id == CharVocab::kEnd) {
      result.ended = true;
      break;
    }
    result.token_logprobs.push_back(std::log(dist[static_cast<std::size_t>(id)]));
    tokens.push_back(id);
  }
  result.text = ck.vocab.decode(tokens);
  return result;
}

namespace {

struct Hypothesis {
  double score = 0.0;
  std::vector<int> chars;
  bool complete = false;
};

struct WorseFirst {
  bool operator()(const Hypothesis& a, const Hypothesis& b) const {
    if (a.score != b.score) return a.score < b.score;
    if (a.complete != b.complete) return !a.complete;
    return a.chars > b.chars;
  }
};

}  // namespace

std::vector<WordChoice> top_n_words(const Checkpoint& ck, std::string_view context,
                                    std::size_t n, const WordSearchOptions& options) {
  std::vector<WordChoice> out;
  if (n == 0) return out;
  const std::vector<int> base = ck.vocab.encode(context);

  std::vector<bool> boundary(ck.vocab.size(), false);
  boundary[CharVocab::kEnd] = true;
  for (char32_t cp : {U' ', U'\n'}) {
    if (auto id = ck.vocab.find(cp)) boundary[static_cast<std::size_t>(*id)] = true;
  }

  std::priority_queue<Hypothesis, std::vector<Hypothesis>, WorseFirst> frontier;
  frontier.push({});
  std::set<std::vector<int>> emitted;
  std::size_t expansions = 0;
  std::vector<int> buffer;

  while (!frontier.empty() && out.size() < n) {
    Hypothesis top = frontier.top();
    frontier.pop();
    if (top.complete) {
      if (emitted.insert(top.chars).second) {
        out.push_back({ck.vocab.decode(top.chars), top.score});
      }
      continue;
    }
    if (expansions >= options.max_expansions) break;
    ++expansions;

    buffer = base;
    buffer.insert(buffer.end(), top.chars.begin(), top.chars.end());
    const std::vector<double> p = next_distribution(ck, buffer);
    for (std::size_t id = 1; id < p.size(); ++id) {
      if (p[id] <= 0.0) continue;
      const double score = top.score + std::log(p[id]);
      if (boundary[id]) {
        if (!top.chars.empty()) frontier.push({score, top.chars, true});
      } else if (top.chars.size() < options.max_word_length) {
        Hypothesis next{score, top.chars, false};
        next.chars.push_back(static_cast<int>(id));
        frontier.push(std::move(next));
      }
    }
  }
  return out;
}

std::string format_choices(const std::vector<WordChoice>& choices) {
  std::string out = "Choose next word:\n";
  for (std::size_t i = 0; i < choices.size(); ++i) {
    out += std::to_string(i + 1) + ". " + choices[i].word + "\n";
  }
  return out;
}

}  // namespace bayaaz
