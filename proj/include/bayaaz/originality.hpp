#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bayaaz/corpus.hpp"

namespace bayaaz {

struct LineLocation {
  std::size_t ghazal = 0;
  std::size_t line = 0;  // index into CleanCorpus::lines

  friend auto operator<=>(const LineLocation&, const LineLocation&) = default;
};

// Punctuation becomes a space, combining marks are dropped, whitespace is
// collapsed and trimmed. Base letters are kept.
std::string normalize_for_match(std::string_view line);

// Longest run of consecutive equal words shared by `a` and `b`.
std::size_t longest_common_word_run(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b);

class LineIndex {
 public:
  static constexpr std::size_t kGram = 3;

  explicit LineIndex(const CleanCorpus& corpus);

  std::size_t line_count() const { return lines_.size(); }
  std::size_t key_count() const { return by_key_.size(); }
  const std::vector<LineLocation>* find(const std::string& normalized) const;
  const std::string& line(std::size_t i) const { return lines_[i]; }
  const std::string& key(std::size_t i) const { return keys_[i]; }
  const std::vector<std::string>& words(std::size_t i) const { return words_[i]; }
  const std::vector<LineLocation>& locations() const { return locations_; }

  // Lines sharing at least one run of `run` words (1 or kGram) with `words`.
  std::vector<std::size_t> candidates(const std::vector<std::string>& words,
                                      std::size_t run) const;

 private:
  std::vector<std::string> lines_;
  std::vector<std::string> keys_;
  std::vector<std::vector<std::string>> words_;
  std::vector<LineLocation> locations_;
  std::map<std::string, std::vector<LineLocation>> by_key_;
  std::map<std::string, std::vector<std::size_t>> unigrams_;
  std::map<std::string, std::vector<std::size_t>> trigrams_;
};

// Throws Error{empty_input} for an empty corpus.
LineIndex build_index(const CleanCorpus& corpus);

struct ExactMatch {
  std::string query;
  std::vector<LineLocation> locations;
};

struct PartialMatch {
  std::string query;
  std::string corpus_line;
  LineLocation location;
  std::size_t run_length = 0;
};

struct PlagiarismReport {
  std::vector<ExactMatch> exact_matches;
  std::vector<PartialMatch> partial_matches;
  bool clean = true;

  std::string to_text(const LineIndex& index) const;
};

// Every non-blank line of `text` is a query. Corpus lines that are exact
// matches of a query are not repeated as partial matches of it.
PlagiarismReport check(std::string_view text, const LineIndex& index, std::size_t min_run = 3);

}  // namespace bayaaz
