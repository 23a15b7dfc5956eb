#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bayaaz {

enum class Script { devanagari, perso_arabic, roman };

// Wire/CLI names: "devanagari", "urdu", "roman".
std::string_view script_name(Script script);
std::optional<Script> parse_script(std::string_view name);

enum class DatasetMode { misra, sher, ghazal };

std::string_view mode_name(DatasetMode mode);
std::optional<DatasetMode> parse_mode(std::string_view name);

struct SourceText {
  std::string name;
  std::string text;
};

struct RawCorpus {
  std::vector<SourceText> files;
  Script script = Script::devanagari;
};

// Half-open [begin, end) range of line indices belonging to one ghazal.
struct GhazalBounds {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const GhazalBounds&, const GhazalBounds&) = default;
};

struct CleanCorpus {
  std::vector<std::string> lines;
  std::vector<GhazalBounds> ghazal_bounds;
  Script script = Script::devanagari;
};

struct CleaningReport {
  std::size_t lines_before = 0;
  std::size_t removed_english = 0;
  std::size_t removed_empty = 0;
  std::size_t removed_marker = 0;
  std::size_t removed_other = 0;
  std::size_t lines_after = 0;
  std::size_t ghazal_count = 0;
  std::size_t sher_count = 0;

  // key = value lines, one per field.
  std::string to_text() const;
};

struct SampleSet {
  DatasetMode mode = DatasetMode::misra;
  std::vector<std::string> samples;
  Script script = Script::devanagari;
  // Odd trailing lines left out of sher samples.
  std::size_t dropped_lines = 0;
};

// Token ids: PAD is 0, END is 1, codepoints follow in first-occurrence order.
class CharVocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kEnd = 1;

  CharVocab() = default;
  // `codepoints` are the real tokens (ids 2..); duplicates are rejected.
  explicit CharVocab(std::vector<char32_t> codepoints);

  std::size_t size() const { return codepoints_.size() + 2; }
  const std::vector<char32_t>& codepoints() const { return codepoints_; }

  bool contains(char32_t cp) const { return index_.contains(cp); }
  std::optional<int> find(char32_t cp) const;
  // Throws Error{vocab} naming the first unknown character.
  int id_of(char32_t cp) const;
  // Throws Error{vocab} for PAD/END/out-of-range ids.
  char32_t codepoint_of(int id) const;

  std::vector<int> encode(std::string_view utf8) const;
  // PAD and END are skipped.
  std::string decode(std::span<const int> ids) const;

  friend bool operator==(const CharVocab& a, const CharVocab& b) {
    return a.codepoints_ == b.codepoints_;
  }

 private:
  std::vector<char32_t> codepoints_;
  std::unordered_map<char32_t, int> index_;
};

RawCorpus ingest_raw(std::span<const std::filesystem::path> paths, Script script);

// Cleans line by line: NFC, trim, then classify. Blank lines and "===="
// lines end the current ghazal; "#" lines are comments.
std::pair<CleanCorpus, CleaningReport> clean(const RawCorpus& raw);

// Renders a clean corpus back into the raw file format ("====" between
// ghazals).
std::string to_raw_text(const CleanCorpus& corpus);

SampleSet split(const CleanCorpus& corpus, DatasetMode mode);

CharVocab build_vocab(const SampleSet& samples);

}  // namespace bayaaz
