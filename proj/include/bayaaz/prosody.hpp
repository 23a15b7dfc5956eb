#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bayaaz {

enum class Weight : char { S = 'S', L = 'L' };
using WeightSeq = std::vector<Weight>;

// "LSLL..." with no separators.
std::string to_string(const WeightSeq& weights);
// Accepts S/L, ignores spaces. Throws Error{format} on anything else.
WeightSeq parse_weights(std::string_view text);

struct MeterPattern {
  std::string name;
  std::string mnemonic;
  WeightSeq weights;
  std::vector<std::size_t> flex;

  bool matches(const WeightSeq& line) const;
};

class MeterCatalog {
 public:
  // Tab-separated: name, mnemonic, weights, flex ("-" or comma list).
  // Throws Error{format} on malformed lines, Error{consistency} on duplicate
  // names or out-of-range flex indices.
  static MeterCatalog parse(std::string_view text);
  static MeterCatalog load(const std::filesystem::path& path);
  static const MeterCatalog& builtin();

  const std::vector<MeterPattern>& patterns() const { return patterns_; }
  const MeterPattern* find(std::string_view name) const;

 private:
  std::vector<MeterPattern> patterns_;
};

// Scans a Devanagari line into syllable weights. Inherent vowels are dropped
// word-finally and in VC_CV position; a short vowel in an open syllable is S,
// a long vowel or a closed syllable is L; "-ए-" izafat is S.
// Throws Error{scansion} when the line has no vowel, or contains letters of
// another script.
WeightSeq syllabify(std::string_view line);

std::vector<MeterPattern> match_meter(const WeightSeq& weights,
                                      const MeterCatalog& catalog = MeterCatalog::builtin());

struct Verse {
  std::string misra1;
  std::string misra2;
};

struct GhazalStructure {
  std::vector<Verse> verses;
  std::string radif;
  std::optional<std::string> qaafiya;
  bool matla_ok = false;
};

// Words of a misra with surrounding punctuation removed.
std::vector<std::string> misra_words(std::string_view misra);

// Consecutive lines paired into verses; a trailing odd line is dropped.
std::vector<Verse> pair_verses(const std::vector<std::string>& lines);

// Longest common word suffix of every second misra. Throws Error{structure}
// for fewer than two verses.
std::string detect_radif(const std::vector<Verse>& verses);

// Longest common character suffix of the words just before the radif (the
// final words when the radif is empty). Devanagari independent vowels are
// compared as matras. nullopt when the suffix is empty.
std::optional<std::string> detect_qaafiya(const std::vector<Verse>& verses,
                                          std::string_view radif);

// Radif, qaafiya, and whether the first misra of the opening verse also ends
// in qaafiya + radif.
GhazalStructure analyze_ghazal(const std::vector<Verse>& verses);

}  // namespace bayaaz
