#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace bayaaz {

struct Ambiguity {
  std::size_t position = 0;  // codepoint offset into the output text
  std::string reason;

  friend bool operator==(const Ambiguity&, const Ambiguity&) = default;
};

struct TransliterationResult {
  std::string text;
  std::vector<Ambiguity> ambiguities;
  // Input characters copied through without a rule, in order of appearance.
  std::vector<char32_t> passthrough;
  // Input codepoints consumed by a rule (including rules that emit nothing).
  std::size_t mapped = 0;
};

// Parsed form of the tab-separated mapping file (see data/transliteration.tsv).
class MappingTable {
 public:
  using Map = std::map<std::u32string, std::u32string>;

  // Throws Error{format} for malformed lines, Error{consistency} when a
  // consonant pair breaks injectivity.
  static MappingTable parse(std::string_view text);
  static MappingTable load(const std::filesystem::path& path);
  // The table compiled into the library.
  static const MappingTable& builtin();

  const Map& section(std::string_view kind) const;

  // Devanagari -> Urdu for consonants, semivowels and lossy letters.
  const Map& deva_letters() const { return deva_letters_; }
  // Urdu -> Devanagari for consonants and aliases.
  const Map& urdu_letters() const { return urdu_letters_; }
  std::size_t longest_deva_letter() const { return longest_deva_; }
  std::size_t longest_urdu_letter() const { return longest_urdu_; }

 private:
  std::map<std::string, Map, std::less<>> sections_;
  Map deva_letters_;
  Map urdu_letters_;
  std::size_t longest_deva_ = 1;
  std::size_t longest_urdu_ = 1;
};

TransliterationResult deva_to_urdu(std::string_view text,
                                   const MappingTable& table = MappingTable::builtin());
TransliterationResult urdu_to_deva(std::string_view text,
                                   const MappingTable& table = MappingTable::builtin());

// Consonant letters of a Devanagari string with vowels, matras and signs
// removed. Nasal signs and the nasal letters count as one nasal consonant.
std::u32string consonant_skeleton(std::string_view devanagari);

}  // namespace bayaaz
