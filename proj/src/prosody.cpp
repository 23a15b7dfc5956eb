#include "bayaaz/prosody.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "bayaaz/error.hpp"
#include "bayaaz/unicode.hpp"

namespace bayaaz {

namespace builtin {
std::string_view meter_catalog();
}

std::string to_string(const WeightSeq& weights) {
  std::string out;
  for (Weight w : weights) out += static_cast<char>(w);
  return out;
}

WeightSeq parse_weights(std::string_view text) {
  WeightSeq out;
  for (char c : text) {
    if (c == 'S' || c == 's') {
      out.push_back(Weight::S);
    } else if (c == 'L' || c == 'l') {
      out.push_back(Weight::L);
    } else if (c != ' ') {
      throw Error(ErrorKind::format, std::string("weight must be S or L, got '") + c + "'");
    }
  }
  return out;
}

bool MeterPattern::matches(const WeightSeq& line) const {
  if (line.size() != weights.size()) return false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] != weights[i] && std::find(flex.begin(), flex.end(), i) == flex.end()) {
      return false;
    }
  }
  return true;
}

MeterCatalog MeterCatalog::parse(std::string_view text) {
  MeterCatalog catalog;
  std::set<std::string> names;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (unicode::trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1) {
      parts.push_back(line.substr(start, tab - start));
    }
    parts.push_back(line.substr(start));
    const std::string where = "meter catalog line " + std::to_string(number);
    if (parts.size() != 4 || parts[0].empty()) {
      throw Error(ErrorKind::format, where + ": expected name<TAB>mnemonic<TAB>weights<TAB>flex");
    }
    MeterPattern p;
    p.name = parts[0];
    p.mnemonic = parts[1];
    p.weights = parse_weights(parts[2]);
    if (p.weights.empty()) throw Error(ErrorKind::format, where + ": empty weights");
    if (parts[3] != "-") {
      std::istringstream flex(parts[3]);
      std::string item;
      while (std::getline(flex, item, ',')) {
        std::size_t index = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), index);
        if (ec != std::errc() || ptr != item.data() + item.size()) {
          throw Error(ErrorKind::format, where + ": bad flex index '" + item + "'");
        }
        if (index >= p.weights.size()) {
          throw Error(ErrorKind::consistency, where + ": flex index out of range");
        }
        p.flex.push_back(index);
      }
    }
    if (!names.insert(p.name).second) {
      throw Error(ErrorKind::consistency, where + ": duplicate meter " + p.name);
    }
    catalog.patterns_.push_back(std::move(p));
  }
  return catalog;
}

MeterCatalog MeterCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const MeterCatalog& MeterCatalog::builtin() {
  static const MeterCatalog catalog = parse(builtin::meter_catalog());
  return catalog;
}

const MeterPattern* MeterCatalog::find(std::string_view name) const {
  for (const auto& p : patterns_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

namespace {

constexpr char32_t kVirama = 0x094D;
constexpr char32_t kNukta = 0x093C;
constexpr char32_t kAnusvara = 0x0902;
constexpr char32_t kChandrabindu = 0x0901;
constexpr char32_t kVisarga = 0x0903;

bool is_consonant(char32_t c) {
  return (c >= 0x0915 && c <= 0x0939) || (c >= 0x0958 && c <= 0x095F) ||
         (c >= 0x0978 && c <= 0x097F);
}
bool is_vowel(char32_t c) {
  return (c >= 0x0904 && c <= 0x0914) || c == 0x0960 || c == 0x0961;
}
bool is_matra(char32_t c) {
  return (c >= 0x093A && c <= 0x094C && c != kNukta && c != 0x093D) || c == 0x094E ||
         c == 0x094F || (c >= 0x0955 && c <= 0x0957) || c == 0x0962 || c == 0x0963;
}
bool is_short(char32_t c) {
  switch (c) {
    case U'अ': case U'इ': case U'उ': case U'ऋ': case 0x093F: case 0x0941: case 0x0943:
    case 0x0962: case 0x090C:
      return true;
    default:
      return false;
  }
}
bool is_deva_letter(char32_t c) {
  return is_consonant(c) || is_vowel(c) || is_matra(c) || c == kVirama || c == kNukta ||
         c == kAnusvara || c == kChandrabindu || c == kVisarga || c == 0x093D;
}

struct Unit {
  bool vowel = false;
  bool long_vowel = false;
  bool schwa = false;
};

std::vector<Unit> units_of(const std::u32string& w) {
  std::vector<Unit> units;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const char32_t c = w[i];
    if (is_consonant(c)) {
      units.push_back({});
      std::size_t j = i + 1;
      while (j < w.size() && w[j] == kNukta) ++j;
      if (j < w.size() && w[j] == kVirama) {
        i = j;
      } else if (j < w.size() && is_matra(w[j])) {
        units.push_back({true, !is_short(w[j]), false});
        i = j;
      } else {
        units.push_back({true, false, true});
        i = j - 1;
      }
    } else if (is_vowel(c) || is_matra(c)) {
      units.push_back({true, !is_short(c), false});
    } else if (c == kVisarga) {
      units.push_back({});
    } else if (c == kAnusvara) {
      bool letter_follows = false;
      for (std::size_t j = i + 1; j < w.size(); ++j) letter_follows |= is_consonant(w[j]);
      if (letter_follows) units.push_back({});
    }
  }

  const auto vowels = std::count_if(units.begin(), units.end(), [](const Unit& u) { return u.vowel; });
  if (vowels > 1 && units.back().schwa) units.pop_back();
  for (std::size_t k = units.size() >= 3 ? units.size() - 3 : 0; k >= 2 && k + 2 < units.size();
       --k) {
    if (units[k].schwa && !units[k - 1].vowel && units[k - 2].vowel && !units[k + 1].vowel &&
        units[k + 2].vowel) {
      units.erase(units.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }
  return units;
}

void weigh(const std::vector<Unit>& units, WeightSeq& out) {
  std::vector<std::size_t> nuclei;
  for (std::size_t k = 0; k < units.size(); ++k) {
    if (units[k].vowel) nuclei.push_back(k);
  }
  for (std::size_t v = 0; v < nuclei.size(); ++v) {
    const std::size_t end = v + 1 < nuclei.size() ? nuclei[v + 1] : units.size();
    const std::size_t consonants = end - nuclei[v] - 1;
    const bool closed = v + 1 < nuclei.size() ? consonants >= 2 : consonants >= 1;
    out.push_back(units[nuclei[v]].long_vowel || closed ? Weight::L : Weight::S);
  }
}

bool is_separator(char32_t c) {
  return unicode::is_whitespace(c) || unicode::is_punctuation(c) || c == 0x0964 ||
         c == 0x0965 || (c >= 0x0966 && c <= 0x096F) || (c < 0x80 && !unicode::is_latin_letter(c));
}

}  // namespace

WeightSeq syllabify(std::string_view line) {
  const std::u32string text = unicode::decode(unicode::nfc(line));
  struct Word {
    std::u32string letters;
    std::size_t begin = 0;
    std::size_t end = 0;
  };
  std::vector<Word> words;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char32_t c = text[i];
    if (is_separator(c) || c == 0x200C || c == 0x200D) continue;
    if (!is_deva_letter(c)) {
      throw Error(ErrorKind::scansion, "not a Devanagari letter: " + unicode::describe(c));
    }
    if (words.empty() || words.back().end != i) words.push_back({{}, i, i});
    words.back().letters += c;
    words.back().end = i + 1;
  }

  WeightSeq out;
  for (const Word& w : words) {
    const bool izafat = w.letters == U"ए" && w.begin > 0 && text[w.begin - 1] == U'-' &&
                        w.end < text.size() && text[w.end] == U'-';
    if (izafat) {
      out.push_back(Weight::S);
    } else {
      weigh(units_of(w.letters), out);
    }
  }
  if (out.empty()) throw Error(ErrorKind::scansion, "line has no vowel");
  return out;
}

std::vector<MeterPattern> match_meter(const WeightSeq& weights, const MeterCatalog& catalog) {
  std::vector<MeterPattern> out;
  if (weights.empty()) return out;
  for (const auto& p : catalog.patterns()) {
    if (p.matches(weights)) out.push_back(p);
  }
  return out;
}

std::vector<std::string> misra_words(std::string_view misra) {
  std::vector<std::string> out;
  for (const std::string& raw : unicode::split_words(unicode::nfc(misra))) {
    std::u32string w = unicode::decode(raw);
    while (!w.empty() && unicode::is_punctuation(w.back())) w.pop_back();
    std::size_t lead = 0;
    while (lead < w.size() && unicode::is_punctuation(w[lead])) ++lead;
    w.erase(0, lead);
    if (!w.empty()) out.push_back(unicode::encode(w));
  }
  return out;
}

std::vector<Verse> pair_verses(const std::vector<std::string>& lines) {
  std::vector<Verse> out;
  for (std::size_t i = 0; i + 1 < lines.size(); i += 2) out.push_back({lines[i], lines[i + 1]});
  return out;
}

namespace {

std::string join_words(const std::vector<std::string>& words, std::size_t from) {
  std::string out;
  for (std::size_t k = from; k < words.size(); ++k) {
    if (k > from) out += ' ';
    out += words[k];
  }
  return out;
}

bool ends_with_words(const std::vector<std::string>& words, const std::vector<std::string>& tail) {
  return tail.size() <= words.size() &&
         std::equal(tail.begin(), tail.end(), words.end() - static_cast<std::ptrdiff_t>(tail.size()));
}

std::u32string rhyme_form(std::string_view word) {
  std::u32string out;
  for (char32_t c : unicode::decode(word)) {
    switch (c) {
      case U'अ': break;
      case U'आ': out += U'ा'; break;
      case U'इ': out += U'ि'; break;
      case U'ई': out += U'ी'; break;
      case U'उ': out += U'ु'; break;
      case U'ऊ': out += U'ू'; break;
      case U'ए': out += U'े'; break;
      case U'ऐ': out += U'ै'; break;
      case U'ओ': out += U'ो'; break;
      case U'औ': out += U'ौ'; break;
      case U'ऋ': out += U'ृ'; break;
      default: out += c;
    }
  }
  return out;
}

std::optional<std::u32string> pre_radif_word(std::string_view misra,
                                             const std::vector<std::string>& radif) {
  const auto words = misra_words(misra);
  if (!ends_with_words(words, radif) || words.size() == radif.size()) return std::nullopt;
  return rhyme_form(words[words.size() - radif.size() - 1]);
}

std::u32string common_suffix(const std::u32string& a, const std::u32string& b) {
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && a[a.size() - 1 - k] == b[b.size() - 1 - k]) ++k;
  return a.substr(a.size() - k);
}

}  // namespace

std::string detect_radif(const std::vector<Verse>& verses) {
  if (verses.size() < 2) {
    throw Error(ErrorKind::structure, "a ghazal needs at least two verses");
  }
  std::vector<std::string> common = misra_words(verses[0].misra2);
  for (std::size_t v = 1; v < verses.size(); ++v) {
    const auto words = misra_words(verses[v].misra2);
    std::size_t k = 0;
    while (k < common.size() && k < words.size() &&
           common[common.size() - 1 - k] == words[words.size() - 1 - k]) {
      ++k;
    }
    common.erase(common.begin(), common.end() - static_cast<std::ptrdiff_t>(k));
  }
  return join_words(common, 0);
}

std::optional<std::string> detect_qaafiya(const std::vector<Verse>& verses,
                                          std::string_view radif) {
  const auto tail = misra_words(radif);
  std::optional<std::u32string> common;
  for (const auto& verse : verses) {
    const auto word = pre_radif_word(verse.misra2, tail);
    if (!word) return std::nullopt;
    common = common ? common_suffix(*common, *word) : *word;
  }
  if (!common || common->empty()) return std::nullopt;
  return unicode::encode(*common);
}

GhazalStructure analyze_ghazal(const std::vector<Verse>& verses) {
  GhazalStructure g;
  g.verses = verses;
  g.radif = detect_radif(verses);
  g.qaafiya = detect_qaafiya(verses, g.radif);
  if (g.qaafiya) {
    const auto word = pre_radif_word(verses[0].misra1, misra_words(g.radif));
    const std::u32string q = unicode::decode(*g.qaafiya);
    g.matla_ok = word && word->size() >= q.size() && word->ends_with(q);
  }
  return g;
}

}  // namespace bayaaz
