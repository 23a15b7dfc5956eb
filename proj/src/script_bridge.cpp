#include "bayaaz/script_bridge.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "bayaaz/error.hpp"
#include "bayaaz/unicode.hpp"

namespace bayaaz {

namespace builtin {
std::string_view transliteration_table();
}

namespace {

constexpr char32_t kVirama = 0x094D;
constexpr char32_t kNukta = 0x093C;
constexpr char32_t kAnusvara = 0x0902;
constexpr char32_t kChandrabindu = 0x0901;
constexpr char32_t kVisarga = 0x0903;
constexpr char32_t kMatraI = 0x093F;
constexpr char32_t kMatraU = 0x0941;
constexpr char32_t kMatraAa = 0x093E;
constexpr char32_t kMatraE = 0x0947;
constexpr char32_t kMatraAi = 0x0948;
constexpr char32_t kMatraVocalicR = 0x0943;
constexpr char32_t kVowelVocalicR = 0x090B;

constexpr char32_t kAlef = 0x0627;
constexpr char32_t kAlefHamza = 0x0623;
constexpr char32_t kAlefMadda = 0x0622;
constexpr char32_t kWaw = 0x0648;
constexpr char32_t kYeh = 0x06CC;
constexpr char32_t kArabicYeh = 0x064A;
constexpr char32_t kAlefMaksura = 0x0649;
constexpr char32_t kYehBarree = 0x06D2;
constexpr char32_t kYehBarreeHamza = 0x06D3;
constexpr char32_t kYehHamza = 0x0626;
constexpr char32_t kWawHamza = 0x0624;
constexpr char32_t kHamza = 0x0621;
constexpr char32_t kAin = 0x0639;
constexpr char32_t kNoon = 0x0646;
constexpr char32_t kNoonGhunna = 0x06BA;
constexpr char32_t kDoChashmi = 0x06BE;
constexpr char32_t kFatha = 0x064E;
constexpr char32_t kDamma = 0x064F;
constexpr char32_t kKasra = 0x0650;
constexpr char32_t kShadda = 0x0651;
constexpr char32_t kSukun = 0x0652;
constexpr char32_t kTanwinFath = 0x064B;
constexpr char32_t kSuperscriptAlef = 0x0670;

bool is_deva_consonant(char32_t c) {
  return (c >= 0x0915 && c <= 0x0939) || (c >= 0x0958 && c <= 0x095F);
}
bool is_deva_vowel(char32_t c) {
  return (c >= 0x0904 && c <= 0x0914) || c == 0x0960 || c == 0x0961;
}
bool is_deva_matra(char32_t c) {
  return (c >= 0x093A && c <= 0x094C && c != kNukta && c != 0x093D) || c == 0x094E ||
         c == 0x094F || (c >= 0x0955 && c <= 0x0957) || c == 0x0962 || c == 0x0963;
}
bool is_deva_sign(char32_t c) { return c == kAnusvara || c == kChandrabindu || c == kVisarga; }
bool is_deva_word_char(char32_t c) {
  return is_deva_consonant(c) || is_deva_vowel(c) || is_deva_matra(c) || is_deva_sign(c) ||
         c == kVirama || c == kNukta;
}

bool is_urdu_digit(char32_t c) {
  return (c >= 0x06F0 && c <= 0x06F9) || (c >= 0x0660 && c <= 0x0669);
}
// Characters copied unchanged by both directions.
bool is_neutral(char32_t c) {
  if (unicode::is_whitespace(c) || c == 0x200C || c == 0x200D) return true;
  return c < 0x80 && !unicode::is_latin_letter(c);
}

std::u32string field(std::string_view s) {
  if (s == "~") return {};
  return unicode::decode(unicode::nfc(s));
}

std::optional<std::u32string> lookup(const MappingTable::Map& map, char32_t c) {
  const auto it = map.find(std::u32string(1, c));
  if (it == map.end()) return std::nullopt;
  return it->second;
}

// Longest key of `map` starting at in[i], at most `longest` codepoints.
std::optional<std::pair<std::u32string, std::size_t>> longest_match(
    const std::u32string& in, std::size_t i, const MappingTable::Map& map,
    std::size_t longest) {
  for (std::size_t len = std::min(longest, in.size() - i); len > 0; --len) {
    const auto it = map.find(in.substr(i, len));
    if (it != map.end()) return std::make_pair(it->second, len);
  }
  return std::nullopt;
}

void flag(TransliterationResult& r, const std::u32string& out, std::string reason) {
  r.ambiguities.push_back({out.empty() ? 0 : out.size() - 1, std::move(reason)});
}

void flag_at(TransliterationResult& r, std::size_t position, std::string reason) {
  r.ambiguities.push_back({position, std::move(reason)});
}

}  // namespace

MappingTable MappingTable::parse(std::string_view text) {
  static const std::set<std::string, std::less<>> kinds = {
      "consonant", "semivowel", "lossy",      "alias", "vowel", "vowel_medial",
      "vowel_final", "matra",   "matra_final", "sign", "sign_final", "digit", "punct"};
  MappingTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1) {
      parts.push_back(line.substr(start, tab - start));
    }
    parts.push_back(line.substr(start));
    if (parts.size() != 3 || !kinds.contains(parts[0]) || parts[1].empty() || parts[2].empty()) {
      throw Error(ErrorKind::format,
                  "mapping table line " + std::to_string(number) + ": expected kind<TAB>devanagari<TAB>urdu");
    }
    const std::u32string deva = field(parts[1]);
    const std::u32string urdu = field(parts[2]);
    const std::string& kind = parts[0];
    if (kind == "alias") {
      table.sections_[kind].emplace(urdu, deva);
    } else {
      table.sections_[kind].emplace(deva, urdu);
    }

    if (kind == "consonant" || kind == "semivowel" || kind == "lossy") {
      if (!table.deva_letters_.emplace(deva, urdu).second) {
        throw Error(ErrorKind::consistency, "duplicate Devanagari letter " + parts[1]);
      }
      table.longest_deva_ = std::max(table.longest_deva_, deva.size());
    }
    if (kind == "consonant" || kind == "alias") {
      if (!table.urdu_letters_.emplace(urdu, deva).second) {
        throw Error(ErrorKind::consistency, "duplicate Urdu letter " + parts[2]);
      }
      table.longest_urdu_ = std::max(table.longest_urdu_, urdu.size());
    }
  }
  if (table.section("consonant").empty()) {
    throw Error(ErrorKind::format, "mapping table has no consonants");
  }
  std::set<std::u32string> seen;
  for (const auto& [deva, urdu] : table.section("consonant")) {
    if (!seen.insert(urdu).second) {
      throw Error(ErrorKind::consistency, "consonant mapping is not injective");
    }
  }
  return table;
}

MappingTable MappingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const MappingTable& MappingTable::builtin() {
  static const MappingTable table = parse(builtin::transliteration_table());
  return table;
}

const MappingTable::Map& MappingTable::section(std::string_view kind) const {
  static const Map empty;
  const auto it = sections_.find(kind);
  return it == sections_.end() ? empty : it->second;
}

TransliterationResult deva_to_urdu(std::string_view text, const MappingTable& table) {
  enum class Prev { boundary, open, closed, vowel };

  const std::u32string in = unicode::decode(unicode::nfc(text));
  const std::size_t n = in.size();
  auto word_end = [&](std::size_t j) { return j >= n || !is_deva_word_char(in[j]); };
  const auto& semivowels = table.section("semivowel");
  const auto& lossy = table.section("lossy");

  TransliterationResult r;
  std::u32string out;
  Prev prev = Prev::boundary;
  char32_t silent_vowel = 0;  // kasra/damma for an unwritten ि/ु
  std::u32string last_letter;

  for (std::size_t i = 0; i < n; ++i) {
    const char32_t c = in[i];

    if (c == U'-' && i > 0 && i + 3 < n && in[i + 1] == U'ए' && in[i + 2] == U'-' &&
        is_deva_word_char(in[i - 1]) && is_deva_word_char(in[i + 3])) {
      out += U' ';
      flag(r, out, "izafat");
      r.mapped += 3;
      i += 2;
      prev = Prev::boundary;
      continue;
    }

    if (auto m = longest_match(in, i, table.deva_letters(), table.longest_deva_letter())) {
      const auto& [urdu, len] = *m;
      const std::u32string key = in.substr(i, len);
      const std::size_t j = i + len;
      if (semivowels.contains(key) && (prev == Prev::open || prev == Prev::closed)) {
        const bool plain = j < n && (in[j] == kMatraAa || ((in[j] == kMatraE || in[j] == kMatraAi) &&
                                                          word_end(j + 1)));
        if (!plain) out += silent_vowel ? silent_vowel : prev == Prev::open ? kFatha : kSukun;
      }
      if (prev == Prev::closed && key == last_letter && urdu.size() == 1 &&
          !semivowels.contains(key)) {
        out += kShadda;
      } else {
        out += urdu;
      }
      if (lossy.contains(key)) flag(r, out, "lossy letter " + unicode::encode(key));
      r.mapped += len;
      i = j - 1;
      prev = Prev::open;
      silent_vowel = 0;
      last_letter = key;
      continue;
    }

    if (c == kVirama) {
      if (prev == Prev::open) prev = Prev::closed;
      ++r.mapped;
      continue;
    }

    if (is_deva_matra(c)) {
      const bool before_vowel = i + 1 < n && is_deva_vowel(in[i + 1]);
      if (c == kMatraI && before_vowel) {
        out += kKasra;
        prev = Prev::vowel;
      } else if (c == kMatraU && before_vowel) {
        out += kDamma;
        out += kWaw;
        prev = Prev::vowel;
      } else {
        const auto& finals = table.section("matra_final");
        auto v = word_end(i + 1) ? lookup(finals, c) : std::nullopt;
        if (!v) v = lookup(table.section("matra"), c);
        if (!v) {
          out += c;
          r.passthrough.push_back(c);
          continue;
        }
        out += *v;
        if (v->empty()) {
          silent_vowel = c == kMatraI ? kKasra : c == kMatraU ? kDamma : 0;
          prev = silent_vowel ? Prev::open : Prev::vowel;
        } else {
          prev = Prev::vowel;
        }
        ++r.mapped;
        continue;
      }
      ++r.mapped;
      continue;
    }

    if (is_deva_vowel(c)) {
      std::optional<std::u32string> v;
      if (prev == Prev::boundary) {
        if (word_end(i + 1)) v = lookup(table.section("vowel_final"), c);
        if (!v) v = lookup(table.section("vowel"), c);
      } else {
        v = lookup(table.section("vowel_medial"), c);
      }
      if (!v) {
        out += c;
        r.passthrough.push_back(c);
        continue;
      }
      out += *v;
      ++r.mapped;
      prev = Prev::vowel;
      silent_vowel = 0;
      continue;
    }

    if (is_deva_sign(c)) {
      auto v = word_end(i + 1) ? lookup(table.section("sign_final"), c) : std::nullopt;
      if (!v) v = lookup(table.section("sign"), c);
      if (v) {
        out += *v;
        ++r.mapped;
        prev = Prev::closed;
        silent_vowel = 0;
        last_letter.clear();
        continue;
      }
    }

    prev = Prev::boundary;
    silent_vowel = 0;
    if (auto v = lookup(table.section("digit"), c)) {
      out += *v;
      ++r.mapped;
    } else if (auto p = lookup(table.section("punct"), c)) {
      out += *p;
      ++r.mapped;
    } else if (is_neutral(c)) {
      out += c;
      ++r.mapped;
    } else {
      out += c;
      r.passthrough.push_back(c);
    }
  }
  r.text = unicode::encode(out);
  return r;
}

TransliterationResult urdu_to_deva(std::string_view text, const MappingTable& table) {
  enum class Prev { boundary, open, marked, vowel };

  std::u32string in = unicode::decode(unicode::nfc(text));
  for (char32_t& c : in) {
    if (c == kArabicYeh || c == kAlefMaksura) c = kYeh;
  }
  const std::size_t n = in.size();
  auto at = [&](std::size_t j) -> char32_t { return j < n ? in[j] : 0; };
  auto is_letter_start = [&](std::size_t j) {
    return j < n && longest_match(in, j, table.urdu_letters(), table.longest_urdu_letter());
  };

  std::map<std::u32string, std::u32string> puncts;
  for (const auto& [deva, urdu] : table.section("punct")) puncts.emplace(urdu, deva);

  TransliterationResult r;
  std::u32string out;
  Prev prev = Prev::boundary;
  std::u32string last_letter;

  auto consonant = [&](const std::u32string& deva) {
    if (prev == Prev::open) flag_at(r, out.size(), "inferred short vowel");
    out += deva;
    last_letter = deva;
    prev = Prev::open;
  };
  // Word-initial alef (or ain): the following vowel letter decides the vowel.
  auto initial_vowel = [&](std::size_t& i) {
    const char32_t next = at(i + 1);
    const char32_t after = at(i + 2);
    const bool after_is_vowel =
        after == kAlef || after == kAlefMadda || after == kYehBarree || after == kWaw;
    if (next == kYehBarree) {
      out += U'ए';
      flag(r, out, "ए or ऐ");
      ++i;
      ++r.mapped;
    } else if (next == kYeh && !after_is_vowel) {
      out += U'ए';
      flag(r, out, "ए, ई or ऐ");
      ++i;
      ++r.mapped;
    } else if (next == kWaw && !after_is_vowel) {
      out += U'ओ';
      flag(r, out, "ओ, ऊ or औ");
      ++i;
      ++r.mapped;
    } else {
      out += U'अ';
      flag(r, out, "अ, इ or उ");
    }
    prev = Prev::vowel;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const char32_t c = in[i];
    const char32_t next = at(i + 1);
    const bool consonantal = prev == Prev::open;
    const bool after_consonant = prev == Prev::open || prev == Prev::marked;

    if (c == kNoon && prev != Prev::boundary && is_letter_start(i + 1) &&
        longest_match(in, i, table.urdu_letters(), table.longest_urdu_letter())->second == 1) {
      if (prev == Prev::open) flag_at(r, out.size(), "inferred short vowel");
      out += kAnusvara;
      ++r.mapped;
      prev = Prev::marked;
      last_letter.clear();
      continue;
    }

    if (auto m = longest_match(in, i, table.urdu_letters(), table.longest_urdu_letter())) {
      consonant(m->first);
      r.mapped += m->second;
      i += m->second - 1;
      continue;
    }

    switch (c) {
      case kAlef:
      case kAlefHamza:
        ++r.mapped;
        if (prev == Prev::boundary) {
          initial_vowel(i);
        } else {
          out += after_consonant ? kMatraAa : U'आ';
          prev = Prev::vowel;
        }
        continue;
      case kAlefMadda:
        ++r.mapped;
        out += after_consonant ? kMatraAa : U'आ';
        prev = Prev::vowel;
        continue;
      case kAin:
        ++r.mapped;
        if (prev == Prev::boundary) {
          initial_vowel(i);
        } else {
          flag_at(r, out.size(), "ain");
        }
        continue;
      case kWaw:
        ++r.mapped;
        if (consonantal && !(next == kAlef || next == kAlefMadda || next == kYehBarree)) {
          out += U'ो';
          flag(r, out, "ो, ू or ौ");
          prev = Prev::vowel;
        } else {
          consonant(U"व");
        }
        continue;
      case kYeh:
        ++r.mapped;
        if (consonantal && (next == kAlef || next == kAlefMadda || next == kYehBarree)) {
          out += kMatraI;
          flag(r, out, "ि+य or ्य");
          out += U'य';
          last_letter = U"य";
          prev = Prev::open;
        } else if (consonantal) {
          out += U'ी';
          prev = Prev::vowel;
        } else {
          consonant(U"य");
        }
        continue;
      case kYehBarree:
        ++r.mapped;
        out += after_consonant ? kMatraE : U'ए';
        if (after_consonant) flag(r, out, "े or ै");
        prev = Prev::vowel;
        continue;
      case kYehBarreeHamza:
        ++r.mapped;
        out += U'ए';
        prev = Prev::vowel;
        continue;
      case kYehHamza:
        ++r.mapped;
        if (next == kYehBarree) {
          out += U'ए';
          ++i;
          ++r.mapped;
        } else if (next == kYeh) {
          out += U'ई';
          ++i;
          ++r.mapped;
        } else {
          out += U'इ';
        }
        prev = Prev::vowel;
        continue;
      case kWawHamza:
        ++r.mapped;
        out += U'ओ';
        flag(r, out, "ओ, उ or ऊ");
        prev = Prev::vowel;
        continue;
      case kHamza:
        ++r.mapped;
        flag_at(r, out.size(), "hamza");
        continue;
      case kNoonGhunna:
        ++r.mapped;
        out += kAnusvara;
        continue;
      case kDoChashmi:
        consonant(U"ह");
        ++r.mapped;
        continue;
      case kFatha:
        ++r.mapped;
        if (prev == Prev::open) prev = Prev::marked;
        continue;
      case kSukun:
        ++r.mapped;
        if (prev == Prev::open) {
          out += kVirama;
          prev = Prev::marked;
        }
        continue;
      case kShadda:
        ++r.mapped;
        if (after_consonant && !last_letter.empty()) {
          out += kVirama;
          out += last_letter;
          prev = Prev::open;
        }
        continue;
      case kKasra:
        ++r.mapped;
        out += after_consonant ? kMatraI : U'इ';
        prev = Prev::vowel;
        continue;
      case kDamma:
        ++r.mapped;
        if (!after_consonant) {
          out += U'उ';
        } else if (next == kWaw) {
          const char32_t after = at(i + 2);
          const bool vowel_follows = after == kAlef || after == kAlefMadda || after == kYeh ||
                                     after == kYehBarree || after == kYehHamza ||
                                     after == kWawHamza || after == kHamza;
          out += vowel_follows ? kMatraU : U'ू';
          ++i;
          ++r.mapped;
        } else {
          out += kMatraU;
        }
        prev = Prev::vowel;
        continue;
      case kSuperscriptAlef:
        ++r.mapped;
        out += after_consonant ? kMatraAa : U'आ';
        prev = Prev::vowel;
        continue;
      case kTanwinFath:
        ++r.mapped;
        out += U'न';
        prev = Prev::open;
        continue;
      default:
        break;
    }

    if (c >= 0x064B && c <= 0x065F) {
      ++r.mapped;
      continue;
    }

    prev = Prev::boundary;
    last_letter.clear();
    if (is_urdu_digit(c)) {
      out += static_cast<char32_t>(0x0966 + (c >= 0x06F0 ? c - 0x06F0 : c - 0x0660));
      ++r.mapped;
    } else if (auto p = puncts.find(std::u32string(1, c)); p != puncts.end()) {
      out += p->second;
      ++r.mapped;
    } else if (is_neutral(c)) {
      out += c;
      ++r.mapped;
    } else {
      out += c;
      r.passthrough.push_back(c);
    }
  }
  r.text = unicode::encode(out);
  return r;
}

std::u32string consonant_skeleton(std::string_view devanagari) {
  const std::u32string in = unicode::decode(unicode::nfc(devanagari));
  std::u32string out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char32_t c = in[i];
    if (c == U'न' || c == U'ण' || c == U'ञ' || c == U'ङ' || c == kAnusvara ||
        c == kChandrabindu) {
      out += U'न';
    } else if (c == kMatraVocalicR || c == kVowelVocalicR) {
      out += U'र';
    } else if (is_deva_consonant(c)) {
      out += c;
      if (i + 1 < in.size() && in[i + 1] == kNukta) {
        ++i;
        if (c != U'य') out += kNukta;
      }
    }
  }
  return out;
}

}  // namespace bayaaz
