#include "bayaaz/corpus.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "bayaaz/error.hpp"
#include "bayaaz/unicode.hpp"

namespace bayaaz {

std::string_view script_name(Script script) {
  switch (script) {
    case Script::devanagari: return "devanagari";
    case Script::perso_arabic: return "urdu";
    case Script::roman: return "roman";
  }
  return "devanagari";
}

std::optional<Script> parse_script(std::string_view name) {
  if (name == "devanagari" || name == "hindi") return Script::devanagari;
  if (name == "urdu" || name == "perso-arabic") return Script::perso_arabic;
  if (name == "roman") return Script::roman;
  return std::nullopt;
}

std::string_view mode_name(DatasetMode mode) {
  switch (mode) {
    case DatasetMode::misra: return "misra";
    case DatasetMode::sher: return "sher";
    case DatasetMode::ghazal: return "ghazal";
  }
  return "misra";
}

std::optional<DatasetMode> parse_mode(std::string_view name) {
  if (name == "misra") return DatasetMode::misra;
  if (name == "sher") return DatasetMode::sher;
  if (name == "ghazal") return DatasetMode::ghazal;
  return std::nullopt;
}

std::string CleaningReport::to_text() const {
  std::ostringstream os;
  os << "lines_before = " << lines_before << '\n'
     << "removed_english = " << removed_english << '\n'
     << "removed_empty = " << removed_empty << '\n'
     << "removed_marker = " << removed_marker << '\n'
     << "removed_other = " << removed_other << '\n'
     << "lines_after = " << lines_after << '\n'
     << "ghazal_count = " << ghazal_count << '\n'
     << "sher_count = " << sher_count << '\n';
  return os.str();
}

CharVocab::CharVocab(std::vector<char32_t> codepoints)
    : codepoints_(std::move(codepoints)) {
  for (std::size_t i = 0; i < codepoints_.size(); ++i) {
    const auto [it, inserted] =
        index_.emplace(codepoints_[i], static_cast<int>(i) + 2);
    if (!inserted) {
      throw Error(ErrorKind::vocab,
                  "duplicate vocabulary token " + unicode::describe(codepoints_[i]));
    }
  }
}

std::optional<int> CharVocab::find(char32_t cp) const {
  const auto it = index_.find(cp);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int CharVocab::id_of(char32_t cp) const {
  const auto it = index_.find(cp);
  if (it == index_.end()) {
    throw Error(ErrorKind::vocab,
                "character " + unicode::describe(cp) + " is not in the vocabulary");
  }
  return it->second;
}

char32_t CharVocab::codepoint_of(int id) const {
  if (id < 2 || static_cast<std::size_t>(id) >= size()) {
    throw Error(ErrorKind::vocab, "token id " + std::to_string(id) +
                                      " has no character");
  }
  return codepoints_[static_cast<std::size_t>(id) - 2];
}

std::vector<int> CharVocab::encode(std::string_view utf8) const {
  std::vector<int> ids;
  for (char32_t cp : unicode::decode(utf8)) ids.push_back(id_of(cp));
  return ids;
}

std::string CharVocab::decode(std::span<const int> ids) const {
  std::u32string out;
  for (int id : ids) {
    if (id == kPad || id == kEnd) continue;
    out.push_back(codepoint_of(id));
  }
  return unicode::encode(out);
}

RawCorpus ingest_raw(std::span<const std::filesystem::path> paths, Script script) {
  RawCorpus raw;
  raw.script = script;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(ErrorKind::io, "cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
      throw Error(ErrorKind::io, "read failure on " + path.string());
    }
    std::string text = buf.str();
    try {
      unicode::decode(text);
    } catch (const Error& e) {
      throw Error(ErrorKind::encoding, path.string() + ": " + e.what());
    }
    raw.files.push_back({path.string(), std::move(text)});
  }
  return raw;
}

namespace {

bool contains_latin(std::string_view line) {
  for (char32_t cp : unicode::decode(line)) {
    if (unicode::is_latin_letter(cp)) return true;
  }
  return false;
}

}  // namespace

std::pair<CleanCorpus, CleaningReport> clean(const RawCorpus& raw) {
  CleanCorpus corpus;
  corpus.script = raw.script;
  CleaningReport report;

  std::size_t ghazal_begin = 0;
  auto close_ghazal = [&] {
    if (corpus.lines.size() > ghazal_begin) {
      corpus.ghazal_bounds.push_back({ghazal_begin, corpus.lines.size()});
    }
    ghazal_begin = corpus.lines.size();
  };

  for (const auto& file : raw.files) {
    std::istringstream in(file.text);
    std::string raw_line;
    while (std::getline(in, raw_line)) {
      ++report.lines_before;
      const std::string line = unicode::trim(unicode::nfc(raw_line));
      if (line.empty()) {
        ++report.removed_empty;
        close_ghazal();
      } else if (line == "====") {
        ++report.removed_marker;
        close_ghazal();
      } else if (line.front() == '#') {
        ++report.removed_other;
      } else if (contains_latin(line)) {
        ++report.removed_english;
      } else {
        corpus.lines.push_back(line);
      }
    }
    close_ghazal();
  }

  report.lines_after = corpus.lines.size();
  report.ghazal_count = corpus.ghazal_bounds.size();
  for (const auto& g : corpus.ghazal_bounds) report.sher_count += (g.end - g.begin) / 2;
  return {std::move(corpus), report};
}

std::string to_raw_text(const CleanCorpus& corpus) {
  std::string out;
  for (std::size_t g = 0; g < corpus.ghazal_bounds.size(); ++g) {
    if (g > 0) out += "====\n";
    const auto& b = corpus.ghazal_bounds[g];
    for (std::size_t i = b.begin; i < b.end; ++i) {
      out += corpus.lines[i];
      out += '\n';
    }
  }
  return out;
}

SampleSet split(const CleanCorpus& corpus, DatasetMode mode) {
  if (corpus.lines.empty()) {
    throw Error(ErrorKind::empty_input, "cannot split an empty corpus");
  }
  SampleSet set;
  set.mode = mode;
  set.script = corpus.script;
  switch (mode) {
    case DatasetMode::misra:
      set.samples = corpus.lines;
      break;
    case DatasetMode::sher:
      for (const auto& g : corpus.ghazal_bounds) {
        std::size_t i = g.begin;
        for (; i + 1 < g.end; i += 2) {
          set.samples.push_back(corpus.lines[i] + "\n" + corpus.lines[i + 1]);
        }
        if (i < g.end) ++set.dropped_lines;
      }
      if (set.dropped_lines > 0) {
        std::clog << "warning: dropped " << set.dropped_lines
                  << " unpaired trailing line(s) in sher mode\n";
      }
      break;
    case DatasetMode::ghazal:
      for (const auto& g : corpus.ghazal_bounds) {
        std::string sample;
        for (std::size_t i = g.begin; i < g.end; ++i) {
          if (i > g.begin) sample += '\n';
          sample += corpus.lines[i];
        }
        set.samples.push_back(std::move(sample));
      }
      break;
  }
  return set;
}

CharVocab build_vocab(const SampleSet& samples) {
  if (samples.samples.empty()) {
    throw Error(ErrorKind::empty_input, "cannot build a vocabulary from no samples");
  }
  std::vector<char32_t> tokens;
  std::unordered_set<char32_t> seen;
  for (const auto& s : samples.samples) {
    for (char32_t cp : unicode::decode(s)) {
      if (seen.insert(cp).second) tokens.push_back(cp);
    }
  }
  return CharVocab(std::move(tokens));
}

}  // namespace bayaaz
