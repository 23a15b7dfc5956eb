#include "bayaaz/originality.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "bayaaz/error.hpp"
#include "bayaaz/unicode.hpp"

namespace bayaaz {

std::string normalize_for_match(std::string_view line) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t cp : unicode::decode(unicode::nfc(line))) {
    if (unicode::is_combining_mark(cp)) continue;
    if (unicode::is_whitespace(cp) || unicode::is_punctuation(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(cp);
  }
  return unicode::encode(out);
}

std::size_t longest_common_word_run(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

namespace {

std::string join(const std::vector<std::string>& words, std::size_t from, std::size_t n) {
  std::string key;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) key += ' ';
    key += words[from + k];
  }
  return key;
}

void add_posting(std::vector<std::size_t>& list, std::size_t line) {
  if (list.empty() || list.back() != line) list.push_back(line);
}

}  // namespace

LineIndex::LineIndex(const CleanCorpus& corpus) {
  if (corpus.lines.empty()) {
    throw Error(ErrorKind::empty_input, "cannot index an empty corpus");
  }
  std::vector<std::size_t> ghazal_of(corpus.lines.size(), 0);
  for (std::size_t g = 0; g < corpus.ghazal_bounds.size(); ++g) {
    for (std::size_t i = corpus.ghazal_bounds[g].begin; i < corpus.ghazal_bounds[g].end; ++i) {
      ghazal_of[i] = g;
    }
  }
  lines_ = corpus.lines;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    const std::string key = normalize_for_match(lines_[i]);
    keys_.push_back(key);
    const LineLocation loc{ghazal_of[i], i};
    locations_.push_back(loc);
    by_key_[key].push_back(loc);
    words_.push_back(unicode::split_words(key));
    const auto& w = words_.back();
    for (std::size_t k = 0; k < w.size(); ++k) add_posting(unigrams_[w[k]], i);
    for (std::size_t k = 0; k + kGram <= w.size(); ++k) {
      add_posting(trigrams_[join(w, k, kGram)], i);
    }
  }
}

const std::vector<LineLocation>* LineIndex::find(const std::string& normalized) const {
  const auto it = by_key_.find(normalized);
  return it == by_key_.end() ? nullptr : &it->second;
}

std::vector<std::size_t> LineIndex::candidates(const std::vector<std::string>& words,
                                               std::size_t run) const {
  const auto& postings = run >= kGram ? trigrams_ : unigrams_;
  const std::size_t n = run >= kGram ? kGram : 1;
  std::set<std::size_t> found;
  for (std::size_t k = 0; k + n <= words.size(); ++k) {
    const auto it = postings.find(join(words, k, n));
    if (it != postings.end()) found.insert(it->second.begin(), it->second.end());
  }
  return {found.begin(), found.end()};
}

LineIndex build_index(const CleanCorpus& corpus) { return LineIndex(corpus); }

PlagiarismReport check(std::string_view text, const LineIndex& index, std::size_t min_run) {
  if (min_run < 2) min_run = 2;
  PlagiarismReport report;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string query = unicode::trim(raw);
    if (query.empty()) continue;
    const std::string key = normalize_for_match(query);
    if (key.empty()) continue;
    if (const auto* locs = index.find(key)) {
      report.exact_matches.push_back({query, *locs});
    }
    const auto words = unicode::split_words(key);
    if (words.size() < min_run) continue;
    for (std::size_t line : index.candidates(words, min_run)) {
      if (index.key(line) == key) continue;
      const std::size_t run = longest_common_word_run(words, index.words(line));
      if (run >= min_run) {
        report.partial_matches.push_back({query, index.line(line), index.locations()[line], run});
      }
    }
  }
  report.clean = report.exact_matches.empty() && report.partial_matches.empty();
  return report;
}

std::string PlagiarismReport::to_text(const LineIndex& index) const {
  std::ostringstream os;
  os << "clean = " << (clean ? "true" : "false") << '\n';
  os << "exact_matches = " << exact_matches.size() << '\n';
  for (const auto& m : exact_matches) {
    os << "exact: " << m.query << '\n';
    for (const auto& loc : m.locations) {
      os << "  ghazal " << loc.ghazal << " line " << loc.line << ": " << index.line(loc.line)
         << '\n';
    }
  }
  os << "partial_matches = " << partial_matches.size() << '\n';
  for (const auto& m : partial_matches) {
    os << "partial: " << m.query << '\n'
       << "  run " << m.run_length << ", ghazal " << m.location.ghazal << " line "
       << m.location.line << ": " << m.corpus_line << '\n';
  }
  return os.str();
}

}  // namespace bayaaz
