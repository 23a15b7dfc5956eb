// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bayaaz/corpus.hpp"
#include "bayaaz/generator.hpp"
#include "bayaaz/originality.hpp"
#include "bayaaz/prosody.hpp"
#include "bayaaz/script_bridge.hpp"
#include "bayaaz/service.hpp"
#include "bayaaz/trainer.hpp"
#include "test_support.hpp"

using namespace bayaaz;
using json = nlohmann::json;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// 1. Finite-difference gradient check on the tiny config.
std::string gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelConfig config = testing::tiny_config();
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto r = testing::finite_difference_check(config, seed, 1e-5);
    require(r.max_relative <= 1e-4,
            "seed " + std::to_string(seed) + " relative error " + fmt(r.max_relative));
    worst = std::max(worst, r.max_relative);
    checked += r.checked;
  }
  const double elapsed = seconds_since(t0);
  require(elapsed < 60.0, "took " + fmt(elapsed) + " s");
  return "8 seeds, " + std::to_string(checked) + " scalars, max relative error " + fmt(worst) +
         ", " + fmt(elapsed) + " s";
}

// 2. Train on the repeated-couplet fixture, decode greedily, flag the output.
std::string memorization() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto bytes = std::filesystem::file_size(testing::data_path("memorize.txt"));
  require(bytes >= 1800 && bytes <= 2300, "fixture is " + std::to_string(bytes) + " bytes");
  const CleanCorpus corpus = testing::load_corpus("memorize.txt", Script::devanagari);
  const SampleSet samples = split(corpus, DatasetMode::misra);

  TrainConfig tc;
  tc.epochs = 200;
  tc.batch_size = 16;
  tc.learning_rate = 1.0;
  tc.optimizer = OptimizerKind::sgd;
  tc.seed = 1;
  ModelConfig mc;
  mc.seq_len = 40;
  mc.embed_dim = 16;
  mc.lstm_units = 32;
  mc.lstm_layers = 2;
  const Checkpoint ck = train(samples, tc, mc);
  require(ck.history.epochs.size() <= 200, "ran more than 200 epochs");
  const double loss = ck.history.epochs.back().train_loss;
  require(loss < 0.1, "final train loss " + fmt(loss));

  const LineIndex index = build_index(corpus);
  std::set<std::string> distinct(corpus.lines.begin(), corpus.lines.end());
  for (const auto& line : distinct) {
    const std::u32string cps = unicode::decode(line);
    GenerationRequest req;
    req.temperature = 0.0;
    req.length = 200;
    req.prefix = unicode::encode(cps.substr(0, cps.size() / 2));
    const GenerationResult out = generate(ck, req);
    require(out.text == line, "prefix of \"" + line + "\" continued as \"" + out.text + "\"");
    const PlagiarismReport report = check(out.text, index);
    require(!report.clean && report.exact_matches.size() == 1,
            "originality did not flag \"" + out.text + "\"");
  }
  const double elapsed = seconds_since(t0);
  require(elapsed < 600.0, "took " + fmt(elapsed) + " s");
  return std::to_string(ck.history.epochs.size()) + " epochs, final train loss " + fmt(loss) +
         ", " + std::to_string(distinct.size()) + " lines reproduced and flagged, " +
         fmt(elapsed) + " s";
}

// 3. Temperature laws on random non-uniform distributions.
std::string temperature() {
  std::mt19937_64 rng(3);
  std::gamma_distribution<double> g(0.6, 1.0);
  double worst_norm = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(2 + trial % 15);
    double sum = 0.0;
    for (double& v : p) sum += (v = g(rng) + 1e-9);
    for (double& v : p) v /= sum;
    const std::size_t top = argmax(p);
    double previous = -1.0;
    for (int k = 1; k <= 20; ++k) {
      const auto q = temper(p, k / 10.0);
      double total = 0.0;
      for (double v : q) total += v;
      worst_norm = std::max(worst_norm, std::abs(total - 1.0));
      require(std::abs(total - 1.0) <= 1e-9, "normalization off by " + fmt(total - 1.0));
      require(argmax(q) == top, "argmax moved at T=" + fmt(k / 10.0));
      const double h = entropy(q);
      require(h >= previous - 1e-12, "entropy fell at T=" + fmt(k / 10.0));
      previous = h;
    }
  }
  return "100 distributions x 20 temperatures, worst normalization error " + fmt(worst_norm);
}

// 4. Cleaning conservation and sher counts on the fixture.
std::string corpus_pipeline() {
  const auto path = testing::data_path("corpus_devanagari.txt");
  std::size_t raw_lines = 0;
  {
    std::istringstream in(testing::read_text(path));
    for (std::string line; std::getline(in, line);) ++raw_lines;
  }
  const std::vector<std::filesystem::path> files{path};
  const auto [corpus, report] = clean(ingest_raw(files, Script::devanagari));
  require(report.lines_before == raw_lines, "lines_before " + std::to_string(report.lines_before) +
                                                " vs " + std::to_string(raw_lines));
  require(report.lines_after + report.removed_english + report.removed_empty +
                  report.removed_marker + report.removed_other ==
              report.lines_before,
          "conservation identity broken");
  require(report.lines_after == corpus.lines.size(), "lines_after disagrees with the corpus");

  const SampleSet shers = split(corpus, DatasetMode::sher);
  std::size_t next = 0;
  for (const auto& b : corpus.ghazal_bounds) {
    const std::size_t expected = (b.end - b.begin) / 2;
    for (std::size_t k = 0; k < expected; ++k, ++next) {
      require(next < shers.samples.size(), "too few sher samples");
      require(shers.samples[next] ==
                  corpus.lines[b.begin + 2 * k] + "\n" + corpus.lines[b.begin + 2 * k + 1],
              "sher sample " + std::to_string(next) + " does not pair its ghazal's lines");
    }
  }
  require(next == shers.samples.size(), "extra sher samples");
  require(report.sher_count == shers.samples.size(), "sher_count disagrees with split");

  std::string detail = "fixture: " + std::to_string(report.lines_before) + " lines in, " +
                       std::to_string(report.lines_after) + " kept, " +
                       std::to_string(corpus.ghazal_bounds.size()) + " ghazals, " +
                       std::to_string(shers.samples.size()) + " shers";

  if (const char* published = std::getenv("BAYAAZ_PUBLISHED_CORPUS"); published && *published) {
    const auto big = clean(ingest_raw(corpus_files(published), Script::devanagari)).second;
    require(big.lines_after == 123386, "published lines_after " + std::to_string(big.lines_after));
    require(big.removed_english == 8928,
            "published removed_english " + std::to_string(big.removed_english));
    require(big.ghazal_count == 6993, "published ghazal_count " + std::to_string(big.ghazal_count));
    require(big.sher_count == 61693, "published sher_count " + std::to_string(big.sher_count));
    detail += "; published corpus matches";
  } else {
    detail += "; published corpus not supplied (set BAYAAZ_PUBLISHED_CORPUS)";
  }
  return detail;
}

// 5. Khafeef scansion and radif/qaafiya on the romanized ghazal.
std::string prosody() {
  const MeterCatalog& catalog = MeterCatalog::builtin();
  require(catalog.patterns().size() >= 6, "catalog has " +
                                              std::to_string(catalog.patterns().size()) + " meters");
  const WeightSeq figure{Weight::L, Weight::S, Weight::L, Weight::L, Weight::S,
                         Weight::L, Weight::S, Weight::L, Weight::L, Weight::L};
  const auto matches = match_meter(figure, catalog);
  require(matches.size() == 1 && matches[0].name == "khafeef", "LSLLSLSLLL did not match khafeef only");

  const std::string line = "दिल-ए-नादाँ तुझे हुआ क्या है";
  require(syllabify(line) == figure, "fixture line scanned as " + to_string(syllabify(line)));

  std::vector<std::string> lines;
  std::istringstream in(testing::read_text(testing::data_path("ghazal_roman.txt")));
  for (std::string l; std::getline(in, l);) {
    if (!unicode::trim(l).empty()) lines.push_back(unicode::trim(l));
  }
  const auto verses = pair_verses(lines);
  const std::string radif = detect_radif(verses);
  require(radif == "kya hai", "radif \"" + radif + "\"");
  const auto qaafiya = detect_qaafiya(verses, radif);
  require(qaafiya && *qaafiya == "a", "qaafiya \"" + qaafiya.value_or("<none>") + "\"");
  return std::to_string(catalog.patterns().size()) + " meters; khafeef unique; radif \"" + radif +
         "\", qaafiya \"" + *qaafiya + "\"";
}

// 6. Skeleton round trip on the curated list, no silent loss on the fixtures.
std::string transliteration() {
  const auto words = testing::curated_words();
  require(words.size() >= 200, "curated list has " + std::to_string(words.size()) + " words");
  std::size_t kept = 0;
  for (const auto& w : words) {
    const std::string back = urdu_to_deva(deva_to_urdu(w.deva).text).text;
    require(testing::skeleton_oracle(back) == testing::skeleton_oracle(w.deva),
            w.deva + " came back as " + back);
    ++kept;
  }
  std::size_t chars = 0;
  for (const auto& [name, script] : {std::pair{"corpus_devanagari.txt", Script::devanagari},
                                     std::pair{"corpus_urdu.txt", Script::perso_arabic}}) {
    for (const auto& line : testing::load_corpus(name, script).lines) {
      const auto r = script == Script::devanagari ? deva_to_urdu(line) : urdu_to_deva(line);
      const std::size_t n = unicode::decode(line).size();
      require(r.passthrough.empty() && r.mapped == n, "characters unmapped in \"" + line + "\"");
      chars += n;
    }
  }
  return std::to_string(kept) + "/" + std::to_string(words.size()) +
         " skeletons preserved; " + std::to_string(chars) + " fixture characters all mapped";
}

// 7. Bit-exact persistence and seeded determinism.
std::string persistence() {
  const CleanCorpus corpus = testing::load_corpus("corpus_devanagari.txt", Script::devanagari);
  const SampleSet samples = split(corpus, DatasetMode::misra);
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 32;
  tc.learning_rate = 0.5;
  tc.seed = 42;
  ModelConfig mc;
  mc.seq_len = 16;
  mc.embed_dim = 8;
  mc.lstm_units = 12;
  mc.lstm_layers = 2;
  const Checkpoint a = train(samples, tc, mc);
  const Checkpoint b = train(samples, tc, mc);
  require(serialize_checkpoint(a) == serialize_checkpoint(b), "seeded training runs differ");
  tc.threads = 3;
  const Checkpoint c = train(samples, tc, mc);
  require(c.params == a.params && c.history == a.history, "thread count changed the weights");

  testing::TempDir dir;
  save_checkpoint(a, dir / "a.byz");
  const Checkpoint back = load_checkpoint(dir / "a.byz");
  require(back == a, "loaded checkpoint differs");
  require(testing::read_text(dir / "a.byz") == serialize_checkpoint(back), "re-save differs");

  GenerationRequest req;
  req.length = 120;
  req.temperature = 0.9;
  req.seed = 7;
  const GenerationResult g1 = generate(a, req);
  const GenerationResult g2 = generate(back, req);
  require(g1.text == g2.text && g1.token_logprobs == g2.token_logprobs, "seeded generation differs");
  return "checkpoint " + std::to_string(serialize_checkpoint(a).size()) +
         " bytes round-trips; train and generate repeat bit-for-bit";
}

// 8. Originality against the all-pairs oracle.
std::string originality() {
  std::size_t cases = 0;
  auto agree = [&](const std::string& text, const CleanCorpus& corpus, std::size_t min_run) {
    require(corpus.lines.size() <= 200, "corpus too large for the oracle");
    const LineIndex index = build_index(corpus);
    const PlagiarismReport r = check(text, index, min_run);
    auto brute = testing::brute_check(text, corpus, min_run);
    std::vector<std::pair<std::string, std::vector<std::size_t>>> exact;
    for (const auto& m : r.exact_matches) {
      std::vector<std::size_t> lines;
      for (const auto& loc : m.locations) lines.push_back(loc.line);
      exact.emplace_back(m.query, lines);
    }
    std::vector<std::tuple<std::string, std::size_t, std::size_t>> partial;
    for (const auto& m : r.partial_matches) partial.emplace_back(m.query, m.location.line, m.run_length);
    std::sort(exact.begin(), exact.end());
    std::sort(partial.begin(), partial.end());
    std::sort(brute.exact.begin(), brute.exact.end());
    std::sort(brute.partial.begin(), brute.partial.end());
    require(exact == brute.exact, "exact matches disagree");
    require(partial == brute.partial, "partial matches disagree");
    ++cases;
  };

  const CleanCorpus fixture = testing::load_corpus("corpus_devanagari.txt", Script::devanagari);
  std::string text;
  for (std::size_t i = 0; i + 1 < fixture.lines.size(); i += 2) {
    const auto a = unicode::split_words(fixture.lines[i]);
    const auto b = unicode::split_words(fixture.lines[i + 1]);
    std::string mix;
    for (std::size_t k = 0; k < a.size(); ++k) mix += (k == a.size() / 2 ? b[0] : a[k]) + " ";
    text += fixture.lines[i] + "\n" + mix + "\n";
  }
  for (std::size_t min_run : {2u, 3u, 4u}) agree(text, fixture, min_run);

  const std::vector<std::string> pool{"दिल", "है", "क्या", "ग़म", "तू", "मैं", "न", "हुआ"};
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    auto line = [&] {
      std::string s;
      for (std::size_t k = 0, n = 1 + rng() % 7; k < n; ++k) s += pool[rng() % pool.size()] + " ";
      return unicode::trim(s);
    };
    CleanCorpus c;
    for (std::size_t i = 0, n = 1 + rng() % 200; i < n; ++i) c.lines.push_back(line());
    c.ghazal_bounds = {{0, c.lines.size()}};
    std::string q;
    for (int k = 0; k < 8; ++k) q += (rng() % 3 == 0 ? c.lines[rng() % c.lines.size()] : line()) + "\n";
    agree(q, c, 2 + rng() % 3);
  }
  return std::to_string(cases) + " corpora agree with the all-pairs oracle";
}

// 9. Service examples and an interactive session.
std::string service_contract() {
  Service::Artifacts artifacts;
  artifacts.models.emplace(ModelKey{Script::devanagari, DatasetMode::misra},
                           testing::random_checkpoint(U"दिलहै नकयाम", 5));
  Service service(std::move(artifacts), std::chrono::seconds(900));

  const HttpResponse ok = service.route_request(
      "POST", "/api/generate",
      R"({"script":"devanagari","mode":"misra","length":300,"temperature":0.8})");
  require(ok.status == 200, "generate returned " + std::to_string(ok.status));
  const json body = json::parse(ok.body);
  require(body["text"].is_string() && unicode::decode(body["text"].get<std::string>()).size() <= 300,
          "generate text missing or too long");
  require(body["tokens"].get<std::size_t>() <= 300, "token count over 300");

  const HttpResponse hot = service.route_request("POST", "/api/generate", R"({"temperature":5.0})");
  require(hot.status == 400, "bad temperature returned " + std::to_string(hot.status));
  const json err = json::parse(hot.body);
  require(err["error"]["code"] == "bad_temperature" && err["error"]["message"].is_string() &&
              err["error"].contains("detail"),
          "bad temperature body " + hot.body);

  const HttpResponse missing = service.route_request("GET", "/api/nonexistent", "");
  require(missing.status == 404, "unknown route returned " + std::to_string(missing.status));
  require(json::parse(missing.body)["error"]["code"] == "not_found", "unknown route body");

  const HttpResponse start =
      service.route_request("POST", "/api/interactive/start", R"({"context":"दिल"})");
  require(start.status == 200, "start returned " + std::to_string(start.status));
  const json s0 = json::parse(start.body);
  const std::string id = s0["session_id"];
  const std::size_t words0 = unicode::split_words(s0["context"].get<std::string>()).size();
  std::string context = s0["context"];
  for (int step = 0; step < 2; ++step) {
    const HttpResponse r = service.route_request(
        "POST", "/api/interactive/choose", json{{"session_id", id}, {"index", 0}}.dump());
    require(r.status == 200, "choose returned " + std::to_string(r.status));
    const std::string next = json::parse(r.body)["context"];
    require(next.starts_with(context) && next.size() > context.size(), "context did not grow");
    context = next;
  }
  const std::size_t words2 = unicode::split_words(context).size();
  require(words2 == words0 + 2, "context grew by " + std::to_string(words2 - words0) + " words");
  return "200/400/404 as documented; session context \"" + s0["context"].get<std::string>() +
         "\" -> \"" + context + "\"";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"gradient correctness", gradients},
      {"memorization loop", memorization},
      {"temperature laws", temperature},
      {"corpus pipeline", corpus_pipeline},
      {"prosody", prosody},
      {"transliteration", transliteration},
      {"persistence and determinism", persistence},
      {"originality oracle", originality},
      {"service contract", service_contract},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, run] = criteria[i];
    std::string detail;
    bool ok = false;
    try {
      detail = run();
      ok = true;
    } catch (const std::exception& e) {
      detail = e.what();
    }
    if (!ok) ++failed;
    std::cout << "criterion " << (i + 1) << " " << (ok ? "PASS" : "FAIL") << " " << name << ": "
              << detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
