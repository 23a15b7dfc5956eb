#include <doctest.h>

#include "bayaaz/corpus.hpp"
#include "bayaaz/error.hpp"
#include "bayaaz/script_bridge.hpp"
#include "bayaaz/unicode.hpp"
#include "test_support.hpp"

using namespace bayaaz;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::io;
}

void check_bounds(const TransliterationResult& r) {
  const std::size_t n = unicode::decode(r.text).size();
  for (const auto& a : r.ambiguities) {
    CHECK(!a.reason.empty());
    if (n == 0) {
      CHECK(a.position == 0);
    } else {
      CHECK(a.position < n);
    }
  }
}

void check_no_loss(const std::string& input, const TransliterationResult& r) {
  CHECK(r.mapped + r.passthrough.size() == unicode::decode(input).size());
}

bool has_reason(const TransliterationResult& r, std::string_view reason) {
  for (const auto& a : r.ambiguities) {
    if (a.reason.find(reason) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("basic devanagari to urdu") {
  CHECK(deva_to_urdu("क").text == "ک");
  CHECK(deva_to_urdu("किया").text == "کیا");
  CHECK(deva_to_urdu("दिल").text == "دل");
  CHECK(deva_to_urdu("है").text == "ہے");
  CHECK(deva_to_urdu("क्या").text == "کیا");
  CHECK(deva_to_urdu("ख़ुदा").text == "خدا");
  CHECK(deva_to_urdu("तुम्हें").text == "تمہیں");
  CHECK(deva_to_urdu("दिल है").text == "دل ہے");
  CHECK(deva_to_urdu("१२३").text == "۱۲۳");
  CHECK(deva_to_urdu("दिल।").text == "دل۔");
}

TEST_CASE("basic urdu to devanagari") {
  CHECK(urdu_to_deva("کیا").text == "किया");
  CHECK(urdu_to_deva("ک").text == "क");
  CHECK(urdu_to_deva("ہے").text == "हे");
  CHECK(urdu_to_deva("خدا").text == unicode::nfc("ख़दा"));
  CHECK(urdu_to_deva("۱۲۳").text == "१२३");
}

TEST_CASE("passthrough is listed") {
  const TransliterationResult r = deva_to_urdu("दिल x");
  CHECK(r.passthrough == std::vector<char32_t>{U'x'});
  CHECK(r.text.find('x') != std::string::npos);
  check_no_loss("दिल x", r);

  const TransliterationResult u = urdu_to_deva("دل ✓");
  CHECK(u.passthrough == std::vector<char32_t>{U'✓'});
  check_no_loss("دل ✓", u);
}

TEST_CASE("empty input") {
  for (const TransliterationResult& r : {deva_to_urdu(""), urdu_to_deva("")}) {
    CHECK(r.text.empty());
    CHECK(r.ambiguities.empty());
    CHECK(r.passthrough.empty());
    CHECK(r.mapped == 0);
  }
}

TEST_CASE("unvoweled consonant clusters are flagged") {
  for (const char* word : {"کتب", "درد", "صبر", "نظر"}) {
    const TransliterationResult r = urdu_to_deva(word);
    CHECK(!r.ambiguities.empty());
    CHECK(has_reason(r, "inferred short vowel"));
    check_bounds(r);
  }
}

TEST_CASE("izafat is rendered without a mark and flagged") {
  const TransliterationResult r = deva_to_urdu("दिल-ए-नादाँ");
  CHECK(has_reason(r, "izafat"));
  CHECK(r.text.find("ِ") == std::string::npos);
  CHECK(r.text.starts_with("دل "));
  check_bounds(r);
  check_no_loss("दिल-ए-नादाँ", r);
}

TEST_CASE("lossy letters are flagged") {
  const TransliterationResult r = deva_to_urdu("विषय");
  CHECK(has_reason(r, "lossy"));
  CHECK(testing::skeleton_oracle(urdu_to_deva(r.text).text) == testing::skeleton_oracle("वशय"));
}

TEST_CASE("curated words keep their consonant skeleton") {
  const auto words = testing::curated_words();
  CHECK(words.size() >= 200);
  std::size_t exact = 0;
  for (const auto& w : words) {
    const TransliterationResult u = deva_to_urdu(w.deva);
    const TransliterationResult d = urdu_to_deva(u.text);
    INFO(w.deva << " -> " << u.text << " -> " << d.text);
    CHECK(testing::skeleton_oracle(d.text) == testing::skeleton_oracle(w.deva));
    CHECK(consonant_skeleton(w.deva) == testing::skeleton_oracle(w.deva));
    CHECK(u.passthrough.empty());
    CHECK(d.passthrough.empty());
    check_bounds(u);
    check_bounds(d);
    if (w.urdu != "-") {
      ++exact;
      CHECK(u.text == w.urdu);
    }
  }
  CHECK(exact >= 50);
}

TEST_CASE("fixture corpora lose no characters") {
  for (const auto& [name, script] : {std::pair{"corpus_devanagari.txt", Script::devanagari},
                                     std::pair{"corpus_urdu.txt", Script::perso_arabic}}) {
    const CleanCorpus corpus = testing::load_corpus(name, script);
    REQUIRE(!corpus.lines.empty());
    for (const auto& line : corpus.lines) {
      const TransliterationResult r =
          script == Script::devanagari ? deva_to_urdu(line) : urdu_to_deva(line);
      INFO(line);
      CHECK(r.passthrough.empty());
      check_no_loss(line, r);
      check_bounds(r);
    }
  }
}

TEST_CASE("the devanagari fixture round trips by skeleton") {
  const CleanCorpus corpus = testing::load_corpus("corpus_devanagari.txt", Script::devanagari);
  for (const auto& line : corpus.lines) {
    const std::string back = urdu_to_deva(deva_to_urdu(line).text).text;
    INFO(line << " -> " << back);
    CHECK(testing::skeleton_oracle(back) == testing::skeleton_oracle(line));
  }
}

TEST_CASE("mapping table parsing") {
  const MappingTable& t = MappingTable::builtin();
  CHECK(t.section("consonant").size() >= 30);
  CHECK(t.section("no such kind").empty());
  const MappingTable loaded =
      MappingTable::load(std::filesystem::path(BAYAAZ_DATA_DIR) / "transliteration.tsv");
  CHECK(loaded.deva_letters() == t.deva_letters());
  CHECK(loaded.urdu_letters() == t.urdu_letters());

  const MappingTable small = MappingTable::parse("# tiny\nconsonant\tक\tک\nmatra\tा\tا\n");
  CHECK(deva_to_urdu("का", small).text == "کا");
  const TransliterationResult r = deva_to_urdu("खा", small);
  CHECK(r.passthrough == std::vector<char32_t>{U'ख'});

  CHECK(kind_of([] { MappingTable::parse("consonant\tक\n"); }) == ErrorKind::format);
  CHECK(kind_of([] { MappingTable::parse("bogus\tक\tک\n"); }) == ErrorKind::format);
  CHECK(kind_of([] { MappingTable::parse("matra\tा\tا\n"); }) == ErrorKind::format);
  CHECK(kind_of([] { MappingTable::parse("consonant\tक\tک\nconsonant\tक\tگ\n"); }) ==
        ErrorKind::consistency);
  CHECK(kind_of([] { MappingTable::parse("consonant\tक\tک\nconsonant\tख\tک\n"); }) ==
        ErrorKind::consistency);
  CHECK(kind_of([] { MappingTable::load("/nonexistent/table.tsv"); }) == ErrorKind::io);
}

TEST_CASE("consonant skeleton") {
  CHECK(consonant_skeleton("किया") == U"कय");
  CHECK(consonant_skeleton("नादाँ") == U"नदन");
  CHECK(consonant_skeleton("दर्द") == U"दरद");
  CHECK(consonant_skeleton("") == U"");
}
