#include <doctest.h>

#include <json.hpp>
#include <set>

#include "bayaaz/error.hpp"
#include "bayaaz/service.hpp"
#include "test_support.hpp"

using namespace bayaaz;
using json = nlohmann::json;

namespace {

const std::u32string kChars = U"दिलहै नकयाम";

struct Fixture {
  SessionStore::Clock::time_point now{};
  Service service;

  Fixture()
      : service(artifacts(), std::chrono::seconds(900), [this] { return now; }, 3) {}

  static Service::Artifacts artifacts() {
    Service::Artifacts a;
    a.models.emplace(ModelKey{Script::devanagari, DatasetMode::misra},
                     testing::random_checkpoint(kChars, 4));
    a.corpora.emplace(Script::devanagari,
                      testing::load_corpus("corpus_devanagari.txt", Script::devanagari));
    return a;
  }

  std::pair<int, json> post(std::string_view path, const json& body) {
    const HttpResponse r = service.route_request("POST", path, body.dump());
    return {r.status, json::parse(r.body)};
  }
};

std::string code_of(const json& body) { return body.at("error").at("code").get<std::string>(); }

void check_error_shape(const json& body) {
  REQUIRE(body.contains("error"));
  const json& e = body["error"];
  CHECK(e["code"].is_string());
  CHECK(e["message"].is_string());
  CHECK(e.contains("detail"));
  const auto& codes = api_error_codes();
  CHECK(std::find(codes.begin(), codes.end(), e["code"].get<std::string>()) != codes.end());
}

std::size_t word_count(const std::string& s) { return unicode::split_words(s).size(); }

}  // namespace

TEST_CASE("generate succeeds with the documented fields") {
  Fixture f;
  const auto [status, body] = f.post(
      "/api/generate",
      {{"script", "devanagari"}, {"mode", "misra"}, {"length", 300}, {"temperature", 0.8}});
  CHECK(status == 200);
  CHECK(body["text"].is_string());
  CHECK(unicode::decode(body["text"].get<std::string>()).size() <= 300);
  CHECK(body["tokens"].get<std::size_t>() <= 300);
  CHECK(body["script"] == "devanagari");
  CHECK(body["mode"] == "misra");
  CHECK(body["length"] == 300);
  CHECK(body["temperature"] == 0.8);
  CHECK(body["ended"].is_boolean());

  const auto [s2, again] = f.post(
      "/api/generate",
      {{"script", "devanagari"}, {"mode", "misra"}, {"length", 300}, {"temperature", 0.8}});
  CHECK(again["text"] == body["text"]);
}

TEST_CASE("generate validation") {
  Fixture f;
  auto [s1, b1] = f.post("/api/generate", {{"temperature", 5.0}});
  CHECK(s1 == 400);
  CHECK(code_of(b1) == "bad_temperature");
  check_error_shape(b1);

  auto [s2, b2] = f.post("/api/generate", {{"length", 0}});
  CHECK(s2 == 400);
  CHECK(code_of(b2) == "bad_length");
  auto [s3, b3] = f.post("/api/generate", {{"length", 10001}});
  CHECK(code_of(b3) == "bad_length");
  auto [s4, b4] = f.post("/api/generate", {{"length", -3}});
  CHECK(code_of(b4) == "bad_length");

  auto [s5, b5] = f.post("/api/generate", {{"mode", "ghazal"}});
  CHECK(s5 == 404);
  CHECK(code_of(b5) == "no_model");
  auto [s6, b6] = f.post("/api/generate", {{"script", "klingon"}});
  CHECK(code_of(b6) == "bad_request");
  auto [s7, b7] = f.post("/api/generate", {{"prefix", "xyz"}});
  CHECK(s7 == 400);
  CHECK(code_of(b7) == "out_of_vocab");

  const HttpResponse bad = f.service.route_request("POST", "/api/generate", "{not json");
  CHECK(bad.status == 400);
  CHECK(code_of(json::parse(bad.body)) == "bad_request");
  const HttpResponse arr = f.service.route_request("POST", "/api/generate", "[1]");
  CHECK(code_of(json::parse(arr.body)) == "bad_request");

  auto [s8, b8] = f.post("/api/generate", {{"prefix", "दिल"}, {"length", 5}, {"temperature", 0}});
  CHECK(s8 == 200);
  CHECK(b8["text"].get<std::string>().starts_with("दिल"));
}

TEST_CASE("unknown routes and wrong methods") {
  Fixture f;
  const HttpResponse r = f.service.route_request("GET", "/api/nonexistent", "");
  CHECK(r.status == 404);
  CHECK(code_of(json::parse(r.body)) == "not_found");
  check_error_shape(json::parse(r.body));

  const HttpResponse m = f.service.route_request("GET", "/api/generate", "");
  CHECK(m.status == 405);
  CHECK(code_of(json::parse(m.body)) == "method_not_allowed");
  CHECK(f.service.route_request("POST", "/api/health", "").status == 405);

  const HttpResponse h = f.service.route_request("GET", "/api/health?x=1", "");
  CHECK(h.status == 200);
  CHECK(json::parse(h.body)["status"] == "ok");
}

TEST_CASE("error taxonomy is closed") {
  const std::set<std::string_view> codes(api_error_codes().begin(), api_error_codes().end());
  CHECK(codes.size() == api_error_codes().size());
  for (const char* c : {"bad_request", "bad_temperature", "no_session", "not_found"}) {
    CHECK(codes.contains(c));
  }
}

TEST_CASE("interactive start, choose, choose") {
  Fixture f;
  auto [s0, start] = f.post("/api/interactive/start", {{"context", "दिल"}});
  REQUIRE(s0 == 200);
  const std::string id = start["session_id"];
  CHECK(start["context"] == "दिल ");
  REQUIRE(start["choices"].size() >= 1);
  CHECK(start["choices"].size() <= 3);
  const std::size_t words0 = word_count(start["context"]);

  auto [s1, one] = f.post("/api/interactive/choose", {{"session_id", id}, {"index", 0}});
  REQUIRE(s1 == 200);
  CHECK(one["session_id"] == id);
  CHECK(one["context"] == "दिल " + start["choices"][0]["word"].get<std::string>() + " ");

  auto [s2, two] = f.post("/api/interactive/choose", {{"session_id", id}, {"index", 0}});
  REQUIRE(s2 == 200);
  CHECK(word_count(two["context"]) == words0 + 2);
  CHECK(two["context"].get<std::string>().starts_with(one["context"].get<std::string>()));

  double previous = 0.0;
  for (std::size_t i = 0; i < two["choices"].size(); ++i) {
    const double score = two["choices"][i]["score"];
    if (i > 0) CHECK(score <= previous);
    previous = score;
  }
}

TEST_CASE("interactive errors and expiry") {
  Fixture f;
  auto [s0, start] = f.post("/api/interactive/start", {{"context", "दिल"}, {"top", 2}});
  REQUIRE(s0 == 200);
  CHECK(start["choices"].size() <= 2);
  const std::string id = start["session_id"];

  auto [s1, b1] = f.post("/api/interactive/choose", {{"session_id", id}, {"index", 9}});
  CHECK(s1 == 400);
  CHECK(code_of(b1) == "bad_choice");
  auto [s2, b2] = f.post("/api/interactive/choose", {{"session_id", "nope"}, {"index", 0}});
  CHECK(s2 == 404);
  CHECK(code_of(b2) == "no_session");
  auto [s3, b3] = f.post("/api/interactive/start", {{"top", 0}});
  CHECK(code_of(b3) == "bad_request");

  f.now += std::chrono::seconds(901);
  auto [s4, b4] = f.post("/api/interactive/choose", {{"session_id", id}, {"index", 0}});
  CHECK(s4 == 404);
  CHECK(code_of(b4) == "no_session");
}

TEST_CASE("plagiarism endpoint") {
  Fixture f;
  const CleanCorpus corpus = testing::load_corpus("corpus_devanagari.txt", Script::devanagari);
  auto [s0, hit] = f.post("/api/plagiarism", {{"text", corpus.lines[1]}});
  REQUIRE(s0 == 200);
  CHECK(hit["clean"] == false);
  REQUIRE(hit["exact_matches"].size() == 1);
  CHECK(hit["exact_matches"][0]["locations"][0]["line"] == 1);
  CHECK(hit["exact_matches"][0]["locations"][0]["text"] == corpus.lines[1]);

  auto [s1, clean] = f.post("/api/plagiarism", {{"text", "ढ़ ढ़ ढ़"}});
  CHECK(clean["clean"] == true);
  auto [s2, b2] = f.post("/api/plagiarism", {{"text", "x"}, {"script", "urdu"}});
  CHECK(s2 == 404);
  CHECK(code_of(b2) == "no_corpus");
  auto [s3, b3] = f.post("/api/plagiarism", {{"text", "x"}, {"min_run", 1}});
  CHECK(code_of(b3) == "bad_request");
  auto [s4, b4] = f.post("/api/plagiarism", json::object());
  CHECK(code_of(b4) == "bad_request");
}

TEST_CASE("transliterate endpoint") {
  Fixture f;
  auto [s0, u] = f.post("/api/transliterate", {{"text", "किया x"}, {"to", "urdu"}});
  REQUIRE(s0 == 200);
  CHECK(u["text"] == "کیا x");
  CHECK(u["to"] == "urdu");
  CHECK(u["passthrough"] == json::array({"x"}));
  auto [s1, d] = f.post("/api/transliterate", {{"text", "کیا"}, {"to", "devanagari"}});
  CHECK(d["text"] == "किया");
  auto [s2, b2] = f.post("/api/transliterate", {{"text", "a"}, {"to", "roman"}});
  CHECK(code_of(b2) == "bad_request");
}

TEST_CASE("meter endpoint") {
  Fixture f;
  const std::string ghazal =
      "दिल-ए-नादाँ तुझे हुआ क्या है\nआख़िर इस दर्द की दवा क्या है\n"
      "हम हैं मुश्ताक़ और वो बेज़ार\nया इलाही ये माजरा क्या है\n";
  auto [s0, m] = f.post("/api/meter", {{"text", ghazal}});
  REQUIRE(s0 == 200);
  REQUIRE(m["lines"].size() == 4);
  CHECK(m["lines"][0]["weights"] == "LSLLSLSLLL");
  CHECK(m["lines"][0]["meters"] == json::array({"khafeef"}));
  CHECK(m["ghazal"]["radif"] == "क्या है");
  CHECK(m["ghazal"]["qaafiya"] == "ा");
  CHECK(m["ghazal"]["matla_ok"] == true);

  auto [s1, urdu] = f.post("/api/meter", {{"text", "دل"}, {"script", "urdu"}});
  CHECK(s1 == 200);
  CHECK(!urdu.contains("ghazal"));
  auto [s2, b2] = f.post("/api/meter", {{"text", "hello"}});
  CHECK(s2 == 400);
  CHECK(code_of(b2) == "scansion_error");
}

TEST_CASE("models listing") {
  Fixture f;
  const HttpResponse r = f.service.route_request("GET", "/api/models", "");
  REQUIRE(r.status == 200);
  const json body = json::parse(r.body);
  REQUIRE(body["models"].size() == 1);
  CHECK(body["models"][0]["script"] == "devanagari");
  CHECK(body["models"][0]["mode"] == "misra");
  CHECK(body["corpora"][0]["lines"] ==
        testing::load_corpus("corpus_devanagari.txt", Script::devanagari).lines.size());
}

TEST_CASE("config parsing") {
  const ServiceConfig c = ServiceConfig::parse(
      "# service\nport = 9090\nhost = 0.0.0.0\nsession_timeout = 60\nsuggestions = 4\n"
      "model.devanagari.misra = m.byz\ncorpus.urdu = corpus/\n",
      "/srv");
  CHECK(c.port == 9090);
  CHECK(c.host == "0.0.0.0");
  CHECK(c.session_timeout == std::chrono::seconds(60));
  CHECK(c.suggestions == 4);
  CHECK(c.models.at({Script::devanagari, DatasetMode::misra}) == std::filesystem::path("/srv/m.byz"));
  CHECK(c.corpora.at(Script::perso_arabic) == std::filesystem::path("/srv/corpus/"));
  CHECK_THROWS_AS(c.validate(), Error);

  const ServiceConfig d = ServiceConfig::parse("");
  CHECK(d.port == 8080);
  CHECK(d.session_timeout == std::chrono::seconds(900));

  for (const char* bad : {"colour = red\n", "port = 0\n", "port = 70000\n", "port\n",
                          "model.devanagari.couplet = m\n", "model.klingon.misra = m\n",
                          "session_timeout = -1\n"}) {
    INFO(bad);
    try {
      ServiceConfig::parse(bad);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
    }
  }
}

TEST_CASE("service loads artifacts named by a config") {
  testing::TempDir dir;
  save_checkpoint(testing::random_checkpoint(kChars, 9), dir / "m.byz");
  std::filesystem::create_directories(dir / "corpus");
  std::filesystem::copy_file(testing::data_path("corpus_devanagari.txt"), dir / "corpus" / "a.txt");
  {
    std::ofstream(dir / "bayaaz.conf") << "model.devanagari.sher = m.byz\ncorpus.devanagari = corpus\n";
  }
  const ServiceConfig config = ServiceConfig::load(dir / "bayaaz.conf");
  CHECK_NOTHROW(config.validate());
  Service service(config);
  const HttpResponse r = service.route_request(
      "POST", "/api/generate", R"({"mode":"sher","length":5,"temperature":0})");
  CHECK(r.status == 200);
  CHECK(corpus_files(dir / "corpus").size() == 1);
  CHECK(corpus_files(dir / "m.byz") == std::vector<std::filesystem::path>{dir / "m.byz"});
}
