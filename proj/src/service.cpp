#include "bayaaz/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "bayaaz/error.hpp"
#include "bayaaz/generator.hpp"
#include "bayaaz/unicode.hpp"

namespace bayaaz {

using json = nlohmann::json;

namespace {

constexpr std::size_t kMaxLength = 10000;
constexpr std::size_t kMaxTop = 50;

struct ApiFailure {
  int status;
  std::string code;
  std::string message;
  std::string detail;
};

[[noreturn]] void fail(int status, std::string code, std::string message,
                       std::string detail = {}) {
  throw ApiFailure{status, std::move(code), std::move(message), std::move(detail)};
}

HttpResponse ok(const json& body) { return {200, body.dump()}; }

HttpResponse error_response(const ApiFailure& f) {
  json body = {{"error", {{"code", f.code}, {"message", f.message}, {"detail", f.detail}}}};
  return {f.status, body.dump()};
}

// Library errors surfacing from a request map onto the wire taxonomy.
ApiFailure from_error(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::vocab:
      return {400, "out_of_vocab", "input contains characters the model does not know", e.what()};
    case ErrorKind::config:
      return {400, "bad_temperature", "temperature must lie in [0, 2]", e.what()};
    case ErrorKind::length:
      return {400, "bad_length", "bad length", e.what()};
    case ErrorKind::choice:
      return {400, "bad_choice", "no such choice", e.what()};
    case ErrorKind::session:
      return {404, "no_session", "session not found or expired", e.what()};
    case ErrorKind::scansion:
      return {400, "scansion_error", "line could not be scanned", e.what()};
    case ErrorKind::structure:
    case ErrorKind::empty_input:
    case ErrorKind::encoding:
      return {400, "bad_request", "invalid input", e.what()};
    default:
      return {500, "internal", "internal error", e.what()};
  }
}

json parse_body(std::string_view body) {
  json j;
  try {
    j = json::parse(body.empty() ? std::string_view("{}") : body);
  } catch (const json::parse_error& e) {
    fail(400, "bad_request", "body is not valid JSON", e.what());
  }
  if (!j.is_object()) fail(400, "bad_request", "body must be a JSON object");
  return j;
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) fail(400, "bad_request", std::string(key) + " must be a string");
  return it->get<std::string>();
}

std::string req_string(const json& j, const char* key) {
  auto v = opt_string(j, key);
  if (!v) fail(400, "bad_request", std::string(key) + " is required");
  return *v;
}

std::optional<double> opt_number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) fail(400, "bad_request", std::string(key) + " must be a number");
  return it->get<double>();
}

std::optional<std::uint64_t> opt_count(const json& j, const char* key, const char* code) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) fail(400, code, std::string(key) + " must be an integer");
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  const auto v = it->get<std::int64_t>();
  if (v < 0) fail(400, code, std::string(key) + " must not be negative");
  return static_cast<std::uint64_t>(v);
}

Script script_field(const json& j) {
  const auto name = opt_string(j, "script").value_or("devanagari");
  const auto s = parse_script(name);
  if (!s) fail(400, "bad_request", "unknown script", name);
  return *s;
}

DatasetMode mode_field(const json& j) {
  const auto name = opt_string(j, "mode").value_or("misra");
  const auto m = parse_mode(name);
  if (!m) fail(400, "bad_request", "unknown mode", name);
  return *m;
}

std::size_t top_field(const json& j, std::size_t fallback) {
  const auto top = opt_count(j, "top", "bad_request").value_or(fallback);
  if (top == 0 || top > kMaxTop) fail(400, "bad_request", "top must lie in [1, 50]");
  return top;
}

json choices_json(const std::vector<WordChoice>& choices) {
  json out = json::array();
  for (const auto& c : choices) out.push_back({{"word", c.word}, {"score", c.score}});
  return out;
}

json session_json(const InteractiveSession& s) {
  return {{"session_id", s.session_id}, {"context", s.context}, {"choices", choices_json(s.pending)}};
}

}  // namespace

const std::vector<std::string_view>& api_error_codes() {
  static const std::vector<std::string_view> codes = {
      "bad_request", "bad_temperature", "bad_length",         "bad_choice",
      "no_session",  "no_model",        "no_corpus",          "out_of_vocab",
      "not_found",   "method_not_allowed", "scansion_error",  "internal"};
  return codes;
}

ServiceConfig ServiceConfig::parse(std::string_view text, const std::filesystem::path& base) {
  ServiceConfig config;
  auto resolve = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_absolute() || base.empty() ? p : base / p;
  };
  auto number = [](const std::string& key, const std::string& v) {
    std::uint64_t n = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw Error(ErrorKind::config, key + " must be a non-negative integer, got '" + v + "'");
    }
    return n;
  };

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = unicode::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::config, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = unicode::trim(std::string_view(t).substr(0, eq));
    const std::string value = unicode::trim(std::string_view(t).substr(eq + 1));

    if (key == "port") {
      const auto p = number(key, value);
      if (p == 0 || p > 65535) throw Error(ErrorKind::config, "port out of range");
      config.port = static_cast<std::uint16_t>(p);
    } else if (key == "host") {
      config.host = value;
    } else if (key == "session_timeout") {
      config.session_timeout = std::chrono::seconds(number(key, value));
    } else if (key == "suggestions") {
      config.suggestions = number(key, value);
      if (config.suggestions == 0) throw Error(ErrorKind::config, "suggestions must be positive");
    } else if (key == "transliteration_table") {
      config.transliteration_table = resolve(value);
    } else if (key == "meter_catalog") {
      config.meter_catalog = resolve(value);
    } else if (key.starts_with("model.")) {
      const std::string rest = key.substr(6);
      const auto dot = rest.find('.');
      const auto script = parse_script(rest.substr(0, dot));
      const auto mode = dot == std::string::npos ? std::nullopt : parse_mode(rest.substr(dot + 1));
      if (!script || !mode) throw Error(ErrorKind::config, "bad model key " + key);
      config.models[{*script, *mode}] = resolve(value);
    } else if (key.starts_with("corpus.")) {
      const auto script = parse_script(key.substr(7));
      if (!script) throw Error(ErrorKind::config, "bad corpus key " + key);
      config.corpora[*script] = resolve(value);
    } else {
      throw Error(ErrorKind::config, "unknown config key " + key);
    }
  }
  return config;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.parent_path());
}

void ServiceConfig::validate() const {
  auto check = [](const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) throw Error(ErrorKind::config, "missing file " + p.string());
  };
  for (const auto& [key, p] : models) check(p);
  for (const auto& [key, p] : corpora) check(p);
  if (transliteration_table) check(*transliteration_table);
  if (meter_catalog) check(*meter_catalog);
}

std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) return {path};
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

namespace {

Service::Artifacts load_artifacts(const ServiceConfig& config) {
  config.validate();
  Service::Artifacts a;
  for (const auto& [key, path] : config.models) a.models.emplace(key, load_checkpoint(path));
  for (const auto& [script, path] : config.corpora) {
    const auto files = corpus_files(path);
    a.corpora.emplace(script, clean(ingest_raw(files, script)).first);
  }
  if (config.transliteration_table) a.table = MappingTable::load(*config.transliteration_table);
  if (config.meter_catalog) a.catalog = MeterCatalog::load(*config.meter_catalog);
  return a;
}

}  // namespace

Service::Service(const ServiceConfig& config)
    : Service(load_artifacts(config), config.session_timeout, Clock::now, config.suggestions) {}

Service::Service(Artifacts artifacts, std::chrono::seconds session_timeout,
                 std::function<Clock::time_point()> now, std::size_t suggestions)
    : models_(std::move(artifacts.models)),
      table_(std::move(artifacts.table)),
      catalog_(std::move(artifacts.catalog)),
      sessions_(session_timeout, std::move(now)),
      suggestions_(suggestions) {
  for (const auto& [script, corpus] : artifacts.corpora) {
    indexes_.emplace(script, std::make_unique<LineIndex>(corpus));
  }
}

const Checkpoint& Service::model(Script script, DatasetMode mode) const {
  const auto it = models_.find({script, mode});
  if (it == models_.end()) {
    fail(404, "no_model", "no model loaded for this script and mode",
         std::string(script_name(script)) + "/" + std::string(mode_name(mode)));
  }
  return it->second;
}

HttpResponse Service::route_request(std::string_view method, std::string_view path,
                                    std::string_view body) {
  using Handler = HttpResponse (Service::*)(std::string_view);
  static const std::map<std::string_view, Handler, std::less<>> posts = {
      {"/api/generate", &Service::generate},
      {"/api/interactive/start", &Service::interactive_start},
      {"/api/interactive/choose", &Service::interactive_choose},
      {"/api/plagiarism", &Service::plagiarism},
      {"/api/transliterate", &Service::transliterate},
      {"/api/meter", &Service::meter},
  };
  static const std::vector<std::string_view> gets = {"/api/models", "/api/health"};

  const auto query = path.find('?');
  if (query != std::string_view::npos) path = path.substr(0, query);

  try {
    if (const auto it = posts.find(path); it != posts.end()) {
      if (method != "POST") fail(405, "method_not_allowed", "use POST", std::string(path));
      return (this->*(it->second))(body);
    }
    if (std::find(gets.begin(), gets.end(), path) != gets.end()) {
      if (method != "GET") fail(405, "method_not_allowed", "use GET", std::string(path));
      if (path == "/api/health") return ok({{"status", "ok"}});
      return models();
    }
    fail(404, "not_found", "no such endpoint", std::string(path));
  } catch (const ApiFailure& f) {
    return error_response(f);
  } catch (const Error& e) {
    return error_response(from_error(e));
  } catch (const std::exception& e) {
    return error_response({500, "internal", "internal error", e.what()});
  }
}

HttpResponse Service::generate(std::string_view body) {
  const json j = parse_body(body);
  GenerationRequest req;
  req.temperature = opt_number(j, "temperature").value_or(req.temperature);
  if (!(req.temperature >= 0.0 && req.temperature <= kMaxTemperature)) {
    fail(400, "bad_temperature", "temperature must lie in [0, 2]",
         "got " + std::to_string(req.temperature));
  }
  req.length = opt_count(j, "length", "bad_length").value_or(req.length);
  if (req.length == 0 || req.length > kMaxLength) {
    fail(400, "bad_length", "length must lie in [1, 10000]", "got " + std::to_string(req.length));
  }
  req.seed = opt_count(j, "seed", "bad_request").value_or(0);
  req.prefix = opt_string(j, "prefix");
  const Script script = script_field(j);
  req.mode = mode_field(j);

  const GenerationResult r = bayaaz::generate(model(script, req.mode), req);
  return ok({{"text", r.text},
             {"tokens", r.token_logprobs.size()},
             {"ended", r.ended},
             {"script", script_name(script)},
             {"mode", mode_name(req.mode)},
             {"length", req.length},
             {"temperature", req.temperature}});
}

HttpResponse Service::interactive_start(std::string_view body) {
  const json j = parse_body(body);
  const Script script = script_field(j);
  const DatasetMode mode = mode_field(j);
  const std::size_t top = top_field(j, suggestions_);
  std::string context = opt_string(j, "context").value_or(opt_string(j, "prefix").value_or(""));
  const Checkpoint& ck = model(script, mode);
  ck.vocab.encode(context);
  return ok(session_json(sessions_.start(ck, std::move(context), top)));
}

HttpResponse Service::interactive_choose(std::string_view body) {
  const json j = parse_body(body);
  const std::string id = req_string(j, "session_id");
  const auto index = opt_count(j, "index", "bad_choice");
  if (!index) fail(400, "bad_choice", "index is required");
  return ok(session_json(sessions_.choose(id, *index)));
}

HttpResponse Service::plagiarism(std::string_view body) {
  const json j = parse_body(body);
  const Script script = script_field(j);
  const std::string text = req_string(j, "text");
  const std::size_t min_run = opt_count(j, "min_run", "bad_request").value_or(3);
  if (min_run < 2) fail(400, "bad_request", "min_run must be at least 2");
  const auto it = indexes_.find(script);
  if (it == indexes_.end()) {
    fail(404, "no_corpus", "no corpus loaded for this script", std::string(script_name(script)));
  }
  const LineIndex& index = *it->second;
  const PlagiarismReport report = check(text, index, min_run);

  json exact = json::array();
  for (const auto& m : report.exact_matches) {
    json locs = json::array();
    for (const auto& loc : m.locations) {
      locs.push_back({{"ghazal", loc.ghazal}, {"line", loc.line}, {"text", index.line(loc.line)}});
    }
    exact.push_back({{"query", m.query}, {"locations", locs}});
  }
  json partial = json::array();
  for (const auto& m : report.partial_matches) {
    partial.push_back({{"query", m.query},
                       {"corpus_line", m.corpus_line},
                       {"ghazal", m.location.ghazal},
                       {"line", m.location.line},
                       {"run_length", m.run_length}});
  }
  return ok({{"clean", report.clean}, {"exact_matches", exact}, {"partial_matches", partial}});
}

HttpResponse Service::transliterate(std::string_view body) {
  const json j = parse_body(body);
  const std::string text = req_string(j, "text");
  const auto to_name = req_string(j, "to");
  const auto to = parse_script(to_name);
  if (!to || *to == Script::roman) fail(400, "bad_request", "to must be devanagari or urdu", to_name);
  const TransliterationResult r =
      *to == Script::perso_arabic ? deva_to_urdu(text, table_) : urdu_to_deva(text, table_);
  json flags = json::array();
  for (const auto& a : r.ambiguities) flags.push_back({{"position", a.position}, {"reason", a.reason}});
  json passthrough = json::array();
  for (char32_t c : r.passthrough) passthrough.push_back(unicode::encode(c));
  return ok({{"text", r.text},
             {"to", script_name(*to)},
             {"ambiguities", flags},
             {"passthrough", passthrough}});
}

HttpResponse Service::meter(std::string_view body) {
  const json j = parse_body(body);
  const std::string text = req_string(j, "text");
  const Script script = script_field(j);
  if (script == Script::roman) fail(400, "bad_request", "meter needs devanagari or urdu text");

  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string raw; std::getline(in, raw);) {
    std::string line = unicode::trim(raw);
    if (!line.empty()) lines.push_back(std::move(line));
  }
  if (lines.empty()) fail(400, "bad_request", "text has no lines");

  json out = json::array();
  for (const auto& line : lines) {
    const std::string deva = script == Script::perso_arabic ? urdu_to_deva(line, table_).text : line;
    const WeightSeq w = syllabify(deva);
    json names = json::array();
    for (const auto& p : match_meter(w, catalog_)) names.push_back(p.name);
    out.push_back({{"text", line}, {"weights", to_string(w)}, {"meters", names}});
  }
  json result = {{"lines", out}};
  const auto verses = pair_verses(lines);
  if (verses.size() >= 2) {
    const GhazalStructure g = analyze_ghazal(verses);
    result["ghazal"] = {{"radif", g.radif},
                        {"qaafiya", g.qaafiya ? json(*g.qaafiya) : json(nullptr)},
                        {"matla_ok", g.matla_ok}};
  }
  return ok(result);
}

HttpResponse Service::models() const {
  json list = json::array();
  for (const auto& [key, ck] : models_) {
    list.push_back({{"script", script_name(key.first)},
                    {"mode", mode_name(key.second)},
                    {"vocab_size", ck.vocab.size()},
                    {"seq_len", ck.config.seq_len},
                    {"lstm_units", ck.config.lstm_units},
                    {"lstm_layers", ck.config.lstm_layers},
                    {"epochs", ck.history.epochs.size()}});
  }
  json corpora = json::array();
  for (const auto& [script, index] : indexes_) {
    corpora.push_back({{"script", script_name(script)}, {"lines", index->line_count()}});
  }
  return ok({{"models", list}, {"corpora", corpora}});
}

void serve(Service& service, const std::string& host, std::uint16_t port) {
  httplib::Server server;
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = service.route_request(req.method, req.path, req.body);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body, "application/json; charset=utf-8");
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
  server.Delete(".*", handler);
  server.Patch(".*", handler);
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  if (!server.listen(host, port)) {
    throw Error(ErrorKind::io, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace bayaaz
