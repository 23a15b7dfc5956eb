#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bayaaz/corpus.hpp"
#include "bayaaz/originality.hpp"
#include "bayaaz/prosody.hpp"
#include "bayaaz/script_bridge.hpp"
#include "bayaaz/session.hpp"
#include "bayaaz/trainer.hpp"

namespace bayaaz {

using ModelKey = std::pair<Script, DatasetMode>;

// Key-value text, one "key = value" per line, "#" comments:
//   port, host, session_timeout (seconds), suggestions (top N),
//   model.<script>.<mode> = checkpoint path,
//   corpus.<script> = corpus file or directory (plagiarism index),
//   transliteration_table, meter_catalog = data file overrides.
// Relative paths are resolved against the config file's directory.
struct ServiceConfig {
  std::uint16_t port = 8080;
  std::string host = "127.0.0.1";
  std::map<ModelKey, std::filesystem::path> models;
  std::map<Script, std::filesystem::path> corpora;
  std::chrono::seconds session_timeout{900};
  std::size_t suggestions = 5;
  std::optional<std::filesystem::path> transliteration_table;
  std::optional<std::filesystem::path> meter_catalog;

  // Throws Error{config} on unknown keys or bad values.
  static ServiceConfig parse(std::string_view text, const std::filesystem::path& base = {});
  static ServiceConfig load(const std::filesystem::path& path);
  // Throws Error{config} when a referenced path does not exist.
  void validate() const;
};

// Error codes carried in {"error": {"code", "message", "detail"}}.
const std::vector<std::string_view>& api_error_codes();

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON
};

class Service {
 public:
  using Clock = SessionStore::Clock;

  struct Artifacts {
    std::map<ModelKey, Checkpoint> models;
    std::map<Script, CleanCorpus> corpora;
    MappingTable table = MappingTable::builtin();
    MeterCatalog catalog = MeterCatalog::builtin();
  };

  // Loads every checkpoint and corpus named by `config`.
  explicit Service(const ServiceConfig& config);
  Service(Artifacts artifacts, std::chrono::seconds session_timeout,
          std::function<Clock::time_point()> now = Clock::now, std::size_t suggestions = 5);

  // Pure dispatch: no I/O besides the in-memory session store.
  HttpResponse route_request(std::string_view method, std::string_view path,
                             std::string_view body);

  std::size_t live_sessions() const { return sessions_.size(); }

 private:
  HttpResponse generate(std::string_view body);
  HttpResponse interactive_start(std::string_view body);
  HttpResponse interactive_choose(std::string_view body);
  HttpResponse plagiarism(std::string_view body);
  HttpResponse transliterate(std::string_view body);
  HttpResponse meter(std::string_view body);
  HttpResponse models() const;

  const Checkpoint& model(Script script, DatasetMode mode) const;

  std::map<ModelKey, Checkpoint> models_;
  std::map<Script, std::unique_ptr<LineIndex>> indexes_;
  MappingTable table_;
  MeterCatalog catalog_;
  SessionStore sessions_;
  std::size_t suggestions_ = 5;
};

// Blocks serving `service` over HTTP until the process is stopped.
// Throws Error{io} when the port cannot be bound.
void serve(Service& service, const std::string& host, std::uint16_t port);

// Corpus files named by `path`: the file itself, or the regular files of a
// directory in name order.
std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& path);

}  // namespace bayaaz
