#include "bayaaz/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "bayaaz/corpus.hpp"
#include "bayaaz/error.hpp"
#include "bayaaz/generator.hpp"
#include "bayaaz/originality.hpp"
#include "bayaaz/prosody.hpp"
#include "bayaaz/script_bridge.hpp"
#include "bayaaz/service.hpp"
#include "bayaaz/session.hpp"
#include "bayaaz/trainer.hpp"
#include "bayaaz/unicode.hpp"

namespace bayaaz {

namespace {

const std::vector<std::string> kScripts = {"devanagari", "urdu"};
const std::vector<std::string> kModes = {"misra", "sher", "ghazal"};

std::optional<ServiceConfig> find_config(const std::string& flag) {
  if (!flag.empty()) return ServiceConfig::load(flag);
  if (const char* env = std::getenv("BAYAAZ_CONFIG"); env && *env) return ServiceConfig::load(env);
  return std::nullopt;
}

std::vector<std::filesystem::path> expand(const std::vector<std::string>& inputs) {
  std::vector<std::filesystem::path> files;
  for (const auto& in : inputs) {
    for (auto& f : corpus_files(in)) files.push_back(std::move(f));
  }
  return files;
}

std::string read_all(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path);
  return read_all(in);
}

std::vector<std::string> text_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string raw; std::getline(in, raw);) {
    std::string line = unicode::trim(raw);
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

struct ModelChoice {
  std::string model;
  std::string config;
  std::string script = "devanagari";
  std::string mode = "misra";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--model", model, "Checkpoint file");
    cmd->add_option("--config", config, "Service config (model.<script>.<mode> entries)");
    cmd->add_option("--script", script, "Script of the configured model")
        ->check(CLI::IsMember(kScripts));
    cmd->add_option("--mode", mode, "Mode of the configured model")->check(CLI::IsMember(kModes));
  }

  Checkpoint load() const {
    if (!model.empty()) return load_checkpoint(model);
    const auto cfg = find_config(config);
    if (!cfg) throw Error(ErrorKind::config, "give --model, --config or BAYAAZ_CONFIG");
    const auto it = cfg->models.find({*parse_script(script), *parse_mode(mode)});
    if (it == cfg->models.end()) {
      throw Error(ErrorKind::config, "config has no model." + script + "." + mode);
    }
    return load_checkpoint(it->second);
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Ghazal prompt generator: corpus ingest, training, generation and analysis",
               "bayaaz"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Clean raw corpus files and report counts");
  std::string ingest_script;
  std::string ingest_out;
  std::vector<std::string> ingest_inputs;
  ingest->add_option("--script", ingest_script, "Corpus script")
      ->required()
      ->check(CLI::IsMember(kScripts));
  ingest->add_option("--out", ingest_out, "Write the cleaned corpus here");
  ingest->add_option("inputs", ingest_inputs, "Corpus files or directories")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model and save a checkpoint");
  std::string train_script;
  std::string train_mode = "misra";
  std::string train_out;
  std::string optimizer = "sgd";
  std::vector<std::string> train_inputs;
  TrainConfig tc;
  ModelConfig mc;
  train_cmd->add_option("--script", train_script, "Corpus script")
      ->required()
      ->check(CLI::IsMember(kScripts));
  train_cmd->add_option("--mode", train_mode, "Sample granularity")->check(CLI::IsMember(kModes));
  train_cmd->add_option("--out", train_out, "Checkpoint path")->required();
  train_cmd->add_option("--epochs", tc.epochs, "Epochs")->capture_default_str();
  train_cmd->add_option("--batch", tc.batch_size, "Minibatch size")->capture_default_str();
  train_cmd->add_option("--lr", tc.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--split", tc.split, "Training fraction")->capture_default_str();
  train_cmd->add_option("--clip", tc.grad_clip, "Gradient norm clip")->capture_default_str();
  train_cmd->add_option("--stride", tc.window_stride, "Window stride")->capture_default_str();
  train_cmd->add_option("--seed", tc.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--threads", tc.threads, "Worker threads")->capture_default_str();
  train_cmd->add_option("--optimizer", optimizer, "sgd or adam")
      ->check(CLI::IsMember({"sgd", "adam"}))
      ->capture_default_str();
  train_cmd->add_option("--seq-len", mc.seq_len, "Context window")->capture_default_str();
  train_cmd->add_option("--embed", mc.embed_dim, "Embedding size")->capture_default_str();
  train_cmd->add_option("--units", mc.lstm_units, "LSTM units per layer")->capture_default_str();
  train_cmd->add_option("--layers", mc.lstm_layers, "LSTM layers")->capture_default_str();
  train_cmd->add_option("inputs", train_inputs, "Corpus files or directories")->required();

  // generate
  auto* gen = app.add_subcommand("generate", "Generate text from a checkpoint");
  ModelChoice gen_model;
  GenerationRequest req;
  std::string gen_prefix;
  gen_model.add_to(gen);
  gen->add_option("--length", req.length, "Tokens to generate")->capture_default_str();
  gen->add_option("--temperature", req.temperature, "0 = greedy, up to 2")->capture_default_str();
  gen->add_option("--prefix", gen_prefix, "Text to continue");
  gen->add_option("--seed", req.seed, "Random seed")->capture_default_str();

  // interactive
  auto* inter = app.add_subcommand("interactive", "Pick the next word from model suggestions");
  ModelChoice inter_model;
  std::string inter_prefix;
  std::size_t top = 5;
  inter_model.add_to(inter);
  inter->add_option("--prefix", inter_prefix, "Starting context");
  inter->add_option("--top", top, "Suggestions per step")->capture_default_str();

  // plagiarism
  auto* plag = app.add_subcommand("plagiarism", "Check text against a corpus");
  std::string plag_script = "devanagari";
  std::vector<std::string> plag_corpus;
  std::string plag_text, plag_input, plag_config;
  std::size_t min_run = 3;
  plag->add_option("--script", plag_script, "Corpus script")->check(CLI::IsMember(kScripts));
  plag->add_option("--corpus", plag_corpus, "Corpus files or directories");
  plag->add_option("--config", plag_config, "Service config (corpus.<script> entry)");
  plag->add_option("--text", plag_text, "Text to check (default: stdin)");
  plag->add_option("--input", plag_input, "File to check");
  plag->add_option("--min-run", min_run, "Shortest shared word run reported")
      ->capture_default_str();

  // transliterate
  auto* trans = app.add_subcommand("transliterate", "Convert between Devanagari and Urdu");
  std::string to;
  std::string trans_text, trans_table;
  bool show_flags = false;
  trans->add_option("--to", to, "Target script")->required()->check(CLI::IsMember(kScripts));
  trans->add_option("--text", trans_text, "Text (default: stdin)");
  trans->add_option("--table", trans_table, "Mapping table file");
  trans->add_flag("--flags", show_flags, "List ambiguity flags");

  // meter
  auto* meter_cmd = app.add_subcommand("meter", "Scan lines and match ghazal meters");
  std::string meter_text, meter_script = "devanagari", catalog_path;
  meter_cmd->add_option("--text", meter_text, "Lines (default: stdin)");
  meter_cmd->add_option("--script", meter_script, "Script of the text")
      ->check(CLI::IsMember(kScripts));
  meter_cmd->add_option("--catalog", catalog_path, "Meter catalog file");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  std::string serve_config;
  std::uint16_t port = 0;
  serve_cmd->add_option("--config", serve_config, "Service config (default: BAYAAZ_CONFIG)");
  serve_cmd->add_option("--port", port, "Port (overrides the config)");

  std::vector<std::string> argv_store{"bayaaz"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }

  try {
    if (ingest->parsed()) {
      const Script script = *parse_script(ingest_script);
      const auto [corpus, report] = clean(ingest_raw(expand(ingest_inputs), script));
      out << report.to_text();
      if (!ingest_out.empty()) {
        std::ofstream f(ingest_out, std::ios::binary);
        if (!f) throw Error(ErrorKind::io, "cannot write " + ingest_out);
        f << to_raw_text(corpus);
      }
    } else if (train_cmd->parsed()) {
      const Script script = *parse_script(train_script);
      const DatasetMode mode = *parse_mode(train_mode);
      tc.optimizer = optimizer == "adam" ? OptimizerKind::adam : OptimizerKind::sgd;
      const auto corpus = clean(ingest_raw(expand(train_inputs), script)).first;
      const SampleSet samples = split(corpus, mode);
      const Checkpoint ck = train(samples, tc, mc, [&](const EpochReport& r) {
        out << "epoch " << r.epoch << " train_loss " << r.loss.train_loss << " val_loss "
            << r.loss.val_loss << '\n'
            << std::flush;
      });
      save_checkpoint(ck, train_out);
      if (ck.history.overfit_epoch) out << "overfit_epoch " << *ck.history.overfit_epoch << '\n';
      out << "saved " << train_out << '\n';
    } else if (gen->parsed()) {
      const Checkpoint ck = gen_model.load();
      req.mode = *parse_mode(gen_model.mode);
      if (gen->count("--prefix") > 0) req.prefix = gen_prefix;
      out << generate(ck, req).text << '\n';
    } else if (inter->parsed()) {
      const Checkpoint ck = inter_model.load();
      InteractiveSession s = start_session(ck, "cli", inter_prefix, top);
      out << "Context: " << s.context << '\n' << format_choices(s.pending) << std::flush;
      for (std::string line; std::getline(in, line);) {
        const std::string t = unicode::trim(line);
        if (t.empty()) continue;
        std::size_t k = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), k);
        if (ec != std::errc() || ptr != t.data() + t.size() || k == 0 || k > s.pending.size()) {
          err << "choose a number from 1 to " << s.pending.size() << '\n';
          continue;
        }
        s = advance_session(ck, s, k - 1);
        out << "Context: " << s.context << '\n';
        if (s.pending.empty()) {
          out << "No further suggestions.\n";
          break;
        }
        out << format_choices(s.pending) << std::flush;
      }
    } else if (plag->parsed()) {
      const Script script = *parse_script(plag_script);
      std::vector<std::filesystem::path> files = expand(plag_corpus);
      if (files.empty()) {
        const auto cfg = find_config(plag_config);
        if (!cfg || !cfg->corpora.contains(script)) {
          throw Error(ErrorKind::config, "give --corpus or a config with corpus." + plag_script);
        }
        files = corpus_files(cfg->corpora.at(script));
      }
      const LineIndex index = build_index(clean(ingest_raw(files, script)).first);
      const std::string text = !plag_text.empty()    ? plag_text
                               : !plag_input.empty() ? read_file(plag_input)
                                                     : read_all(in);
      out << check(text, index, min_run).to_text(index);
    } else if (trans->parsed()) {
      const MappingTable table =
          trans_table.empty() ? MappingTable::builtin() : MappingTable::load(trans_table);
      const std::string text = trans->count("--text") > 0 ? trans_text : read_all(in);
      const auto r = to == "urdu" ? deva_to_urdu(text, table) : urdu_to_deva(text, table);
      out << r.text;
      if (r.text.empty() || r.text.back() != '\n') out << '\n';
      if (show_flags) {
        for (const auto& a : r.ambiguities) {
          out << "ambiguity " << a.position << ": " << a.reason << '\n';
        }
      }
      if (!r.passthrough.empty()) {
        err << "passthrough: " << unicode::encode(std::u32string(r.passthrough.begin(),
                                                                 r.passthrough.end()))
            << '\n';
      }
    } else if (meter_cmd->parsed()) {
      const MeterCatalog catalog =
          catalog_path.empty() ? MeterCatalog::builtin() : MeterCatalog::load(catalog_path);
      const auto lines =
          text_lines(meter_cmd->count("--text") > 0 ? meter_text : read_all(in));
      if (lines.empty()) throw Error(ErrorKind::empty_input, "no text to scan");
      for (const auto& line : lines) {
        const std::string deva = meter_script == "urdu" ? urdu_to_deva(line).text : line;
        const WeightSeq w = syllabify(deva);
        const auto matches = match_meter(w, catalog);
        out << to_string(w) << '\t';
        if (matches.empty()) out << "(no match)";
        for (std::size_t i = 0; i < matches.size(); ++i) {
          out << (i ? ", " : "") << matches[i].name;
        }
        out << '\n';
      }
      const auto verses = pair_verses(lines);
      if (verses.size() >= 2) {
        const GhazalStructure g = analyze_ghazal(verses);
        out << "radif = " << g.radif << '\n'
            << "qaafiya = " << g.qaafiya.value_or("") << '\n'
            << "matla_ok = " << (g.matla_ok ? "true" : "false") << '\n';
      }
    } else if (serve_cmd->parsed()) {
      auto cfg = find_config(serve_config);
      if (!cfg) throw Error(ErrorKind::config, "serve needs --config or BAYAAZ_CONFIG");
      if (port != 0) cfg->port = port;
      Service service(*cfg);
      out << "listening on " << cfg->host << ':' << cfg->port << '\n' << std::flush;
      serve(service, cfg->host, cfg->port);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace bayaaz
