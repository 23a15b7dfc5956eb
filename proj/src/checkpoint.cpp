// Checkpoint file layout (all integers little-endian):
//
//   "BYZ1"                      4 bytes
//   format_version              u32
//   metadata length             u64
//   metadata                    UTF-8 "key = value" lines
//   tensor count                u32
//   per tensor, in ModelParams::tensors() order:
//     rank                      u32
//     dims                      u64 x rank
//     values                    IEEE-754 binary64 x product(dims)

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "bayaaz/error.hpp"
#include "bayaaz/trainer.hpp"

namespace bayaaz {

namespace {

constexpr char kMagic[4] = {'B', 'Y', 'Z', '1'};

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(raw, raw + sizeof(T));
    }
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorKind::corruption, "checkpoint truncated at byte " + std::to_string(pos_));
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::corruption, "bad number in checkpoint metadata: " + std::string(s));
  }
  return v;
}

std::uint64_t parse_uint(std::string_view s, int base = 10) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::corruption, "bad integer in checkpoint metadata: " + std::string(s));
  }
  return v;
}

std::vector<std::string_view> fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string metadata_text(const Checkpoint& ck) {
  std::ostringstream os;
  const auto& m = ck.config;
  const auto& t = ck.train_config;
  os << "model.seq_len = " << m.seq_len << '\n'
     << "model.embed_dim = " << m.embed_dim << '\n'
     << "model.lstm_units = " << m.lstm_units << '\n'
     << "model.lstm_layers = " << m.lstm_layers << '\n'
     << "model.vocab_size = " << m.vocab_size << '\n'
     << "train.epochs = " << t.epochs << '\n'
     << "train.split = " << format_double(t.split) << '\n'
     << "train.batch_size = " << t.batch_size << '\n'
     << "train.learning_rate = " << format_double(t.learning_rate) << '\n'
     << "train.grad_clip = " << format_double(t.grad_clip) << '\n'
     << "train.window_stride = " << t.window_stride << '\n'
     << "train.seed = " << t.seed << '\n'
     << "train.optimizer = " << (t.optimizer == OptimizerKind::adam ? "adam" : "sgd") << '\n'
     << "train.threads = " << t.threads << '\n';
  os << "vocab.tokens =";
  for (char32_t cp : ck.vocab.codepoints()) {
    char buf[16];
    const auto res = std::to_chars(buf, buf + sizeof buf, static_cast<std::uint32_t>(cp), 16);
    os << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
  }
  os << '\n';
  os << "history.epochs = " << ck.history.epochs.size() << '\n';
  for (std::size_t e = 0; e < ck.history.epochs.size(); ++e) {
    os << "history." << e + 1 << " = " << format_double(ck.history.epochs[e].train_loss) << ' '
       << format_double(ck.history.epochs[e].val_loss) << '\n';
  }
  os << "history.overfit_epoch = "
     << (ck.history.overfit_epoch ? std::to_string(*ck.history.overfit_epoch) : "none") << '\n';
  os << "start_distribution =";
  for (double d : ck.start_distribution) os << ' ' << format_double(d);
  os << '\n';
  return os.str();
}

std::map<std::string, std::string, std::less<>> parse_metadata(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    const auto eq = line.find(" =");
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::corruption, "malformed checkpoint metadata line");
    }
    auto value = line.substr(eq + 2);
    if (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    kv.emplace(std::string(line.substr(0, eq)), std::string(value));
  }
  return kv;
}

const std::string& require(const std::map<std::string, std::string, std::less<>>& kv,
                           std::string_view key) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    throw Error(ErrorKind::corruption, "checkpoint metadata lacks " + std::string(key));
  }
  return it->second;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  std::string out(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, ck.format_version);
  const std::string meta = metadata_text(ck);
  put_le<std::uint64_t>(out, meta.size());
  out += meta;
  const auto tensors = ck.params.tensors();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const Tensor* t : tensors) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t->shape().size()));
    for (std::size_t d : t->shape()) put_le<std::uint64_t>(out, d);
    for (double v : t->data()) put_le<double>(out, v);
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorKind::format, "not a checkpoint file (bad magic)");
  }
  Reader in(bytes.substr(sizeof kMagic));
  Checkpoint ck;
  ck.format_version = in.get<std::uint32_t>();
  if (ck.format_version != kCheckpointVersion) {
    throw Error(ErrorKind::version,
                "unsupported checkpoint version " + std::to_string(ck.format_version));
  }
  const auto meta_len = in.get<std::uint64_t>();
  const auto kv = parse_metadata(in.take(meta_len));

  auto& m = ck.config;
  m.seq_len = parse_uint(require(kv, "model.seq_len"));
  m.embed_dim = parse_uint(require(kv, "model.embed_dim"));
  m.lstm_units = parse_uint(require(kv, "model.lstm_units"));
  m.lstm_layers = parse_uint(require(kv, "model.lstm_layers"));
  m.vocab_size = parse_uint(require(kv, "model.vocab_size"));
  auto& t = ck.train_config;
  t.epochs = parse_uint(require(kv, "train.epochs"));
  t.split = parse_double(require(kv, "train.split"));
  t.batch_size = parse_uint(require(kv, "train.batch_size"));
  t.learning_rate = parse_double(require(kv, "train.learning_rate"));
  t.grad_clip = parse_double(require(kv, "train.grad_clip"));
  t.window_stride = parse_uint(require(kv, "train.window_stride"));
  t.seed = parse_uint(require(kv, "train.seed"));
  t.optimizer = require(kv, "train.optimizer") == "adam" ? OptimizerKind::adam : OptimizerKind::sgd;
  t.threads = parse_uint(require(kv, "train.threads"));

  std::vector<char32_t> tokens;
  for (auto f : fields(require(kv, "vocab.tokens"))) {
    tokens.push_back(static_cast<char32_t>(parse_uint(f, 16)));
  }
  ck.vocab = CharVocab(std::move(tokens));
  if (ck.vocab.size() != m.vocab_size) {
    throw Error(ErrorKind::corruption, "checkpoint vocabulary size disagrees with model config");
  }

  const auto epochs = parse_uint(require(kv, "history.epochs"));
  for (std::uint64_t e = 1; e <= epochs; ++e) {
    const auto f = fields(require(kv, "history." + std::to_string(e)));
    if (f.size() != 2) throw Error(ErrorKind::corruption, "malformed history entry");
    ck.history.epochs.push_back({parse_double(f[0]), parse_double(f[1])});
  }
  const auto& overfit = require(kv, "history.overfit_epoch");
  if (overfit != "none") ck.history.overfit_epoch = parse_uint(overfit);
  for (auto f : fields(require(kv, "start_distribution"))) {
    ck.start_distribution.push_back(parse_double(f));
  }

  try {
    ck.params = ModelParams::zeros(m);
  } catch (const Error& e) {
    throw Error(ErrorKind::corruption, std::string("checkpoint model config invalid: ") + e.what());
  }
  auto tensors = ck.params.tensors();
  if (in.get<std::uint32_t>() != tensors.size()) {
    throw Error(ErrorKind::corruption, "checkpoint tensor count disagrees with model config");
  }
  for (Tensor* tensor : tensors) {
    const auto rank = in.get<std::uint32_t>();
    if (rank != tensor->shape().size()) {
      throw Error(ErrorKind::corruption, "checkpoint tensor rank mismatch");
    }
    for (std::size_t d : tensor->shape()) {
      if (in.get<std::uint64_t>() != d) {
        throw Error(ErrorKind::corruption, "checkpoint tensor shape mismatch");
      }
    }
    for (double& v : tensor->data()) v = in.get<double>();
  }
  if (!in.done()) throw Error(ErrorKind::corruption, "trailing bytes after checkpoint tensors");
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(ck);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "write failure on " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace bayaaz
