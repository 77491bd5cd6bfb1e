#pragma once

// Text snapshot of a whole model. Layout:
//
//   HOLOMEM 1
//   [config]          key=value lines
//   [bank]            thetas, phis, then 320 "row" lines of oscillator draws
//   [time_bases]      320 lines of n reals
//   [state]           counters and lexicon size
//   [lexicon]         per token: "token <len> <bytes> <slot> <count>", then
//                     e, m and mt lines of n reals each
//   end
//
// Reals are written with 17 significant digits so every value round-trips.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "holomem/error.hpp"
#include "holomem/model.hpp"

namespace holomem {

inline constexpr int kSnapshotVersion = 1;

namespace snapshot_detail {

inline void put_real(std::string& out, double x) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  out.append(buf, static_cast<std::size_t>(len));
}

inline void put_reals(std::string& out, std::string_view tag, std::span<const double> xs) {
  out += tag;
  for (double x : xs) {
    out += ' ';
    put_real(out, x);
  }
  out += '\n';
}

class Reader {
 public:
  explicit Reader(std::string text) : text_(std::move(text)) {}

  bool done() const { return pos_ >= text_.size(); }

  std::string_view line() {
    if (done()) throw Error(Errc::corrupt_snapshot, "unexpected end of file");
    const std::size_t nl = text_.find('\n', pos_);
    if (nl == std::string::npos) throw Error(Errc::corrupt_snapshot, "unterminated line at end of file");
    std::string_view out(text_.data() + pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_no_;
    return out;
  }

  void expect(std::string_view want) {
    const auto got = line();
    if (got != want) fail("expected '" + std::string(want) + "'");
  }

  std::string key_value(std::string_view key) {
    const auto got = line();
    if (got.size() <= key.size() || got.substr(0, key.size()) != key || got[key.size()] != '=') {
      fail("expected key '" + std::string(key) + "'");
    }
    return std::string(got.substr(key.size() + 1));
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::corrupt_snapshot, "line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

template <typename T>
T parse_number(std::string_view s, const Reader& r) {
  T value{};
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) r.fail("bad number '" + std::string(s) + "'");
  return value;
}

/// Splits "tag x1 x2 ..." and parses exactly `count` reals.
inline std::vector<double> parse_reals(std::string_view line, std::string_view tag, std::size_t count, const Reader& r) {
  if (line.substr(0, tag.size()) != tag) r.fail("expected '" + std::string(tag) + "' line");
  std::vector<double> out;
  out.reserve(count);
  std::size_t pos = tag.size();
  while (pos < line.size()) {
    if (line[pos] != ' ') r.fail("malformed vector line");
    ++pos;
    std::size_t end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    out.push_back(parse_number<double>(line.substr(pos, end - pos), r));
    pos = end;
  }
  if (out.size() != count) {
    r.fail("expected " + std::to_string(count) + " values, found " + std::to_string(out.size()));
  }
  return out;
}

inline bool parse_bool(std::string_view s, const Reader& r) {
  if (s == "1") return true;
  if (s == "0") return false;
  r.fail("expected 0 or 1");
}

}  // namespace snapshot_detail

inline std::string serialize(const Model& model) {
  using namespace snapshot_detail;
  const auto& c = model.config();
  const auto& bank = model.bank();
  std::string out;
  out.reserve(64 * 1024);

  out += "HOLOMEM " + std::to_string(kSnapshotVersion) + "\n[config]\n";
  auto kv = [&](std::string_view key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  auto real = [](double x) {
    std::string s;
    put_real(s, x);
    return s;
  };
  kv("dimension", std::to_string(c.dimension));
  kv("seed", std::to_string(c.seed));
  kv("time_scale", real(c.oscillators.time_scale));
  kv("sigma2", real(c.oscillators.sigma2));
  kv("beta", real(c.oscillators.beta));
  kv("recenter", c.oscillators.recenter ? "1" : "0");
  kv("time_binding", to_string(c.time_binding));
  kv("noise_sd", real(c.noise_sd));
  kv("retrieval_noise_sd", real(c.retrieval_noise_sd));
  kv("retrieval_threshold", real(c.retrieval_threshold));
  kv("recall_method", to_string(c.recall_method));
  kv("recall_p", std::to_string(c.recall_p));
  kv("time_threshold", real(c.time_threshold));
  kv("max_pair_distance", std::to_string(c.max_pair_distance));
  kv("chunk_time_encoding", c.chunk_time_encoding ? "1" : "0");
  kv("corpus_time_encoding", c.corpus_time_encoding ? "1" : "0");

  out += "[bank]\n";
  put_reals(out, "thetas", bank.thetas());
  put_reals(out, "phis", bank.phis());
  for (std::size_t row = 0; row < kTimeVectorSize; ++row) {
    out += "row";
    for (auto idx : bank.selection_table()[row]) out += ' ' + std::to_string(idx);
    out += ' ';
    for (auto flag : bank.trig_table()[row]) out += flag == Trig::cosine ? 'c' : 's';
    out += '\n';
  }

  out += "[time_bases]\n";
  for (const auto& b : model.encoder().bases()) put_reals(out, "base", b.elements());

  const auto& store = model.store();
  out += "[state]\n";
  kv("chunk_counter", std::to_string(store.chunk_counter()));
  kv("encoding_noise_counter", std::to_string(store.noise_counter()));
  kv("retrieval_noise_counter", std::to_string(model.retrieval_noise_counter()));
  kv("tokens", std::to_string(store.lexicon_size()));

  out += "[lexicon]\n";
  for (const auto& [token, entry] : store.lexicon()) {
    out += "token " + std::to_string(token.size()) + ' ' + token + ' ' + (entry.is_slot ? '1' : '0') + ' ' +
           std::to_string(entry.count) + '\n';
    put_reals(out, "e", entry.e.elements());
    put_reals(out, "m", entry.m.elements());
    put_reals(out, "mt", entry.mt.elements());
  }
  out += "end\n";
  return out;
}

inline Model deserialize(std::string text) {
  using namespace snapshot_detail;
  Reader r(std::move(text));

  const auto header = r.line();
  if (header.substr(0, 8) != "HOLOMEM ") throw Error(Errc::corrupt_snapshot, "missing HOLOMEM header");
  const std::string version(header.substr(8));
  if (version != std::to_string(kSnapshotVersion)) {
    throw Error(Errc::incompatible_snapshot, "snapshot version " + version + " is not supported (expected " +
                                                 std::to_string(kSnapshotVersion) + ")");
  }

  r.expect("[config]");
  ModelConfig c;
  c.dimension = parse_number<std::size_t>(r.key_value("dimension"), r);
  c.seed = parse_number<std::uint64_t>(r.key_value("seed"), r);
  c.oscillators.time_scale = parse_number<double>(r.key_value("time_scale"), r);
  c.oscillators.sigma2 = parse_number<double>(r.key_value("sigma2"), r);
  c.oscillators.beta = parse_number<double>(r.key_value("beta"), r);
  c.oscillators.recenter = parse_bool(r.key_value("recenter"), r);
  try {
    c.time_binding = parse_time_binding(r.key_value("time_binding"));
    c.noise_sd = parse_number<double>(r.key_value("noise_sd"), r);
    c.retrieval_noise_sd = parse_number<double>(r.key_value("retrieval_noise_sd"), r);
    c.retrieval_threshold = parse_number<double>(r.key_value("retrieval_threshold"), r);
    c.recall_method = parse_recall_method(r.key_value("recall_method"));
  } catch (const Error& err) {
    if (err.code() == Errc::corrupt_snapshot) throw;
    throw Error(Errc::corrupt_snapshot, err.what());
  }
  c.recall_p = parse_number<std::int64_t>(r.key_value("recall_p"), r);
  c.time_threshold = parse_number<double>(r.key_value("time_threshold"), r);
  c.max_pair_distance = parse_number<std::size_t>(r.key_value("max_pair_distance"), r);
  c.chunk_time_encoding = parse_bool(r.key_value("chunk_time_encoding"), r);
  c.corpus_time_encoding = parse_bool(r.key_value("corpus_time_encoding"), r);

  r.expect("[bank]");
  std::array<double, kOscillatorCount> thetas{};
  std::array<double, kOscillatorCount> phis{};
  auto th = parse_reals(r.line(), "thetas", kOscillatorCount, r);
  auto ph = parse_reals(r.line(), "phis", kOscillatorCount, r);
  std::copy(th.begin(), th.end(), thetas.begin());
  std::copy(ph.begin(), ph.end(), phis.begin());
  std::vector<OscillatorDraw> selection(kTimeVectorSize);
  std::vector<TrigDraw> trig(kTimeVectorSize);
  for (std::size_t row = 0; row < kTimeVectorSize; ++row) {
    std::istringstream in{std::string(r.line())};
    std::string tag, flags;
    int idx[kDrawsPerElement];
    if (!(in >> tag >> idx[0] >> idx[1] >> idx[2] >> idx[3] >> flags) || tag != "row" ||
        flags.size() != kDrawsPerElement) {
      r.fail("malformed bank row");
    }
    for (std::size_t d = 0; d < kDrawsPerElement; ++d) {
      if (idx[d] < 0 || idx[d] >= static_cast<int>(kOscillatorCount)) r.fail("oscillator index out of range");
      if (flags[d] != 's' && flags[d] != 'c') r.fail("bad trig flag");
      selection[row][d] = static_cast<std::uint8_t>(idx[d]);
      trig[row][d] = flags[d] == 'c' ? Trig::cosine : Trig::sine;
    }
  }
  OscillatorBank bank(c.oscillators, thetas, phis, std::move(selection), std::move(trig));

  r.expect("[time_bases]");
  std::vector<HoloVector> bases;
  bases.reserve(kTimeVectorSize);
  for (std::size_t l = 0; l < kTimeVectorSize; ++l) bases.emplace_back(parse_reals(r.line(), "base", c.dimension, r));

  Model model = [&] {
    try {
      return Model(c, std::move(bank), std::move(bases));
    } catch (const Error& err) {
      if (err.code() == Errc::corrupt_snapshot) throw;
      throw Error(Errc::corrupt_snapshot, err.what());
    }
  }();

  r.expect("[state]");
  const auto counter = parse_number<std::int64_t>(r.key_value("chunk_counter"), r);
  const auto enc_noise = parse_number<std::uint64_t>(r.key_value("encoding_noise_counter"), r);
  const auto ret_noise = parse_number<std::uint64_t>(r.key_value("retrieval_noise_counter"), r);
  const auto tokens = parse_number<std::size_t>(r.key_value("tokens"), r);

  r.expect("[lexicon]");
  std::map<std::string, LexiconEntry, std::less<>> lexicon;
  for (std::size_t k = 0; k < tokens; ++k) {
    const auto head = r.line();
    if (head.substr(0, 6) != "token ") r.fail("expected token record");
    const std::size_t space = head.find(' ', 6);
    if (space == std::string_view::npos) r.fail("malformed token record");
    const auto len = parse_number<std::size_t>(head.substr(6, space - 6), r);
    if (space + 1 + len > head.size()) r.fail("token length exceeds line");
    LexiconEntry entry;
    entry.token = std::string(head.substr(space + 1, len));
    std::istringstream rest{std::string(head.substr(space + 1 + len))};
    int slot = -1;
    if (!(rest >> slot >> entry.count) || (slot != 0 && slot != 1)) r.fail("malformed token flags");
    entry.is_slot = slot == 1;
    entry.e = HoloVector(parse_reals(r.line(), "e", c.dimension, r));
    entry.m = HoloVector(parse_reals(r.line(), "m", c.dimension, r));
    entry.mt = HoloVector(parse_reals(r.line(), "mt", c.dimension, r));
    std::string key = entry.token;
    if (!lexicon.emplace(std::move(key), std::move(entry)).second) r.fail("duplicate token");
  }
  r.expect("end");
  if (!r.done()) r.fail("trailing data after end marker");

  model.store().restore(std::move(lexicon), counter, enc_noise);
  model.set_retrieval_noise_counter(ret_noise);
  return model;
}

inline void save_snapshot(const Model& model, const std::filesystem::path& path) {
  const std::string text = serialize(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write snapshot " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error(Errc::io, "write failed for snapshot " + path.string());
}

inline Model load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::file_not_found, "cannot open snapshot " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace holomem
