#pragma once

// Token lexicon and HDM-style associative memory. Each unique token owns an
// environment vector e, a memory vector m and a time-memory vector mt;
// chunks and sentences are never stored, only folded into the m vectors.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "holomem/error.hpp"
#include "holomem/fft.hpp"
#include "holomem/hrr.hpp"
#include "holomem/random.hpp"

namespace holomem {

/// Lowercased, whitespace-trimmed form used as the lexicon key.
inline std::string normalize_token(std::string_view raw) {
  std::size_t first = 0;
  std::size_t last = raw.size();
  while (first < last && std::isspace(static_cast<unsigned char>(raw[first]))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(raw[last - 1]))) --last;
  std::string out(raw.substr(first, last - first));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Pair {
  std::string slot;
  std::string value;

  friend auto operator<=>(const Pair&, const Pair&) = default;
};

struct Chunk {
  std::vector<Pair> pairs;
  std::int64_t index = 0;  ///< encoding time step
};

struct Cue {
  std::vector<Pair> known;
  std::vector<std::string> unknown;
};

struct LexiconEntry {
  std::string token;
  HoloVector e;   ///< environment vector, fixed at interning
  HoloVector m;   ///< memory vector
  HoloVector mt;  ///< time-memory vector
  bool is_slot = false;
  std::int64_t count = 0;
};

struct TokenListing {
  std::string token;
  bool is_slot = false;
  std::int64_t count = 0;

  friend bool operator==(const TokenListing&, const TokenListing&) = default;
};

struct RetrievalOptions {
  double threshold = 0.1;
  double noise_sd = 0.0;
  Rng* noise = nullptr;  ///< required when noise_sd > 0
};

struct Retrieved {
  std::string value;
  double score = 0.0;
};

struct StoreConfig {
  std::size_t dimension = 1024;
  std::uint64_t seed = 1;
  double encoding_noise_sd = 0.0;
  std::size_t max_pair_distance = 0;  ///< 0 encodes every ordered pair of a sentence
};

struct SentenceStats {
  std::int64_t index = 0;
  std::size_t pairs = 0;
  std::size_t increments = 0;
};

class HdmStore {
 public:
  static constexpr std::string_view kPlaceholderName = "\x01placeholder";
  static constexpr std::string_view kRightOrderName = "\x01right-order";

  explicit HdmStore(StoreConfig config)
      : config_(config),
        placeholder_(random_vector(kPlaceholderName, config.seed, config.dimension)),
        right_(Permutation::random(config.dimension, kRightOrderName, config.seed)),
        noise_(stream_key("encoding-noise", config.seed)) {
    if (!(config_.encoding_noise_sd >= 0.0)) {
      throw Error(Errc::invalid_parameter, "encoding noise sd must be non-negative");
    }
    placeholder_spectrum_ = fft::forward(placeholder_.elements());
    placeholder_right_spectrum_ = fft::forward(permute(placeholder_, right_).elements());
  }

  const StoreConfig& config() const noexcept { return config_; }

  /// Parameters that may change between writes without invalidating state.
  void set_encoding_params(double encoding_noise_sd, std::size_t max_pair_distance) {
    if (!(encoding_noise_sd >= 0.0)) throw Error(Errc::invalid_parameter, "encoding noise sd must be non-negative");
    config_.encoding_noise_sd = encoding_noise_sd;
    config_.max_pair_distance = max_pair_distance;
  }
  std::size_t dimension() const noexcept { return config_.dimension; }
  const HoloVector& placeholder() const noexcept { return placeholder_; }
  const Permutation& right_order() const noexcept { return right_; }

  std::int64_t chunk_counter() const noexcept { return counter_; }
  std::size_t lexicon_size() const noexcept { return lexicon_.size(); }
  /// Three vectors (e, m, mt) per unique token, independent of how much was encoded.
  std::size_t stored_vector_count() const noexcept { return 3 * lexicon_.size(); }

  const std::map<std::string, LexiconEntry, std::less<>>& lexicon() const noexcept { return lexicon_; }

  const LexiconEntry* find(std::string_view token) const {
    auto it = lexicon_.find(normalize_token(token));
    return it == lexicon_.end() ? nullptr : &it->second;
  }

  LexiconEntry& intern_token(std::string_view raw) {
    std::string token = normalize_token(raw);
    if (token.empty()) throw Error(Errc::invalid_token, "token is empty after normalization");
    auto it = lexicon_.find(token);
    if (it == lexicon_.end()) {
      LexiconEntry entry;
      entry.e = random_vector(token, config_.seed, config_.dimension);
      entry.m = HoloVector::zeros(config_.dimension);
      entry.mt = HoloVector::zeros(config_.dimension);
      entry.token = token;
      it = lexicon_.emplace(std::move(token), std::move(entry)).first;
    }
    ++it->second.count;
    return it->second;
  }

  /// Normalizes and validates chunk pairs without touching the store.
  static std::vector<Pair> normalize_pairs(const std::vector<Pair>& pairs) {
    if (pairs.empty()) throw Error(Errc::empty_chunk, "chunk has no slot:value pairs");
    std::vector<Pair> out;
    out.reserve(pairs.size());
    std::set<std::string, std::less<>> slots;
    for (const auto& p : pairs) {
      Pair norm{normalize_token(p.slot), normalize_token(p.value)};
      if (norm.slot.empty() || norm.value.empty()) {
        throw Error(Errc::invalid_token, "chunk pair has an empty slot or value");
      }
      if (!slots.insert(norm.slot).second) {
        throw Error(Errc::duplicate_slot, "slot '" + norm.slot + "' appears twice");
      }
      out.push_back(std::move(norm));
    }
    return out;
  }

  /// Encodes the chunk into the value tokens' memory vectors. For value v_i:
  ///   m[v_i] += (s_i * PH) * (delta + sum_{j != i} s_j * v_j)
  /// which expands to the placeholder-bound slot term plus every other pair
  /// bound to it. Time memory is handled by the caller.
  Chunk add_chunk(const std::vector<Pair>& raw_pairs) {
    auto pairs = normalize_pairs(raw_pairs);
    std::vector<const LexiconEntry*> slot_entries;
    std::vector<const LexiconEntry*> value_entries;
    for (const auto& p : pairs) {
      auto& s = intern_token(p.slot);
      s.is_slot = true;
      slot_entries.push_back(&s);
      value_entries.push_back(&intern_token(p.value));
    }

    const std::size_t n = config_.dimension;
    std::vector<std::vector<fft::Complex>> slot_spec;
    std::vector<std::vector<fft::Complex>> pair_spec;
    std::vector<fft::Complex> total(n, fft::Complex{});
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      slot_spec.push_back(fft::forward(slot_entries[i]->e.elements()));
      auto vs = fft::forward(value_entries[i]->e.elements());
      for (std::size_t k = 0; k < n; ++k) vs[k] *= slot_spec.back()[k];
      for (std::size_t k = 0; k < n; ++k) total[k] += vs[k];
      pair_spec.push_back(std::move(vs));
    }

    for (std::size_t i = 0; i < pairs.size(); ++i) {
      std::vector<fft::Complex> spec(n);
      for (std::size_t k = 0; k < n; ++k) {
        spec[k] = slot_spec[i][k] * placeholder_spectrum_[k] * (1.0 + total[k] - pair_spec[i][k]);
      }
      add_memory(pairs[i].value, HoloVector(fft::inverse_real(spec)));
    }

    ++counter_;
    return Chunk{std::move(pairs), counter_};
  }

  /// Left-to-right pair encoding of one sentence. For each ordered pair
  /// (a before b): m[a] += PH * P(e[b]) and m[b] += e[a] * P(PH), where P is
  /// the fixed right-operand permutation. Grouped per token via window sums.
  SentenceStats ingest_sentence(const std::vector<std::string>& raw_tokens) {
    if (raw_tokens.empty()) throw Error(Errc::empty_sentence, "sentence has no tokens");
    std::vector<std::string> tokens;
    tokens.reserve(raw_tokens.size());
    for (const auto& t : raw_tokens) tokens.push_back(intern_token(t).token);

    const std::size_t len = tokens.size();
    const std::size_t n = config_.dimension;
    const std::size_t window = config_.max_pair_distance == 0 ? len : config_.max_pair_distance;
    SentenceStats stats;

    for (std::size_t a = 0; a < len; ++a) {
      HoloVector after = HoloVector::zeros(n);
      HoloVector before = HoloVector::zeros(n);
      std::size_t n_after = 0;
      std::size_t n_before = 0;
      for (std::size_t b = a + 1; b < len && b - a <= window; ++b, ++n_after) after += lexicon_.at(tokens[b]).e;
      for (std::size_t b = a; b-- > 0 && a - b <= window; ++n_before) before += lexicon_.at(tokens[b]).e;

      if (n_after > 0) {
        auto spec = fft::forward(permute(after, right_).elements());
        for (std::size_t k = 0; k < n; ++k) spec[k] *= placeholder_spectrum_[k];
        add_memory(tokens[a], HoloVector(fft::inverse_real(spec)));
        stats.increments += n_after;
      }
      if (n_before > 0) {
        auto spec = fft::forward(before.elements());
        for (std::size_t k = 0; k < n; ++k) spec[k] *= placeholder_right_spectrum_[k];
        add_memory(tokens[a], HoloVector(fft::inverse_real(spec)));
        stats.increments += n_before;
      }
      stats.pairs += n_after;
    }

    stats.index = ++counter_;
    return stats;
  }

  /// Sum of e[a] * P(e[b]) over the sentence's ordered pairs; the sentence
  /// analogue of a chunk's summed slot:value bindings.
  HoloVector sentence_binding(const std::vector<std::string>& raw_tokens) const {
    const std::size_t n = config_.dimension;
    const std::size_t len = raw_tokens.size();
    const std::size_t window = config_.max_pair_distance == 0 ? len : config_.max_pair_distance;
    HoloVector out = HoloVector::zeros(n);
    for (std::size_t a = 0; a < len; ++a) {
      HoloVector after = HoloVector::zeros(n);
      bool any = false;
      for (std::size_t b = a + 1; b < len && b - a <= window; ++b) {
        after += require(raw_tokens[b]).e;
        any = true;
      }
      if (any) out += convolve(require(raw_tokens[a]).e, permute(after, right_));
    }
    return out;
  }

  /// Sum of e[s] * e[v] over pairs; every token must already be interned.
  HoloVector pair_binding(const std::vector<Pair>& pairs) const {
    const std::size_t n = config_.dimension;
    std::vector<fft::Complex> total(n, fft::Complex{});
    for (const auto& p : pairs) {
      auto s = fft::forward(require(p.slot).e.elements());
      const auto v = fft::forward(require(p.value).e.elements());
      for (std::size_t k = 0; k < n; ++k) total[k] += s[k] * v[k];
    }
    return HoloVector(fft::inverse_real(total));
  }

  void add_time_memory(std::string_view token, const HoloVector& trace) {
    auto it = lexicon_.find(normalize_token(token));
    if (it == lexicon_.end()) throw Error(Errc::invalid_token, "token '" + std::string(token) + "' is not interned");
    it->second.mt += trace;
  }

  /// Probe for unknown slot u given the known pairs:
  ///   normalize( (e[u] * PH) * (delta + sum_known e[s] * e[v]) )
  /// Returns nullopt when a cue token was never interned.
  std::optional<HoloVector> probe(const std::vector<Pair>& known, std::string_view unknown) const {
    const LexiconEntry* u = find(unknown);
    if (!u) return std::nullopt;
    const std::size_t n = config_.dimension;
    std::vector<fft::Complex> context(n, fft::Complex{1.0, 0.0});
    for (const auto& p : known) {
      const LexiconEntry* s = find(p.slot);
      const LexiconEntry* v = find(p.value);
      if (!s || !v) return std::nullopt;
      auto fs = fft::forward(s->e.elements());
      const auto fv = fft::forward(v->e.elements());
      for (std::size_t k = 0; k < n; ++k) context[k] += fs[k] * fv[k];
    }
    auto spec = fft::forward(u->e.elements());
    for (std::size_t k = 0; k < n; ++k) spec[k] *= placeholder_spectrum_[k] * context[k];
    return normalize(HoloVector(fft::inverse_real(spec)));
  }

  std::optional<Retrieved> retrieve_value(const Cue& cue, const RetrievalOptions& opts) const {
    validate_cue(cue);
    if (cue.unknown.size() != 1) {
      throw Error(Errc::invalid_cue, "single-value retrieval needs exactly one unknown, got " +
                                         std::to_string(cue.unknown.size()));
    }
    return best_value(cue.known, cue.unknown.front(), opts);
  }

  /// Resolves unknowns one at a time in descending order of their first-pass
  /// score, feeding each answer back into the known set. Returns only the
  /// resolved pairs, in resolution order.
  std::optional<std::vector<Pair>> retrieve_multi(const Cue& cue, const RetrievalOptions& opts) const {
    validate_cue(cue);
    if (cue.unknown.empty()) throw Error(Errc::invalid_cue, "cue has no unknown slot");
    auto order = resolution_order(cue, opts);
    if (!order) return std::nullopt;

    std::vector<Pair> known = normalized_known(cue);
    std::vector<Pair> resolved;
    for (const auto& slot : *order) {
      auto hit = best_value(known, slot, opts);
      if (!hit) return std::nullopt;
      known.push_back({slot, hit->value});
      resolved.push_back({slot, hit->value});
    }
    return resolved;
  }

  /// First-pass scores for every unknown, sorted descending (ties by slot
  /// name). nullopt if any unknown fails on its own.
  std::optional<std::vector<std::string>> resolution_order(const Cue& cue, const RetrievalOptions& opts) const {
    const std::vector<Pair> known = normalized_known(cue);
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& raw : cue.unknown) {
      std::string slot = normalize_token(raw);
      auto hit = best_value(known, slot, opts);
      if (!hit) return std::nullopt;
      scored.emplace_back(hit->score, std::move(slot));
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    std::vector<std::string> order;
    for (auto& [score, slot] : scored) order.push_back(std::move(slot));
    return order;
  }

  std::vector<TokenListing> list_tokens() const {
    std::vector<TokenListing> out;
    out.reserve(lexicon_.size());
    for (const auto& [token, entry] : lexicon_) out.push_back({token, entry.is_slot, entry.count});
    return out;
  }

  // Snapshot support.
  std::uint64_t noise_counter() const noexcept { return noise_.counter(); }

  void restore(std::map<std::string, LexiconEntry, std::less<>> lexicon, std::int64_t counter,
               std::uint64_t noise_counter) {
    for (const auto& [token, entry] : lexicon) {
      if (entry.e.size() != config_.dimension || entry.m.size() != config_.dimension ||
          entry.mt.size() != config_.dimension) {
        throw Error(Errc::corrupt_snapshot, "vector dimension mismatch for token '" + token + "'");
      }
    }
    lexicon_ = std::move(lexicon);
    counter_ = counter;
    noise_ = Rng(noise_.key(), noise_counter);
  }

 private:
  static void validate_cue(const Cue& cue) {
    std::set<std::string, std::less<>> seen;
    for (const auto& p : cue.known) {
      if (!seen.insert(normalize_token(p.slot)).second) throw Error(Errc::invalid_cue, "slot repeated in cue");
    }
    for (const auto& u : cue.unknown) {
      if (!seen.insert(normalize_token(u)).second) throw Error(Errc::invalid_cue, "slot repeated in cue");
    }
    if (seen.empty()) throw Error(Errc::invalid_cue, "cue is empty");
  }

  static std::vector<Pair> normalized_known(const Cue& cue) {
    std::vector<Pair> known;
    for (const auto& p : cue.known) known.push_back({normalize_token(p.slot), normalize_token(p.value)});
    return known;
  }

  std::optional<Retrieved> best_value(const std::vector<Pair>& known, std::string_view unknown,
                                      const RetrievalOptions& opts) const {
    if (opts.noise_sd > 0.0 && opts.noise == nullptr) {
      throw Error(Errc::invalid_argument, "retrieval noise requested without a noise stream");
    }
    auto pr = probe(known, unknown);
    if (!pr) return std::nullopt;
    std::optional<Retrieved> best;
    for (const auto& [token, entry] : lexicon_) {
      if (entry.is_slot) continue;
      double score = cosine(entry.m, *pr);
      if (opts.noise_sd > 0.0) score += opts.noise->normal(0.0, opts.noise_sd);
      if (!best || score > best->score) best = Retrieved{token, score};
    }
    if (!best || best->score < opts.threshold) return std::nullopt;
    return best;
  }

  const LexiconEntry& require(std::string_view token) const {
    const LexiconEntry* entry = find(token);
    if (!entry) throw Error(Errc::invalid_token, "token '" + std::string(token) + "' is not interned");
    return *entry;
  }

  void add_memory(const std::string& token, HoloVector delta) {
    if (config_.encoding_noise_sd > 0.0) {
      for (double& x : delta) x += noise_.normal(0.0, config_.encoding_noise_sd);
    }
    lexicon_.at(token).m += delta;
  }

  StoreConfig config_;
  HoloVector placeholder_;
  Permutation right_;
  std::vector<fft::Complex> placeholder_spectrum_;
  std::vector<fft::Complex> placeholder_right_spectrum_;
  std::map<std::string, LexiconEntry, std::less<>> lexicon_;
  std::int64_t counter_ = 0;
  Rng noise_;
};

}  // namespace holomem
