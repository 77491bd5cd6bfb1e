#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "holomem/error.hpp"
#include "holomem/recall.hpp"
#include "holomem/store.hpp"
#include "holomem/time_codes.hpp"

namespace holomem {

/// Every tunable parameter of a model. Validated once, then frozen into
/// snapshots.
struct ModelConfig {
  std::size_t dimension = 1024;
  std::uint64_t seed = 1;
  OscillatorParams oscillators{};  // S = 1e-5, sigma2 = 1, beta = 5.125
  TimeBinding time_binding = TimeBinding::compose;
  double noise_sd = 0.0;            ///< Gaussian noise added to memory-vector updates
  double retrieval_noise_sd = 0.0;  ///< Gaussian noise added to retrieval scores
  double retrieval_threshold = 0.1;
  RecallMethod recall_method = RecallMethod::both;
  std::int64_t recall_p = 8;
  double time_threshold = 0.15;
  std::size_t max_pair_distance = 0;
  bool chunk_time_encoding = true;    ///< default for add_chunk
  bool corpus_time_encoding = false;  ///< default for sentence ingestion

  void validate() const {
    if (dimension < 2) throw Error(Errc::invalid_dimension, "dimension must be at least 2");
    if (!(oscillators.time_scale > 0.0)) throw Error(Errc::invalid_parameter, "S must be positive");
    if (!(oscillators.sigma2 >= 0.0)) throw Error(Errc::invalid_parameter, "sigma2 must be non-negative");
    if (!(oscillators.beta > 0.0)) throw Error(Errc::invalid_parameter, "beta must be positive");
    if (!(noise_sd >= 0.0) || !(retrieval_noise_sd >= 0.0)) {
      throw Error(Errc::invalid_parameter, "noise standard deviations must be non-negative");
    }
    if (!std::isfinite(retrieval_threshold)) throw Error(Errc::invalid_parameter, "retrieval threshold must be finite");
    policy().validate();
  }

  RecallPolicy policy() const { return RecallPolicy{recall_method, recall_p, time_threshold, retrieval_threshold}; }

  StoreConfig store_config() const { return StoreConfig{dimension, seed, noise_sd, max_pair_distance}; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Store + oscillator bank + time encoder, advanced together one chunk or
/// sentence at a time. Single writer; const members are safe to share.
class Model {
 public:
  explicit Model(const ModelConfig& config)
      : config_(checked(config)),
        store_(config_.store_config()),
        encoder_(sample_bank(config_.oscillators, config_.seed), config_.dimension, config_.seed,
                 config_.time_binding),
        retrieval_noise_(stream_key("retrieval-noise", config_.seed)) {}

  Model(const ModelConfig& config, OscillatorBank bank, std::vector<HoloVector> time_bases)
      : config_(checked(config)),
        store_(config_.store_config()),
        encoder_(std::move(bank), std::move(time_bases), config_.time_binding),
        retrieval_noise_(stream_key("retrieval-noise", config_.seed)) {
    if (encoder_.dimension() != config_.dimension) {
      throw Error(Errc::corrupt_snapshot, "time bases do not match the model dimension");
    }
  }

  const ModelConfig& config() const noexcept { return config_; }
  const HdmStore& store() const noexcept { return store_; }
  HdmStore& store() noexcept { return store_; }
  const TimeHrrEncoder& encoder() const noexcept { return encoder_; }
  const OscillatorBank& bank() const noexcept { return encoder_.bank(); }

  /// Replaces the run-time parameters. Dimension, seed, oscillator
  /// parameters and time binding are fixed when the model is created.
  void update_config(const ModelConfig& next) {
    next.validate();
    if (next.dimension != config_.dimension || next.seed != config_.seed ||
        !(next.oscillators == config_.oscillators) || next.time_binding != config_.time_binding) {
      throw Error(Errc::invalid_parameter, "dimension, seed, oscillator parameters and time binding are fixed at init");
    }
    store_.set_encoding_params(next.noise_sd, next.max_pair_distance);
    config_ = next;
  }

  std::uint64_t retrieval_noise_counter() const noexcept { return retrieval_noise_.counter(); }
  void set_retrieval_noise_counter(std::uint64_t c) { retrieval_noise_ = Rng(retrieval_noise_.key(), c); }

  Chunk add_chunk(const std::vector<Pair>& pairs, std::optional<bool> encode_time = std::nullopt) {
    Chunk chunk = store_.add_chunk(pairs);
    if (encode_time.value_or(config_.chunk_time_encoding)) {
      update_time_memory(store_, chunk.pairs, encoder_.encode(chunk.index));
    }
    return chunk;
  }

  SentenceStats ingest_sentence(const std::vector<std::string>& tokens, std::optional<bool> encode_time = std::nullopt) {
    SentenceStats stats = store_.ingest_sentence(tokens);
    if (encode_time.value_or(config_.corpus_time_encoding)) {
      const HoloVector trace = convolve(encoder_.encode(stats.index), store_.sentence_binding(tokens));
      std::set<std::string, std::less<>> touched;
      for (const auto& t : tokens) touched.insert(normalize_token(t));
      for (const auto& t : touched) store_.add_time_memory(t, trace);
    }
    return stats;
  }

  RetrievalOptions retrieval_options(std::optional<double> threshold = std::nullopt,
                                     std::optional<double> noise_sd = std::nullopt) {
    const double sd = noise_sd.value_or(config_.retrieval_noise_sd);
    if (!(sd >= 0.0)) throw Error(Errc::invalid_parameter, "retrieval noise sd must be non-negative");
    return RetrievalOptions{threshold.value_or(config_.retrieval_threshold), sd, &retrieval_noise_};
  }

  std::optional<Retrieved> retrieve_value(const Cue& cue, std::optional<double> threshold = std::nullopt,
                                          std::optional<double> noise_sd = std::nullopt) {
    return store_.retrieve_value(cue, retrieval_options(threshold, noise_sd));
  }

  std::optional<std::vector<Pair>> retrieve_multi(const Cue& cue, std::optional<double> threshold = std::nullopt,
                                                  std::optional<double> noise_sd = std::nullopt) {
    return store_.retrieve_multi(cue, retrieval_options(threshold, noise_sd));
  }

  /// Whole-chunk recall under the configured policy, or `policy` if given.
  RecallResult recall_chunk(const std::vector<Pair>& cue_known, std::optional<RecallPolicy> policy = std::nullopt) {
    return recall_whole_chunk(store_, encoder_, cue_known, policy.value_or(config_.policy()),
                              config_.retrieval_noise_sd, &retrieval_noise_);
  }

 private:
  static const ModelConfig& checked(const ModelConfig& c) {
    c.validate();
    return c;
  }

  ModelConfig config_;
  HdmStore store_;
  TimeHrrEncoder encoder_;
  Rng retrieval_noise_;
};

}  // namespace holomem
