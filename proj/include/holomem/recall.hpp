#pragma once

// Whole-chunk recall. Each chunk's encoding time is turned into an HRR by
// fractional binding of 320 unitary bases, bound to the chunk's summed
// slot:value pairs and added to the time-memory vector of every token in
// the chunk. A partial cue unbinds those traces into noisy time estimates;
// scanning the time steps picks the best-matching step and the slot tokens
// active there, and the missing values are then chained out of the store.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "holomem/error.hpp"
#include "holomem/fft.hpp"
#include "holomem/hrr.hpp"
#include "holomem/store.hpp"
#include "holomem/time_codes.hpp"

namespace holomem {

/// How the 320 fractional powers are combined into one time HRR.
enum class TimeBinding {
  compose,    ///< bind them: Fourier phases add, result stays unitary
  superpose,  ///< add them in the Fourier domain
};

inline const char* to_string(TimeBinding b) { return b == TimeBinding::compose ? "compose" : "superpose"; }

inline TimeBinding parse_time_binding(std::string_view s) {
  if (s == "compose") return TimeBinding::compose;
  if (s == "superpose") return TimeBinding::superpose;
  throw Error(Errc::invalid_parameter, "time binding must be compose or superpose, got '" + std::string(s) + "'");
}

/// Maps the oscillator time vector T(t) into HRR space. Results are cached
/// per time step; the cache is internally synchronized.
class TimeHrrEncoder {
 public:
  TimeHrrEncoder(OscillatorBank bank, std::size_t dimension, std::uint64_t seed,
                 TimeBinding binding = TimeBinding::compose)
      : TimeHrrEncoder(std::move(bank), generate_bases(dimension, seed), binding) {}

  TimeHrrEncoder(OscillatorBank bank, std::vector<HoloVector> bases, TimeBinding binding)
      : bank_(std::move(bank)), bases_(std::move(bases)), binding_(binding) {
    if (bases_.size() != kTimeVectorSize) {
      throw Error(Errc::invalid_parameter, "time encoder needs exactly 320 bases");
    }
    phases_.reserve(bases_.size());
    for (const auto& b : bases_) phases_.push_back(unitary_phases(b));
  }

  TimeHrrEncoder(const TimeHrrEncoder& other)
      : bank_(other.bank_), bases_(other.bases_), phases_(other.phases_), binding_(other.binding_) {}

  /// Unitary projection of seeded normal vectors; a base with a vanishing
  /// Fourier coefficient is redrawn under the next salt.
  static std::vector<HoloVector> generate_bases(std::size_t dimension, std::uint64_t seed) {
    std::vector<HoloVector> bases;
    bases.reserve(kTimeVectorSize);
    for (std::size_t l = 0; l < kTimeVectorSize; ++l) {
      for (std::uint64_t salt = 0;; ++salt) {
        const std::string name = "\x01time-base-" + std::to_string(l) + "-" + std::to_string(salt);
        try {
          bases.push_back(make_unitary(random_vector(name, seed, dimension)));
          break;
        } catch (const Error& err) {
          if (err.code() != Errc::degenerate_spectrum) throw;
        }
      }
    }
    return bases;
  }

  const OscillatorBank& bank() const noexcept { return bank_; }
  const std::vector<HoloVector>& bases() const noexcept { return bases_; }
  TimeBinding binding() const noexcept { return binding_; }
  std::size_t dimension() const noexcept { return bases_.front().size(); }

  /// Normalized time HRR for step t.
  HoloVector encode(std::int64_t t) const {
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(t); it != cache_.end()) return it->second;
    }
    HoloVector out = encode_vector(time_vector(bank_, t));
    std::lock_guard lock(mutex_);
    return cache_.emplace(t, std::move(out)).first->second;
  }

  HoloVector encode_vector(const std::vector<double>& tv) const {
    const std::size_t n = dimension();
    if (binding_ == TimeBinding::compose) {
      std::vector<double> phase(n, 0.0);
      for (std::size_t l = 0; l < kTimeVectorSize; ++l) {
        const double x = tv[l];
        const auto& ph = phases_[l];
        for (std::size_t k = 0; k < n; ++k) phase[k] += x * ph[k];
      }
      return normalize(from_phases(phase));
    }
    std::vector<fft::Complex> spectrum(n, fft::Complex{});
    for (std::size_t l = 0; l < kTimeVectorSize; ++l) {
      const double x = tv[l];
      const auto& ph = phases_[l];
      for (std::size_t k = 0; k < n; ++k) spectrum[k] += std::polar(1.0, x * ph[k]);
    }
    return normalize(HoloVector(fft::inverse_real(spectrum)));
  }

 private:
  OscillatorBank bank_;
  std::vector<HoloVector> bases_;
  std::vector<std::vector<double>> phases_;
  TimeBinding binding_;
  mutable std::mutex mutex_;
  mutable std::map<std::int64_t, HoloVector> cache_;
};

enum class RecallMethod { top_p, threshold, both };

inline const char* to_string(RecallMethod m) {
  switch (m) {
    case RecallMethod::top_p: return "top_p";
    case RecallMethod::threshold: return "threshold";
    case RecallMethod::both: return "both";
  }
  return "both";
}

inline RecallMethod parse_recall_method(std::string_view s) {
  if (s == "top_p" || s == "top-p") return RecallMethod::top_p;
  if (s == "threshold") return RecallMethod::threshold;
  if (s == "both") return RecallMethod::both;
  throw Error(Errc::invalid_parameter, "recall method must be top_p, threshold or both, got '" + std::string(s) + "'");
}

struct RecallPolicy {
  RecallMethod method = RecallMethod::both;
  std::int64_t p = 8;
  double time_threshold = 0.15;
  double retrieval_threshold = 0.1;

  /// Thresholds outside [-1, 1] are accepted: they saturate (keep all / keep none).
  void validate() const {
    if (p < 1) throw Error(Errc::invalid_parameter, "recall p must be >= 1");
    if (!std::isfinite(time_threshold) || !std::isfinite(retrieval_threshold)) {
      throw Error(Errc::invalid_parameter, "recall thresholds must be finite");
    }
  }
};

/// mt[k] += T~ * sum_c e[s_c] * e[v_c] for every token k of the chunk.
/// Exactly linear; no noise.
inline void update_time_memory(HdmStore& store, const std::vector<Pair>& pairs, const HoloVector& time_hrr) {
  const HoloVector trace = convolve(time_hrr, store.pair_binding(pairs));
  std::set<std::string, std::less<>> touched;
  for (const auto& p : pairs) {
    touched.insert(normalize_token(p.slot));
    touched.insert(normalize_token(p.value));
  }
  for (const auto& token : touched) store.add_time_memory(token, trace);
}

struct Reconstruction {
  std::string token;
  HoloVector time_estimate;  ///< normalized mt[token] * Q^-1
};

/// Unbinds the cue from every non-zero time-memory vector. Returns an empty
/// list if a cue token was never interned.
inline std::vector<Reconstruction> reconstruct_time(const HdmStore& store, const std::vector<Pair>& cue_known) {
  if (cue_known.empty()) throw Error(Errc::invalid_cue, "time reconstruction needs at least one known pair");
  for (const auto& p : cue_known) {
    if (!store.find(p.slot) || !store.find(p.value)) return {};
  }
  const HoloVector q_inv = approx_inverse(store.pair_binding(cue_known));
  const auto q_spec = fft::forward(q_inv.elements());

  std::vector<Reconstruction> out;
  for (const auto& [token, entry] : store.lexicon()) {
    if (entry.mt.is_zero()) continue;
    auto spec = fft::forward(entry.mt.elements());
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= q_spec[k];
    out.push_back({token, normalize(HoloVector(fft::inverse_real(spec)))});
  }
  return out;
}

struct ScoredToken {
  std::string token;
  double score = 0.0;
};

struct ScanResult {
  std::int64_t t_star = 0;                  ///< 0 when nothing was scanned
  std::vector<std::string> slot_candidates;  ///< kept slot tokens at t_star, best first
  std::vector<ScoredToken> kept;             ///< every kept token at t_star, best first
};

/// Keeps the tokens selected by `policy` from one time step's scores.
inline std::vector<ScoredToken> select_tokens(std::vector<ScoredToken> scores, const RecallPolicy& policy) {
  std::sort(scores.begin(), scores.end(), [](const ScoredToken& a, const ScoredToken& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.token < b.token;
  });
  const bool use_top = policy.method != RecallMethod::threshold;
  const bool use_threshold = policy.method != RecallMethod::top_p;
  std::vector<ScoredToken> kept;
  for (std::size_t rank = 0; rank < scores.size(); ++rank) {
    if (use_top && rank >= static_cast<std::size_t>(policy.p)) break;
    if (use_threshold && scores[rank].score < policy.time_threshold) continue;
    kept.push_back(scores[rank]);
  }
  return kept;
}

/// Steps t' = 1..t_now, scoring every reconstruction against T~(t'). The step
/// whose kept scores sum highest wins (earliest step on ties).
inline ScanResult scan_time(const HdmStore& store, const TimeHrrEncoder& encoder,
                            const std::vector<Reconstruction>& recs, const RecallPolicy& policy,
                            std::int64_t t_now) {
  policy.validate();
  if (t_now < 1) throw Error(Errc::invalid_time, "scan needs t_now >= 1");
  ScanResult result;
  if (recs.empty()) return result;

  double best_total = 0.0;
  for (std::int64_t t = 1; t <= t_now; ++t) {
    const HoloVector target = encoder.encode(t);
    std::vector<ScoredToken> scores;
    scores.reserve(recs.size());
    for (const auto& r : recs) scores.push_back({r.token, cosine(r.time_estimate, target)});
    auto kept = select_tokens(std::move(scores), policy);
    double total = 0.0;
    for (const auto& k : kept) total += k.score;
    if (result.t_star == 0 || total > best_total) {
      best_total = total;
      result.t_star = t;
      result.kept = std::move(kept);
    }
  }
  for (const auto& k : result.kept) {
    const LexiconEntry* entry = store.find(k.token);
    if (entry && entry->is_slot) result.slot_candidates.push_back(k.token);
  }
  return result;
}

struct RecallResult {
  bool ok = false;
  std::string stage;         ///< "scan" or "retrieve" on failure
  std::vector<Pair> pairs;   ///< cue pairs first, then resolved pairs in resolution order
  ScanResult scan;
};

/// reconstruct -> scan -> chain the candidate slots through the store.
inline RecallResult recall_whole_chunk(const HdmStore& store, const TimeHrrEncoder& encoder,
                                       const std::vector<Pair>& cue_known, const RecallPolicy& policy,
                                       double noise_sd = 0.0, Rng* noise = nullptr) {
  policy.validate();
  if (cue_known.empty()) throw Error(Errc::invalid_cue, "whole-chunk recall needs at least one known pair");
  Cue cue;
  std::set<std::string, std::less<>> known_slots;
  for (const auto& p : cue_known) {
    Pair norm{normalize_token(p.slot), normalize_token(p.value)};
    if (!known_slots.insert(norm.slot).second) throw Error(Errc::invalid_cue, "slot repeated in cue");
    cue.known.push_back(std::move(norm));
  }

  RecallResult result;
  if (store.chunk_counter() < 1) {
    result.stage = "scan";
    return result;
  }
  result.scan = scan_time(store, encoder, reconstruct_time(store, cue.known), policy, store.chunk_counter());
  if (result.scan.slot_candidates.empty()) {
    result.stage = "scan";
    return result;
  }
  for (const auto& slot : result.scan.slot_candidates) {
    if (!known_slots.contains(slot)) cue.unknown.push_back(slot);
  }

  result.pairs = cue.known;
  if (cue.unknown.empty()) {
    result.ok = true;
    return result;
  }
  auto resolved = store.retrieve_multi(cue, RetrievalOptions{policy.retrieval_threshold, noise_sd, noise});
  if (!resolved) {
    result.stage = "retrieve";
    result.pairs.clear();
    return result;
  }
  result.pairs.insert(result.pairs.end(), resolved->begin(), resolved->end());
  result.ok = true;
  return result;
}

}  // namespace holomem
