// Acceptance suite: one PASS/FAIL line per criterion. Pass a criterion
// number to run just that one. Exit status is non-zero if any run fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "holomem/analysis.hpp"
#include "holomem/hrr.hpp"
#include "holomem/model.hpp"
#include "holomem/snapshot.hpp"
#include "holomem/text.hpp"
#include "oracles.hpp"

using namespace holomem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// 1. HRR algebra.
Outcome hrr_algebra() {
  std::mt19937_64 gen(1);
  double worst_direct = 0.0;
  for (std::size_t n : {4u, 8u, 64u}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto a = oracle::gaussian(gen, n, 1.0);
      const auto b = oracle::gaussian(gen, n, 1.0);
      const auto want = oracle::direct_convolution(a, b);
      const auto got = convolve(HoloVector(a), HoloVector(b));
      for (std::size_t i = 0; i < n; ++i) worst_direct = std::max(worst_direct, std::abs(got[i] - want[i]));
    }
  }

  double worst_delta = 0.0;
  double worst_comm = 0.0;
  double worst_dist = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::string k = std::to_string(rep);
    const auto a = random_vector("a" + k, 1, 1024);
    const auto b = random_vector("b" + k, 1, 1024);
    const auto c = random_vector("c" + k, 1, 1024);
    const auto ad = convolve(a, HoloVector::delta(1024));
    const auto ab = convolve(a, b);
    const auto ba = convolve(b, a);
    const auto lhs = convolve(a, b + c);
    const auto rhs = ab + convolve(a, c);
    double scale_ab = 0.0;
    double scale_d = 0.0;
    for (std::size_t i = 0; i < 1024; ++i) {
      scale_ab = std::max(scale_ab, std::abs(ab[i]));
      scale_d = std::max(scale_d, std::abs(rhs[i]));
    }
    for (std::size_t i = 0; i < 1024; ++i) {
      worst_delta = std::max(worst_delta, std::abs(ad[i] - a[i]));
      worst_comm = std::max(worst_comm, std::abs(ab[i] - ba[i]) / scale_ab);
      worst_dist = std::max(worst_dist, std::abs(lhs[i] - rhs[i]) / scale_d);
    }
  }

  int recovered = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::string k = std::to_string(trial);
    const auto a = random_vector("bound" + k, 2, 1024);
    const auto b = random_vector("partner" + k, 2, 1024);
    const auto est = convolve(convolve(a, b), approx_inverse(b));
    const double own = cosine(est, a);
    bool best = true;
    for (int f = 0; f < 49 && best; ++f) {
      best = cosine(est, random_vector("foil" + k + "-" + std::to_string(f), 2, 1024)) < own;
    }
    recovered += best;
  }

  const bool pass = worst_direct <= 1e-10 && worst_delta <= 1e-10 && worst_comm <= 1e-9 && worst_dist <= 1e-9 &&
                    recovered >= 99;
  return {pass, "fft-vs-direct " + fmt("%.1e", worst_direct) + ", delta " + fmt("%.1e", worst_delta) + ", commute " +
                    fmt("%.1e", worst_comm) + ", distribute " + fmt("%.1e", worst_dist) + ", unbinding " +
                    std::to_string(recovered) + "/100"};
}

// 2. Fractional binding.
Outcome fractional_binding() {
  double worst_zero = 0.0;
  double worst_one = 0.0;
  double worst_add = 1.0;
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> exponent(-2.0, 2.0);
  for (int rep = 0; rep < 10; ++rep) {
    const auto base = make_unitary(random_vector("base" + std::to_string(rep), 1, 1024));
    const auto p0 = fractional_power(base, 0.0);
    const auto p1 = fractional_power(base, 1.0);
    for (std::size_t i = 0; i < 1024; ++i) {
      worst_zero = std::max(worst_zero, std::abs(p0[i] - (i == 0 ? 1.0 : 0.0)));
      worst_one = std::max(worst_one, std::abs(p1[i] - base[i]));
    }
    for (int k = 0; k < 5; ++k) {
      const double x = exponent(gen);
      const double y = exponent(gen);
      const double c = cosine(convolve(fractional_power(base, x), fractional_power(base, y)),
                              fractional_power(base, x + y));
      worst_add = std::min(worst_add, c);
    }
    worst_add = std::min(worst_add, cosine(convolve(fractional_power(base, 0.5), fractional_power(base, 0.5)), p1));
  }
  const bool pass = worst_zero <= 1e-10 && worst_one <= 1e-10 && worst_add > 0.999;
  return {pass, "x=0 " + fmt("%.1e", worst_zero) + ", x=1 " + fmt("%.1e", worst_one) + ", min additivity cosine " +
                    fmt("%.6f", worst_add)};
}

// 3. Time-code shape.
Outcome time_code_shape() {
  const OscillatorParams params{1e-5, 1.0, 5.125, false};
  std::vector<double> mean(30, 0.0);
  double worst_lag0 = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto curve = lag_profile(self_similarity(sample_bank(params, seed), 30));
    worst_lag0 = std::max(worst_lag0, std::abs(curve[0] - 1.0));
    for (std::size_t l = 0; l < 30; ++l) mean[l] += curve[l] / 20.0;
  }
  double near = 0.0;
  double far = 0.0;
  for (std::size_t l = 1; l <= 5; ++l) near += mean[l] / 5.0;
  for (std::size_t l = 25; l <= 29; ++l) far += mean[l] / 5.0;
  const auto peaks = interior_maxima(mean, 3);
  std::string where;
  for (auto p : peaks) where += (where.empty() ? "" : ",") + std::to_string(p);
  const bool pass = worst_lag0 <= 1e-12 && near > far && !peaks.empty();
  return {pass, "lag0 error " + fmt("%.1e", worst_lag0) + ", mean lags 1-5 " + fmt("%.4f", near) + " vs 25-29 " +
                    fmt("%.4f", far) + ", interior maxima at lag {" + where + "}"};
}

// 4. Whole-chunk recall over a 50-token vocabulary.
struct Workload {
  std::vector<std::vector<Pair>> chunks;
  std::vector<Pair> cues;
};

Workload make_workload(std::uint64_t seed) {
  std::mt19937_64 gen(seed * 7919 + 1);
  std::vector<std::string> slots;
  std::vector<std::string> values;
  for (int i = 0; i < 25; ++i) {
    slots.push_back("slot" + std::to_string(i));
    values.push_back("value" + std::to_string(i));
  }
  std::uniform_int_distribution<std::size_t> pick(0, 24);
  Workload w;
  std::map<Pair, int> uses;
  for (int c = 0; c < 20; ++c) {
    for (;;) {
      std::vector<std::string> chosen = slots;
      std::shuffle(chosen.begin(), chosen.end(), gen);
      std::vector<Pair> chunk;
      for (int k = 0; k < 4; ++k) chunk.push_back({chosen[static_cast<std::size_t>(k)], values[pick(gen)]});
      // The cue pair must appear nowhere else, before or after.
      std::optional<Pair> cue;
      for (const auto& p : chunk) {
        if (uses[p] == 0) {
          cue = p;
          break;
        }
      }
      if (!cue) continue;
      bool clash = false;
      for (const auto& q : w.cues) {
        for (const auto& p : chunk) clash = clash || p == q;
      }
      if (clash) continue;
      for (const auto& p : chunk) ++uses[p];
      w.chunks.push_back(chunk);
      w.cues.push_back(*cue);
      break;
    }
  }
  return w;
}

Outcome whole_chunk_recall() {
  int correct = 0;
  int total = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ModelConfig c;
    c.dimension = 2048;
    c.seed = seed;
    c.oscillators.time_scale = 5e-6;
    c.recall_method = RecallMethod::both;
    c.recall_p = 8;
    c.time_threshold = 0.15;
    Model model(c);
    const auto w = make_workload(seed);
    for (const auto& chunk : w.chunks) model.add_chunk(chunk);
    int ok = 0;
    for (std::size_t i = 0; i < w.chunks.size(); ++i) {
      const auto r = model.recall_chunk({w.cues[i]});
      const std::set<Pair> want(w.chunks[i].begin(), w.chunks[i].end());
      if (r.ok && std::set<Pair>(r.pairs.begin(), r.pairs.end()) == want && r.pairs.size() == want.size()) ++ok;
    }
    correct += ok;
    total += static_cast<int>(w.chunks.size());
    per_seed += (per_seed.empty() ? "" : " ") + std::to_string(ok);
  }
  const double rate = static_cast<double>(correct) / total;
  return {rate >= 0.8, std::to_string(correct) + "/" + std::to_string(total) + " chunks (" + fmt("%.1f", 100 * rate) +
                           "%), per seed [" + per_seed + "]"};
}

// 5. Storage scales with the lexicon, not the corpus.
std::string synthetic_text(std::size_t sentences) {
  static const char* const content[] = {"flood", "house",  "river", "storm",   "family", "insurance", "damage",
                                        "rain",  "street", "town",  "shelter", "water",  "roof",      "power",
                                        "road",  "school", "truck", "boat",    "claim",  "neighbor"};
  static const char* const function[] = {"the", "and", "of", "was", "in", "to", "a", "were", "by", "with"};
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> word(0, 19);
  std::uniform_int_distribution<int> stop(0, 9);
  std::uniform_int_distribution<int> len(2, 7);
  std::ostringstream out;
  for (std::size_t s = 0; s < sentences; ++s) {
    const int n = len(gen);
    std::string sentence = "The";
    for (int k = 0; k < n; ++k) {
      sentence += ' ';
      sentence += (k % 2 == 0) ? content[word(gen)] : function[stop(gen)];
    }
    sentence += ' ';
    sentence += content[word(gen)];
    sentence += "s" + std::to_string(s % 60);
    out << sentence << ". ";
  }
  return out.str();
}

Outcome scaling_invariant() {
  oracle::TempDir dir("accept-scaling");
  oracle::write_text(dir / "raw.txt", synthetic_text(500));
  const auto stops = text::StopwordList::builtin();
  const auto lines = text::preprocess_text(dir / "raw.txt", dir / "corpus.txt", stops);

  // Independent count: split on spaces and periods, lowercase, drop stopwords.
  std::set<std::string> unique;
  {
    std::string word;
    for (char ch : oracle::slurp(dir / "raw.txt")) {
      if (ch == ' ' || ch == '.') {
        if (!word.empty() && !stops.contains(word)) unique.insert(word);
        word.clear();
      } else {
        word += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      }
    }
  }

  ModelConfig c;
  c.dimension = 256;
  Model once(c);
  const auto stats = text::read_corpus(once, dir / "corpus.txt");
  Model twice(c);
  text::read_corpus(twice, dir / "corpus.txt");
  text::read_corpus(twice, dir / "corpus.txt");

  const bool pass = lines == 500 && stats.sentences == 500 && stats.first_index == 1 && stats.last_index == 500 &&
                    once.store().lexicon_size() == unique.size() &&
                    once.store().stored_vector_count() == 3 * unique.size() &&
                    twice.store().stored_vector_count() == once.store().stored_vector_count() &&
                    twice.store().chunk_counter() == 1000;
  return {pass, std::to_string(stats.sentences) + " sentences, chunks " + std::to_string(stats.first_index) + ".." +
                    std::to_string(stats.last_index) + ", " + std::to_string(unique.size()) + " unique tokens, " +
                    std::to_string(once.store().stored_vector_count()) + " vectors once, " +
                    std::to_string(twice.store().stored_vector_count()) + " vectors twice"};
}

// 6. Time-memory linearity.
Outcome time_memory_linearity() {
  const std::vector<Pair> chunk = {{"homeowner", "yes"}, {"damage", "severe"}, {"renter", "no"}};
  auto run = [&]() {
    ModelConfig c;
    c.dimension = 1024;
    c.chunk_time_encoding = false;
    Model model(c);
    model.add_chunk(chunk);
    const auto tt = model.encoder().encode(1);
    std::vector<HoloVector> after_one;
    std::vector<HoloVector> after_two;
    update_time_memory(model.store(), chunk, tt);
    for (const auto& [token, entry] : model.store().lexicon()) after_one.push_back(entry.mt);
    update_time_memory(model.store(), chunk, tt);
    for (const auto& [token, entry] : model.store().lexicon()) after_two.push_back(entry.mt);
    return std::make_pair(after_one, after_two);
  };
  const auto a = run();
  const auto b = run();
  bool doubled = true;
  for (std::size_t k = 0; k < a.first.size(); ++k) {
    HoloVector want = a.first[k];
    want += a.first[k];
    doubled = doubled && a.second[k] == want && !a.first[k].is_zero();
  }
  const bool reproducible = a == b;
  return {doubled && reproducible,
          std::string("second update doubles every mt exactly: ") + (doubled ? "yes" : "no") +
              ", bit-identical across runs: " + (reproducible ? "yes" : "no")};
}

// 7. Chaining equivalence.
Outcome chaining_equivalence() {
  std::mt19937_64 gen(7);
  int agree = 0;
  int resolved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    HdmStore store(StoreConfig{512, static_cast<std::uint64_t>(trial + 1)});
    std::uniform_int_distribution<int> pick(0, 5);
    const std::vector<std::string> slots = {"s0", "s1", "s2", "s3", "s4"};
    for (int c = 0; c < 4; ++c) {
      std::vector<Pair> chunk;
      for (const auto& s : slots) chunk.push_back({s, "v" + std::to_string(pick(gen))});
      store.add_chunk(chunk);
    }
    const Cue cue{{{"s0", "v" + std::to_string(pick(gen))}}, {"s2", "s4"}};
    const RetrievalOptions opts{0.05, 0.0, nullptr};

    // Composed single-value calls in descending first-pass score order.
    std::optional<std::vector<Pair>> composed;
    const auto r2 = store.retrieve_value(Cue{cue.known, {"s2"}}, opts);
    const auto r4 = store.retrieve_value(Cue{cue.known, {"s4"}}, opts);
    if (r2 && r4) {
      const bool s2_first = r2->score > r4->score || (r2->score == r4->score);
      const std::string first = s2_first ? "s2" : "s4";
      const std::string second = s2_first ? "s4" : "s2";
      const auto a = s2_first ? r2 : r4;
      auto known = cue.known;
      known.push_back({first, a->value});
      const auto b = store.retrieve_value(Cue{known, {second}}, opts);
      if (b) composed = std::vector<Pair>{{first, a->value}, {second, b->value}};
    }
    const auto multi = store.retrieve_multi(cue, opts);
    agree += multi == composed;
    resolved += multi.has_value();
  }
  return {agree == 100, std::to_string(agree) + "/100 agree (" + std::to_string(resolved) + " fully resolved)"};
}

// 8. Pipeline determinism.
Outcome pipeline_determinism() {
  oracle::TempDir dir("accept-pipeline");
  oracle::write_text(dir / "raw.txt", synthetic_text(120));
  auto pipeline = [&](const std::string& tag) {
    text::preprocess_text(dir / "raw.txt", dir / ("corpus-" + tag + ".txt"), text::StopwordList::builtin());
    ModelConfig c;
    c.dimension = 512;
    c.seed = 3;
    c.noise_sd = 0.001;
    c.retrieval_noise_sd = 0.01;
    Model model(c);
    text::read_corpus(model, dir / ("corpus-" + tag + ".txt"), true);
    model.add_chunk({{"homeowner", "yes"}, {"damage", "severe"}, {"renter", "no"}});
    save_snapshot(model, dir / (tag + "-1.snap"));
    Model loaded = load_snapshot(dir / (tag + "-1.snap"));
    save_snapshot(loaded, dir / (tag + "-2.snap"));
    std::string answers;
    for (Model* m : {&model, &loaded}) {
      for (int i = 0; i < 3; ++i) {
        const auto r = m->retrieve_value(Cue{{{"homeowner", "yes"}}, {"damage"}});
        answers += r ? r->value + fmt(":%.17g;", r->score) : std::string("fail;");
      }
      answers += '|';
    }
    return answers;
  };
  const auto a = pipeline("a");
  const auto b = pipeline("b");
  const auto a1 = oracle::slurp(dir / "a-1.snap");
  const bool corpus_same = oracle::slurp(dir / "corpus-a.txt") == oracle::slurp(dir / "corpus-b.txt");
  const bool round_trip = a1 == oracle::slurp(dir / "a-2.snap");
  const bool runs_same = a1 == oracle::slurp(dir / "b-1.snap");
  const auto half = a.find('|');
  const bool answers_same = a == b && a.substr(0, half) == a.substr(half + 1, half);
  return {corpus_same && round_trip && runs_same && answers_same,
          std::string("save/load/save identical: ") + (round_trip ? "yes" : "no") +
              ", independent runs identical: " + (runs_same && corpus_same ? "yes" : "no") +
              ", retrievals identical after load: " + (answers_same ? "yes" : "no")};
}

// 9. The homeowner example end to end.
Outcome homeowner_example() {
  ModelConfig c;
  c.dimension = 1024;
  Model model(c);
  const std::vector<Pair> chunk = {
      {"homeowner", "yes"}, {"damage", "severe"}, {"renter", "no"}, {"neighborhood", "Eastville"}};
  model.add_chunk(chunk);
  const auto r = model.recall_chunk({{"homeowner", "yes"}});
  const std::set<Pair> want = {
      {"homeowner", "yes"}, {"damage", "severe"}, {"renter", "no"}, {"neighborhood", "eastville"}};
  std::string got;
  for (const auto& p : r.pairs) got += (got.empty() ? "" : " ") + p.slot + ":" + p.value;
  const bool pass = r.ok && std::set<Pair>(r.pairs.begin(), r.pairs.end()) == want && r.pairs.size() == 4;
  return {pass, r.ok ? got : "failed at " + r.stage};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0 = no limit
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "HRR algebra", 10, hrr_algebra},
      {2, "fractional binding", 5, fractional_binding},
      {3, "time-code shape", 30, time_code_shape},
      {4, "whole-chunk recall", 300, whole_chunk_recall},
      {5, "scaling invariant", 60, scaling_invariant},
      {6, "time-memory linearity", 0, time_memory_linearity},
      {7, "chaining equivalence", 0, chaining_equivalence},
      {8, "pipeline determinism", 0, pipeline_determinism},
      {9, "homeowner example", 5, homeowner_example},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = out.pass;
    if (c.budget_seconds > 0 && secs > c.budget_seconds) {
      pass = false;
      out.detail += "; over the " + fmt("%.0f", c.budget_seconds) + " s budget";
    }
    failures += !pass;
    std::printf("criterion %d %-22s %s  (%.2f s)  %s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs,
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
