// holomem: command-line driver over a snapshot file.
//
// Exit codes: 0 success, 1 retrieval failure, 2 usage or parameter error,
// 3 io or snapshot error.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "holomem/analysis.hpp"
#include "holomem/chunk_spec.hpp"
#include "holomem/error.hpp"
#include "holomem/model.hpp"
#include "holomem/snapshot.hpp"
#include "holomem/text.hpp"

namespace {

using namespace holomem;

constexpr int kExitOk = 0;
constexpr int kExitRetrieval = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

int exit_code(Errc code) {
  switch (code) {
    case Errc::file_not_found:
    case Errc::io:
    case Errc::incompatible_snapshot:
    case Errc::corrupt_snapshot:
      return kExitIo;
    default:
      return kExitUsage;
  }
}

std::string real_text(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  T out{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw Error(Errc::invalid_parameter, "invalid value '" + text + "' for " + key);
  }
  return out;
}

bool parse_flag(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "on") return true;
  if (text == "0" || text == "false" || text == "off") return false;
  throw Error(Errc::invalid_parameter, "invalid value '" + text + "' for " + key + " (expected true or false)");
}

std::map<std::string, std::string> config_entries(const ModelConfig& c) {
  return {
      {"n", std::to_string(c.dimension)},
      {"seed", std::to_string(c.seed)},
      {"S", real_text(c.oscillators.time_scale)},
      {"sigma2", real_text(c.oscillators.sigma2)},
      {"beta", real_text(c.oscillators.beta)},
      {"recenter", c.oscillators.recenter ? "true" : "false"},
      {"time_binding", to_string(c.time_binding)},
      {"noise_sd", real_text(c.noise_sd)},
      {"retrieval_noise_sd", real_text(c.retrieval_noise_sd)},
      {"retrieval_threshold", real_text(c.retrieval_threshold)},
      {"method", to_string(c.recall_method)},
      {"p", std::to_string(c.recall_p)},
      {"time_threshold", real_text(c.time_threshold)},
      {"max_pair_distance", std::to_string(c.max_pair_distance)},
      {"chunk_time_encoding", c.chunk_time_encoding ? "true" : "false"},
      {"corpus_time_encoding", c.corpus_time_encoding ? "true" : "false"},
  };
}

void set_entry(ModelConfig& c, const std::string& key, const std::string& value) {
  if (key == "n") c.dimension = parse_value<std::size_t>(key, value);
  else if (key == "seed") c.seed = parse_value<std::uint64_t>(key, value);
  else if (key == "S") c.oscillators.time_scale = parse_value<double>(key, value);
  else if (key == "sigma2") c.oscillators.sigma2 = parse_value<double>(key, value);
  else if (key == "beta") c.oscillators.beta = parse_value<double>(key, value);
  else if (key == "recenter") c.oscillators.recenter = parse_flag(key, value);
  else if (key == "time_binding") c.time_binding = parse_time_binding(value);
  else if (key == "noise_sd") c.noise_sd = parse_value<double>(key, value);
  else if (key == "retrieval_noise_sd") c.retrieval_noise_sd = parse_value<double>(key, value);
  else if (key == "retrieval_threshold") c.retrieval_threshold = parse_value<double>(key, value);
  else if (key == "method") c.recall_method = parse_recall_method(value);
  else if (key == "p") c.recall_p = parse_value<std::int64_t>(key, value);
  else if (key == "time_threshold") c.time_threshold = parse_value<double>(key, value);
  else if (key == "max_pair_distance") c.max_pair_distance = parse_value<std::size_t>(key, value);
  else if (key == "chunk_time_encoding") c.chunk_time_encoding = parse_flag(key, value);
  else if (key == "corpus_time_encoding") c.corpus_time_encoding = parse_flag(key, value);
  else throw Error(Errc::invalid_parameter, "unknown parameter '" + key + "'");
}

void print_pairs(const std::vector<Pair>& pairs) {
  for (const auto& p : pairs) std::cout << p.slot << ':' << p.value << '\n';
}

struct Session {
  std::string path;

  Model load() const {
    if (!std::filesystem::exists(path)) {
      throw Error(Errc::file_not_found, "no snapshot at " + path + " (run 'holomem init' first)");
    }
    return load_snapshot(path);
  }
  void save(const Model& model) const { save_snapshot(model, path); }
};

std::string default_snapshot_path() {
  if (const char* env = std::getenv("HOLOMEM_SNAPSHOT"); env != nullptr && *env != '\0') return env;
  return "holomem.snapshot";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holographic declarative memory with time-coded whole-chunk recall"};
  app.require_subcommand(1);
  Session session{default_snapshot_path()};
  app.add_option("--snapshot", session.path, "Snapshot file (default: $HOLOMEM_SNAPSHOT or holomem.snapshot)");

  // init
  ModelConfig init_config;
  std::string init_binding = "compose";
  std::string init_method = "both";
  auto* init = app.add_subcommand("init", "Create a fresh model and write its snapshot");
  init->add_option("--n", init_config.dimension, "Vector dimension")->capture_default_str();
  init->add_option("--seed", init_config.seed, "Master seed")->capture_default_str();
  init->add_option("--S", init_config.oscillators.time_scale, "Oscillator time scale")->capture_default_str();
  init->add_option("--sigma2", init_config.oscillators.sigma2, "Oscillator frequency variance")->capture_default_str();
  init->add_option("--beta", init_config.oscillators.beta, "Oscillator selection decay")->capture_default_str();
  init->add_flag("--recenter", init_config.oscillators.recenter, "Draw frequency noise with mean 1 instead of 0");
  init->add_option("--time-binding", init_binding, "compose or superpose")->capture_default_str();
  init->add_option("--noise-sd", init_config.noise_sd, "Encoding noise sd")->capture_default_str();
  init->add_option("--retrieval-noise-sd", init_config.retrieval_noise_sd, "Retrieval noise sd")->capture_default_str();
  init->add_option("--retrieval-threshold", init_config.retrieval_threshold, "Retrieval threshold")->capture_default_str();
  init->add_option("--method", init_method, "Recall method: top_p, threshold or both")->capture_default_str();
  init->add_option("--p", init_config.recall_p, "Tokens kept per time step")->capture_default_str();
  init->add_option("--time-threshold", init_config.time_threshold, "Time-scan threshold")->capture_default_str();
  init->add_option("--max-pair-distance", init_config.max_pair_distance, "Sentence pair window (0 = all)")
      ->capture_default_str();

  // params
  auto* params = app.add_subcommand("params", "Show or change global parameters");
  params->require_subcommand(1);
  std::optional<std::string> get_key;
  auto* params_get = params->add_subcommand("get", "Print parameters as key=value");
  params_get->add_option("key", get_key, "Single parameter to print");
  std::string set_key;
  std::string set_value;
  auto* params_set = params->add_subcommand("set", "Change a run-time parameter");
  params_set->add_option("key", set_key)->required();
  params_set->add_option("value", set_value)->required();

  // add-chunk
  std::string chunk_text;
  bool no_time = false;
  auto* add_chunk = app.add_subcommand("add-chunk", "Encode a chunk such as \"homeowner:yes damage:severe\"");
  add_chunk->add_option("chunk", chunk_text)->required();
  add_chunk->add_flag("--no-time", no_time, "Skip the time-memory update");

  // retrieve
  std::string cue_text;
  std::optional<double> retrieve_threshold;
  std::optional<double> retrieve_noise;
  auto* retrieve = app.add_subcommand("retrieve", "Fill the '?' slots of a cue");
  retrieve->add_option("cue", cue_text)->required();
  retrieve->add_option("--threshold", retrieve_threshold, "Retrieval threshold for this call");
  retrieve->add_option("--noise-sd", retrieve_noise, "Retrieval noise sd for this call");

  // recall-chunk
  std::string recall_text;
  std::optional<std::string> recall_method;
  std::optional<std::int64_t> recall_p;
  std::optional<double> recall_time_threshold;
  std::optional<double> recall_retrieval_threshold;
  auto* recall = app.add_subcommand("recall-chunk", "Recall a whole chunk from a partial cue");
  recall->add_option("cue", recall_text)->required();
  recall->add_option("--method", recall_method, "top_p, threshold or both");
  recall->add_option("--p", recall_p, "Tokens kept per time step");
  recall->add_option("--time-threshold", recall_time_threshold, "Time-scan threshold");
  recall->add_option("--retrieval-threshold", recall_retrieval_threshold, "Retrieval threshold");

  // dm
  std::optional<std::string> dm_pca;
  auto* dm = app.add_subcommand("dm", "List stored tokens");
  dm->add_option("--pca", dm_pca, "Also write a 2-D PCA projection of the memory vectors to this CSV");

  // preprocess
  std::string pre_in;
  std::string pre_out;
  std::optional<std::string> pre_stopwords;
  bool drop_numerals = false;
  auto* preprocess = app.add_subcommand("preprocess", "Segment, tokenize and filter raw text");
  preprocess->add_option("input", pre_in)->required();
  preprocess->add_option("output", pre_out)->required();
  preprocess->add_option("--stopwords", pre_stopwords, "Stopword file, one word per line");
  preprocess->add_flag("--drop-numerals", drop_numerals, "Remove numeric tokens");

  // ingest
  std::string ingest_path;
  bool ingest_time = false;
  auto* ingest = app.add_subcommand("ingest", "Encode a preprocessed corpus, one sentence per line");
  ingest->add_option("corpus", ingest_path)->required();
  ingest->add_flag("--encode-time", ingest_time, "Also update time memory for each sentence");

  // export-similarity
  std::int64_t t_max = 30;
  std::string sim_prefix = "similarity";
  auto* export_sim = app.add_subcommand("export-similarity", "Write time-code self-similarity CSVs");
  export_sim->add_option("--t-max", t_max, "Largest time step")->capture_default_str();
  export_sim->add_option("--out", sim_prefix, "Output prefix (<prefix>_lag.csv, <prefix>_matrix.csv)")
      ->capture_default_str();

  // export-pca
  std::string pca_out;
  std::string pca_vectors = "m";
  auto* export_pca = app.add_subcommand("export-pca", "Write a 2-D PCA projection of token vectors");
  export_pca->add_option("output", pca_out)->required();
  export_pca->add_option("--vectors", pca_vectors, "m (memory) or e (environment)")
      ->check(CLI::IsMember({"m", "e"}))
      ->capture_default_str();

  // snapshot
  std::string snap_path;
  auto* snapshot = app.add_subcommand("snapshot", "Copy the model state to or from a file");
  snapshot->require_subcommand(1);
  auto* snap_save = snapshot->add_subcommand("save", "Write the current state to PATH");
  snap_save->add_option("path", snap_path)->required();
  auto* snap_load = snapshot->add_subcommand("load", "Make PATH the current state");
  snap_load->add_option("path", snap_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (app.get_subcommands().empty()) std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (init->parsed()) {
      init_config.time_binding = parse_time_binding(init_binding);
      init_config.recall_method = parse_recall_method(init_method);
      Model model(init_config);
      session.save(model);
      std::cout << "initialized " << session.path << '\n';
      return kExitOk;
    }

    if (params_get->parsed()) {
      const Model model = session.load();
      const auto entries = config_entries(model.config());
      if (get_key) {
        auto it = entries.find(*get_key);
        if (it == entries.end()) throw Error(Errc::invalid_parameter, "unknown parameter '" + *get_key + "'");
        std::cout << it->first << '=' << it->second << '\n';
      } else {
        for (const auto& [k, v] : entries) std::cout << k << '=' << v << '\n';
      }
      return kExitOk;
    }

    if (params_set->parsed()) {
      Model model = session.load();
      ModelConfig next = model.config();
      set_entry(next, set_key, set_value);
      model.update_config(next);
      session.save(model);
      std::cout << set_key << '=' << config_entries(model.config()).at(set_key) << '\n';
      return kExitOk;
    }

    if (add_chunk->parsed()) {
      const ChunkSpec spec = parse_chunk_spec(chunk_text);
      if (!spec.unknown.empty()) throw Error(Errc::parse, "a chunk to store cannot contain '?' values");
      Model model = session.load();
      const Chunk chunk = model.add_chunk(spec.known, no_time ? std::optional<bool>(false) : std::nullopt);
      session.save(model);
      std::cout << "chunk " << chunk.index << '\n';
      return kExitOk;
    }

    if (retrieve->parsed()) {
      const ChunkSpec spec = parse_chunk_spec(cue_text);
      Model model = session.load();
      const auto counter = model.retrieval_noise_counter();
      std::optional<std::vector<Pair>> pairs;
      if (spec.unknown.size() == 1) {
        if (auto r = model.retrieve_value(spec.cue(), retrieve_threshold, retrieve_noise)) {
          pairs = std::vector<Pair>{{spec.unknown.front(), r->value}};
        }
      } else {
        pairs = model.retrieve_multi(spec.cue(), retrieve_threshold, retrieve_noise);
      }
      if (model.retrieval_noise_counter() != counter) session.save(model);
      if (!pairs) {
        std::cerr << "retrieval failure\n";
        return kExitRetrieval;
      }
      print_pairs(*pairs);
      return kExitOk;
    }

    if (recall->parsed()) {
      const ChunkSpec spec = parse_chunk_spec(recall_text);
      if (!spec.unknown.empty()) throw Error(Errc::parse, "recall-chunk takes known pairs only");
      Model model = session.load();
      RecallPolicy policy = model.config().policy();
      if (recall_method) policy.method = parse_recall_method(*recall_method);
      if (recall_p) policy.p = *recall_p;
      if (recall_time_threshold) policy.time_threshold = *recall_time_threshold;
      if (recall_retrieval_threshold) policy.retrieval_threshold = *recall_retrieval_threshold;
      const auto counter = model.retrieval_noise_counter();
      const RecallResult result = model.recall_chunk(spec.known, policy);
      if (model.retrieval_noise_counter() != counter) session.save(model);
      if (!result.ok) {
        std::cerr << "retrieval failure (" << result.stage << ")\n";
        return kExitRetrieval;
      }
      print_pairs(result.pairs);
      return kExitOk;
    }

    if (dm->parsed()) {
      const Model model = session.load();
      for (const auto& t : model.store().list_tokens()) {
        std::cout << t.token << ' ' << (t.is_slot ? "slot" : "value") << ' ' << t.count << '\n';
      }
      if (dm_pca) {
        write_projection_csv(pca_2d(token_vectors(model.store(), VectorKind::memory)), *dm_pca);
        std::cout << "pca: " << *dm_pca << '\n';
      }
      return kExitOk;
    }

    if (preprocess->parsed()) {
      const auto stops = pre_stopwords ? text::StopwordList::from_file(*pre_stopwords) : text::StopwordList::builtin();
      const auto lines = text::preprocess_text(pre_in, pre_out, stops, text::PreprocessOptions{drop_numerals});
      std::cout << lines << " sentences written to " << pre_out << '\n';
      return kExitOk;
    }

    if (ingest->parsed()) {
      Model model = session.load();
      const auto stats = text::read_corpus(model, ingest_path, ingest_time ? std::optional<bool>(true) : std::nullopt);
      session.save(model);
      std::cout << "ingested " << stats.sentences << " sentences";
      if (stats.sentences > 0) std::cout << " (chunks " << stats.first_index << ".." << stats.last_index << ')';
      std::cout << ", " << model.store().lexicon_size() << " tokens\n";
      return kExitOk;
    }

    if (export_sim->parsed()) {
      const Model model = session.load();
      const std::string lag = sim_prefix + "_lag.csv";
      const std::string matrix = sim_prefix + "_matrix.csv";
      export_self_similarity(model.bank(), t_max, lag, matrix);
      std::cout << lag << '\n' << matrix << '\n';
      return kExitOk;
    }

    if (export_pca->parsed()) {
      const Model model = session.load();
      const auto kind = pca_vectors == "e" ? VectorKind::environment : VectorKind::memory;
      write_projection_csv(pca_2d(token_vectors(model.store(), kind)), pca_out);
      std::cout << pca_out << '\n';
      return kExitOk;
    }

    if (snap_save->parsed()) {
      const Model model = session.load();
      save_snapshot(model, snap_path);
      std::cout << "saved " << snap_path << '\n';
      return kExitOk;
    }

    if (snap_load->parsed()) {
      const Model model = load_snapshot(snap_path);
      session.save(model);
      std::cout << "loaded " << snap_path << " into " << session.path << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }

  std::cerr << app.help();
  return kExitUsage;
}
