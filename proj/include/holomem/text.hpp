#pragma once

// Corpus pipeline: rule-based sentence segmentation, tokenization, stopword
// removal, the one-sentence-per-line preprocessed format, and ingestion of
// that format into a model.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "holomem/error.hpp"
#include "holomem/model.hpp"

namespace holomem::text {

/// Words ending in '.' that do not end a sentence.
inline const std::set<std::string, std::less<>>& abbreviations() {
  static const std::set<std::string, std::less<>> table = {
      "dr.",   "mr.",   "mrs.",  "ms.",   "prof.", "sr.",  "jr.",  "st.",   "mt.",  "vs.",
      "etc.",  "e.g.",  "i.e.",  "u.s.",  "u.k.",  "u.n.", "no.",  "inc.",  "ltd.", "co.",
      "corp.", "gen.",  "gov.",  "sen.",  "rep.",  "rev.", "fig.", "al.",   "approx.", "dept.",
      "jan.",  "feb.",  "mar.",  "apr.",  "jun.",  "jul.", "aug.", "sep.",  "sept.", "oct.",
      "nov.",  "dec.",  "a.m.",  "p.m."};
  return table;
}

/// Version 1 of the built-in list: 179 common English function words.
inline const std::vector<std::string_view>& default_stopwords() {
  static const std::vector<std::string_view> words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've", "you'll",
      "you'd", "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself", "she", "she's",
      "her", "hers", "herself", "it", "it's", "its", "itself", "they", "them", "their", "theirs",
      "themselves", "what", "which", "who", "whom", "this", "that", "that'll", "these", "those", "am",
      "is", "are", "was", "were", "be", "been", "being", "have", "has", "had", "having", "do", "does",
      "did", "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as", "until", "while",
      "of", "at", "by", "for", "with", "about", "against", "between", "into", "through", "during",
      "before", "after", "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
      "under", "again", "further", "then", "once", "here", "there", "when", "where", "why", "how",
      "all", "any", "both", "each", "few", "more", "most", "other", "some", "such", "no", "nor", "not",
      "only", "own", "same", "so", "than", "too", "very", "s", "t", "can", "will", "just", "don",
      "don't", "should", "should've", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren",
      "aren't", "couldn", "couldn't", "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn",
      "hasn't", "haven", "haven't", "isn", "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't",
      "needn", "needn't", "shan", "shan't", "shouldn", "shouldn't", "wasn", "wasn't", "weren",
      "weren't", "won", "won't", "wouldn", "wouldn't"};
  return words;
}

class StopwordList {
 public:
  enum class Source { builtin, file };

  static StopwordList builtin() {
    StopwordList list;
    for (auto w : default_stopwords()) list.words_.emplace(w);
    return list;
  }

  /// One token per line; blank lines and lines starting with '#' are ignored.
  static StopwordList from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::file_not_found, "cannot open stopword file " + path.string());
    StopwordList list;
    list.source_ = Source::file;
    list.path_ = path.string();
    std::string line;
    while (std::getline(in, line)) {
      std::string word = normalize_token(line);
      if (word.empty() || word.front() == '#') continue;
      list.words_.insert(std::move(word));
    }
    return list;
  }

  static StopwordList from_words(const std::vector<std::string>& words) {
    StopwordList list;
    list.source_ = Source::file;
    for (const auto& w : words) list.words_.insert(normalize_token(w));
    return list;
  }

  bool contains(std::string_view token) const { return words_.contains(normalize_token(token)); }
  std::size_t size() const noexcept { return words_.size(); }
  Source source() const noexcept { return source_; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::set<std::string, std::less<>> words_;
  Source source_ = Source::builtin;
  std::string path_;
};

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
inline bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }
inline bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
inline bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

inline std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && is_space(s[a])) ++a;
  while (b > a && is_space(s[b - 1])) --b;
  return std::string(s.substr(a, b - a));
}

/// The whitespace-delimited word ending at `end` (exclusive), lowercased.
inline std::string word_before(std::string_view text, std::size_t end) {
  std::size_t start = end;
  while (start > 0 && !is_space(text[start - 1])) --start;
  std::string w(text.substr(start, end - start));
  while (!w.empty() && (w.front() == '(' || w.front() == '"' || w.front() == '\'')) w.erase(w.begin());
  for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return w;
}

}  // namespace detail

/// Splits after '.', '?' or '!' (optionally followed by closing quotes or
/// brackets) when whitespace and then an uppercase letter or digit follow,
/// unless the word carrying a '.' is a known abbreviation.
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!detail::is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < text.size() && (detail::is_terminator(text[end]) || detail::is_closer(text[end]))) ++end;
    std::size_t next = end;
    while (next < text.size() && detail::is_space(text[next])) ++next;
    std::size_t lead = next;
    while (lead < text.size() && detail::is_opener(text[lead])) ++lead;
    const bool boundary = next > end && lead < text.size() &&
                          (std::isupper(static_cast<unsigned char>(text[lead])) ||
                           std::isdigit(static_cast<unsigned char>(text[lead])));
    bool guarded = false;
    if (text[i] == '.') {
      std::size_t word_end = i + 1;
      guarded = abbreviations().contains(detail::word_before(text, word_end));
    }
    if (boundary && !guarded) {
      if (auto s = detail::trim(text.substr(start, end - start)); !s.empty()) out.push_back(std::move(s));
      start = next;
    }
    i = end;
  }
  if (auto s = detail::trim(text.substr(start)); !s.empty()) out.push_back(std::move(s));
  return out;
}

/// Lowercase, split on whitespace, strip leading and trailing punctuation;
/// interior punctuation (hyphens, apostrophes) is kept.
inline std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && detail::is_space(sentence[i])) ++i;
    std::size_t j = i;
    while (j < sentence.size() && !detail::is_space(sentence[j])) ++j;
    std::string_view word = sentence.substr(i, j - i);
    std::size_t a = 0;
    std::size_t b = word.size();
    while (a < b && std::ispunct(static_cast<unsigned char>(word[a]))) ++a;
    while (b > a && std::ispunct(static_cast<unsigned char>(word[b - 1]))) --b;
    if (b > a) {
      std::string tok(word.substr(a, b - a));
      for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      out.push_back(std::move(tok));
    }
    i = j;
  }
  return out;
}

inline std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const StopwordList& stops) {
  std::vector<std::string> out;
  std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(out),
               [&](const std::string& t) { return !stops.contains(t); });
  return out;
}

inline bool is_numeral(std::string_view token) {
  bool digit = false;
  for (char c : token) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != '.' && c != ',' && c != '-' && c != '/' && c != '%') {
      return false;
    }
  }
  return digit;
}

struct PreprocessOptions {
  bool drop_numerals = false;
};

/// Sentence-split, tokenize and filter raw text; one token list per
/// non-empty sentence.
inline std::vector<std::vector<std::string>> preprocess(std::string_view raw, const StopwordList& stops,
                                                        const PreprocessOptions& opts = {}) {
  std::vector<std::vector<std::string>> lines;
  for (const auto& sentence : split_sentences(raw)) {
    auto tokens = remove_stopwords(tokenize(sentence), stops);
    if (opts.drop_numerals) std::erase_if(tokens, [](const std::string& t) { return is_numeral(t); });
    if (!tokens.empty()) lines.push_back(std::move(tokens));
  }
  return lines;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::file_not_found, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::io, "read failed for " + path.string());
  return buf.str();
}

/// Writes one preprocessed sentence per line (tokens joined by single
/// spaces, LF-terminated). Returns the number of lines written.
inline std::size_t preprocess_text(const std::filesystem::path& in_path, const std::filesystem::path& out_path,
                                   const StopwordList& stops, const PreprocessOptions& opts = {}) {
  const auto lines = preprocess(read_file(in_path), stops, opts);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write " + out_path.string());
  for (const auto& tokens : lines) {
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      if (k) out << ' ';
      out << tokens[k];
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw Error(Errc::io, "write failed for " + out_path.string());
  return lines.size();
}

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t skipped = 0;  ///< blank lines
  std::int64_t first_index = 0;
  std::int64_t last_index = 0;
};

/// Feeds each line of a preprocessed file to the model as one sentence.
inline CorpusStats read_corpus(Model& model, const std::filesystem::path& path,
                               std::optional<bool> encode_time = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::file_not_found, "cannot open corpus " + path.string());
  CorpusStats stats;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> tokens;
    std::istringstream words(line);
    for (std::string w; words >> w;) tokens.push_back(std::move(w));
    if (tokens.empty()) {
      ++stats.skipped;
      continue;
    }
    const auto s = model.ingest_sentence(tokens, encode_time);
    if (stats.sentences == 0) stats.first_index = s.index;
    stats.last_index = s.index;
    ++stats.sentences;
  }
  if (in.bad()) throw Error(Errc::io, "read failed for " + path.string());
  return stats;
}

}  // namespace holomem::text
