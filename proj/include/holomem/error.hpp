#pragma once

#include <stdexcept>
#include <string>

namespace holomem {

enum class Errc {
  invalid_dimension,
  invalid_argument,
  degenerate_spectrum,
  invalid_parameter,
  invalid_time,
  invalid_token,
  empty_chunk,
  duplicate_slot,
  empty_sentence,
  invalid_cue,
  insufficient_data,
  convergence,
  file_not_found,
  io,
  parse,
  incompatible_snapshot,
  corrupt_snapshot,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_dimension: return "invalid-dimension";
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::degenerate_spectrum: return "degenerate-spectrum";
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::invalid_time: return "invalid-time";
    case Errc::invalid_token: return "invalid-token";
    case Errc::empty_chunk: return "empty-chunk";
    case Errc::duplicate_slot: return "duplicate-slot";
    case Errc::empty_sentence: return "empty-sentence";
    case Errc::invalid_cue: return "invalid-cue";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::convergence: return "convergence";
    case Errc::file_not_found: return "file-not-found";
    case Errc::io: return "io";
    case Errc::parse: return "parse";
    case Errc::incompatible_snapshot: return "incompatible-snapshot";
    case Errc::corrupt_snapshot: return "corrupt-snapshot";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the `Errc` codes so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace holomem
