#pragma once

#include <stdexcept>
#include <string>

namespace lineguide {

enum class Errc {
  io,
  format,
  size_mismatch,
  dimension_missing,
  dimension_mismatch,
  length_mismatch,
  empty_mask,
  degenerate_box,
  invalid_t,
  invalid_argument,
  empty_correspondence,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::io: return "IoError";
    case Errc::format: return "FormatError";
    case Errc::size_mismatch: return "SizeMismatch";
    case Errc::dimension_missing: return "DimensionMissing";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::empty_mask: return "EmptyMask";
    case Errc::degenerate_box: return "DegenerateBox";
    case Errc::invalid_t: return "InvalidT";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::empty_correspondence: return "EmptyCorrespondence";
  }
  return "Error";
}

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map them to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace lineguide
