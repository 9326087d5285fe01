#pragma once

#include <stdexcept>
#include <string>

namespace mocaprec {

enum class Err {
  MissingFile,
  DuplicatePath,
  BadLabel,
  MissingColumn,
  RaggedRow,
  EmptyFile,
  TooManyMissing,
  AllMissing,
  TooShort,
  UnknownMarker,
  SingleClass,
  TargetTooLarge,
  BadConfig,
  EmptyData,
  TooFewTrials,
  SingleSubject,
  LengthMismatch,
  IoError,
};

const char* to_string(Err code);

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Err code() const noexcept { return code_; }

private:
  Err code_;
};

[[noreturn]] inline void raise(Err code, const std::string& what) { throw Error(code, what); }

} // namespace mocaprec
