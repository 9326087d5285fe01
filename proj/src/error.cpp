#include "mocaprec/error.hpp"

namespace mocaprec {

const char* to_string(Err code) {
  switch (code) {
    case Err::MissingFile: return "MissingFile";
    case Err::DuplicatePath: return "DuplicatePath";
    case Err::BadLabel: return "BadLabel";
    case Err::MissingColumn: return "MissingColumn";
    case Err::RaggedRow: return "RaggedRow";
    case Err::EmptyFile: return "EmptyFile";
    case Err::TooManyMissing: return "TooManyMissing";
    case Err::AllMissing: return "AllMissing";
    case Err::TooShort: return "TooShort";
    case Err::UnknownMarker: return "UnknownMarker";
    case Err::SingleClass: return "SingleClass";
    case Err::TargetTooLarge: return "TargetTooLarge";
    case Err::BadConfig: return "BadConfig";
    case Err::EmptyData: return "EmptyData";
    case Err::TooFewTrials: return "TooFewTrials";
    case Err::SingleSubject: return "SingleSubject";
    case Err::LengthMismatch: return "LengthMismatch";
    case Err::IoError: return "IoError";
  }
  return "UnknownError";
}

} // namespace mocaprec
