#pragma once

#include <stdexcept>
#include <string>

namespace streetscope {

// Base for all toolkit errors so callers can catch the whole family.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// imaging
struct DecodeError : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// calibration
struct InsufficientLines : Error { using Error::Error; };
struct NoIntersection : Error { using Error::Error; };
struct DegenerateVanishingPoints : Error { using Error::Error; };
struct SingularHomography : Error { using Error::Error; };
struct HorizonOrAbove : Error { using Error::Error; };
struct BehindCamera : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct InvalidObject : Error { using Error::Error; };

// registration
struct TooFewAnchors : Error { using Error::Error; };
struct DegenerateConfiguration : Error { using Error::Error; };

// stability
struct NoUsableFrames : Error { using Error::Error; };
struct SeriesTooShort : Error { using Error::Error; };

// groups
struct TooFewPoints : Error { using Error::Error; };
struct EmptyScene : Error { using Error::Error; };

// pipeline
struct IoError : Error { using Error::Error; };
struct SchemaError : Error {
  SchemaError(const std::string& msg, long line) : Error(msg), line_number(line) {}
  long line_number = -1;
};
struct CorruptRecord : Error { using Error::Error; };

// synth
struct InvalidSpec : Error { using Error::Error; };

}  // namespace streetscope
