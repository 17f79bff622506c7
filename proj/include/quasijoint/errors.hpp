#pragma once

#include <stdexcept>
#include <string>

namespace qj {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// invalid or inconsistent configuration / arguments
struct ConfigError : Error {
  using Error::Error;
};

// numerical integration failed to reach the requested tolerance
struct QuadratureError : Error {
  using Error::Error;
};

// characteristic function still too large at the end of the time window
struct AliasingError : Error {
  using Error::Error;
};

// inversion produced an inconsistent result (complex residue, bad plateau phase)
struct InversionError : Error {
  using Error::Error;
};

// a reconstructed density failed its normalization check
struct NormalizationError : Error {
  using Error::Error;
};

// Fock-space cutoff too small for the requested state
struct TruncationError : Error {
  using Error::Error;
};

// non-Hermitian density operator where a Hermitian one is required
struct HermiticityError : Error {
  using Error::Error;
};

// decoded image strays too far from the colormap curve
struct GamutError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// optimization diverged (non-finite loss)
struct TrainingError : Error {
  using Error::Error;
};

}  // namespace qj
