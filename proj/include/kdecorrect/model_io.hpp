#pragma once

#include <string>

#include "kdecorrect/density.hpp"

namespace kdecorrect {

inline constexpr int kModelFormatVersion = 1;

// Writes the model (spec, embedded training data, fingerprint, optional
// local factors) as JSON with round-trip numeric precision. The write is
// atomic: temp file + rename.
void save_model(const FittedModel& model, const std::string& path);

// Reloads a model file; the bandwidth matrix is re-derived from the
// embedded data, which the fingerprint guards. Reloaded models reproduce
// predictions bitwise on the same platform. Throws DataError on schema or
// fingerprint mismatches.
FittedModel load_model(const std::string& path);

}  // namespace kdecorrect
