#ifndef FIELDCALC_MODEL_IO_HPP
#define FIELDCALC_MODEL_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fieldcalc/perturbation.hpp"

namespace fieldcalc {

inline constexpr const char* kToolVersion = "0.1.0";

/// Model file parsed from JSON, plus the canonical re-serialization that the
/// model hash and all output metadata are derived from.
struct LoadedModel {
  ModelSpec spec;
  std::string canonical_json;
  std::string hash_hex;
  std::vector<std::string> warnings;
};

/// Parses and validates the model document. Messages carry the JSON line
/// for parse errors and the offending key for schema errors.
LoadedModel parse_model_text(const std::string& text);
LoadedModel load_model_file(const std::string& path);

/// Canonical single-line JSON of a model (17 significant digits, fixed key
/// order); byte-stable for identical inputs.
std::string model_canonical_json(const ModelSpec& spec);

/// FNV-1a 64-bit hash, hex-encoded. Applied to the canonical model JSON.
std::string fnv1a64_hex(const std::string& bytes);

/// Doubles rendered with 17 significant digits (round-trip safe).
std::string format_double(double v);

/// Parses a plain JSON array of numbers (a source vector).
std::vector<double> parse_vector_file(const std::string& path, int expected_len);

}  // namespace fieldcalc

#endif  // FIELDCALC_MODEL_IO_HPP
