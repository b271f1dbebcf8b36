#pragma once

#include <json.hpp>
#include <string>

#include "toral/dynamics/dynamics.hpp"
#include "toral/exact/poly.hpp"
#include "toral/spectrum/spectrum.hpp"

namespace toral::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// Throws ParseError "<source>:<line>:<column>: <reason>".
Json parse_json(const std::string& text, const std::string& source);

/// Array of rows (integers or decimal strings), or an object with a "matrix" field.
IntMatrix matrix_from_json(const Json& j);
/// {"linear": rows, "epsilon": x, "modes": [{"k": [...], "a": [...], "b": [...]}], "normalize": bool}
TorusMap map_from_json(const Json& j, MarginPolicy policy = MarginPolicy::Enforce);

Json exact(const Integer& x);
Json exact(const Rational& x);
Json exact(const IntMatrix& m);
Json exact(const IntPoly& p);
/// Matrix file: numbers where they are exactly representable, strings otherwise.
Json matrix_file(const IntMatrix& m);

Json numbers(const std::vector<double>& v);
Json numbers(const Eigen::VectorXd& v);
std::string decimal(double x);

Json spectrum_json(const CertifiedSpectrum& s);

/// Deterministic serialization: insertion-ordered keys, two-space indent, every
/// float with 17 significant digits, non-finite floats as null.
std::string dump(const Json& j);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace toral::io
