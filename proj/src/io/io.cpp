#include "toral/io/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

namespace toral::io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << contents)) throw ParseError("cannot write " + path);
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto pos = what.find(": ", what.find("parse error"));
    if (pos != std::string::npos) what = what.substr(pos + 2);
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

namespace {

Integer integer_from(const Json& v, const std::string& what) {
  if (v.is_number_integer()) return Integer(v.dump());
  if (v.is_string()) {
    static const std::regex digits("^[+-]?[0-9]+$");
    const auto s = v.get<std::string>();
    if (!std::regex_match(s, digits)) throw ParseError(what + ": \"" + s + "\" is not a decimal integer");
    return Integer(s[0] == '+' ? s.substr(1) : s);
  }
  throw ParseError(what + " must be an integer");
}

double real_from(const Json& v, const std::string& what) {
  if (!v.is_number()) throw ParseError(what + " must be a number");
  return v.get<double>();
}

std::vector<double> reals(const Json& v, const std::string& what) {
  if (!v.is_array()) throw ParseError(what + " must be an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(real_from(x, what));
  return out;
}

}  // namespace

IntMatrix matrix_from_json(const Json& j) {
  const Json& rows = j.is_object() ? (j.contains("matrix") ? j.at("matrix") : j.contains("linear") ? j.at("linear") : j) : j;
  if (!rows.is_array() || rows.empty()) throw ParseError("matrix must be a nonempty array of rows");
  std::vector<std::vector<Integer>> v;
  for (const auto& r : rows) {
    if (!r.is_array()) throw ParseError("matrix rows must be arrays");
    std::vector<Integer> row;
    for (const auto& x : r) row.push_back(integer_from(x, "matrix entry"));
    v.push_back(std::move(row));
  }
  const IntMatrix m = IntMatrix::from_rows(v);
  if (!m.is_square()) throw ParseError("matrix is not square");
  return m;
}

TorusMap map_from_json(const Json& j, MarginPolicy policy) {
  if (!j.is_object()) throw ParseError("map config must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "linear" && key != "epsilon" && key != "modes" && key != "normalize")
      throw ParseError("unknown map config field \"" + key + "\"");
  if (!j.contains("linear")) throw ParseError("map config lacks \"linear\"");
  const IntMatrix L = matrix_from_json(j.at("linear"));
  const double eps = j.contains("epsilon") ? real_from(j.at("epsilon"), "epsilon") : 0.0;
  bool normalize = true;
  if (j.contains("normalize")) {
    if (!j.at("normalize").is_boolean()) throw ParseError("normalize must be a boolean");
    normalize = j.at("normalize").get<bool>();
  }
  std::vector<FourierMode> modes;
  if (j.contains("modes")) {
    if (!j.at("modes").is_array()) throw ParseError("modes must be an array");
    for (const auto& m : j.at("modes")) {
      if (!m.is_object() || !m.contains("k")) throw ParseError("each mode needs a frequency \"k\"");
      FourierMode mode;
      for (const auto& x : m.at("k")) {
        const Integer k = integer_from(x, "frequency entry");
        if (!k.fits_slong_p()) throw ParseError("frequency entry out of range");
        mode.k.push_back(k.get_si());
      }
      if (m.contains("a")) mode.a = reals(m.at("a"), "mode coefficient a");
      if (m.contains("b")) mode.b = reals(m.at("b"), "mode coefficient b");
      if (mode.k.size() != L.dim()) throw ParseError("mode frequency has the wrong dimension");
      if ((!mode.a.empty() && mode.a.size() != L.dim()) || (!mode.b.empty() && mode.b.size() != L.dim()))
        throw ParseError("mode coefficients have the wrong dimension");
      modes.push_back(std::move(mode));
    }
  }
  return TorusMap(L, std::move(modes), eps, normalize, policy);
}

Json exact(const Integer& x) { return x.get_str(); }

Json exact(const Rational& x) {
  Rational c = x;
  c.canonicalize();
  return c.get_str();
}

Json exact(const IntMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).get_str());
    rows.push_back(std::move(row));
  }
  return rows;
}

Json exact(const IntPoly& p) {
  Json out = Json::array();
  for (const auto& c : p.coeffs()) out.push_back(c.get_str());
  return out;
}

Json matrix_file(const IntMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Integer& x = m(i, j);
      if (abs(x) < Integer("9007199254740992"))
        row.push_back(x.get_si());
      else
        row.push_back(x.get_str());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Json numbers(const Eigen::VectorXd& v) { return numbers(std::vector<double>(v.data(), v.data() + v.size())); }

std::string decimal(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json spectrum_json(const CertifiedSpectrum& s) {
  Json classes = Json::array();
  for (const auto& c : s.lyapunov) {
    Json e;
    e["lo"] = decimal(c.lo);
    e["hi"] = decimal(c.hi);
    e["value"] = c.value;
    e["multiplicity"] = c.multiplicity;
    e["center"] = c.center;
    classes.push_back(std::move(e));
  }
  return classes;
}

namespace {

void write(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(k).dump() + ": ";
        write(v, out, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& v : j)
        if (v.is_structured()) scalars = false;
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(j[i], out, indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write(j[i], out, indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? decimal(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  write(j, out, 0);
  out += "\n";
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace toral::io
