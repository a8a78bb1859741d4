#pragma once
//
// Matrix exchange format:
//
//   {"dim": n, "re": [[...], ...], "im": [[...], ...]}
//
// with row-major n x n arrays. Bipartite operators use the A-major index
// ordering documented in linalg.hpp. Writers emit 17 significant digits.
//

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "entrolab/linalg.hpp"

namespace entrolab {

inline Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("matrix JSON must be an object");
  for (const char* key : {"dim", "re", "im"}) {
    if (!j.contains(key)) throw ParseError(std::string("matrix JSON missing field \"") + key + "\"");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
    throw ParseError("matrix JSON field \"dim\" must be a positive integer");
  }
  const auto n = static_cast<Eigen::Index>(j["dim"].get<long long>());
  Matrix m(n, n);
  for (const char* part : {"re", "im"}) {
    const auto& rows = j[part];
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
      throw ParseError(std::string("matrix JSON field \"") + part + "\" must have dim rows");
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        std::ostringstream os;
        os << "matrix JSON field \"" << part << "\" row " << r << " must have dim entries";
        throw ParseError(os.str());
      }
      for (Eigen::Index c = 0; c < n; ++c) {
        const auto& v = row[static_cast<std::size_t>(c)];
        if (!v.is_number()) {
          std::ostringstream os;
          os << "matrix JSON field \"" << part << "\" entry (" << r << "," << c << ") is not a number";
          throw ParseError(os.str());
        }
        const double x = v.get<double>();
        if (part[0] == 'r') {
          m(r, c) = Complex(x, 0.0);
        } else {
          m(r, c) += Complex(0.0, x);
        }
      }
    }
  }
  return m;
}

/// Parses the exchange format; JSON syntax errors carry the byte offset.
inline Matrix parse_matrix_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed matrix JSON: ") + e.what());
  }
  return matrix_from_json(j);
}

inline Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_matrix_json(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

namespace detail {
inline std::string format_double17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

inline std::string format_matrix_json(const Matrix& m) {
  detail::require_square(m, "format_matrix_json");
  std::string out = "{\"dim\": " + std::to_string(m.rows());
  for (int part = 0; part < 2; ++part) {
    out += part == 0 ? ", \"re\": [" : ", \"im\": [";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out += r == 0 ? "[" : ", [";
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c > 0) out += ", ";
        out += detail::format_double17(part == 0 ? m(r, c).real() : m(r, c).imag());
      }
      out += "]";
    }
    out += "]";
  }
  out += "}\n";
  return out;
}

inline void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write matrix file '" + path + "'");
  out << format_matrix_json(m);
}

}  // namespace entrolab
