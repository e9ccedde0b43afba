#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "biortho/matrix.hpp"

namespace biortho {

struct MatrixFile {
  Matrix matrix;
  std::string label;  // optional
};

enum class StateBasis { phi, ambient };

struct StateFile {
  Vector coeffs;
  StateBasis basis = StateBasis::phi;
};

namespace io {

inline nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError(origin + ": malformed JSON");
  return j;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline cplx parse_complex(const nlohmann::json& j, const std::string& origin) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(origin + ": complex entries must be [re, im] number pairs");
  const cplx z(j[0].get<double>(), j[1].get<double>());
  if (!is_finite(z)) throw ParseError(origin + ": non-finite number");
  return z;
}

inline MatrixFile parse_matrix(const nlohmann::json& j, const std::string& origin) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("matrix"))
    throw ParseError(origin + ": expected an object with \"dim\" and \"matrix\"");
  if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1)
    throw ParseError(origin + ": \"dim\" must be a positive integer");
  const int n = j["dim"].get<int>();
  const auto& rows = j["matrix"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw ParseError(origin + ": \"matrix\" must hold dim rows");
  MatrixFile out;
  out.matrix = Matrix(n);
  for (int i = 0; i < n; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n)
      throw ParseError(origin + ": row " + std::to_string(i) + " must hold dim entries");
    for (int k = 0; k < n; ++k) out.matrix(i, k) = parse_complex(rows[i][k], origin);
  }
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw ParseError(origin + ": \"label\" must be a string");
    out.label = j["label"].get<std::string>();
  }
  return out;
}

inline MatrixFile load_matrix(const std::string& path) {
  return parse_matrix(parse_json_text(read_file(path), path), path);
}

inline StateFile parse_state(const nlohmann::json& j, const std::string& origin) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("coeffs"))
    throw ParseError(origin + ": expected an object with \"dim\" and \"coeffs\"");
  const int n = j["dim"].get<int>();
  if (n < 1) throw ParseError(origin + ": \"dim\" must be a positive integer");
  const auto& arr = j["coeffs"];
  if (!arr.is_array() || static_cast<int>(arr.size()) != n)
    throw ParseError(origin + ": \"coeffs\" must hold dim entries");
  StateFile out;
  out.coeffs.resize(n);
  for (int i = 0; i < n; ++i) out.coeffs[i] = parse_complex(arr[i], origin);
  if (j.contains("basis")) {
    const std::string b = j["basis"].get<std::string>();
    if (b == "phi")
      out.basis = StateBasis::phi;
    else if (b == "ambient")
      out.basis = StateBasis::ambient;
    else
      throw ParseError(origin + ": \"basis\" must be \"phi\" or \"ambient\"");
  }
  return out;
}

inline StateFile load_state(const std::string& path) {
  return parse_state(parse_json_text(read_file(path), path), path);
}

/// 17-significant-digit decimal rendering, locale independent.
inline std::string format_number(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t seed = 1469598103934665603ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Streaming JSON writer with caller-controlled key order and fixed number
/// formatting, so identical inputs produce identical bytes.
class JsonWriter {
 public:
  std::string str() const { return out_; }

  JsonWriter& begin_object() {
    comma();
    out_ += '{';
    fresh_ = true;
    return *this;
  }
  JsonWriter& end_object() {
    out_ += '}';
    fresh_ = false;
    return *this;
  }
  JsonWriter& begin_array() {
    comma();
    out_ += '[';
    fresh_ = true;
    return *this;
  }
  JsonWriter& end_array() {
    out_ += ']';
    fresh_ = false;
    return *this;
  }
  JsonWriter& key(const std::string& k) {
    comma();
    string_literal(k);
    out_ += ':';
    fresh_ = true;
    return *this;
  }
  JsonWriter& value(double v) {
    comma();
    out_ += format_number(v);
    fresh_ = false;
    return *this;
  }
  JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(long long v) {
    comma();
    out_ += std::to_string(v);
    fresh_ = false;
    return *this;
  }
  JsonWriter& value(bool v) {
    comma();
    out_ += v ? "true" : "false";
    fresh_ = false;
    return *this;
  }
  JsonWriter& value(const std::string& v) {
    comma();
    string_literal(v);
    fresh_ = false;
    return *this;
  }
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  JsonWriter& value(cplx z) {
    begin_array();
    value(z.real());
    value(z.imag());
    return end_array();
  }
  JsonWriter& value(const Vector& v) {
    begin_array();
    for (const auto& z : v) value(z);
    return end_array();
  }
  JsonWriter& value(const Matrix& m) {
    begin_array();
    for (int i = 0; i < m.dim(); ++i) {
      begin_array();
      for (int j = 0; j < m.dim(); ++j) value(m(i, j));
      end_array();
    }
    return end_array();
  }

 private:
  void comma() {
    if (!fresh_ && !out_.empty() && out_.back() != ':' && out_.back() != '[' && out_.back() != '{')
      out_ += ',';
    fresh_ = false;
  }
  void string_literal(const std::string& s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        case '\r': out_ += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  bool fresh_ = true;
};

inline std::string write_matrix_json(const Matrix& m, const std::string& label = "") {
  JsonWriter w;
  w.begin_object();
  w.key("dim").value(m.dim());
  w.key("matrix").value(m);
  if (!label.empty()) w.key("label").value(label);
  w.end_object();
  return w.str();
}

inline std::string write_state_json(const Vector& coeffs, StateBasis basis) {
  JsonWriter w;
  w.begin_object();
  w.key("dim").value(static_cast<int>(coeffs.size()));
  w.key("coeffs").value(coeffs);
  w.key("basis").value(basis == StateBasis::phi ? "phi" : "ambient");
  w.end_object();
  return w.str();
}

}  // namespace io
}  // namespace biortho
