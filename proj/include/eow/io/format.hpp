#ifndef EOW_IO_FORMAT_HPP
#define EOW_IO_FORMAT_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "eow/error.hpp"
#include "eow/series/matrix.hpp"
#include "eow/series/scalar.hpp"

namespace eow::io {

using json = nlohmann::json;

/// 17 significant digits; non-finite values become "inf", "-inf", "nan".
inline std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// JSON value for a double; non-finite values are emitted as strings.
inline json jnum(double x) {
  if (!std::isfinite(x)) return fmt_double(x);
  return x;
}

inline json jrat(const Scalar& q) { return q.get_str(); }

inline json jvec(const std::vector<Scalar>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(jrat(x));
  return a;
}

inline json jvec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(jnum(x));
  return a;
}

inline json jmat(const QMatrix& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(jrat(m(i, j)));
    a.push_back(row);
  }
  return a;
}

namespace detail {

inline void dump_string(std::string& out, const std::string& s) { out += json(s).dump(); }

inline void dump(std::string& out, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string end(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_string(out, it.key());
        out += ": ";
        dump(out, it.value(), indent + 2);
      }
      out += "\n" + end + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalar = true;
      for (const auto& e : j)
        if (e.is_structured()) scalar = false;
      if (scalar) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(out, j[i], indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(out, j[i], indent + 2);
      }
      out += "\n" + end + "]";
      return;
    }
    case json::value_t::number_float:
      out += fmt_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Sorted keys, two-space indent, doubles at 17 significant digits.
inline std::string canonical_dump(const json& j) {
  std::string out;
  detail::dump(out, j, 0);
  out += "\n";
  return out;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// One CSV file of a trace family.
struct CsvTable {
  std::string name;  // file name
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ",";
        out += r[i];
      }
      out += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

/// Writes each table to dir/name; empty payloads write nothing.
inline std::vector<std::string> emit_plot(const std::vector<CsvTable>& traces, const std::string& dir) {
  std::vector<std::string> written;
  if (traces.empty()) return written;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  for (const auto& t : traces) {
    const auto path = (std::filesystem::path(dir) / t.name).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw PreconditionError("cannot write plot file " + path);
    f << t.str();
    if (!f) throw PreconditionError("cannot write plot file " + path);
    written.push_back(path);
  }
  return written;
}

}  // namespace eow::io

#endif  // EOW_IO_FORMAT_HPP
