#pragma once

// JSON and CSV forms of PL functions, matrix-valued functions and symbolic
// connectors. Doubles are written with 17 significant digits so that a
// write/read round trip is exact.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ozcheck/connector.hpp"
#include "ozcheck/matfield.hpp"
#include "ozcheck/plfun.hpp"
#include "ozcheck/report.hpp"

namespace ozcheck {

inline constexpr int kSchemaVersion = 1;

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Integers that fit in int64 are written as JSON numbers, larger ones as
/// decimal strings.
inline Json bigint_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return Json(v.convert_to<std::int64_t>());
  return Json(v.str());
}

inline BigInt bigint_from(const Json& j) {
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return BigInt(j.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw FormatError("expected an integer or a decimal string, got " + j.dump());
}

inline Json rational_json(const Rational& r) { return Json::array({bigint_json(numerator(r)), bigint_json(denominator(r))}); }

inline Rational rational_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("expected [numerator, denominator], got " + j.dump());
  const BigInt den = bigint_from(j[1]);
  if (den == 0) throw FormatError("zero denominator");
  return Rational(bigint_from(j[0]), den);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw FormatError("not a number: '" + s + "'");
  return v;
}

inline Json block_json(const BlockSpec& b) {
  if (const auto* z = b.as_z()) return Json{{"kind", "Z"}, {"p", z->p}, {"q", z->q}};
  if (const auto* w = b.as_w()) return Json{{"kind", "W"}, {"n", w->n}, {"m", w->m}};
  return Json(nullptr);
}

inline BlockSpec block_from(const Json& j) {
  if (j.is_null()) return {};
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "Z") return BlockSpec::z(j.at("p").get<std::size_t>(), j.at("q").get<std::size_t>());
  if (kind == "W") return BlockSpec::w(j.at("n").get<std::size_t>(), j.at("m").get<std::size_t>());
  throw FormatError("unknown block kind '" + kind + "'");
}

}  // namespace detail

/// [[[x_num, x_den], [y_num, y_den]], ...]
inline Json to_json(const PLFunc& f) {
  Json out = Json::array();
  for (const auto& p : f.breakpoints()) out.push_back(Json::array({detail::rational_json(p.x), detail::rational_json(p.y)}));
  return out;
}

inline PLFunc plfunc_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("PL function must be an array of breakpoints");
  std::vector<Breakpoint> pts;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw FormatError("breakpoint must be [x, y], got " + p.dump());
    pts.push_back({detail::rational_from(p[0]), detail::rational_from(p[1])});
  }
  return PLFunc(std::move(pts));
}

/// {"schema", "grid", "dim", "block", "samples"}; each sample is the
/// row-major list of [re, im] pairs of one fibre.
inline Json to_json(const MatFun& x) {
  Json samples = Json::array();
  for (const auto& m : x.samples()) {
    Json fibre = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) fibre.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    samples.push_back(std::move(fibre));
  }
  Json out;
  out["schema"] = kSchemaVersion;
  out["grid"] = x.grid().size();
  out["dim"] = x.dim();
  out["block"] = detail::block_json(x.block());
  out["samples"] = std::move(samples);
  return out;
}

inline MatFun matfun_from_json(const Json& j) {
  if (j.value("schema", 0) != kSchemaVersion) throw FormatError("unsupported MatFun schema");
  const GridSpec grid(j.at("grid").get<std::size_t>());
  const auto dim = j.at("dim").get<Eigen::Index>();
  const auto& samples = j.at("samples");
  if (samples.size() != grid.size()) throw FormatError("MatFun: sample count does not match grid");
  std::vector<Mat> out;
  out.reserve(grid.size());
  for (const auto& fibre : samples) {
    if (fibre.size() != static_cast<std::size_t>(dim * dim)) throw FormatError("MatFun: fibre has wrong size");
    Mat m(dim, dim);
    for (Eigen::Index k = 0; k < dim * dim; ++k) {
      const auto& e = fibre[static_cast<std::size_t>(k)];
      m(k / dim, k % dim) = Cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
    out.push_back(std::move(m));
  }
  return MatFun(grid, std::move(out), detail::block_from(j.at("block")));
}

/// One line per grid point: t, then re/im of each entry in row-major order.
/// The header records the fibre dimension.
inline std::string to_csv(const MatFun& x) {
  std::ostringstream os;
  os << "t";
  for (std::size_t r = 0; r < x.dim(); ++r)
    for (std::size_t c = 0; c < x.dim(); ++c) os << ",re_" << r << '_' << c << ",im_" << r << '_' << c;
  os << '\n';
  for (std::size_t j = 0; j < x.size(); ++j) {
    os << detail::format_double(x.t(j));
    const Mat& m = x[j];
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        os << ',' << detail::format_double(m(r, c).real()) << ',' << detail::format_double(m(r, c).imag());
    os << '\n';
  }
  return os.str();
}

inline MatFun matfun_from_csv(const std::string& text, BlockSpec block = {}) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty CSV");
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(columns) / 2.0)));
  if (static_cast<std::size_t>(2 * dim * dim) != columns) throw FormatError("CSV header is not a square matrix");
  std::vector<Mat> samples;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      values.push_back(detail::parse_double(line.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (values.size() != columns + 1) throw FormatError("CSV row has " + std::to_string(values.size()) + " fields");
    Mat m(dim, dim);
    for (Eigen::Index k = 0; k < dim * dim; ++k)
      m(k / dim, k % dim) = Cplx(values[static_cast<std::size_t>(1 + 2 * k)], values[static_cast<std::size_t>(2 + 2 * k)]);
    samples.push_back(std::move(m));
  }
  if (samples.size() < 2) throw FormatError("CSV needs at least two grid points");
  const GridSpec grid(samples.size());
  return MatFun(grid, std::move(samples), std::move(block));
}

/// Entries with PL breakpoints, decimal-string multiplicities and the
/// constancy flag.
inline Json to_json(const ConnectorSymbolic& c) {
  Json entries = Json::array();
  for (const auto& e : c.entries())
    entries.push_back(Json{{"fn", to_json(e.fn)}, {"multiplicity", e.multiplicity.str()}, {"constant", e.constant}});
  Json out;
  out["schema"] = kSchemaVersion;
  out["entry_count"] = c.entry_count().str();
  out["entries"] = std::move(entries);
  return out;
}

inline ConnectorSymbolic connector_from_json(const Json& j) {
  ConnectorSymbolic out;
  for (const auto& e : j.at("entries"))
    out.add(plfunc_from_json(e.at("fn")), detail::bigint_from(e.at("multiplicity")), e.at("constant").get<bool>());
  return out;
}

/// Exact rational as a decimal string "p/q" (or "p").
inline Json rational_string(const Rational& r) { return Json(to_string(r)); }

}  // namespace ozcheck
