#pragma once

// File formats: JSON matrices, Gaussian states, spin states and reports; CSV
// sweep series.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "chibounds/error.hpp"
#include "chibounds/gaussian.hpp"
#include "chibounds/poscone.hpp"
#include "chibounds/saturation.hpp"
#include "chibounds/spin.hpp"
#include "chibounds/su11.hpp"

namespace chibounds::io {

using json = nlohmann::ordered_json;
using Eigen::Index;
using Eigen::MatrixXd;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

/// 64-bit FNV-1a, hex encoded; used as a stable inputs digest.
inline std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

namespace detail {

inline const json& field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(ErrorKind::ParseError, std::string("missing field \"") + key + "\"");
  }
  return doc.at(key);
}

inline double finite_number(const json& v, const char* what) {
  if (!v.is_number()) throw Error(ErrorKind::ParseError, std::string(what) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorKind::ParseError, std::string(what) + " is not finite");
  return x;
}

inline Index count(const json& v, const char* what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorKind::ParseError, std::string(what) + " must be a non-negative integer");
  }
  return static_cast<Index>(v.get<long long>());
}

inline std::vector<Index> index_list(const json& v, const char* what) {
  if (!v.is_array()) throw Error(ErrorKind::ParseError, std::string(what) + " must be an array");
  std::vector<Index> out;
  for (const auto& e : v) out.push_back(count(e, what));
  return out;
}

inline MatrixXd square_matrix(const json& v, Index n, const char* what) {
  if (!v.is_array() || static_cast<Index>(v.size()) != n * n) {
    throw Error(ErrorKind::ParseError, std::string(what) + " must hold n*n numbers");
  }
  MatrixXd m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = finite_number(v[static_cast<std::size_t>(i * n + j)], what);
  return m;
}

inline json row_major(const MatrixXd& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

}  // namespace detail

/// {"dim": n, "data": [n*n row-major], "partition": {"a": [...], "b": [...]}}
struct MatrixFile {
  MatrixXd data;
  poscone::Bipartition partition;
};

inline MatrixFile parse_matrix_file(const json& doc) {
  const Index n = detail::count(detail::field(doc, "dim"), "dim");
  if (n < 1) throw Error(ErrorKind::ParseError, "dim must be positive");
  MatrixFile mf;
  mf.data = detail::square_matrix(detail::field(doc, "data"), n, "data");
  const auto& part = detail::field(doc, "partition");
  mf.partition.a = detail::index_list(detail::field(part, "a"), "partition.a");
  mf.partition.b = detail::index_list(detail::field(part, "b"), "partition.b");
  return mf;
}

inline json matrix_to_json(const MatrixXd& m, const poscone::Bipartition& p) {
  return {{"dim", m.rows()}, {"data", detail::row_major(m)}, {"partition", {{"a", p.a}, {"b", p.b}}}};
}

/// "a=0,1;b=2,3"
inline poscone::Bipartition parse_partition_flag(std::string_view text) {
  poscone::Bipartition p;
  auto parse_list = [](std::string_view s) {
    std::vector<Index> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const std::size_t comma = std::min(s.find(',', pos), s.size());
      const std::string item(s.substr(pos, comma - pos));
      if (item.empty()) throw Error(ErrorKind::ParseError, "empty index in partition");
      std::size_t used = 0;
      long long v = -1;
      try {
        v = std::stoll(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size() || v < 0) throw Error(ErrorKind::ParseError, "bad index '" + item + "'");
      out.push_back(static_cast<Index>(v));
      pos = comma + 1;
    }
    return out;
  };
  const std::size_t semi = text.find(';');
  if (semi == std::string_view::npos) throw Error(ErrorKind::ParseError, "partition needs a=...;b=...");
  const auto lhs = text.substr(0, semi);
  const auto rhs = text.substr(semi + 1);
  if (!lhs.starts_with("a=") || !rhs.starts_with("b=")) {
    throw Error(ErrorKind::ParseError, "partition needs a=...;b=...");
  }
  p.a = parse_list(lhs.substr(2));
  p.b = parse_list(rhs.substr(2));
  return p;
}

/// {"n_modes": n, "cov": [2n*2n], "a_modes": [...], "b_modes": [...]}
inline gaussian::GaussianState parse_gaussian(const json& doc, const Tolerances& tol = {}) {
  const Index n = detail::count(detail::field(doc, "n_modes"), "n_modes");
  if (n < 1) throw Error(ErrorKind::ParseError, "n_modes must be positive");
  MatrixXd cov = detail::square_matrix(detail::field(doc, "cov"), 2 * n, "cov");
  gaussian::ModePartition p;
  p.a = detail::index_list(detail::field(doc, "a_modes"), "a_modes");
  p.b = detail::index_list(detail::field(doc, "b_modes"), "b_modes");
  return gaussian::GaussianState(cov, n, std::move(p), tol);
}

inline json gaussian_to_json(const gaussian::GaussianState& gs) {
  return {{"n_modes", gs.n_modes()},
          {"cov", detail::row_major(gs.cov())},
          {"a_modes", gs.partition().a},
          {"b_modes", gs.partition().b}};
}

/// {"two_j": 2J, "amps": [[re, im], ...]}
inline spin::SpinState parse_spin(const json& doc, const Tolerances& tol = {}) {
  const auto two_j = detail::count(detail::field(doc, "two_j"), "two_j");
  const auto& amps = detail::field(doc, "amps");
  if (!amps.is_array()) throw Error(ErrorKind::ParseError, "amps must be an array");
  Eigen::VectorXcd v(static_cast<Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const auto& pair = amps[i];
    if (!pair.is_array() || pair.size() != 2) {
      throw Error(ErrorKind::ParseError, "each amplitude must be [re, im]");
    }
    v(static_cast<Index>(i)) = {detail::finite_number(pair[0], "re"), detail::finite_number(pair[1], "im")};
  }
  if (two_j > spin::max_two_j) throw Error(ErrorKind::BadSpin, "two_j above 100");
  return spin::SpinState(static_cast<int>(two_j), v, tol);
}

inline json spin_to_json(const spin::SpinState& s) {
  json amps = json::array();
  for (Index i = 0; i < s.amps().size(); ++i) amps.push_back({s.amps()(i).real(), s.amps()(i).imag()});
  return {{"two_j", s.two_j()}, {"amps", amps}};
}

inline json to_json(const poscone::CorrelationSpectrum& cs) {
  return {{"chi_det", cs.chi_det}, {"chi_log", cs.chi_log}, {"taus", cs.taus}};
}

inline json to_json(const gaussian::FloorReport& r) {
  return {{"e_n", r.e_n},
          {"chi_mode", r.chi_mode},
          {"floor", r.floor},
          {"margin", r.margin},
          {"per_mode_taus", r.per_mode_taus},
          {"per_mode_nus", r.per_mode_nus},
          {"chi_quadrature", r.chi_quadrature},
          {"degenerate_pairs", r.degenerate_pairs}};
}

inline json to_json(const spin::CeilingReport& r) {
  return {{"fq_max", r.fq_max},
          {"s", r.s},
          {"ceiling", r.ceiling},
          {"margin", r.margin},
          {"direction", {r.direction(0), r.direction(1), r.direction(2)}}};
}

inline json to_json(const su11::Su11CeilingReport& r) {
  return {{"fq", r.fq},
          {"s", r.s},
          {"norm_convention", std::string(su11::to_string(r.norm_convention))},
          {"ceiling", r.ceiling},
          {"margin", r.margin},
          {"k", r.k},
          {"fq_generators", r.fq_generators},
          {"flagged", r.flagged}};
}

inline json to_json(const saturation::FitResult& f) {
  return {{"alpha", f.alpha},
          {"lambda_star", f.lambda_star},
          {"window_lo", f.window_lo},
          {"window_hi", f.window_hi},
          {"r_squared", f.r_squared}};
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Header `lambda,measure,bound,deficit`, values with 17 significant digits.
inline std::string series_to_csv(const saturation::SweepSeries& s) {
  std::string out = "lambda,measure,bound,deficit\n";
  for (const auto& r : s.records) {
    out += format_double(r.lambda) + ',' + format_double(r.measure) + ',' + format_double(r.bound) +
           ',' + format_double(r.deficit) + '\n';
  }
  return out;
}

inline saturation::SweepSeries series_from_csv(std::string_view text, std::string family_id = "csv") {
  saturation::SweepSeries s{std::move(family_id), {}};
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("lambda,measure,bound,deficit", 0) != 0) {
    throw Error(ErrorKind::ParseError, "CSV header must be lambda,measure,bound,deficit");
  }
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string cell;
    double v[4];
    for (double& x : v) {
      if (!std::getline(row, cell, ',')) throw Error(ErrorKind::ParseError, "CSV row needs 4 columns");
      std::size_t used = 0;
      try {
        x = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "bad CSV number '" + cell + "'");
      }
      if (!std::isfinite(x)) throw Error(ErrorKind::ParseError, "non-finite CSV value");
    }
    s.records.push_back({v[0], v[1], v[2], v[3]});
  }
  return s;
}

}  // namespace chibounds::io
