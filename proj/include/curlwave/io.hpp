#pragma once

// Plot-ready exports. CSV: header row, comma separated, 17 significant
// digits. JSON: pretty printed, keys in insertion order.

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "curlwave/breather.hpp"
#include "curlwave/coefficients.hpp"
#include "curlwave/errors.hpp"
#include "curlwave/expansions.hpp"
#include "curlwave/verifier.hpp"

namespace curlwave::io {

using Json = nlohmann::ordered_json;

/// %.17g: round-trips every double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> header)
      : os_(os), columns_(header.size()) {
    if (header.empty()) throw ConfigError("csv needs at least one column");
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
  }

  void row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

  void row(const std::vector<double>& values) {
    if (values.size() != columns_) throw ConfigError("csv row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_double(values[i]);
    os_ << '\n';
    ++rows_;
  }

  std::size_t rows() const noexcept { return rows_; }

 private:
  std::ostream& os_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

/// (r, t, psi) on the tensor grid, r outer.
inline std::size_t write_radial_slice(std::ostream& os, const Breather& b,
                                      const std::vector<double>& r_grid,
                                      const std::vector<double>& t_grid) {
  CsvWriter w(os, {"r", "t", "psi"});
  for (double r : r_grid)
    for (double t : t_grid) w.row({r, t, b.psi(r, t)});
  return w.rows();
}

/// (x1, x2, x3, t, U1, U2, U3) at every point and time.
inline std::size_t write_field(std::ostream& os, const Breather& b, const std::vector<Vec3>& xs,
                               const std::vector<double>& t_grid) {
  CsvWriter w(os, {"x1", "x2", "x3", "t", "U1", "U2", "U3"});
  for (const auto& x : xs) {
    for (double t : t_grid) {
      const Vec3 u = b.U(x, t);
      w.row({x[0], x[1], x[2], t, u[0], u[1], u[2]});
    }
  }
  return w.rows();
}

inline Json to_json(const HypothesisReport& h, Sign sign) {
  Json j;
  j["sign"] = to_string(sign);
  j["all_ok"] = h.all_ok();
  j["first_failure"] = h.first_failure(sign);
  j["positive_ok"] = h.positive_ok;
  j["H1"] = {{"ok", h.h1_ok}, {"below", h.h1_below}, {"above", h.h1_above},
             {"worst_r", h.h1_worst_r}, {"worst_defect", h.h1_worst_defect}};
  j["H2"] = {{"ok", h.h2_ok}, {"worst_r", h.h2_worst_r}, {"worst_value", h.h2_worst_value}};
  j["H3"] = {{"ok", h.h3_ok},
             {"slope", h.h3_slope},
             {"certified_delta", h.h3_certified_delta},
             {"tail_start", h.h3_tail_start},
             {"tail_end", h.h3_tail_end}};
  j["H4"] = {{"ok", h.h4_ok}, {"sup", h.h4_sup}, {"worst_r", h.h4_worst_r}};
  return j;
}

inline Json to_json(const ResidualReport& r) {
  Json j;
  j["name"] = r.name;
  j["points"] = r.points;
  j["h"] = r.h;
  j["k"] = r.k;
  j["max_norm"] = r.max_norm;
  j["l2_norm"] = r.l2_norm;
  j["order"] = r.order;
  j["order_window"] = {r.order_lo, r.order_hi};
  j["pass"] = r.pass;
  return j;
}

inline Json to_json(const BreatherVerification& v) {
  Json j;
  j["pass"] = v.pass();
  j["reduced"] = to_json(v.reduced);
  j["full"] = to_json(v.full);
  j["curl_curl"] = to_json(v.curl_curl);
  j["curl"] = to_json(v.curl);
  return j;
}

inline Json to_json(const expansions::ExpansionFit& f) {
  Json j;
  j["sign"] = to_string(f.sign);
  j["p"] = f.p;
  j["exponent"] = f.exponent;
  j["exponent_expected"] = f.exponent_expected;
  j["exponent_rel_error"] = f.exponent_rel_error;
  j["prefactor"] = f.prefactor;
  j["alpha"] = f.alpha;
  j["prefactor_rel_error"] = f.prefactor_rel_error;
  j["max_rel_deviation"] = f.max_rel_deviation;
  j["d_min"] = f.d_min;
  j["d_max"] = f.d_max;
  j["samples"] = f.samples;
  j["mprime_at"] = f.mprime_at;
  j["mprime_fd"] = f.mprime_fd;
  j["mprime_leading"] = f.mprime_leading;
  j["mprime_rel_error"] = f.mprime_rel_error;
  j["pass"] = f.pass;
  return j;
}

inline Json to_json(const DecayFit& d, double delta) {
  Json j;
  j["rate"] = d.rate;
  j["delta"] = delta;
  j["r0"] = d.r0;
  j["r1"] = d.r1;
  j["points"] = d.points;
  j["certifies"] = d.certifies;
  return j;
}

inline void write_json(const std::string& path, const Json& j) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
}

inline std::ofstream open_csv(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  return f;
}

/// One summary line per residual sweep.
inline void print_summary(std::ostream& os, const ResidualReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "  %-14s order %6.3f  [%.1f, %.1f]  max %.3e -> %.3e  %s\n",
                r.name.c_str(), r.order, r.order_lo, r.order_hi,
                r.max_norm.empty() ? 0.0 : r.max_norm.front(),
                r.max_norm.empty() ? 0.0 : r.max_norm.back(), r.pass ? "ok" : "FAIL");
  os << buf;
}

}  // namespace curlwave::io
