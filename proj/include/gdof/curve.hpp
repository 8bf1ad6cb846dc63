#pragma once

// Sum-GDoF curves over an alpha grid and their CSV/text rendering.

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "gdof/gdof_core.hpp"

namespace gdof {

inline constexpr int kCurveSchemaVersion = 1;
inline constexpr const char* kCurveHeader = "alpha,sum_gdof,active_branch,b1,b1_plus,b2,b2_plus,b3";

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] inline std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

/// start, start + step, ..., up to stop. Points are start + i * step, and stop
/// is included when it lies on the grid within 1e-9 steps.
[[nodiscard]] inline std::vector<double> alpha_grid(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
    throw std::domain_error("alpha range must be finite");
  if (start < 0.0) throw std::domain_error("alpha-start must be nonnegative");
  if (stop < start) throw std::domain_error("alpha-stop must not be below alpha-start");
  if (start == stop) return {start};
  if (!(step > 0.0)) throw std::domain_error("alpha-step must be positive");
  const double span = (stop - start) / step;
  if (span > 1e7) throw std::domain_error("alpha grid exceeds 10^7 points");
  const auto count = static_cast<long>(std::floor(span + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
  return grid;
}

struct CurveRow {
  double alpha = 0.0;
  GdofResult result;
};

[[nodiscard]] inline std::vector<CurveRow> sum_gdof_curve(int K, int M, int N, const std::vector<double>& alphas) {
  std::vector<CurveRow> rows;
  rows.reserve(alphas.size());
  for (double a : alphas) rows.push_back({a, sum_gdof({K, M, N, a})});
  return rows;
}

inline void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << "# schema=" << kCurveSchemaVersion << '\n' << kCurveHeader << '\n';
  for (const auto& r : rows) {
    out << format_number(r.alpha) << ',' << format_number(r.result.sum_gdof) << ',' << to_string(r.result.active_branch);
    for (BoundId id : kAllBounds) {
      out << ',';
      if (const auto& v = r.result.bounds[id]) out << format_number(*v);
    }
    out << '\n';
  }
}

inline void write_curve_text(std::ostream& out, const std::vector<CurveRow>& rows) {
  for (const auto& r : rows) {
    out << "alpha=" << format_number(r.alpha) << " sum_gdof=" << format_number(r.result.sum_gdof)
        << " branch=" << to_string(r.result.active_branch);
    for (BoundId id : kAllBounds) {
      out << ' ' << to_string(id) << '=';
      if (const auto& v = r.result.bounds[id]) out << format_number(*v);
      else out << '-';
    }
    out << '\n';
  }
}

}  // namespace gdof
