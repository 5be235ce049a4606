#pragma once

// CSV ingestion and correlation screening: load a regression table, keep
// the top-k predictors by robust (winsorized Pearson) correlation with the
// response, and standardize for sampling.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "blockgibbs/linalg.hpp"

namespace blockgibbs {

struct RawTable {
  std::vector<std::string> predictor_names;
  std::string response_name;
  Vector y;       // complete rows only
  Matrix X;       // missing cells mean-imputed
  std::int64_t imputed_cells = 0;
  std::vector<std::string> dropped_predictors;  // > 20% missing
  std::int64_t dropped_rows = 0;                // missing response
};

namespace detail {

inline bool parse_cell(const std::string& raw, double& value) {
  std::string s = raw;
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  if (s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan") {
    return false;
  }
  std::size_t pos = 0;
  value = std::stod(s, &pos);
  if (pos != s.size()) throw SchemaError("non-numeric cell: " + raw);
  return true;
}

inline double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (n % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

// Clamp to median +/- 2 * 1.4826 * MAD. A zero MAD (majority ties) leaves
// the variable unwinsorized.
inline std::vector<double> winsorize(const std::vector<double>& x) {
  const double med = median_of(x);
  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = std::abs(x[i] - med);
  const double mad = median_of(dev);
  if (mad <= 0.0) return x;
  const double half_width = 2.0 * 1.4826 * mad;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::clamp(x[i], med - half_width, med + half_width);
  }
  return out;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw DegenerateColumn(0);
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace detail

inline double robust_correlation(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw InvalidInput("robust_correlation needs equal lengths >= 3");
  }
  return detail::pearson(detail::winsorize(x), detail::winsorize(y));
}

inline RawTable load_csv(const std::filesystem::path& path,
                         const std::string& response_name) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw SchemaError("empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  int response_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == response_name) response_col = static_cast<int>(c);
  }
  if (response_col < 0) {
    throw SchemaError("response column not found: " + response_name);
  }

  // cells[r][c], NaN marking missing
  std::vector<std::vector<double>> cells;
  std::int64_t dropped_rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row(header.size(),
                            std::numeric_limits<double>::quiet_NaN());
    std::stringstream ss(line);
    std::string field;
    for (std::size_t c = 0; std::getline(ss, field, ','); ++c) {
      if (c >= header.size()) throw SchemaError("row wider than header");
      double v;
      if (detail::parse_cell(field, v)) row[c] = v;
    }
    if (std::isnan(row[static_cast<std::size_t>(response_col)])) {
      ++dropped_rows;
      continue;
    }
    cells.push_back(std::move(row));
  }
  const std::size_t n = cells.size();
  if (n < 3) throw InsufficientData("fewer than 3 usable rows");

  RawTable table;
  table.response_name = response_name;
  table.dropped_rows = dropped_rows;
  table.y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    table.y(static_cast<Eigen::Index>(r)) =
        cells[r][static_cast<std::size_t>(response_col)];
  }

  // Predictors: drop when > 20% missing, mean-impute the remainder.
  std::vector<std::size_t> kept_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<int>(c) == response_col) continue;
    std::size_t missing = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (std::isnan(cells[r][c])) ++missing;
    }
    if (static_cast<double>(missing) > 0.2 * static_cast<double>(n)) {
      table.dropped_predictors.push_back(header[c]);
    } else {
      kept_cols.push_back(c);
    }
  }
  if (kept_cols.empty()) throw InsufficientData("no usable predictors");

  table.X.resize(static_cast<Eigen::Index>(n),
                 static_cast<Eigen::Index>(kept_cols.size()));
  for (std::size_t jc = 0; jc < kept_cols.size(); ++jc) {
    const std::size_t c = kept_cols[jc];
    table.predictor_names.push_back(header[c]);
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (!std::isnan(cells[r][c])) {
        sum += cells[r][c];
        ++present;
      }
    }
    const double mean = present > 0 ? sum / static_cast<double>(present) : 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double v = cells[r][c];
      if (std::isnan(v)) {
        v = mean;
        ++table.imputed_cells;
      }
      table.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(jc)) = v;
    }
  }
  return table;
}

struct ScreenReport {
  std::vector<std::string> selected;      // k names, |correlation| non-increasing
  std::vector<double> correlations;       // matching order
  std::string method = "winsorized-pearson-2mad";
  bool truncated_k = false;               // k exceeded available predictors
};

// Keeps the k predictors with the largest |robust correlation| with the
// response (ties broken by column order) and standardizes them.
inline std::pair<Dataset, ScreenReport> screen_predictors(const RawTable& table,
                                                          std::int64_t k) {
  if (k < 1) throw InvalidInput("k must be at least 1");
  const Eigen::Index p = table.X.cols();
  std::vector<double> yv(table.y.data(), table.y.data() + table.y.size());

  std::vector<std::pair<double, Eigen::Index>> scored;  // (|corr|, column)
  std::vector<double> corr(static_cast<std::size_t>(p), 0.0);
  for (Eigen::Index j = 0; j < p; ++j) {
    std::vector<double> xv(table.X.col(j).data(),
                           table.X.col(j).data() + table.X.rows());
    corr[static_cast<std::size_t>(j)] = robust_correlation(xv, yv);
    scored.emplace_back(std::abs(corr[static_cast<std::size_t>(j)]), j);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  ScreenReport report;
  const auto keep = std::min<std::int64_t>(k, p);
  report.truncated_k = keep < k;
  std::vector<Eigen::Index> cols;
  for (std::int64_t i = 0; i < keep; ++i) {
    const Eigen::Index j = scored[static_cast<std::size_t>(i)].second;
    cols.push_back(j);
    report.selected.push_back(table.predictor_names[static_cast<std::size_t>(j)]);
    report.correlations.push_back(corr[static_cast<std::size_t>(j)]);
  }

  Matrix selected(table.X.rows(), keep);
  for (std::int64_t i = 0; i < keep; ++i) {
    selected.col(i) = table.X.col(cols[static_cast<std::size_t>(i)]);
  }
  Dataset dataset(table.y, standardize_columns(selected), report.selected);
  return {std::move(dataset), std::move(report)};
}

}  // namespace blockgibbs
