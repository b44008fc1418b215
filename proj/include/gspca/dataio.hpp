#pragma once

// Dataset ingest and standardization. CSV is the only format: comma
// delimiter, decimal point, no missing values. All numeric output is written
// with 17 significant digits so a load/save/load round trip is exact.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gspca/stats.hpp"

namespace gspca {

struct DataMatrix {
  Eigen::MatrixXd values;                // n x p, rows are observations
  std::vector<std::string> col_labels;   // optional, from a header line

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index p() const { return values.cols(); }
};

namespace detail {

inline void split_csv_line(const std::string& line, std::vector<std::string>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline void format17(double v, std::string& out) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace detail

inline DataMatrix load_csv(const std::string& path, bool has_header = false) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::vector<std::string> cells, header;
  std::string line;
  std::size_t line_no = 0, p = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    detail::split_csv_line(line, cells);
    if (has_header && line_no == 1) {
      header.assign(cells.begin(), cells.end());
      continue;
    }
    if (p == 0) {
      p = cells.size();
    } else if (cells.size() != p) {
      throw std::runtime_error("load_csv: row " + std::to_string(line_no) +
                               " has " + std::to_string(cells.size()) +
                               " cells, expected " + std::to_string(p));
    }
    std::vector<double> row(p);
    for (std::size_t j = 0; j < p; ++j) {
      const std::string cell = detail::trim(cells[j]);
      if (cell.empty())
        throw std::runtime_error("load_csv: blank cell at row " +
                                 std::to_string(line_no) + ", column " +
                                 std::to_string(j + 1));
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw std::runtime_error("load_csv: cannot parse '" + cell +
                                 "' at row " + std::to_string(line_no) +
                                 ", column " + std::to_string(j + 1));
      if (!std::isfinite(v))
        throw std::runtime_error("load_csv: non-finite value at row " +
                                 std::to_string(line_no) + ", column " +
                                 std::to_string(j + 1));
      row[j] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2)
    throw std::runtime_error("load_csv: need at least 2 data rows, got " +
                             std::to_string(rows.size()));
  DataMatrix X;
  X.values.resize(Eigen::Index(rows.size()), Eigen::Index(p));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < p; ++j) X.values(Eigen::Index(i), Eigen::Index(j)) = rows[i][j];
  X.col_labels = std::move(header);
  return X;
}

inline void save_csv(const DataMatrix& X, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open '" + path + "' for writing");
  std::string buf;
  if (!X.col_labels.empty()) {
    for (std::size_t j = 0; j < X.col_labels.size(); ++j) {
      if (j) buf += ',';
      buf += X.col_labels[j];
    }
    buf += '\n';
  }
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    for (Eigen::Index j = 0; j < X.p(); ++j) {
      if (j) buf += ',';
      detail::format17(X.values(i, j), buf);
    }
    buf += '\n';
  }
  out << buf;
}

enum class ScalingMode { Classical, Robust };

// Per-column centering and scaling: classical uses mean and sample standard
// deviation (n-1 denominator); robust uses median and 1.4826 * raw MAD.
inline DataMatrix standardize(const DataMatrix& X, ScalingMode mode) {
  DataMatrix out = X;
  const Eigen::Index n = X.n(), p = X.p();
  for (Eigen::Index j = 0; j < p; ++j) {
    double center, scale;
    if (mode == ScalingMode::Classical) {
      center = X.values.col(j).mean();
      scale = std::sqrt((X.values.col(j).array() - center).square().sum() / double(n - 1));
    } else {
      center = median(X.values.col(j));
      scale = mad(X.values.col(j));
    }
    if (!(scale > 0.0))
      throw std::invalid_argument("standardize: column " + std::to_string(j + 1) +
                                  " has zero scale");
    out.values.col(j) = (X.values.col(j).array() - center) / scale;
  }
  return out;
}

}  // namespace gspca
