#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mineq {

// Observation matrix at a fixed candidate parameter. Rows are observations;
// the first p columns are moment inequality coordinates, the remaining
// v = k - p columns are moment equality coordinates.
class SampleMatrix {
 public:
  SampleMatrix(Eigen::MatrixXd data, int p) : data_(std::move(data)), p_(p) {
    const int n = static_cast<int>(data_.rows());
    const int k = static_cast<int>(data_.cols());
    if (n < 2) throw std::invalid_argument("SampleMatrix: need at least 2 observations");
    if (k < 1) throw std::invalid_argument("SampleMatrix: need at least 1 moment coordinate");
    if (p < 0 || p > k) {
      throw std::invalid_argument("SampleMatrix: inequality count p must lie in [0, k]");
    }
    if (!data_.allFinite()) {
      throw std::invalid_argument("SampleMatrix: entries must be finite (no NaN or infinities)");
    }
  }

  int n() const { return static_cast<int>(data_.rows()); }
  int k() const { return static_cast<int>(data_.cols()); }
  int p() const { return p_; }
  int v() const { return k() - p_; }

  const Eigen::MatrixXd& data() const { return data_; }
  double operator()(int i, int j) const { return data_(i, j); }

  // CSV loader: one row per observation, comma separated. A single leading
  // header row is skipped when any of its fields fails to parse as a number.
  static SampleMatrix from_csv(const std::string& path, int p) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("SampleMatrix::from_csv: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    std::size_t width = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<double> fields;
      const bool ok = parse_row(line, fields);
      if (first) {
        first = false;
        if (!ok) continue;  // header row
        width = fields.size();
      } else if (!ok) {
        throw std::runtime_error("SampleMatrix::from_csv: non-numeric field in " + path +
                                 " at data line " + std::to_string(rows.size() + 1));
      }
      if (width == 0) width = fields.size();
      if (fields.size() != width) {
        throw std::runtime_error("SampleMatrix::from_csv: ragged row in " + path);
      }
      rows.push_back(std::move(fields));
    }
    if (rows.size() < 2) {
      throw std::runtime_error("SampleMatrix::from_csv: " + path + " has fewer than 2 data rows");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < width; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return SampleMatrix(std::move(m), p);
  }

 private:
  static bool parse_row(const std::string& line, std::vector<double>& out) {
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      std::size_t b = pos, e = comma;
      while (b < e && (line[b] == ' ' || line[b] == '\t')) ++b;
      while (e > b && (line[e - 1] == ' ' || line[e - 1] == '\t')) --e;
      double value = 0.0;
      const auto res = std::from_chars(line.data() + b, line.data() + e, value);
      if (res.ec != std::errc() || res.ptr != line.data() + e || b == e || !std::isfinite(value)) {
        return false;
      }
      out.push_back(value);
      pos = comma + 1;
      if (comma == line.size()) break;
    }
    return !out.empty();
  }

  Eigen::MatrixXd data_;
  int p_;
};

}  // namespace mineq
