#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "mineq/mineq.hpp"

namespace testutil {

// Builds a SampleMatrix column by column (every column must share length n).
inline mineq::SampleMatrix make_sample(std::initializer_list<std::vector<double>> columns, int p) {
  const auto k = static_cast<Eigen::Index>(columns.size());
  const auto n = static_cast<Eigen::Index>(columns.begin()->size());
  Eigen::MatrixXd m(n, k);
  Eigen::Index j = 0;
  for (const auto& col : columns) {
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = col[static_cast<std::size_t>(i)];
    ++j;
  }
  return mineq::SampleMatrix(std::move(m), p);
}

inline mineq::MomentEstimates make_estimates(std::vector<double> mu, std::vector<double> sigma,
                                             double m_hat = 1.0, double delta = 1.0) {
  mineq::MomentEstimates est;
  est.mu_hat = std::move(mu);
  est.sigma_hat = std::move(sigma);
  est.m_hat = m_hat;
  est.delta = delta;
  return est;
}

// Scratch directory under the build tree, wiped on construction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) {
    path = std::filesystem::temp_directory_path() / ("mineq_test_" + name);
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

inline void write_text(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI binary with the given arguments; returns the exit status.
inline int run_cli(const std::string& args) {
  const std::string cmd = std::string(MINEQ_CLI_PATH) + " " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace testutil
