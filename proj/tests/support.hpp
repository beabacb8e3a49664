// Copyright 2026 The hgx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>

#include <unistd.h>

#include <Eigen/Dense>

#include "hgx/hypergraph.hpp"
#include "hgx/rng.hpp"

namespace hgx::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("hgx-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Uniform binary matrix with the given density.
inline Eigen::MatrixXd random_binary(std::size_t n, std::size_t m, double density, Rng& rng) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) out(i, j) = rng.bernoulli(density) ? 1.0 : 0.0;
  }
  return out;
}

/// The 3-node, 2-edge example: e1 = {u1, u2}, e2 = {u2, u3}.
inline IncidenceMatrix chain_example() {
  Eigen::MatrixXd h(3, 2);
  h << 1, 0, 1, 1, 0, 1;
  return IncidenceMatrix::from_dense(h);
}

/// Entrywise evaluation of
///   L_ij = [i == j] - sum_e w_e h_ie h_je / (delta_e sqrt(d_i d_j))
/// with zero-degree terms dropped.
inline Eigen::MatrixXd laplacian_by_formula(const Eigen::MatrixXd& h, const Eigen::VectorXd& w) {
  const auto n = h.rows();
  const auto m = h.cols();
  Eigen::VectorXd dv = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd de = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index e = 0; e < m; ++e) {
      dv(i) += w(e) * h(i, e);
      de(e) += h(i, e);
    }
  }
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double sum = 0.0;
      if (dv(i) > 0 && dv(j) > 0) {
        for (Eigen::Index e = 0; e < m; ++e) {
          if (de(e) > 0) sum += w(e) * h(i, e) * h(j, e) / (de(e) * std::sqrt(dv(i) * dv(j)));
        }
      }
      out(i, j) = (i == j ? 1.0 : 0.0) - sum;
    }
  }
  return out;
}

}  // namespace hgx::testing
