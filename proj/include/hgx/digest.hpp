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

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace hgx {

/// 64-bit FNV-1a over raw bytes. Used for content digests and snapshot ids;
/// not a cryptographic hash.
class Digest {
 public:
  Digest& bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Digest& text(std::string_view s) {
    const std::uint64_t n = s.size();
    bytes(&n, sizeof n);
    return bytes(s.data(), s.size());
  }
  Digest& number(double v) { return bytes(&v, sizeof v); }
  Digest& integer(std::int64_t v) { return bytes(&v, sizeof v); }
  Digest& matrix(const Eigen::MatrixXd& m) {
    integer(m.rows());
    integer(m.cols());
    // Row-major walk so the digest does not depend on storage order.
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) number(m(r, c));
    }
    return *this;
  }

  std::uint64_t value() const { return state_; }
  std::string hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) out[15 - i] = kDigits[(state_ >> (4 * i)) & 0xF];
    return out;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace hgx
