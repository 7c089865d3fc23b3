// Copyright 2026 The GTCE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GTCE_TENSOR_HPP_
#define GTCE_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gtce {

/// Dense row-major matrix of doubles. The only tensor type the library
/// needs; posteriors, logits, lattices and model weights all use it.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<const double> flat() const { return {data_.data(), data_.size()}; }
  std::span<double> flat() { return {data_.data(), data_.size()}; }

  void fill(double v) { data_.assign(data_.size(), v); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Text tensor file: header line "GTCE-TENSOR 1 <rows> <cols>", then one
// line per row with space-separated decimals at 17 significant digits
// (full double round-trip).

std::string format_tensor(const Matrix& m);
Matrix parse_tensor(std::string_view text);

Matrix load_tensor(const std::string& path);
void save_tensor(const std::string& path, const Matrix& m);

/// "%.17g" rendering shared by the tensor writer and the CLI.
std::string format_double(double v);

}  // namespace gtce

#endif  // GTCE_TENSOR_HPP_
