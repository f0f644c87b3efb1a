// Copyright 2026 The mfcal Authors. All Rights Reserved.
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

#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace mfcal {

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  std::span<const double> values() const noexcept { return data_; }

  Matrix transpose() const;
  Matrix operator*(const Matrix& other) const;
  double frobenius_squared() const noexcept;
  /// Largest |a_ij - a_ji|.
  double asymmetry() const noexcept;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// n x C gate vectors, one row per validation instance.
using ExcitationMatrix = Matrix;

/// (1 / (n - 1)) X^T X with X = E, or E with column means removed.
Matrix excitation_covariance(const ExcitationMatrix& e, bool center);

struct EigenDecomposition {
  std::vector<double> values;  // sorted by decreasing magnitude
  Matrix vectors;              // column j pairs with values[j]
  std::size_t sweeps = 0;
};

inline constexpr double kSymmetryTolerance = 1e-8;
inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr std::size_t kJacobiMaxSweeps = 60;

/// Cyclic Jacobi rotations on a symmetric matrix.
EigenDecomposition jacobi_eigen(const Matrix& a);

/// Singular values of a symmetric matrix, descending.
std::vector<double> singular_values(const Matrix& a);

struct ThresholdReport {
  double delta = 0.0;
  std::size_t k = 0;
  std::vector<double> singular_values;
  /// Cumulative energy fraction of the top-k components, k = 1..C.
  std::vector<double> energy;
};

/// Smallest k with ||A_k||_F^2 >= delta ||A||_F^2; 0 when A is zero.
ThresholdReport excitation_threshold(const Matrix& a, double delta);
std::size_t linear_excitation_threshold(const Matrix& a, double delta);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng);

/// U diag(values) U^T for a random orthogonal U.
Matrix with_spectrum(std::span<const double> values, std::mt19937_64& rng);

}  // namespace mfcal
