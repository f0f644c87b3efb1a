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

#include "mfcal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mfcal/error.hpp"

namespace mfcal {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) throw_invalid("matrix dimensions must be positive");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (rows == 0 || cols == 0) throw_invalid("matrix dimensions must be positive");
  if (data_.size() != rows * cols) throw_invalid("matrix data size does not match dimensions");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

Matrix Matrix::operator*(const Matrix& other) const {
  if (cols_ != other.rows_) throw_invalid("matrix product: inner dimensions differ");
  Matrix out(rows_, other.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(r, k);
      for (std::size_t c = 0; c < other.cols_; ++c) out(r, c) += a * other(k, c);
    }
  }
  return out;
}

double Matrix::frobenius_squared() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

double Matrix::asymmetry() const noexcept {
  if (rows_ != cols_) return INFINITY;
  double worst = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = r + 1; c < cols_; ++c) {
      worst = std::max(worst, std::abs((*this)(r, c) - (*this)(c, r)));
    }
  }
  return worst;
}

Matrix excitation_covariance(const ExcitationMatrix& e, bool center) {
  const std::size_t n = e.rows();
  const std::size_t C = e.cols();
  if (n < 2) throw_invalid("excitation covariance needs at least two instances");
  std::vector<double> mean(C, 0.0);
  if (center) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < C; ++c) mean[c] += e(i, c);
    }
    for (double& m : mean) m /= static_cast<double>(n);
  }
  Matrix a(C, C);
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (std::size_t r = 0; r < C; ++r) {
    for (std::size_t c = r; c < C; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (e(i, r) - mean[r]) * (e(i, c) - mean[c]);
      a(r, c) = s * scale;
      a(c, r) = a(r, c);
    }
  }
  return a;
}

EigenDecomposition jacobi_eigen(const Matrix& input) {
  if (input.rows() != input.cols()) throw_invalid("eigen-decomposition needs a square matrix");
  const double asym = input.asymmetry();
  if (asym > kSymmetryTolerance) {
    throw_invalid("matrix is not symmetric (max deviation " + std::to_string(asym) + ")");
  }
  const std::size_t n = input.rows();
  Matrix a = input;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r + 1; c < n; ++c) {
      const double avg = 0.5 * (a(r, c) + a(c, r));
      a(r, c) = avg;
      a(c, r) = avg;
    }
  }
  Matrix v = Matrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = r + 1; c < n; ++c) s += 2.0 * a(r, c) * a(r, c);
    }
    return std::sqrt(s);
  };
  const double scale = std::max(std::sqrt(a.frobenius_squared()), 1e-300);

  std::size_t sweep = 0;
  while (sweep < kJacobiMaxSweeps && off_norm() > kJacobiTolerance * scale) {
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off_norm() > 1e-9 * scale) throw_numerical("Jacobi iteration did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(a(x, x)) > std::abs(a(y, y));
  });
  EigenDecomposition out;
  out.sweeps = sweep;
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values.push_back(a(order[j], order[j]));
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

std::vector<double> singular_values(const Matrix& a) {
  std::vector<double> s = jacobi_eigen(a).values;
  for (double& v : s) v = std::abs(v);
  return s;
}

ThresholdReport excitation_threshold(const Matrix& a, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw_invalid("delta must lie in (0, 1]");
  ThresholdReport report;
  report.delta = delta;
  report.singular_values = singular_values(a);
  double total = 0.0;
  for (double s : report.singular_values) total += s * s;
  if (total == 0.0) {
    report.energy.assign(report.singular_values.size(), 0.0);
    return report;
  }
  double cum = 0.0;
  bool found = false;
  for (std::size_t j = 0; j < report.singular_values.size(); ++j) {
    cum += report.singular_values[j] * report.singular_values[j];
    report.energy.push_back(cum / total);
    // A relative slack so delta = 1 is reached despite rounding in the sum.
    if (!found && cum >= delta * total - 1e-12 * total) {
      report.k = j + 1;
      found = true;
    }
  }
  return report;
}

std::size_t linear_excitation_threshold(const Matrix& a, double delta) {
  return excitation_threshold(a, delta).k;
}

Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix q(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) q(r, c) = normal(rng);
  }
  // Modified Gram-Schmidt on columns. The sign convention of QR with
  // positive diagonal R is implicit in the normalization.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) dot += q(k, i) * q(k, j);
      for (std::size_t k = 0; k < n; ++k) q(k, j) -= dot * q(k, i);
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) norm += q(k, j) * q(k, j);
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw_numerical("random_orthogonal: degenerate draw");
    for (std::size_t k = 0; k < n; ++k) q(k, j) /= norm;
  }
  return q;
}

Matrix with_spectrum(std::span<const double> values, std::mt19937_64& rng) {
  const std::size_t n = values.size();
  if (n == 0) throw_invalid("with_spectrum: empty spectrum");
  const Matrix u = random_orthogonal(n, rng);
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = values[i];
  Matrix a = u * d * u.transpose();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r + 1; c < n; ++c) {
      const double avg = 0.5 * (a(r, c) + a(c, r));
      a(r, c) = avg;
      a(c, r) = avg;
    }
  }
  return a;
}

}  // namespace mfcal
