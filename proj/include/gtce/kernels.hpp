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

#ifndef GTCE_KERNELS_HPP_
#define GTCE_KERNELS_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

// Double-precision arithmetic kernels behind the hot loops (softmax rows,
// log-sum-exp reductions, the toy trainer's matrix products). Every kernel
// has a scalar reference implementation; on x86-64 an AVX2 variant is
// selected at runtime when the CPU supports it. The two backends may differ
// by reduction order only, never by algorithm, and are equivalence-tested.

namespace gtce::kern {

enum class Backend { scalar, avx2 };

/// Backend chosen at first use: AVX2 when compiled in and the CPU reports
/// support, scalar otherwise. The GTCE_KERNELS environment variable
/// ("scalar" or "avx2") overrides the automatic pick.
Backend active_backend();

/// True if `b` can run on this build/CPU.
bool backend_supported(Backend b);

/// Force a backend (used by the equivalence tests). Throws InputError if
/// unsupported.
void set_backend(Backend b);

const char* backend_name(Backend b);

/// Maximum element; -inf for an empty span.
double max(std::span<const double> x);

/// Plain sum; 0 for an empty span.
double sum(std::span<const double> x);

/// Inner product of two equally sized spans.
double dot(std::span<const double> x, std::span<const double> y);

/// x *= a, elementwise.
void scale(std::span<double> x, double a);

/// y += a * x, elementwise.
void axpy(double a, std::span<const double> x, std::span<double> y);

/// c = a * b for row-major matrices: a is m x k, b is k x n, c is m x n.
/// c is overwritten.
void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n);

/// log(sum(exp(x))) with max-shift; -inf for empty or all -inf input.
double log_sum_exp(std::span<const double> x);

/// out = softmax(in), max-subtracted. Entries are clamped below at
/// `floor` so downstream logs stay finite.
void softmax_row(std::span<const double> in, std::span<double> out,
                 double floor = 1e-300);

/// Two-value log-add, the pairwise building block of the lattice sweeps.
inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double hi = a > b ? a : b;
  double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace gtce::kern

#endif  // GTCE_KERNELS_HPP_
