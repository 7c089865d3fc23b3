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

#ifndef GTCE_SRC_KERNELS_IMPL_HPP_
#define GTCE_SRC_KERNELS_IMPL_HPP_

#include <cstddef>

// Raw-pointer entry points of the per-backend kernel variants. Only the
// dispatcher in kernels.cpp includes this header.

namespace gtce::kern::detail {

double max_scalar(const double* x, std::size_t n);
double sum_scalar(const double* x, std::size_t n);
double dot_scalar(const double* x, const double* y, std::size_t n);
void scale_scalar(double* x, std::size_t n, double a);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void matmul_scalar(const double* a, const double* b, double* c, std::size_t m,
                   std::size_t k, std::size_t n);

#if defined(GTCE_HAVE_AVX2)
double max_avx2(const double* x, std::size_t n);
double sum_avx2(const double* x, std::size_t n);
double dot_avx2(const double* x, const double* y, std::size_t n);
void scale_avx2(double* x, std::size_t n, double a);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void matmul_avx2(const double* a, const double* b, double* c, std::size_t m,
                 std::size_t k, std::size_t n);
#endif

}  // namespace gtce::kern::detail

#endif  // GTCE_SRC_KERNELS_IMPL_HPP_
