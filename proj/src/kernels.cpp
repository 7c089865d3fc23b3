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

#include "gtce/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "gtce/error.hpp"
#include "kernels_impl.hpp"

namespace gtce::kern {

namespace {

struct OpsTable {
  double (*max)(const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  void (*scale)(double*, std::size_t, double);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*matmul)(const double*, const double*, double*, std::size_t,
                 std::size_t, std::size_t);
  Backend backend;
};

constexpr OpsTable kScalarOps = {
    detail::max_scalar, detail::sum_scalar,  detail::dot_scalar,
    detail::scale_scalar, detail::axpy_scalar, detail::matmul_scalar,
    Backend::scalar};

#if defined(GTCE_HAVE_AVX2)
constexpr OpsTable kAvx2Ops = {
    detail::max_avx2, detail::sum_avx2,  detail::dot_avx2,
    detail::scale_avx2, detail::axpy_avx2, detail::matmul_avx2,
    Backend::avx2};
#endif

bool avx2_usable() {
#if defined(GTCE_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const OpsTable* table_for(Backend b) {
#if defined(GTCE_HAVE_AVX2)
  if (b == Backend::avx2) return &kAvx2Ops;
#endif
  (void)b;
  return &kScalarOps;
}

const OpsTable* resolve_default() {
  Backend pick = avx2_usable() ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("GTCE_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) {
      pick = Backend::scalar;
    } else if (std::strcmp(env, "avx2") == 0 && avx2_usable()) {
      pick = Backend::avx2;
    }
  }
  return table_for(pick);
}

std::atomic<const OpsTable*>& ops_slot() {
  static std::atomic<const OpsTable*> slot{resolve_default()};
  return slot;
}

const OpsTable& ops() { return *ops_slot().load(std::memory_order_relaxed); }

}  // namespace

Backend active_backend() { return ops().backend; }

bool backend_supported(Backend b) {
  return b == Backend::scalar || (b == Backend::avx2 && avx2_usable());
}

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw InputError(std::string("kernel backend not supported here: ") +
                     backend_name(b));
  }
  ops_slot().store(table_for(b), std::memory_order_relaxed);
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "?";
}

double max(std::span<const double> x) { return ops().max(x.data(), x.size()); }

double sum(std::span<const double> x) { return ops().sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  return ops().dot(x.data(), y.data(), x.size());
}

void scale(std::span<double> x, double a) { ops().scale(x.data(), x.size(), a); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  ops().axpy(a, x.data(), y.data(), x.size());
}

void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n) {
  ops().matmul(a, b, c, m, k, n);
}

double log_sum_exp(std::span<const double> x) {
  const double m = max(x);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  // exp() stays scalar in both backends; the variants may differ only by
  // reduction order.
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

void softmax_row(std::span<const double> in, std::span<double> out,
                 double floor) {
  const double m = max(in);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::exp(in[i] - m);
  const double s = sum(out);
  scale(out, 1.0 / s);
  for (double& v : out) {
    if (v < floor) v = floor;
  }
}

}  // namespace gtce::kern
