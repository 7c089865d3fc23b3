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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <doctest.h>

using namespace gtce;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n,
                               double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) {
    x = lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  }
  return v;
}

// Runs `fn` under both backends and hands the two results to `compare`.
template <typename Fn, typename Cmp>
void with_both_backends(Fn&& fn, Cmp&& compare) {
  if (!kern::backend_supported(kern::Backend::avx2)) return;
  const kern::Backend before = kern::active_backend();
  kern::set_backend(kern::Backend::scalar);
  auto a = fn();
  kern::set_backend(kern::Backend::avx2);
  auto b = fn();
  kern::set_backend(before);
  compare(a, b);
}

}  // namespace

TEST_CASE("log_add agrees with the naive formula") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto v = random_vec(rng, 2, -40.0, 2.0);
    const double expect = std::log(std::exp(v[0]) + std::exp(v[1]));
    CHECK(kern::log_add(v[0], v[1]) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(kern::log_add(-kInf, -kInf) == -kInf);
  CHECK(kern::log_add(-kInf, 0.5) == 0.5);
  CHECK(kern::log_add(0.5, -kInf) == 0.5);
}

TEST_CASE("log_sum_exp handles empty and degenerate spans") {
  CHECK(kern::log_sum_exp({}) == -kInf);
  std::vector<double> all_inf(5, -kInf);
  CHECK(kern::log_sum_exp(all_inf) == -kInf);
  std::vector<double> one{-3.25};
  CHECK(kern::log_sum_exp(one) == doctest::Approx(-3.25));
  std::vector<double> big(8, 1000.0);
  CHECK(kern::log_sum_exp(big) == doctest::Approx(1000.0 + std::log(8.0)));
}

TEST_CASE("softmax_row basics") {
  std::vector<double> out(2);
  kern::softmax_row(std::vector<double>{0.0, 0.0}, out);
  CHECK(out[0] == doctest::Approx(0.5));
  CHECK(out[1] == doctest::Approx(0.5));

  kern::softmax_row(std::vector<double>{1000.0, 1000.0}, out);
  CHECK(out[0] == doctest::Approx(0.5));
  CHECK(out[1] == doctest::Approx(0.5));

  kern::softmax_row(std::vector<double>{std::log(3.0), std::log(1.0)}, out);
  CHECK(out[0] == doctest::Approx(0.75));
  CHECK(out[1] == doctest::Approx(0.25));
}

TEST_CASE("scalar and avx2 backends agree") {
  if (!kern::backend_supported(kern::Backend::avx2)) {
    MESSAGE("avx2 not available; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(77);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 15u, 33u, 256u, 1001u}) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);

    with_both_backends([&] { return kern::max(x); },
                       [](double a, double b) { CHECK(a == b); });
    with_both_backends([&] { return kern::sum(x); },
                       [](double a, double b) {
                         CHECK(a == doctest::Approx(b).epsilon(1e-13));
                       });
    with_both_backends([&] { return kern::dot(x, y); },
                       [](double a, double b) {
                         CHECK(a == doctest::Approx(b).epsilon(1e-13));
                       });
    with_both_backends(
        [&] {
          auto z = x;
          kern::scale(z, 1.7);
          return z;
        },
        [](const auto& a, const auto& b) { CHECK(a == b); });
    with_both_backends(
        [&] {
          auto z = y;
          kern::axpy(0.37, x, z);
          return z;
        },
        [](const auto& a, const auto& b) {
          REQUIRE(a.size() == b.size());
          for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
          }
        });
    if (n > 0) {
      with_both_backends([&] { return kern::log_sum_exp(x); },
                         [](double a, double b) {
                           CHECK(a == doctest::Approx(b).epsilon(1e-13));
                         });
      with_both_backends(
          [&] {
            std::vector<double> out(n);
            kern::softmax_row(x, out);
            return out;
          },
          [](const auto& a, const auto& b) {
            for (std::size_t i = 0; i < a.size(); ++i) {
              CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
            }
          });
    }
  }
}

TEST_CASE("matmul backends agree and match a handwritten product") {
  std::mt19937_64 rng(5);
  for (auto [m, k, n] : {std::tuple{1, 1, 1}, {2, 3, 4}, {5, 7, 9}, {4, 4, 16},
                         {3, 10, 33}}) {
    const auto a = random_vec(rng, m * k);
    const auto b = random_vec(rng, k * n);

    std::vector<double> want(m * n, 0.0);
    for (int i = 0; i < m; ++i) {
      for (int p = 0; p < k; ++p) {
        for (int j = 0; j < n; ++j) {
          want[i * n + j] += a[i * k + p] * b[p * n + j];
        }
      }
    }

    auto run = [&] {
      std::vector<double> c(m * n);
      kern::matmul(a.data(), b.data(), c.data(), m, k, n);
      return c;
    };
    const auto got = run();
    for (int i = 0; i < m * n; ++i) {
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
    with_both_backends(run, [](const auto& s, const auto& v) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i] == doctest::Approx(v[i]).epsilon(1e-12));
      }
    });
  }
}

TEST_CASE("backend selection is sticky and validated") {
  const kern::Backend before = kern::active_backend();
  kern::set_backend(kern::Backend::scalar);
  CHECK(kern::active_backend() == kern::Backend::scalar);
  kern::set_backend(before);
  CHECK(kern::backend_supported(kern::Backend::scalar));
}
