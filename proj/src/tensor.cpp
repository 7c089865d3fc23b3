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

#include "gtce/tensor.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gtce/error.hpp"

namespace gtce {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_tensor(const Matrix& m) {
  std::string out = "GTCE-TENSOR 1 " + std::to_string(m.rows()) + " " +
                    std::to_string(m.cols()) + "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ' ';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

namespace {

// Strict double parse of one whitespace-separated token.
double parse_double_token(const char*& p, std::size_t row) {
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(p, &end);
  if (end == p || errno == ERANGE) {
    throw InputError("tensor row " + std::to_string(row) +
                     ": malformed number");
  }
  p = end;
  return v;
}

}  // namespace

Matrix parse_tensor(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string magic;
  int version = 0;
  std::size_t rows = 0, cols = 0;
  if (!(in >> magic >> version >> rows >> cols) || magic != "GTCE-TENSOR" ||
      version != 1) {
    throw InputError("tensor file: bad header (want 'GTCE-TENSOR 1 R C')");
  }
  std::string line;
  std::getline(in, line);  // rest of header line
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      throw InputError("tensor file: expected " + std::to_string(rows) +
                       " rows, got " + std::to_string(r));
    }
    const char* p = line.c_str();
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = parse_double_token(p, r);
    while (*p == ' ' || *p == '\t' || *p == '\r') ++p;
    if (*p != '\0') {
      throw InputError("tensor row " + std::to_string(r) +
                       ": trailing garbage");
    }
  }
  return m;
}

Matrix load_tensor(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open tensor file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_tensor(buf.str());
}

void save_tensor(const std::string& path, const Matrix& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write tensor file: " + path);
  f << format_tensor(m);
}

}  // namespace gtce
