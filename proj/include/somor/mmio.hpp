// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0
//
// Matrix Market I/O for dense matrices.  The writer emits array format for
// dense data and coordinate format on request; entries carry 17 significant
// digits so a write/read cycle reproduces every double bit for bit.  The
// reader accepts array and coordinate files with real, integer, or complex
// fields and general, symmetric, skew-symmetric, or hermitian symmetry.

#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "somor/error.hpp"
#include "somor/numerics.hpp"

namespace somor {

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Next non-comment, non-blank line; false at end of file.
inline bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size()) continue;
    if (line[i] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace detail

/// Write a dense matrix in Matrix Market array format (column major), or in
/// coordinate format with one entry per structurally nonzero element when
/// `coordinate` is set.  A matrix whose imaginary part is exactly zero is
/// written with the real field; anything else uses complex "re im" pairs.
inline void write_matrix_market(const std::string& path, const Matrix& a,
                                bool coordinate = false) {
  bool complex_field = false;
  for (Eigen::Index j = 0; j < a.cols() && !complex_field; ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (a(i, j).imag() != 0.0) {
        complex_field = true;
        break;
      }

  std::ofstream out(path);
  require(out.good(), ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  const char* field = complex_field ? "complex" : "real";
  out << "%%MatrixMarket matrix " << (coordinate ? "coordinate" : "array") << ' '
      << field << " general\n";
  if (coordinate) {
    Eigen::Index nnz = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        if (a(i, j) != Complex(0.0)) ++nnz;
    out << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        Complex v = a(i, j);
        if (v == Complex(0.0)) continue;
        out << (i + 1) << ' ' << (j + 1) << ' ' << detail::format_double(v.real());
        if (complex_field) out << ' ' << detail::format_double(v.imag());
        out << '\n';
      }
  } else {
    out << a.rows() << ' ' << a.cols() << '\n';
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        out << detail::format_double(a(i, j).real());
        if (complex_field) out << ' ' << detail::format_double(a(i, j).imag());
        out << '\n';
      }
  }
  out.flush();
  require(out.good(), ErrorCode::IoFailure, "write to '" + path + "' failed");
}

/// Read a Matrix Market file into a dense complex matrix.
inline Matrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoFailure, "cannot open '" + path + "' for reading");

  std::string header;
  require(static_cast<bool>(std::getline(in, header)), ErrorCode::IoFailure,
          "'" + path + "' is empty");
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  require(banner == "%%MatrixMarket" && detail::lower(object) == "matrix",
          ErrorCode::IoFailure, "'" + path + "' has no Matrix Market banner");
  format = detail::lower(format);
  field = detail::lower(field);
  symmetry = detail::lower(symmetry);
  bool coordinate = format == "coordinate";
  require(coordinate || format == "array", ErrorCode::IoFailure,
          "'" + path + "': unsupported format '" + format + "'");
  bool complex_field = field == "complex";
  require(complex_field || field == "real" || field == "integer", ErrorCode::IoFailure,
          "'" + path + "': unsupported field '" + field + "'");
  bool symmetric = symmetry == "symmetric";
  bool skew = symmetry == "skew-symmetric";
  bool hermitian = symmetry == "hermitian";
  require(symmetric || skew || hermitian || symmetry == "general", ErrorCode::IoFailure,
          "'" + path + "': unsupported symmetry '" + symmetry + "'");

  std::string line;
  require(detail::next_data_line(in, line), ErrorCode::IoFailure,
          "'" + path + "' has no size line");
  std::istringstream sz(line);
  long long rows = -1, cols = -1, nnz = -1;
  sz >> rows >> cols;
  if (coordinate) sz >> nnz;
  require(!sz.fail() && rows >= 0 && cols >= 0 && (!coordinate || nnz >= 0),
          ErrorCode::IoFailure, "'" + path + "' has a malformed size line");

  Matrix a = Matrix::Zero(rows, cols);
  auto read_value = [&](std::istringstream& s) -> Complex {
    double re = 0.0, im = 0.0;
    s >> re;
    if (complex_field) s >> im;
    require(!s.fail(), ErrorCode::IoFailure, "'" + path + "' has a malformed entry");
    return Complex(re, im);
  };

  if (coordinate) {
    for (long long k = 0; k < nnz; ++k) {
      require(detail::next_data_line(in, line), ErrorCode::IoFailure,
              "'" + path + "' ends before the declared entry count");
      std::istringstream es(line);
      long long i = 0, j = 0;
      es >> i >> j;
      Complex v = read_value(es);
      require(i >= 1 && i <= rows && j >= 1 && j <= cols, ErrorCode::IoFailure,
              "'" + path + "' has an out-of-range index");
      a(i - 1, j - 1) = v;
      if (i != j) {
        if (symmetric) a(j - 1, i - 1) = v;
        if (skew) a(j - 1, i - 1) = -v;
        if (hermitian) a(j - 1, i - 1) = std::conj(v);
      }
    }
  } else {
    // Array files with symmetry store only the lower triangle.
    bool lower_only = symmetric || skew || hermitian;
    if (lower_only)
      require(rows == cols, ErrorCode::IoFailure,
              "'" + path + "': symmetric array data must be square");
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = lower_only ? (skew ? j + 1 : j) : 0; i < rows; ++i) {
        require(detail::next_data_line(in, line), ErrorCode::IoFailure,
                "'" + path + "' ends before all entries are read");
        std::istringstream es(line);
        Complex v = read_value(es);
        a(i, j) = v;
        if (i != j) {
          if (symmetric) a(j, i) = v;
          if (skew) a(j, i) = -v;
          if (hermitian) a(j, i) = std::conj(v);
        }
      }
  }
  require(!detail::next_data_line(in, line), ErrorCode::IoFailure,
          "'" + path + "' has trailing data beyond the declared entries");
  return a;
}

}  // namespace somor
