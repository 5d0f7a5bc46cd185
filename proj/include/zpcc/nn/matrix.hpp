#pragma once

#include <cstddef>
#include <vector>

namespace zpcc::nn {

// Row-major dense matrix; rows are per-point feature vectors.
template <class R>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<R> a;

  Matrix() = default;
  Matrix(std::size_t n, std::size_t d) : rows(n), cols(d), a(n * d, R(0)) {}

  R* row(std::size_t i) { return a.data() + i * cols; }
  const R* row(std::size_t i) const { return a.data() + i * cols; }

  void zero() { a.assign(a.size(), R(0)); }
  bool empty() const { return a.empty(); }
};

}  // namespace zpcc::nn
