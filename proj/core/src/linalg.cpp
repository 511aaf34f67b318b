#include "refshape/linalg.hpp"

#include <string>

#include "refshape/errors.hpp"

namespace refshape {

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("mat_mul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  return a * b;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

Matrix from_rows(Index rows, Index cols, std::initializer_list<double> values) {
  if (static_cast<Index>(values.size()) != rows * cols) {
    throw ShapeError("from_rows: expected " + std::to_string(rows * cols) + " values, got " +
                     std::to_string(values.size()));
  }
  Matrix m(rows, cols);
  auto it = values.begin();
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = *it++;
  }
  return m;
}

}  // namespace refshape
