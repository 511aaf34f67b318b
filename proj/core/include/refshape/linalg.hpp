#pragma once

#include <Eigen/Dense>

namespace refshape {

// Dense storage used throughout. Column-major Eigen matrices; networks keep
// activations as (features x batch) so that layers are plain GEMMs.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Shape-checked product. Throws ShapeError when a.cols() != b.rows().
Matrix mat_mul(const Matrix& a, const Matrix& b);

bool all_finite(const Matrix& m);

// Builds a matrix from row-major values, the way parameter tables are written.
Matrix from_rows(Index rows, Index cols, std::initializer_list<double> values);

}  // namespace refshape
