#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nfield/field.hpp"

namespace nfield {

struct GramSchmidtResult {
  std::vector<ComplexField> fields;  // orthonormal under the grid inner product
  std::vector<std::size_t> kept;     // input index of each output field
  std::vector<std::size_t> dropped;  // inputs removed as (numerically) dependent
  // Upper triangular: input[kept[j]] = sum_i R(i, j) fields[i].
  Eigen::MatrixXcd R;
};

/// Modified Gram-Schmidt with one reorthogonalization pass. An input is
/// dropped when its norm after projection falls below drop_tol times its
/// original norm.
GramSchmidtResult gram_schmidt(const std::vector<ComplexField>& vectors, double drop_tol = 1e-10);

}  // namespace nfield
