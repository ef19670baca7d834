#include "nfield/gram_schmidt.hpp"

#include "nfield/errors.hpp"

namespace nfield {

GramSchmidtResult gram_schmidt(const std::vector<ComplexField>& vectors, double drop_tol) {
  if (vectors.empty()) throw EmptyInput("gram_schmidt: no input vectors");

  GramSchmidtResult out;
  const auto n = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(n, n);

  for (std::size_t j = 0; j < vectors.size(); ++j) {
    ComplexField v = vectors[j];
    const double original = norm(v);
    const auto col = static_cast<Eigen::Index>(out.fields.size());
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < out.fields.size(); ++i) {
        const cplx r = inner(v, out.fields[i]);
        v -= r * out.fields[i];
        R(static_cast<Eigen::Index>(i), col) += r;
      }
    }
    const double len = norm(v);
    if (!(original > 0.0) || len <= drop_tol * original) {
      R.col(col).setZero();
      out.dropped.push_back(j);
      continue;
    }
    R(col, col) = len;
    v *= 1.0 / len;
    out.fields.push_back(std::move(v));
    out.kept.push_back(j);
  }
  const auto m = static_cast<Eigen::Index>(out.fields.size());
  out.R = R.topLeftCorner(m, m);
  return out;
}

}  // namespace nfield
