#pragma once

#include <complex>
#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "nfield/model.hpp"
#include "nfield/quadrature.hpp"

namespace nfield {

/// Complex function sampled on the nodes of a QuadGrid.
///
/// Values are stored x-fastest (see QuadGrid::index), so `matrix()` views
/// them as an nx-by-ny column-major matrix with rows indexed by x.
class ComplexField {
 public:
  ComplexField() = default;
  explicit ComplexField(std::shared_ptr<const QuadGrid> grid);
  ComplexField(std::shared_ptr<const QuadGrid> grid, Eigen::VectorXcd values);

  static ComplexField sample(std::shared_ptr<const QuadGrid> grid,
                             const std::function<cplx(double, double)>& f);

  const QuadGrid& grid() const { return *grid_; }
  const std::shared_ptr<const QuadGrid>& grid_ptr() const { return grid_; }
  bool empty() const { return !grid_; }

  Eigen::VectorXcd& values() { return values_; }
  const Eigen::VectorXcd& values() const { return values_; }

  cplx& operator()(std::size_t i, std::size_t j) { return values_[static_cast<Eigen::Index>(grid_->index(i, j))]; }
  cplx operator()(std::size_t i, std::size_t j) const { return values_[static_cast<Eigen::Index>(grid_->index(i, j))]; }

  Eigen::Map<Eigen::MatrixXcd> matrix();
  Eigen::Map<const Eigen::MatrixXcd> matrix() const;

  /// Polynomial interpolant evaluated off-grid.
  cplx value_at(Point2 r) const;

  double max_abs() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }

  ComplexField conj() const;

  ComplexField& operator+=(const ComplexField& other);
  ComplexField& operator-=(const ComplexField& other);
  ComplexField& operator*=(cplx s);

 private:
  void check_same_grid(const ComplexField& other) const;

  std::shared_ptr<const QuadGrid> grid_;
  Eigen::VectorXcd values_;
};

ComplexField operator+(ComplexField u, const ComplexField& v);
ComplexField operator-(ComplexField u, const ComplexField& v);
ComplexField operator*(cplx s, ComplexField u);
ComplexField operator*(ComplexField u, cplx s);

/// Pointwise product.
ComplexField hadamard(const ComplexField& u, const ComplexField& v);

/// <u, v> = sum_jk w_j w_k u(x_j, y_k) conj(v(x_j, y_k)).
cplx inner(const ComplexField& u, const ComplexField& v);
double norm(const ComplexField& u);

/// Applies the separable operator Q -> c * Mx Q My^T to the field.
ComplexField apply_separable(const ComplexField& q, cplx c, const Eigen::MatrixXcd& Mx,
                             const Eigen::MatrixXcd& My);

}  // namespace nfield
