#include "nfield/field.hpp"

#include <cmath>

namespace nfield {

ComplexField::ComplexField(std::shared_ptr<const QuadGrid> grid)
    : grid_(std::move(grid)), values_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid_->size()))) {}

ComplexField::ComplexField(std::shared_ptr<const QuadGrid> grid, Eigen::VectorXcd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_->size())
    throw InvalidArgument("ComplexField: value count does not match grid size");
}

ComplexField ComplexField::sample(std::shared_ptr<const QuadGrid> grid,
                                  const std::function<cplx(double, double)>& f) {
  ComplexField out(grid);
  for (std::size_t j = 0; j < grid->ny(); ++j)
    for (std::size_t i = 0; i < grid->nx(); ++i) out(i, j) = f(grid->x.nodes[i], grid->y.nodes[j]);
  return out;
}

Eigen::Map<Eigen::MatrixXcd> ComplexField::matrix() {
  return {values_.data(), static_cast<Eigen::Index>(grid_->nx()), static_cast<Eigen::Index>(grid_->ny())};
}

Eigen::Map<const Eigen::MatrixXcd> ComplexField::matrix() const {
  return {values_.data(), static_cast<Eigen::Index>(grid_->nx()), static_cast<Eigen::Index>(grid_->ny())};
}

cplx ComplexField::value_at(Point2 r) const {
  const double xs[1] = {r.x};
  const double ys[1] = {r.y};
  const Eigen::MatrixXd Lx = lagrange_matrix(grid_->x, xs);
  const Eigen::MatrixXd Ly = lagrange_matrix(grid_->y, ys);
  return (Lx.cast<cplx>() * matrix() * Ly.cast<cplx>().transpose())(0, 0);
}

ComplexField ComplexField::conj() const { return ComplexField(grid_, values_.conjugate()); }

void ComplexField::check_same_grid(const ComplexField& other) const {
  if (grid_ != other.grid_ && (grid_->nx() != other.grid_->nx() || grid_->ny() != other.grid_->ny() ||
                               grid_->x.nodes != other.grid_->x.nodes || grid_->y.nodes != other.grid_->y.nodes))
    throw InvalidArgument("ComplexField: fields live on different grids");
}

ComplexField& ComplexField::operator+=(const ComplexField& other) {
  check_same_grid(other);
  values_ += other.values_;
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& other) {
  check_same_grid(other);
  values_ -= other.values_;
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) {
  values_ *= s;
  return *this;
}

ComplexField operator+(ComplexField u, const ComplexField& v) { return u += v; }
ComplexField operator-(ComplexField u, const ComplexField& v) { return u -= v; }
ComplexField operator*(cplx s, ComplexField u) { return u *= s; }
ComplexField operator*(ComplexField u, cplx s) { return u *= s; }

ComplexField hadamard(const ComplexField& u, const ComplexField& v) {
  ComplexField out = u;
  out.values() = u.values().cwiseProduct(v.values());
  return out;
}

cplx inner(const ComplexField& u, const ComplexField& v) {
  const QuadGrid& g = u.grid();
  cplx sum = 0.0;
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i) sum += g.weight(i, j) * u(i, j) * std::conj(v(i, j));
  return sum;
}

double norm(const ComplexField& u) { return std::sqrt(std::abs(inner(u, u))); }

ComplexField apply_separable(const ComplexField& q, cplx c, const Eigen::MatrixXcd& Mx,
                             const Eigen::MatrixXcd& My) {
  ComplexField out(q.grid_ptr());
  out.matrix() = c * (Mx * q.matrix() * My.transpose());
  return out;
}

}  // namespace nfield
