#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nfield/errors.hpp"

namespace nfield {

using cplx = std::complex<double>;

/// Gauss-Legendre rule on [lo, hi]. Nodes are ascending.
struct QuadRule {
  double lo = -1.0;
  double hi = 1.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  // Barycentric interpolation weights of the nodes (Legendre closed form).
  std::vector<double> bary;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule mapped to [lo, hi], exact through degree 2n-1.
QuadRule gauss_legendre(std::size_t n, double lo, double hi);

/// Tensor product of two Gauss-Legendre rules on [-a,a] x [-b,b].
/// Grid points are indexed (i, j) -> i + nx * j, i.e. x varies fastest.
struct QuadGrid {
  QuadRule x;
  QuadRule y;

  static QuadGrid rectangle(double a, double b, std::size_t nx, std::size_t ny);

  std::size_t nx() const { return x.size(); }
  std::size_t ny() const { return y.size(); }
  std::size_t size() const { return nx() * ny(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i + nx() * j; }
  double weight(std::size_t i, std::size_t j) const { return x.weights[i] * y.weights[j]; }
  double half_width_x() const { return 0.5 * (x.hi - x.lo); }
  double half_width_y() const { return 0.5 * (y.hi - y.lo); }
};

/// Values of the Lagrange basis of `rule`'s nodes at `points` (rows = points).
Eigen::MatrixXd lagrange_matrix(const QuadRule& rule, std::span<const double> points);

/// Matrix M with (M f)(t_p) = int_lo^hi |t_p - s|^power exp(-k |t_p - s|) f(s) ds
/// for f the polynomial interpolant of its values at the rule's nodes.
///
/// The integral is split at t_p so each half has a smooth integrand, and
/// each half is integrated with its own Gauss-Legendre rule. This keeps the
/// operator spectrally accurate despite the kink of |t - s|.
Eigen::MatrixXcd exp_kernel_matrix(const QuadRule& rule, cplx k, std::span<const double> targets,
                                   int power = 0);

/// Square version with the rule's own nodes as targets.
Eigen::MatrixXcd exp_kernel_matrix(const QuadRule& rule, cplx k, int power = 0);

/// (1/n) sum_{j<n} f(j/n): the trapezoid rule for a 1-periodic f on [0,1).
template <class F>
auto periodic_trapezoid(F&& f, std::size_t n) -> decltype(f(0.0)) {
  if (n < 2) throw InvalidArgument("periodic_trapezoid needs at least 2 points");
  auto sum = f(0.0);
  for (std::size_t j = 1; j < n; ++j) sum = sum + f(static_cast<double>(j) / static_cast<double>(n));
  return sum * (1.0 / static_cast<double>(n));
}

}  // namespace nfield
