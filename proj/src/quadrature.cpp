#include "nfield/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace nfield {

QuadRule gauss_legendre(std::size_t n, double lo, double hi) {
  if (n == 0) throw InvalidArgument("gauss_legendre: n must be at least 1");
  if (!(lo < hi)) throw InvalidArgument("gauss_legendre: need lo < hi");

  std::vector<double> t(n), w(n);
  // Newton on P_n from the Tricomi initial guesses; symmetric pairs filled together.
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      } else {
        for (std::size_t m = 2; m <= n; ++m) {
          const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / static_cast<double>(m);
          p0 = p1;
          p1 = p2;
        }
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    }
    t[i] = -x;
    t[n - 1 - i] = x;
    const double wi = 2.0 / ((1.0 - x * x) * dp * dp);
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) t[n / 2] = 0.0;

  QuadRule rule;
  rule.lo = lo;
  rule.hi = hi;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.bary.resize(n);
  const double half_len = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half_len * t[i];
    rule.weights[i] = half_len * w[i];
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    rule.bary[i] = sign * std::sqrt((1.0 - t[i] * t[i]) * w[i]);
  }
  return rule;
}

QuadGrid QuadGrid::rectangle(double a, double b, std::size_t nx, std::size_t ny) {
  if (nx < 2 || ny < 2) throw InvalidArgument("QuadGrid needs at least 2 nodes per axis");
  return QuadGrid{gauss_legendre(nx, -a, a), gauss_legendre(ny, -b, b)};
}

Eigen::MatrixXd lagrange_matrix(const QuadRule& rule, std::span<const double> points) {
  const std::size_t n = rule.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < points.size(); ++p) {
    const double s = points[p];
    bool exact = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (s == rule.nodes[j]) {
        L(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)) = 1.0;
        exact = true;
        break;
      }
    }
    if (exact) continue;
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = rule.bary[j] / (s - rule.nodes[j]);
      L(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)) = v;
      denom += v;
    }
    L.row(static_cast<Eigen::Index>(p)) /= denom;
  }
  return L;
}

Eigen::MatrixXcd exp_kernel_matrix(const QuadRule& rule, cplx k, std::span<const double> targets, int power) {
  const std::size_t n = rule.size();
  const QuadRule sub = gauss_legendre(n + 8, -1.0, 1.0);
  const std::size_t m = sub.size();

  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(targets.size()), static_cast<Eigen::Index>(n));
  std::vector<double> pts(m), dist(m), wts(m);
  for (std::size_t p = 0; p < targets.size(); ++p) {
    const double t = targets[p];
    const double pieces[2][2] = {{rule.lo, t}, {t, rule.hi}};
    for (const auto& piece : pieces) {
      const double lo = piece[0], hi = piece[1];
      if (hi - lo <= 0.0) continue;
      const double hl = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (std::size_t q = 0; q < m; ++q) {
        pts[q] = mid + hl * sub.nodes[q];
        dist[q] = std::abs(t - pts[q]);
        wts[q] = hl * sub.weights[q];
      }
      const Eigen::MatrixXd L = lagrange_matrix(rule, pts);
      Eigen::VectorXcd kw(static_cast<Eigen::Index>(m));
      for (std::size_t q = 0; q < m; ++q) {
        cplx v = wts[q] * std::exp(-k * dist[q]);
        if (power != 0) v *= std::pow(dist[q], power);
        kw[static_cast<Eigen::Index>(q)] = v;
      }
      M.row(static_cast<Eigen::Index>(p)) += (kw.transpose() * L.cast<cplx>());
    }
  }
  return M;
}

Eigen::MatrixXcd exp_kernel_matrix(const QuadRule& rule, cplx k, int power) {
  return exp_kernel_matrix(rule, k, std::span<const double>(rule.nodes), power);
}

}  // namespace nfield
