#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "nfield/charfun.hpp"
#include "nfield/errors.hpp"
#include "nfield/spectrum.hpp"

using namespace nfield;
using Catch::Approx;

namespace {

std::shared_ptr<const QuadGrid> make_grid(double a, double b, std::size_t n) {
  return std::make_shared<const QuadGrid>(QuadGrid::rectangle(a, b, n, n));
}

ModelParams two_term_params() {
  ModelParams p = reference_params();
  p.terms = {{cplx(5.0, 0.0), cplx(1.0, 0.0)}, {cplx(-4.0, 0.0), cplx(0.5, 0.0)}};
  return p;
}

cplx random_cplx(std::mt19937& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng)};
}

EigenPair hopf_pair() {
  EigenSolveOptions opts;
  opts.evaluate_delta = false;
  return eigen_solve(reference_params(), Parity::Even, Parity::Even, cplx(0.0, 1.34), cplx(-0.17, 1.15),
                     cplx(-0.17, 1.15), opts);
}

}  // namespace

TEST_CASE("term data", "[charfun]") {
  const ModelParams p = reference_params(-3.27);
  const TermData t = term_data(0.0, 0, p);
  CHECK(t.k == cplx(2.0, 0.0));
  CHECK(t.c == cplx(-3.27, 0.0));
  CHECK(term_data(-2.0, 0, p).k == cplx(0.0, 0.0));
  CHECK(std::abs(term_data(cplx(0.0, 1.7), 0, p).c) == Approx(3.27).epsilon(1e-14));
}

TEST_CASE("apply_delta", "[charfun]") {
  const ModelParams p = reference_params(-3.27);
  auto grid = make_grid(1.0, 1.0, 32);

  SECTION("constant field at z = -xi") {
    ComplexField one(grid);
    one.values().setOnes();
    const ComplexField d = apply_delta(-2.0, one, p);
    const cplx expected = (-2.0 + 1.0) - 4.0 * term_data(-2.0, 0, p).c;
    for (Eigen::Index i = 0; i < d.values().size(); ++i) REQUIRE(std::abs(d.values()[i] - expected) <= 1e-12);
  }

  SECTION("zero field") {
    CHECK(apply_delta(cplx(0.3, 1.0), ComplexField(grid), p).max_abs() == 0.0);
  }

  SECTION("Hopf eigenvector") {
    const cplx rho(-0.17, 1.15);
    const ComplexField q =
        ComplexField::sample(grid, [&](double x, double y) { return std::cosh(rho * x) * std::cosh(rho * y); });
    CHECK(norm(apply_delta(cplx(0.0, 1.34), q, p)) / norm(q) <= 1e-2);

    const EigenPair e = hopf_pair();
    const ComplexField qe = ComplexField::sample(
        grid, [&](double x, double y) { return std::cosh(e.rho * x) * std::cosh(e.nu * y); });
    CHECK(norm(apply_delta(e.z, qe, p)) / norm(qe) <= 1e-3);
  }

  SECTION("linearity") {
    std::mt19937 rng(9);
    const ComplexField q1 = ComplexField::sample(grid, [](double x, double y) { return cplx(std::sin(x), x * y); });
    const ComplexField q2 = ComplexField::sample(grid, [](double x, double y) { return std::exp(cplx(0.2, x) * y); });
    const cplx al = random_cplx(rng, 2.0), be = random_cplx(rng, 2.0), z = random_cplx(rng, 1.0);
    const ComplexField lhs = apply_delta(z, al * q1 + be * q2, p);
    const ComplexField rhs = al * apply_delta(z, q1, p) + be * apply_delta(z, q2, p);
    CHECK(norm(lhs - rhs) <= 1e-13 * norm(lhs));
  }
}

TEST_CASE("characteristic polynomial", "[charfun]") {
  std::mt19937 rng(21);
  for (const ModelParams& p : {reference_params(), two_term_params()}) {
    for (int t = 0; t < 50; ++t) {
      const cplx z = random_cplx(rng, 2.0), rho = random_cplx(rng, 3.0), nu = random_cplx(rng, 3.0);
      const cplx v = char_poly(z, rho, nu, p);
      const double s = char_poly_scale(z, rho, nu, p);
      CHECK(std::abs(v - char_poly(z, nu, rho, p)) <= 1e-13 * s);
      CHECK(std::abs(v - char_poly(z, -rho, nu, p)) <= 1e-13 * s);
      CHECK(std::abs(v - char_poly(z, rho, -nu, p)) <= 1e-13 * s);

      cplx den = 1.0;
      for (const TermData& td : all_term_data(z, p)) den *= (td.k * td.k - rho * rho) * (td.k * td.k - nu * nu);
      CHECK(std::abs(q_reduced(z, rho, nu, p) * den - v) <= 1e-10 * s);

      // (rho^2 - nu^2) Q = h(rho) - h(nu), h(x) = (z+alpha) x^2 - sum 4 c k^2 / (k^2 - x^2).
      auto h = [&](cplx x) {
        cplx r = (z + p.alpha) * x * x;
        for (const TermData& td : all_term_data(z, p)) r -= 4.0 * td.c * td.k * td.k / (td.k * td.k - x * x);
        return r;
      };
      const cplx lhs = (rho * rho - nu * nu) * q_reduced(z, rho, nu, p);
      CHECK(std::abs(lhs - (h(rho) - h(nu))) <= 1e-10 * (std::abs(h(rho)) + std::abs(h(nu))));
    }
  }

  const EigenPair e = hopf_pair();
  const ModelParams p = reference_params();
  CHECK(std::abs(char_poly(e.z, e.rho, e.nu, p)) <= 1e-6 * char_poly_scale(e.z, e.rho, e.nu, p));

  ModelParams off = p;
  off.terms[0].c_hat = 0.0;
  const cplx z(0.4, 0.3), rho(1.1, -0.2), nu(0.3, 0.9);
  const cplx k = z + 2.0;
  CHECK(std::abs(char_poly(z, rho, nu, off) - (z + 1.0) * (k * k - rho * rho) * (k * k - nu * nu)) <= 1e-13);
  CHECK(std::abs(q_reduced(z, rho, nu, off) - (z + 1.0)) <= 1e-14);

  CHECK_THROWS_AS(q_reduced(z, k, nu, p), ResonantParameter);
}

TEST_CASE("resonance set", "[charfun]") {
  const ModelParams p = reference_params();
  CHECK(resonance_check(-2.0, p));
  CHECK_FALSE(resonance_check(-1.0, p));
  ModelParams two = p;
  two.terms = {{cplx(1.0, 0.0), cplx(1.0, 0.0)}, {cplx(1.0, 0.0), cplx(3.0, 0.0)}};
  CHECK(resonance_check(-2.0, two));
  CHECK_FALSE(resonance_check(-1.5, two));
}

TEST_CASE("equivalence classes", "[charfun]") {
  SECTION("closed form for one term") {
    const ModelParams p = reference_params();
    const cplx z(0.2, 0.7), nu(0.4, 1.3);
    const TermData t = term_data(z, 0, p);
    const cplx rho2 = t.k * t.k - 4.0 * t.c * t.k * t.k / ((z + p.alpha) * (t.k * t.k - nu * nu));
    const RootClass cls = equiv_roots(z, nu, p);
    REQUIRE(cls.roots.size() == 2);
    CHECK(std::abs(cls.roots[0] * cls.roots[0] - rho2) <= 1e-12 * std::abs(rho2));
    CHECK(cls.roots[1] == canonical_root(nu));
    CHECK(std::abs(char_poly(z, cls.roots[0], nu, p)) <= 1e-10 * char_poly_scale(z, cls.roots[0], nu, p));
  }

  SECTION("classes are closed and disjoint") {
    const ModelParams p = two_term_params();
    std::mt19937 rng(4);
    for (int t = 0; t < 25; ++t) {
      const cplx z = random_cplx(rng, 1.0) + cplx(0.5, 0.0);
      if (resonance_check(z, p)) continue;
      const RootClass c1 = equiv_roots(z, random_cplx(rng, 3.0), p);
      REQUIRE(c1.roots.size() == 3);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          if (i == j) continue;
          const cplx a = c1.roots[i], b = c1.roots[j];
          CHECK(std::abs(char_poly(z, a, b, p)) <= 1e-9 * char_poly_scale(z, a, b, p));
        }
      // Starting from another member reproduces the same class.
      const RootClass c2 = equiv_roots(z, c1.roots[0], p);
      for (const cplx r : c2.roots) {
        double best = 1e300;
        for (const cplx s : c1.roots) best = std::min(best, std::abs(r * r - s * s));
        CHECK(best <= 1e-8 * (1.0 + std::abs(r * r)));
      }
      // A nu outside the class yields a disjoint class.
      const RootClass c3 = equiv_roots(z, c1.roots[0] + cplx(0.37, 0.11), p);
      for (const cplx r : c3.roots)
        for (const cplx s : c1.roots) CHECK(std::abs(r * r - s * s) > 1e-6);
    }
  }

  SECTION("zero coupling is degenerate") {
    ModelParams p = reference_params();
    p.terms[0].c_hat = 0.0;
    CHECK_THROWS_AS(equiv_roots(cplx(0.1, 0.2), cplx(0.5, 0.5), p), DegenerateClass);
  }
}

TEST_CASE("S-matrices", "[charfun]") {
  const ModelParams p = two_term_params();
  const cplx z(0.3, 0.8);
  const RootClass cls = equiv_roots(z, cplx(0.2, 1.7), p);
  RootClass flipped = cls;
  flipped.roots[1] = -flipped.roots[1];
  const SMatrices s = s_matrices(1.0, cls, p), f = s_matrices(1.0, flipped, p);
  CHECK(std::abs(s.even(0, 1) - f.even(0, 1)) <= 1e-13 * std::abs(s.even(0, 1)));
  CHECK(std::abs(s.odd(1, 1) + f.odd(1, 1)) <= 1e-13 * std::abs(s.odd(1, 1)));

  const SMatrices s0 = s_matrices(0.0, cls, p);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const cplx k = term_data(z, i, p).k, r = cls.roots[j];
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      CHECK(std::abs(s0.even(ii, jj) - k / (k * k - r * r)) <= 1e-14);
      CHECK(std::abs(s0.odd(ii, jj) - r / (k * k - r * r)) <= 1e-14);
    }

  const EigenPair e = hopf_pair();
  const ModelParams ref = reference_params();
  const RootClass hc{e.z, e.nu, {e.rho, e.nu}};
  CHECK(std::abs(s_matrices(1.0, hc, ref).even(0, 0)) <= 1e-9);
}

TEST_CASE("boundary residual", "[charfun]") {
  const ModelParams ref = reference_params();
  const EigenPair e = hopf_pair();
  const RootClass hc{e.z, e.nu, {e.rho, e.nu}};

  CoefficientMatrices zero;
  zero.ee = Eigen::MatrixXcd::Zero(2, 2);
  CHECK(boundary_residual(e.z, hc, zero, ref) == 0.0);

  CoefficientMatrices d;
  d.ee = Eigen::MatrixXcd::Zero(2, 2);
  d.ee(0, 1) = 1.0;
  CHECK(boundary_residual(e.z, hc, d, ref) <= 1e-6);

  std::mt19937 rng(13);
  const ModelParams p = two_term_params();
  const cplx z(0.1, 0.9);
  const RootClass cls = equiv_roots(z, cplx(0.5, 2.0), p);
  CoefficientMatrices r;
  r.ee = Eigen::MatrixXcd::Random(3, 3);
  r.oo = Eigen::MatrixXcd::Random(3, 3);
  r.ee.diagonal().setZero();
  r.oo.diagonal().setZero();
  CHECK(boundary_residual(z, cls, r, p) > 1e-3);

  CoefficientMatrices bad;
  bad.ee = Eigen::MatrixXcd::Identity(3, 3);
  CHECK_THROWS_AS(boundary_residual(z, cls, bad, p), InvalidArgument);
}

TEST_CASE("boundary operators on exponentials", "[charfun]") {
  // For q = exp(rho x + nu y):  (k^2-rho^2)(k^2-nu^2) K q - 4 c k^2 q = -2 c k B q + c exp(-k(a+b)) C q.
  ModelParams p = reference_params();
  p.b = 0.7;
  const cplx z(0.2, 0.6), rho(0.3, -1.2), nu(-0.8, 0.5);
  const TermData t = term_data(z, 0, p);
  auto grid = std::make_shared<const QuadGrid>(QuadGrid::rectangle(p.a, p.b, 28, 24));
  const ComplexField q = ComplexField::sample(grid, [&](double x, double y) { return std::exp(rho * x + nu * y); });
  const ComplexField kq = apply_exp_kernel(q, t.c, t.k);
  const cplx lfac = (t.k * t.k - rho * rho) * (t.k * t.k - nu * nu);
  double worst = 0.0;
  for (std::size_t j = 0; j < grid->ny(); ++j)
    for (std::size_t i = 0; i < grid->nx(); ++i) {
      const Point2 r{grid->x.nodes[i], grid->y.nodes[j]};
      const cplx lhs = lfac * kq(i, j) - 4.0 * t.c * t.k * t.k * q(i, j);
      const cplx rhs = -2.0 * t.c * t.k * boundary_B_exp(z, 0, rho, nu, r, p) +
                       t.c * std::exp(-t.k * (p.a + p.b)) * boundary_C_exp(z, 0, rho, nu, r, p);
      worst = std::max(worst, std::abs(lhs - rhs) / (std::abs(lfac * kq(i, j)) + 1.0));
    }
  CHECK(worst <= 1e-10);
}

TEST_CASE("L acts as a left inverse of K", "[charfun][property]") {
  const ModelParams p = two_term_params();
  const cplx z(0.35, 0.6);
  const QuadRule rx = gauss_legendre(40, -1.0, 1.0);
  auto grid = std::make_shared<const QuadGrid>(QuadGrid::rectangle(1.0, 1.0, 40, 40));
  const ComplexField q = ComplexField::sample(grid, [](double x, double y) {
    return std::cos(1.3 * x + 0.4) * (1.0 + 0.5 * y * y) + cplx(0.0, 1.0) * std::sin(x * y);
  });
  const double h = 1e-2;
  const std::vector<Point2> centers = {{0.0, 0.0}, {0.41, -0.23}, {-0.6, 0.55}, {0.7, 0.7}};
  for (std::size_t i = 0; i < p.num_terms(); ++i) {
    const TermData t = term_data(z, i, p);
    for (const Point2 c : centers) {
      std::vector<double> xs, ys;
      for (int s = -1; s <= 1; ++s) {
        xs.push_back(c.x + s * h);
        ys.push_back(c.y + s * h);
      }
      const Eigen::MatrixXcd Mx = exp_kernel_matrix(rx, t.k, xs);
      const Eigen::MatrixXcd My = exp_kernel_matrix(rx, t.k, ys);
      const Eigen::MatrixXcd F = t.c * (Mx * q.matrix() * My.transpose());
      const cplx fxx = (F(0, 1) - 2.0 * F(1, 1) + F(2, 1)) / (h * h);
      const cplx fyy = (F(1, 0) - 2.0 * F(1, 1) + F(1, 2)) / (h * h);
      const cplx fxxyy = (F(0, 0) - 2.0 * F(1, 0) + F(2, 0) - 2.0 * (F(0, 1) - 2.0 * F(1, 1) + F(2, 1)) + F(0, 2) -
                          2.0 * F(1, 2) + F(2, 2)) /
                         (h * h * h * h);
      const cplx k2 = t.k * t.k;
      const cplx lk = k2 * k2 * F(1, 1) - k2 * (fxx + fyy) + fxxyy;
      const cplx expected = 4.0 * t.c * k2 * q.value_at(c);
      CHECK(std::abs(lk - expected) <= 1e-3 * std::abs(expected));
    }
  }
}

TEST_CASE("two-term square eigenvectors", "[charfun][n2]") {
  const ModelParams p = two_term_params();
  const SquareSearchResult r = square_n2_search(p, cplx(0.0, 3.43), cplx(-0.3, 0.0), Parity::Even);
  CHECK(r.z.real() == Approx(-0.29777).margin(1e-4));
  CHECK(r.boundary_residual <= 1e-10);
  CHECK(r.rank_minor <= 1e-8);

  auto grid = make_grid(p.a, p.b, 40);
  CoefficientMatrices c;
  c.ee = r.D;
  const ComplexField q = assemble_eigenvector(r.cls, c, grid);
  CHECK(norm(apply_delta(r.z, q, p)) / norm(q) <= 1e-3);
  CHECK(boundary_residual(r.z, r.cls, c, p) <= 1e-8 * r.D.cwiseAbs().maxCoeff() * 10.0);

  SECTION("odd parity from a scan") {
    const SquareScanReport rep = square_n2_scan(p, Parity::Odd, 40);
    REQUIRE_FALSE(rep.solutions.empty());
    for (const SquareSearchResult& s : rep.solutions) {
      CHECK(s.boundary_residual <= 1e-10);
      CHECK(s.rank_minor <= 1e-8);
      CoefficientMatrices co;
      co.oo = s.D;
      const ComplexField qo = assemble_eigenvector(s.cls, co, grid);
      CHECK(norm(apply_delta(s.z, qo, p)) / norm(qo) <= 1e-3);
    }
  }
}
