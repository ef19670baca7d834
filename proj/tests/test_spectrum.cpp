#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "nfield/errors.hpp"
#include "nfield/slp.hpp"
#include "nfield/spectrum.hpp"

using namespace nfield;
using Catch::Approx;

namespace {

const cplx kHopfZ(0.0, 1.34);
const cplx kHopfRho(-0.17, 1.15);

EigenPair hopf_pair() {
  return eigen_solve(reference_params(), Parity::Even, Parity::Even, cplx(0.0, 1.3), cplx(-0.2, 1.1),
                     cplx(-0.2, 1.1));
}

bool same_pm(cplx a, cplx b, double tol) { return std::abs(a * a - b * b) <= tol * (1.0 + std::abs(a * a)); }

}  // namespace

TEST_CASE("eigen_solve at the reference Hopf point", "[spectrum]") {
  const EigenPair e = hopf_pair();
  CHECK(std::abs(e.z - kHopfZ) <= 0.005);
  CHECK(std::abs(e.rho - kHopfRho) <= 0.005);
  CHECK(std::abs(e.nu - kHopfRho) <= 0.005);
  CHECK(e.residual_poly <= 1e-9);
  CHECK(e.residual_bc_x <= 1e-9);
  CHECK(e.residual_bc_y <= 1e-9);
  CHECK(e.residual_delta >= 0.0);
  CHECK(e.residual_delta <= 1e-3);
  const ModelParams p = reference_params();
  CHECK(parity_condition_residual(e.z + 2.0, e.rho, p.a, Parity::Even) <= 1e-9);

  SECTION("conjugate seed") {
    const EigenPair c = eigen_solve(p, Parity::Even, Parity::Even, cplx(0.0, -1.3), cplx(-0.2, -1.1), cplx(-0.2, -1.1));
    CHECK(std::abs(c.z - std::conj(e.z)) <= 1e-10);
    CHECK(same_pm(c.rho, std::conj(e.rho), 1e-10));
    CHECK(same_pm(c.nu, std::conj(e.nu), 1e-10));
  }

  SECTION("swapped seed on a square") {
    const EigenPair s = eigen_solve(p, Parity::Odd, Parity::Even, cplx(-0.6, 2.0), cplx(0.1, 2.6), cplx(-0.2, 1.1));
    const EigenPair t = eigen_solve(p, Parity::Even, Parity::Odd, s.z, s.nu, s.rho);
    CHECK(std::abs(s.z - t.z) <= 1e-10);
    CHECK(same_pm(s.rho, t.nu, 1e-10));
    CHECK(same_pm(s.nu, t.rho, 1e-10));
  }

  SECTION("resonant solution is rejected") {
    ModelParams off = p;
    off.terms[0].c_hat = 1e-8;
    CHECK_THROWS_AS(eigen_solve(off, Parity::Even, Parity::Even, cplx(-2.0, 0.0), cplx(0.01, 0.0), cplx(0.01, 0.0)),
                    Error);
  }
}

TEST_CASE("spectrum scan of the reference window", "[spectrum]") {
  const ModelParams p = reference_params();
  const SpectrumReport rep = spectrum_scan(p, Window{});
  REQUIRE(rep.eigenpairs.size() >= 2);
  CHECK(rep.essential_point == cplx(-1.0, 0.0));

  const EigenPair& top = rep.eigenpairs.front();
  CHECK(std::abs(top.z.real()) <= 1e-3);
  CHECK(std::abs(std::abs(top.z.imag()) - 1.34) <= 0.005);
  CHECK(std::abs(rep.eigenpairs[1].z - std::conj(top.z)) <= 1e-8);
  for (std::size_t i = 2; i < rep.eigenpairs.size(); ++i) CHECK(rep.eigenpairs[i].z.real() < 0.0);

  for (const EigenPair& e : rep.eigenpairs) {
    CHECK(e.residual_delta <= 1e-3);
    CHECK(Window{}.contains(e.z));
    bool has_conj = false;
    for (const EigenPair& f : rep.eigenpairs) has_conj = has_conj || std::abs(f.z - std::conj(e.z)) <= 1e-6;
    CHECK(has_conj);
  }
  for (std::size_t i = 0; i < rep.eigenpairs.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(rep.eigenpairs[i].z - rep.eigenpairs[j].z) > 1e-6);

  // -xi is not an eigenvalue here: xi - alpha + 4ab c(-xi) = 1 + 4 * (-3.27) e^2.
  CHECK(rep.minus_xi_value.real() == Approx(1.0 - 4.0 * 3.27 * std::exp(2.0)).epsilon(1e-12));
  CHECK_FALSE(rep.minus_xi_eigenvalue);

  SECTION("classification agrees with the scan") {
    // Some scan modes sit beyond index 3, so the truncation is raised.
    for (const EigenPair& e : rep.eigenpairs) {
      const Classification c = classify(e.z, p, 8, 8);
      CHECK(c.kind == ZKind::Eigenvalue);
    }
    const Classification mid = classify(0.5 * (rep.eigenpairs[0].z + rep.eigenpairs[1].z), p, 8, 8);
    CHECK(mid.kind == ZKind::Resolvent);
  }
}

TEST_CASE("vanishing coupling has no point spectrum", "[spectrum]") {
  ModelParams p = reference_params(-1e-8);
  ScanSettings s;
  s.n_seeds = 6;
  const SpectrumReport rep = spectrum_scan(p, Window{-0.9, 0.5, -4.0, 4.0}, s);
  CHECK(rep.eigenpairs.empty());
}

TEST_CASE("classify", "[spectrum]") {
  const ModelParams p = reference_params();
  CHECK(classify(-1.0, p, 3, 3).kind == ZKind::Essential);

  const Classification h = classify(kHopfZ, p, 3, 3);
  REQUIRE(h.kind == ZKind::Eigenvalue);
  REQUIRE(h.eigenpair.has_value());
  CHECK(std::abs(h.eigenpair->z - hopf_pair().z) <= 1e-10);

  const Classification r = classify(0.5, p, 3, 3);
  CHECK(r.kind == ZKind::Resolvent);
  CHECK(r.margin > 0.05);

  const Classification res = classify(-2.0, p, 3, 3);
  CHECK(res.kind == ZKind::Resonant);
  CHECK_FALSE(res.constant_mode);

  // Choose c_hat so that -xi is an eigenvalue: xi - alpha + 4ab c(-xi) = 0.
  ModelParams tuned = p;
  tuned.terms[0].c_hat = -1.0 / (4.0 * std::exp(2.0));
  CHECK(classify(-2.0, tuned, 3, 3).constant_mode);
}

TEST_CASE("resolvent", "[spectrum]") {
  const ModelParams p = reference_params();
  auto grid = std::make_shared<const QuadGrid>(QuadGrid::rectangle(p.a, p.b, 64, 64));
  const cplx z(0.5, 0.0);
  const BasisSet basis = basis_build(z, p, 3, 3, grid);

  CHECK(resolve(basis, ComplexField(grid), p).max_abs() == 0.0);

  SECTION("single product") {
    const ComplexField& g = basis.raw[4];
    const cplx qz = q_reduced(z, basis.raw_rho(4), basis.raw_nu(4), p);
    const ComplexField q = resolve(basis, g, p);
    CHECK(norm(q - (1.0 / qz) * g) <= 1e-10 * norm(g) / std::abs(qz));
    CHECK(norm(apply_delta(z, g, p) - qz * g) <= 1e-8 * norm(g));
  }

  SECTION("round trip and linearity") {
    std::mt19937 rng(17);
    std::normal_distribution<double> n01;
    auto combo = [&](std::initializer_list<std::size_t> idx) {
      ComplexField g(grid);
      for (std::size_t i : idx) g += cplx(n01(rng), n01(rng)) * basis.raw[i];
      return g;
    };
    const ComplexField g1 = combo({0, 2, 5, 8}), g2 = combo({1, 3, 4, 7});
    const ComplexField q1 = resolve(basis, g1, p);
    CHECK(norm(apply_delta(z, q1, p) - g1) / norm(g1) <= 1e-6);

    const cplx al(0.3, -1.2), be(2.0, 0.5);
    const ComplexField lhs = resolve(basis, al * g1 + be * g2, p);
    const ComplexField rhs = al * q1 + be * resolve(basis, g2, p);
    CHECK(norm(lhs - rhs) <= 1e-10 * norm(lhs));

    const ComplexField q1b = resolve(z, g1, p, 3, 3);
    CHECK(norm(q1b - q1) <= 1e-10 * norm(q1));
  }

  CHECK_THROWS_AS(resolve(hopf_pair().z, basis.raw[0], p, 3, 3), EigenvalueHit);
}
