#include "nfield/charfun.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nfield/errors.hpp"

namespace nfield {

const char* to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

Parity parity_from_string(const std::string& s) {
  if (s == "even") return Parity::Even;
  if (s == "odd") return Parity::Odd;
  throw ConfigError("parity must be 'even' or 'odd', got '" + s + "'");
}

TermData term_data(cplx z, std::size_t i, const ModelParams& params) {
  if (i >= params.terms.size()) throw InvalidArgument("term_data: term index out of range");
  const KernelTerm& t = params.terms[i];
  return {z + t.xi, t.c_hat * firing_rate_d1(params.gamma) * std::exp(-params.tau0 * z)};
}

std::vector<TermData> all_term_data(cplx z, const ModelParams& params) {
  std::vector<TermData> out;
  out.reserve(params.terms.size());
  for (std::size_t i = 0; i < params.terms.size(); ++i) out.push_back(term_data(z, i, params));
  return out;
}

ComplexField apply_exp_kernel(const ComplexField& q, cplx c, cplx k) {
  const QuadGrid& g = q.grid();
  const Eigen::MatrixXcd Mx = exp_kernel_matrix(g.x, k);
  if (g.y.nodes == g.x.nodes) return apply_separable(q, c, Mx, Mx);
  return apply_separable(q, c, Mx, exp_kernel_matrix(g.y, k));
}

ComplexField apply_kernel(cplx z, const ComplexField& q, const ModelParams& params) {
  ComplexField out(q.grid_ptr());
  for (const TermData& t : all_term_data(z, params)) out += apply_exp_kernel(q, t.c, t.k);
  return out;
}

ComplexField apply_delta(cplx z, const ComplexField& q, const ModelParams& params) {
  ComplexField out = (z + params.alpha) * q;
  out -= apply_kernel(z, q, params);
  return out;
}

cplx char_poly(cplx z, cplx rho, cplx nu, const ModelParams& params) {
  const auto terms = all_term_data(z, params);
  const std::size_t n = terms.size();
  std::vector<cplx> fac(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx k2 = terms[i].k * terms[i].k;
    fac[i] = (k2 - rho * rho) * (k2 - nu * nu);
  }
  cplx prod = 1.0;
  for (const cplx f : fac) prod *= f;
  cplx sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cplx others = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others *= fac[j];
    sum += 4.0 * terms[i].c * terms[i].k * terms[i].k * others;
  }
  return (z + params.alpha) * prod - sum;
}

double char_poly_scale(cplx z, cplx rho, cplx nu, const ModelParams& params) {
  const auto terms = all_term_data(z, params);
  const std::size_t n = terms.size();
  std::vector<double> fac(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx k2 = terms[i].k * terms[i].k;
    fac[i] = std::abs(k2 - rho * rho) * std::abs(k2 - nu * nu);
  }
  double prod = 1.0;
  for (const double f : fac) prod *= f;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double others = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others *= fac[j];
    sum += 4.0 * std::abs(terms[i].c) * std::norm(terms[i].k) * others;
  }
  return std::abs(z + params.alpha) * prod + sum;
}

cplx q_reduced(cplx z, cplx rho, cplx nu, const ModelParams& params) {
  cplx sum = 0.0;
  for (const TermData& t : all_term_data(z, params)) {
    const cplx k2 = t.k * t.k;
    const cplx den = (k2 - rho * rho) * (k2 - nu * nu);
    if (std::abs(den) <= 1e-14 * (1.0 + std::norm(k2) + std::norm(rho * rho) + std::norm(nu * nu)))
      throw ResonantParameter("q_reduced: k^2 coincides with rho^2 or nu^2");
    sum += 4.0 * t.c * k2 / den;
  }
  return (z + params.alpha) - sum;
}

bool resonance_check(cplx z, const ModelParams& params, double tol) {
  const auto terms = all_term_data(z, params);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (std::abs(terms[i].k) <= tol * (1.0 + std::abs(z))) return true;
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      const cplx ki2 = terms[i].k * terms[i].k, kj2 = terms[j].k * terms[j].k;
      if (std::abs(ki2 - kj2) <= tol * (1.0 + std::abs(ki2) + std::abs(kj2))) return true;
    }
  }
  return false;
}

cplx canonical_root(cplx rho) {
  if (rho.imag() < 0.0 || (rho.imag() == 0.0 && rho.real() < 0.0)) return -rho;
  return rho;
}

namespace {

using Poly = std::vector<cplx>;  // ascending coefficients

Poly poly_mul(const Poly& p, const Poly& q) {
  Poly r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

void poly_axpy(Poly& acc, cplx s, const Poly& p) {
  if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) acc[i] += s * p[i];
}

// P_z(sqrt(s), nu) as a polynomial in s.
Poly rho2_polynomial(cplx z, cplx nu, const ModelParams& params) {
  const auto terms = all_term_data(z, params);
  const std::size_t n = terms.size();
  const cplx nu2 = nu * nu;
  std::vector<Poly> lin(n);
  std::vector<cplx> fixed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx k2 = terms[i].k * terms[i].k;
    lin[i] = {k2, -1.0};
    fixed[i] = k2 - nu2;
  }
  Poly all = {1.0};
  cplx all_fixed = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    all = poly_mul(all, lin[i]);
    all_fixed *= fixed[i];
  }
  Poly P;
  poly_axpy(P, (z + params.alpha) * all_fixed, all);
  for (std::size_t i = 0; i < n; ++i) {
    Poly others = {1.0};
    cplx others_fixed = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      others = poly_mul(others, lin[j]);
      others_fixed *= fixed[j];
    }
    poly_axpy(P, -4.0 * terms[i].c * terms[i].k * terms[i].k * others_fixed, others);
  }
  return P;
}

std::vector<cplx> poly_roots(const Poly& p) {
  double max_coef = 0.0;
  for (const cplx c : p) max_coef = std::max(max_coef, std::abs(c));
  std::size_t deg = p.size() - 1;
  while (deg > 0 && std::abs(p[deg]) <= 1e-14 * max_coef) --deg;
  if (deg == 0) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
  for (std::size_t i = 1; i < deg; ++i) C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < deg; ++i)
    C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(deg - 1)) = -p[i] / p[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);
  return roots;
}

bool same_square(cplx s1, cplx s2, double tol) {
  return std::abs(s1 - s2) <= tol * (1.0 + std::abs(s1) + std::abs(s2));
}

void check_class_separation(const std::vector<cplx>& squares, const std::vector<TermData>& terms, double tol) {
  for (std::size_t i = 0; i < squares.size(); ++i) {
    for (std::size_t j = i + 1; j < squares.size(); ++j)
      if (same_square(squares[i], squares[j], tol))
        throw DegenerateClass("equivalence class has a repeated rho^2");
    for (const TermData& t : terms)
      if (same_square(squares[i], t.k * t.k, tol)) throw DegenerateClass("equivalence class meets some k_i^2");
  }
}

// sinh(w)/w, accurate near w = 0.
cplx sinhc(cplx w) {
  if (std::abs(w) < 1e-4) return 1.0 + w * w / 6.0;
  return std::sinh(w) / w;
}

}  // namespace

RootClass equiv_roots(cplx z, cplx nu, const ModelParams& params) {
  const Poly P = rho2_polynomial(z, nu, params);
  const std::vector<cplx> s = poly_roots(P);
  if (s.size() != params.num_terms())
    throw DegenerateClass("P_z(., nu) has fewer than N roots in rho^2");
  RootClass cls{z, nu, {}};
  std::vector<cplx> squares = s;
  squares.push_back(nu * nu);
  check_class_separation(squares, all_term_data(z, params), 1e-9);
  for (const cplx si : s) cls.roots.push_back(canonical_root(std::sqrt(si)));
  cls.roots.push_back(nu);
  return cls;
}

SMatrices s_matrices(double halfwidth, const RootClass& cls, const ModelParams& params) {
  const auto terms = all_term_data(cls.z, params);
  const auto rows = static_cast<Eigen::Index>(terms.size());
  const auto cols = static_cast<Eigen::Index>(cls.roots.size());
  SMatrices S{Eigen::MatrixXcd(rows, cols), Eigen::MatrixXcd(rows, cols)};
  for (Eigen::Index i = 0; i < rows; ++i) {
    const cplx k = terms[static_cast<std::size_t>(i)].k;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const cplx r = cls.roots[static_cast<std::size_t>(j)];
      const cplx den = k * k - r * r;
      if (std::abs(den) <= 1e-14 * (1.0 + std::norm(k) + std::norm(r)))
        throw ResonantParameter("s_matrices: k_i^2 equals rho_j^2");
      const cplx ch = std::cosh(r * halfwidth), sh = std::sinh(r * halfwidth);
      S.even(i, j) = (k * ch + r * sh) / den;
      S.odd(i, j) = (k * sh + r * ch) / den;
    }
  }
  return S;
}

double boundary_residual(cplx z, const RootClass& cls, const CoefficientMatrices& coeffs,
                         const ModelParams& params) {
  const SMatrices Sa = s_matrices(params.a, cls, params);
  const SMatrices Sb = s_matrices(params.b, cls, params);
  const auto m = static_cast<Eigen::Index>(cls.roots.size());
  (void)z;
  double worst = 0.0;
  auto check = [&](const Eigen::MatrixXcd& D, const Eigen::MatrixXcd& S_x, const Eigen::MatrixXcd& S_y) {
    if (D.size() == 0) return;
    if (D.rows() != m || D.cols() != m) throw InvalidArgument("boundary_residual: coefficient matrix has wrong size");
    for (Eigen::Index i = 0; i < m; ++i)
      if (D(i, i) != cplx(0.0)) throw InvalidArgument("boundary_residual: coefficient matrices need a zero diagonal");
    worst = std::max(worst, (S_x * D).cwiseAbs().maxCoeff());
    worst = std::max(worst, (S_y * D.transpose()).cwiseAbs().maxCoeff());
  };
  check(coeffs.ee, Sa.even, Sb.even);
  check(coeffs.eo, Sa.even, Sb.odd);
  check(coeffs.oe, Sa.odd, Sb.even);
  check(coeffs.oo, Sa.odd, Sb.odd);
  return worst;
}

ComplexField assemble_eigenvector(const RootClass& cls, const CoefficientMatrices& coeffs,
                                  std::shared_ptr<const QuadGrid> grid) {
  const auto m = static_cast<Eigen::Index>(cls.roots.size());
  const auto nx = static_cast<Eigen::Index>(grid->nx()), ny = static_cast<Eigen::Index>(grid->ny());
  Eigen::MatrixXcd Cx(nx, m), Sx(nx, m), Cy(ny, m), Sy(ny, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const cplx r = cls.roots[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < nx; ++i) {
      Cx(i, j) = std::cosh(r * grid->x.nodes[static_cast<std::size_t>(i)]);
      Sx(i, j) = std::sinh(r * grid->x.nodes[static_cast<std::size_t>(i)]);
    }
    for (Eigen::Index i = 0; i < ny; ++i) {
      Cy(i, j) = std::cosh(r * grid->y.nodes[static_cast<std::size_t>(i)]);
      Sy(i, j) = std::sinh(r * grid->y.nodes[static_cast<std::size_t>(i)]);
    }
  }
  ComplexField q(grid);
  auto add = [&](const Eigen::MatrixXcd& D, const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& Y) {
    if (D.size() == 0) return;
    q.matrix() += X * D * Y.transpose();
  };
  add(coeffs.ee, Cx, Cy);
  add(coeffs.eo, Cx, Sy);
  add(coeffs.oe, Sx, Cy);
  add(coeffs.oo, Sx, Sy);
  return q;
}

namespace {

cplx boundary_part(cplx k, cplx rho, double half, double x) {
  return std::exp(-k * (half + x)) * (k - rho) * std::exp(-rho * half) +
         std::exp(-k * (half - x)) * (k + rho) * std::exp(rho * half);
}

}  // namespace

cplx boundary_B_exp(cplx z, std::size_t i, cplx rho, cplx nu, Point2 r, const ModelParams& params) {
  const cplx k = term_data(z, i, params).k;
  return boundary_part(k, rho, params.a, r.x) * std::exp(nu * r.y) +
         std::exp(rho * r.x) * boundary_part(k, nu, params.b, r.y);
}

cplx boundary_C_exp(cplx z, std::size_t i, cplx rho, cplx nu, Point2 r, const ModelParams& params) {
  const cplx k = term_data(z, i, params).k;
  return std::exp(k * (params.a + params.b)) * boundary_part(k, rho, params.a, r.x) *
         boundary_part(k, nu, params.b, r.y);
}

namespace {

// Column of the S-matrix as a function of s = rho^2; even in rho, so the
// branch of the square root does not matter. Odd columns are divided by rho.
cplx s_column(cplx k, cplx s, double half, Parity parity) {
  const cplx r = std::sqrt(s);
  const cplx den = k * k - s;
  if (parity == Parity::Even) return (k * std::cosh(r * half) + r * std::sinh(r * half)) / den;
  return (k * half * sinhc(r * half) + std::cosh(r * half)) / den;
}

Eigen::MatrixXcd scaled_s_matrix(cplx z, cplx nu, const std::vector<cplx>& s, const ModelParams& params,
                                 Parity parity) {
  const auto terms = all_term_data(z, params);
  Eigen::MatrixXcd S(2, 3);
  for (Eigen::Index i = 0; i < 2; ++i) {
    const cplx k = terms[static_cast<std::size_t>(i)].k;
    S(i, 0) = s_column(k, s[0], params.a, parity);
    S(i, 1) = s_column(k, s[1], params.a, parity);
    S(i, 2) = s_column(k, nu * nu, params.a, parity);
  }
  return S;
}

double max_minor(const Eigen::MatrixXcd& S) {
  double worst = 0.0;
  for (Eigen::Index p = 0; p < S.cols(); ++p)
    for (Eigen::Index q = p + 1; q < S.cols(); ++q)
      worst = std::max(worst, std::abs(S(0, p) * S(1, q) - S(0, q) * S(1, p)));
  return worst;
}

}  // namespace

SquareSearchResult square_n2_search(const ModelParams& params, cplx nu_seed, cplx z_seed, Parity parity,
                                    const NewtonSettings& settings) {
  if (params.num_terms() != 2) throw InvalidArgument("square_n2_search needs exactly two kernel terms");
  if (std::abs(params.a - params.b) > 1e-12 * params.a) throw InvalidArgument("square_n2_search needs a = b");

  auto roots_s = [&](cplx z, cplx nu) {
    const std::vector<cplx> s = poly_roots(rho2_polynomial(z, nu, params));
    if (s.size() != 2) throw DegenerateClass("square_n2_search: P_z(., nu) is not quadratic in rho^2");
    return s;
  };

  // Seed eta from the smallest left singular vector: eta^T S ~ 0.
  const std::vector<cplx> s0 = roots_s(z_seed, nu_seed);
  const Eigen::MatrixXcd S0 = scaled_s_matrix(z_seed, nu_seed, s0, params, parity);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S0, Eigen::ComputeFullU);
  Eigen::Vector2cd eta = svd.matrixU().col(1).conjugate();
  eta /= std::sqrt(eta[0] * eta[0] + eta[1] * eta[1]);
  const double scale = std::max(S0.cwiseAbs().maxCoeff(), 1e-300);

  // Symmetric in the two roots of the quadratic, so independent of their order.
  const ResidualMap F = [&](const Eigen::VectorXcd& v) {
    const cplx nu = v[0], z = v[1];
    const std::vector<cplx> s = roots_s(z, nu);
    const Eigen::MatrixXcd S = scaled_s_matrix(z, nu, s, params, parity);
    const Eigen::RowVectorXcd E = v[2] * S.row(0) + v[3] * S.row(1);
    Eigen::VectorXcd r(4);
    r[0] = (E[0] + E[1]) / scale;
    r[1] = (E[0] - E[1]) / (s[0] - s[1]) / scale;
    r[2] = E[2] / scale;
    r[3] = v[2] * v[2] + v[3] * v[3] - 1.0;
    return r;
  };

  Eigen::VectorXcd x0(4);
  x0 << nu_seed, z_seed, eta[0], eta[1];
  NewtonReport rep;
  const Eigen::VectorXcd x = complex_newton(F, x0, settings, &rep);

  SquareSearchResult out;
  out.nu = x[0];
  out.z = x[1];
  out.parity = parity;
  out.newton_residual = rep.residual;
  out.iterations = rep.iterations;

  const std::vector<cplx> s = roots_s(out.z, out.nu);
  std::vector<cplx> squares = {s[0], s[1], out.nu * out.nu};
  check_class_separation(squares, all_term_data(out.z, params), 1e-6);
  if (resonance_check(out.z, params)) throw DegenerateClass("square_n2_search: converged into the resonance set");
  out.cls = RootClass{out.z, out.nu, {canonical_root(std::sqrt(s[0])), canonical_root(std::sqrt(s[1])), out.nu}};

  const Eigen::MatrixXcd S = scaled_s_matrix(out.z, out.nu, s, params, parity);
  const double s_scale = std::max(S.cwiseAbs().maxCoeff(), 1e-300);
  out.rank_minor = max_minor(S) / (s_scale * s_scale);

  // Antisymmetric D with S_row . D = 0; rank one makes the other row vanish too.
  const Eigen::Index row = S.row(0).norm() >= S.row(1).norm() ? 0 : 1;
  const cplx s1 = S(row, 0), s2 = S(row, 1), s3 = S(row, 2);
  Eigen::Matrix3cd D;
  D << 0.0, -s3, s2, s3, 0.0, -s1, -s2, s1, 0.0;
  if (parity == Parity::Odd) {
    const Eigen::Vector3cd inv(1.0 / out.cls.roots[0], 1.0 / out.cls.roots[1], 1.0 / out.cls.roots[2]);
    D = inv.asDiagonal() * D * inv.asDiagonal();
  }
  D /= D.cwiseAbs().maxCoeff();
  out.D = D;

  CoefficientMatrices coeffs;
  (parity == Parity::Even ? coeffs.ee : coeffs.oo) = out.D;
  const SMatrices Sa = s_matrices(params.a, out.cls, params);
  const double ref = (parity == Parity::Even ? Sa.even : Sa.odd).cwiseAbs().maxCoeff();
  out.boundary_residual = boundary_residual(out.z, out.cls, coeffs, params) / std::max(ref, 1e-300);
  if (out.boundary_residual > 1e-8) {
    std::ostringstream os;
    os << "square_n2_search: coefficient matrix leaves boundary residual " << out.boundary_residual;
    throw RankConditionFailed(os.str());
  }
  return out;
}

SquareScanReport square_n2_scan(const ModelParams& params, Parity parity, std::size_t n_seeds, unsigned rng_seed) {
  std::mt19937 rng(rng_seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), nu_im(0.0, 6.0), z_re(-3.0, 1.0), z_im(0.0, 5.0);
  SquareScanReport rep;
  NewtonSettings settings;
  settings.max_iter = 40;
  for (std::size_t t = 0; t < n_seeds; ++t) {
    const cplx nu(unit(rng), nu_im(rng));
    const cplx z(z_re(rng), z_im(rng));
    ++rep.seeds_tried;
    try {
      SquareSearchResult r = square_n2_search(params, nu, z, parity, settings);
      if (std::abs(r.z) > 20.0) continue;
      const bool seen = std::any_of(rep.solutions.begin(), rep.solutions.end(),
                                    [&](const SquareSearchResult& o) { return std::abs(o.z - r.z) <= 1e-6; });
      if (!seen) rep.solutions.push_back(std::move(r));
    } catch (const Error&) {
      ++rep.failures;
    }
  }
  return rep;
}

}  // namespace nfield
