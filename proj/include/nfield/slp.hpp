#pragma once

#include <vector>

#include "nfield/charfun.hpp"
#include "nfield/field.hpp"
#include "nfield/gram_schmidt.hpp"

namespace nfield {

/// Root of the Robin problem phi'' = rho^2 phi, k phi(-a) - phi'(-a) = 0,
/// k phi(a) + phi'(a) = 0. Even roots carry cosh(rho x), odd roots sinh(rho x);
/// rho = 0 stands for the constant (even) or linear (odd) eigenfunction.
struct SlpRoot {
  cplx rho;
  Parity parity = Parity::Even;
  int index = 0;
  // |g| (even) or |f| (odd) over (1 + |k/rho|)(|cosh(rho a)| + |sinh(rho a)|).
  double residual = 0.0;

  /// mu with rho = i pi mu / (2a).
  cplx mu(double halfwidth) const;
};

/// chi(mu) = k (pi/a) cos(pi mu) + (k^2/mu - (pi/2a)^2 mu) sin(pi mu).
cplx chi(cplx mu, cplx k, double halfwidth);

/// (|k pi/a| + |k^2/mu - (pi/2a)^2 mu|) max(|cos(pi mu)|, |sin(pi mu)|).
double chi_scale(cplx mu, cplx k, double halfwidth);

struct FG {
  cplx f;  // cosh(rho a) + (k/rho) sinh(rho a)
  cplx g;  // sinh(rho a) + (k/rho) cosh(rho a)
};

FG fg_eval(cplx rho, cplx k, double halfwidth);

struct SlpDiagnostics {
  int box_halfwidth = 0;              // N0 of the near-origin sweep
  std::size_t near_origin_roots = 0;  // distinct roots with Re mu < N0 + 1/4
  std::size_t failed_seeds = 0;
  std::size_t duplicates = 0;
};

/// First `count` roots ordered by Re mu, one per +/- pair, canonical Im rho >= 0.
/// A sweep over a box of seeds near the origin catches the finitely many
/// roots that are not close to an integer; beyond the box every integer n
/// seeds the root mu_n ~ n.
std::vector<SlpRoot> slp_roots(cplx k, double halfwidth, std::size_t count, SlpDiagnostics* diag = nullptr);

/// cosh/sinh/1/x for the root, without normalization.
cplx eigenfunction_raw(const SlpRoot& root, double x);
cplx eigenfunction_raw_deriv(const SlpRoot& root, double x);

/// Exact L2 norm of eigenfunction_raw on [-a, a].
double eigenfunction_norm(const SlpRoot& root, double halfwidth);

/// Unit-L2 eigenfunction and its derivative.
cplx eigenfunction_eval(const SlpRoot& root, cplx k, double halfwidth, double x);
cplx eigenfunction_deriv(const SlpRoot& root, cplx k, double halfwidth, double x);

/// Products phi_m(x) psi_n(y) of the Robin eigenfunctions at k(z), orthonormalized.
struct BasisSet {
  cplx z;
  cplx k;
  std::vector<SlpRoot> x_roots;
  std::vector<SlpRoot> y_roots;
  // Raw products, index m * n_y + n.
  std::vector<ComplexField> raw;
  std::vector<std::size_t> raw_m, raw_n;
  GramSchmidtResult transform;

  std::size_t size() const { return transform.fields.size(); }
  const ComplexField& field(std::size_t i) const { return transform.fields[i]; }
  cplx raw_rho(std::size_t r) const { return x_roots[raw_m[r]].rho; }
  cplx raw_nu(std::size_t r) const { return y_roots[raw_n[r]].rho; }

  /// Coefficients xi with g ~ sum_r xi_r raw[r] (zero for dropped products).
  Eigen::VectorXcd raw_coefficients(const ComplexField& g) const;
};

/// Throws ResonantTruncation if some k^2 - rho_m^2 or k^2 - nu_n^2 is too small.
BasisSet basis_build(cplx z, const ModelParams& params, std::size_t n_x, std::size_t n_y,
                     std::shared_ptr<const QuadGrid> grid);

}  // namespace nfield
