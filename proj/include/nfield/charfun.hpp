#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nfield/field.hpp"
#include "nfield/model.hpp"
#include "nfield/newton.hpp"

namespace nfield {

enum class Parity { Even, Odd };

const char* to_string(Parity p);
Parity parity_from_string(const std::string& s);

/// k_i(z) = z + xi_i and c_i(z) = c_hat_i S'(0) exp(-tau0 z).
struct TermData {
  cplx k;
  cplx c;
};

TermData term_data(cplx z, std::size_t i, const ModelParams& params);
std::vector<TermData> all_term_data(cplx z, const ModelParams& params);

/// c * int exp(-k |r - r'|_1) q(r') dr' at every node of q's grid.
ComplexField apply_exp_kernel(const ComplexField& q, cplx c, cplx k);

/// K(z) q = sum_i c_i(z) int exp(-k_i(z) |r - r'|_1) q(r') dr'.
ComplexField apply_kernel(cplx z, const ComplexField& q, const ModelParams& params);

/// Delta(z) q = (z + alpha) q - K(z) q.
ComplexField apply_delta(cplx z, const ComplexField& q, const ModelParams& params);

/// Characteristic polynomial
///   P_z(rho, nu) = (z+alpha) prod_i (k_i^2-rho^2)(k_i^2-nu^2)
///                  - 4 sum_i c_i k_i^2 prod_{j!=i} (k_j^2-rho^2)(k_j^2-nu^2).
cplx char_poly(cplx z, cplx rho, cplx nu, const ModelParams& params);

/// Magnitude of the two summands of P_z; the reference for relative tolerances.
double char_poly_scale(cplx z, cplx rho, cplx nu, const ModelParams& params);

/// Q_z = P_z / prod_i (k_i^2-rho^2)(k_i^2-nu^2). Throws ResonantParameter when
/// a denominator vanishes.
cplx q_reduced(cplx z, cplx rho, cplx nu, const ModelParams& params);

/// True when z lies in the resonance set: some k_i(z) = 0 or k_i^2 = k_j^2.
bool resonance_check(cplx z, const ModelParams& params, double tol = 1e-9);

/// Representative of a +/- pair with Im >= 0 (Re >= 0 on the real axis).
cplx canonical_root(cplx rho);

struct RootClass {
  cplx z;
  cplx nu_seed;
  // N roots of P_z(., nu) = 0 followed by nu itself.
  std::vector<cplx> roots;
};

/// All rho with P_z(rho, nu) = 0, via the companion matrix of the degree-N
/// polynomial in rho^2, with nu appended. Throws DegenerateClass when two
/// elements share rho^2 or a root coincides with some k_i^2.
RootClass equiv_roots(cplx z, cplx nu, const ModelParams& params);

struct SMatrices {
  Eigen::MatrixXcd even;  // (k_i cosh(rho_j r) + rho_j sinh(rho_j r)) / (k_i^2 - rho_j^2)
  Eigen::MatrixXcd odd;   // (k_i sinh(rho_j r) + rho_j cosh(rho_j r)) / (k_i^2 - rho_j^2)
};

SMatrices s_matrices(double halfwidth, const RootClass& cls, const ModelParams& params);

/// Coefficients of a candidate eigenvector
///   q = sum_ij ee_ij cosh(rho_i x) cosh(rho_j y) + eo_ij cosh(rho_i x) sinh(rho_j y)
///     + oe_ij sinh(rho_i x) cosh(rho_j y) + oo_ij sinh(rho_i x) sinh(rho_j y).
/// Empty matrices count as zero.
struct CoefficientMatrices {
  Eigen::MatrixXcd ee, eo, oe, oo;
};

/// Max-norm of the products of S-matrices and coefficient matrices whose
/// vanishing is the boundary condition for q.
double boundary_residual(cplx z, const RootClass& cls, const CoefficientMatrices& coeffs,
                         const ModelParams& params);

ComplexField assemble_eigenvector(const RootClass& cls, const CoefficientMatrices& coeffs,
                                  std::shared_ptr<const QuadGrid> grid);

/// Boundary terms of term i for q(x, y) = exp(rho x + nu y). With
/// L = (k^2 - d_xx)(k^2 - d_yy) they satisfy
///   (K L - L K) q = -2 c k B q + c exp(-k(a+b)) C q.
cplx boundary_B_exp(cplx z, std::size_t i, cplx rho, cplx nu, Point2 r, const ModelParams& params);
cplx boundary_C_exp(cplx z, std::size_t i, cplx rho, cplx nu, Point2 r, const ModelParams& params);

struct SquareSearchResult {
  cplx z;
  cplx nu;
  Parity parity = Parity::Even;
  RootClass cls;
  Eigen::MatrixXcd D;             // coefficients of the cosh-cosh (even) or sinh-sinh (odd) products
  double newton_residual = 0.0;
  double boundary_residual = 0.0;
  double rank_minor = 0.0;        // max |2x2 minor| of the S-matrix over its scale
  int iterations = 0;
};

/// Two-term kernel on a square: Newton in (nu, z, eta1, eta2) for a left
/// null vector of the S-matrix of the requested parity, followed by the
/// explicit rank-1 construction of the coefficient matrix.
SquareSearchResult square_n2_search(const ModelParams& params, cplx nu_seed, cplx z_seed, Parity parity,
                                    const NewtonSettings& settings = {});

struct SquareScanReport {
  std::vector<SquareSearchResult> solutions;
  std::size_t seeds_tried = 0;
  std::size_t failures = 0;
};

/// Runs square_n2_search from a fixed pseudo-random seed set
/// (nu in [-1,1] x [0,6]i, z in [-3,1] x [0,5]i) and collects distinct solutions.
SquareScanReport square_n2_scan(const ModelParams& params, Parity parity, std::size_t n_seeds = 200,
                                unsigned rng_seed = 1);

}  // namespace nfield
