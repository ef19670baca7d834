#pragma once

#include <optional>
#include <vector>

#include "nfield/charfun.hpp"
#include "nfield/newton.hpp"
#include "nfield/slp.hpp"

namespace nfield {

/// Eigenvalue z with separable eigenfunction X(x) Y(y), where X is cosh(rho x)
/// or sinh(rho x) according to parity_x and likewise Y with nu, b.
struct EigenPair {
  cplx z;
  cplx rho;
  cplx nu;
  Parity parity_x = Parity::Even;
  Parity parity_y = Parity::Even;
  double residual_newton = 0.0;
  double residual_poly = 0.0;  // |P_z(rho, nu)| / char_poly_scale
  double residual_bc_x = 0.0;  // relative boundary-condition residuals
  double residual_bc_y = 0.0;
  double residual_delta = -1.0;  // ||Delta(z) q|| / ||q||; negative when not evaluated
};

struct EigenSolveOptions {
  NewtonSettings newton{60, 1e-13, 1e-15, 1e-6};
  bool evaluate_delta = true;
  std::size_t delta_nodes = 32;
};

/// Newton on [P_z(rho, nu); bc_x(rho, z); bc_y(nu, z)]. Odd conditions are
/// used in the form k sinh(rho a)/rho + cosh(rho a) so rho = 0 is not a root.
EigenPair eigen_solve(const ModelParams& params, Parity parity_x, Parity parity_y, cplx z_seed, cplx rho_seed,
                      cplx nu_seed, const EigenSolveOptions& options = {});

/// Relative boundary residual of the x (halfwidth a) or y (halfwidth b) condition.
double parity_condition_residual(cplx k, cplx rho, double halfwidth, Parity parity);

/// The eigenfunction with its raw cosh/sinh product normalization.
ComplexField eigenfunction_field(const EigenPair& pair, std::shared_ptr<const QuadGrid> grid);

/// ||Delta(z) q|| / ||q|| on an n-node tensor grid.
double eigen_residual_delta(const EigenPair& pair, const ModelParams& params, std::size_t nodes);

struct Window {
  double re_lo = -2.0, re_hi = 0.5;
  double im_lo = -4.0, im_hi = 4.0;
  bool contains(cplx z) const {
    return z.real() >= re_lo && z.real() <= re_hi && z.imag() >= im_lo && z.imag() <= im_hi;
  }
};

struct ScanSeed {
  cplx z, rho, nu;
};

struct ScanSettings {
  std::size_t n_seeds = 12;  // per axis of the z-seed grid
  int mode_lo = 0;
  int mode_hi = 2;
  std::vector<Parity> parities_x{Parity::Even, Parity::Odd};
  std::vector<Parity> parities_y{Parity::Even, Parity::Odd};
  std::vector<ScanSeed> extra_seeds;
  double dedupe_tol = 1e-6;
  bool evaluate_delta = true;
};

struct SpectrumReport {
  std::vector<EigenPair> eigenpairs;  // ordered by decreasing Re z, then Im z
  cplx essential_point;
  cplx minus_xi_value;  // xi - alpha + 4ab c(-xi)
  bool minus_xi_eigenvalue = false;
  Window window;
  std::size_t seeds_used = 0;
  std::size_t converged = 0;
  std::size_t failed = 0;
};

SpectrumReport spectrum_scan(const ModelParams& params, const Window& window, const ScanSettings& settings = {});

enum class ZKind { Essential, Eigenvalue, Resolvent, Resonant };
const char* to_string(ZKind kind);

struct ClassifyOptions {
  double tol = 1e-9;
  double screen = 0.05;      // relative |P_z| below which an eigenvalue is searched for
  double snap_radius = -1.0; // negative: 2e-3 (1 + |z|)
};

struct Classification {
  ZKind kind = ZKind::Resolvent;
  std::optional<EigenPair> eigenpair;
  double margin = 0.0;  // min over the truncation of |P_z(rho_m, nu_n)| / scale
  bool constant_mode = false;  // Resonant case: z = -xi is itself an eigenvalue
};

/// Truncation-limited: only the first n_x by n_y separation constants are tested.
Classification classify(cplx z, const ModelParams& params, std::size_t n_x, std::size_t n_y,
                        const ClassifyOptions& options = {});

/// Delta(z)^{-1} g by the truncated eigenfunction series.
ComplexField resolve(cplx z, const ComplexField& g, const ModelParams& params, std::size_t n_x, std::size_t n_y);
ComplexField resolve(const BasisSet& basis, const ComplexField& g, const ModelParams& params);

}  // namespace nfield
