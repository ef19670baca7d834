#pragma once

#include <optional>
#include <vector>

#include "nfield/spectrum.hpp"

namespace nfield {

/// r -> S'''(0) int J(r,r') exp(-(2z + conj z) tau(r,r')) q(r')^2 conj(q(r')) dr'.
ComplexField d3g_apply(const ComplexField& q, cplx z, const ModelParams& params);

struct LyapunovSettings {
  double epsilon = 0.01;
  std::size_t n_z = 32;
  std::size_t n_x = 3;
  std::size_t n_y = 3;
  std::size_t nodes = 32;         // quadrature nodes per axis
  double interior_fraction = 0.8; // sample set |x| <= f a, |y| <= f b
  double zero_cutoff = 0.1;       // ... and |q| >= cutoff max|q|
  bool check_isolation = true;
};

struct LyapunovResult {
  cplx z;
  cplx g21;
  double l1 = 0.0;
  double constancy_rel_std = 0.0;
  std::size_t interior_points = 0;
  LyapunovSettings settings;
  // Contour integral and eigenfunction; their ratio is the g21 field.
  ComplexField contour_field;
  ComplexField eigenfunction;

  /// The g21 field at (x, y) by interpolating numerator and denominator.
  cplx field_at(Point2 r) const;
};

/// Contour integral of Delta(w)^{-1} D3G around the eigenvalue, divided by
/// the eigenfunction and averaged over interior points.
LyapunovResult g21_compute(const EigenPair& pair, const ModelParams& params, const LyapunovSettings& settings = {});

struct HopfSettings {
  double step = 0.05;
  double re_tol = 1e-8;
  int max_bisections = 200;
  std::size_t term = 0;
  Window seed_window{-2.0, 0.5, 0.0, 4.0};
};

struct HopfResult {
  double c_hat_critical = 0.0;
  double omega = 0.0;
  EigenPair eigenpair;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::vector<double> bracket_widths;
  std::vector<std::pair<double, double>> bracket_re;  // Re z at the bracket ends per bisection
  std::size_t continuation_steps = 0;
};

/// Rightmost eigenpair with the requested parities and Im z > 0 at c_hat.
EigenPair default_hopf_seed(const ModelParams& params, Parity px, Parity py, const Window& window);

/// Continues the tracked eigenpair in the (real) amplitude of one kernel term
/// from lo towards hi and bisects the first sign change of Re z.
HopfResult hopf_find(const ModelParams& params_template, double lo, double hi, Parity px, Parity py,
                     std::optional<EigenPair> seed = std::nullopt, const HopfSettings& settings = {});

}  // namespace nfield
