#pragma once

#include <complex>
#include <vector>

#include <json.hpp>

namespace nfield {

using cplx = std::complex<double>;

/// A point r = (x, y) of the rectangle [-a,a] x [-b,b].
struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

/// One term c_hat * exp(-xi * |r - r'|_1) of the connectivity kernel.
struct KernelTerm {
  cplx c_hat;
  cplx xi;
  bool operator==(const KernelTerm&) const = default;
};

/// Constants of the single-population delayed neural field
///
///   dV/dt = -alpha V + int J(r,r') S(V(t - tau(r,r'), r')) dr'
///
/// on the rectangle [-a,a] x [-b,b], with J a sum of L1-exponentials and
/// tau(r,r') = tau0 + |r - r'|_1.
struct ModelParams {
  double alpha = 1.0;
  double tau0 = 1.0;
  double gamma = 4.0;
  double a = 1.0;
  double b = 1.0;
  std::vector<KernelTerm> terms;

  bool operator==(const ModelParams&) const = default;

  std::size_t num_terms() const { return terms.size(); }

  /// Largest transmission delay tau0 + 2a + 2b.
  double tau_max() const { return tau0 + 2.0 * a + 2.0 * b; }

  /// Throws ConfigError when a positivity constraint fails or the kernel is
  /// not real-valued on a sample grid.
  void validate() const;
};

/// Reference configuration: alpha = tau0 = 1, xi = 2, gamma = 4, a = b = 1.
ModelParams reference_params(double c_hat = -3.27);

/// Copy of `params` with the amplitude of term `index` replaced.
ModelParams with_c_hat(ModelParams params, cplx c_hat, std::size_t index = 0);

// Sigmoidal firing rate S(u) = 1/(1 + exp(-gamma u)) - 1/2.
double firing_rate(double u, double gamma);

// Closed-form derivatives of S at the origin.
inline double firing_rate_d1(double gamma) { return gamma / 4.0; }
inline double firing_rate_d2(double /*gamma*/) { return 0.0; }
inline double firing_rate_d3(double gamma) { return -gamma * gamma * gamma / 8.0; }

inline double l1_distance(Point2 r, Point2 rp) {
  return std::abs(r.x - rp.x) + std::abs(r.y - rp.y);
}

cplx kernel_eval(Point2 r, Point2 rp, const ModelParams& params);
double delay_eval(Point2 r, Point2 rp, const ModelParams& params);

void to_json(nlohmann::json& j, const ModelParams& params);
void from_json(const nlohmann::json& j, ModelParams& params);

}  // namespace nfield
