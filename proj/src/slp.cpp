#include "nfield/slp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nfield/errors.hpp"

namespace nfield {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

cplx chi_deriv(cplx mu, cplx k, double a) {
  const double p = kPi / (2.0 * a);
  const cplx s = std::sin(kPi * mu), c = std::cos(kPi * mu);
  return -k * (kPi * kPi / a) * s + (-k * k / (mu * mu) - p * p) * s + (k * k / mu - p * p * mu) * kPi * c;
}

// Newton on chi in the mu-plane; returns false when the iteration wanders off
// or ends on mu = 0.
bool newton_mu(cplx& mu, cplx k, double a) {
  for (int it = 0; it < 80; ++it) {
    if (std::abs(mu) < 1e-10) return false;
    const cplx d = chi_deriv(mu, k, a);
    if (d == cplx(0.0)) return false;
    const cplx step = chi(mu, k, a) / d;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return false;
    mu -= step;
    if (std::abs(mu) > 1e4) return false;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(mu))) break;
  }
  if (std::abs(mu) < 1e-8) return false;
  return std::abs(chi(mu, k, a)) <= 1e-10 * chi_scale(mu, k, a);
}

cplx rho_of_mu(cplx mu, double a) { return canonical_root(kI * kPi * mu / (2.0 * a)); }

bool same_square(cplx r1, cplx r2) {
  const cplx s1 = r1 * r1, s2 = r2 * r2;
  return std::abs(s1 - s2) <= 1e-8 * (1.0 + std::abs(s1) + std::abs(s2));
}

}  // namespace

cplx SlpRoot::mu(double halfwidth) const { return 2.0 * halfwidth * rho / (kI * kPi); }

cplx chi(cplx mu, cplx k, double halfwidth) {
  if (mu == cplx(0.0)) throw InvalidArgument("chi: mu = 0 is handled separately");
  const double a = halfwidth;
  const double p = kPi / (2.0 * a);
  return k * (kPi / a) * std::cos(kPi * mu) + (k * k / mu - p * p * mu) * std::sin(kPi * mu);
}

double chi_scale(cplx mu, cplx k, double halfwidth) {
  const double a = halfwidth;
  const double p = kPi / (2.0 * a);
  const double trig = std::max(std::abs(std::cos(kPi * mu)), std::abs(std::sin(kPi * mu)));
  return (std::abs(k * (kPi / a)) + std::abs(k * k / mu - p * p * mu)) * trig;
}

FG fg_eval(cplx rho, cplx k, double halfwidth) {
  if (rho == cplx(0.0)) throw InvalidArgument("fg_eval: rho = 0");
  const cplx ch = std::cosh(rho * halfwidth), sh = std::sinh(rho * halfwidth);
  return {ch + k / rho * sh, sh + k / rho * ch};
}

std::vector<SlpRoot> slp_roots(cplx k, double a, std::size_t count, SlpDiagnostics* diag) {
  if (count == 0) throw InvalidArgument("slp_roots: count must be at least 1");
  if (!(a > 0.0)) throw InvalidArgument("slp_roots: halfwidth must be positive");

  SlpDiagnostics local;
  SlpDiagnostics& d = diag ? *diag : local;
  d = SlpDiagnostics{};

  std::vector<SlpRoot> roots;
  auto add = [&](cplx rho, Parity parity, double residual) {
    for (const SlpRoot& r : roots) {
      if (same_square(r.rho, rho)) {
        ++d.duplicates;
        return false;
      }
    }
    roots.push_back({rho, parity, 0, residual});
    return true;
  };
  auto add_mu = [&](cplx mu) {
    const cplx rho = rho_of_mu(mu, a);
    const FG fg = fg_eval(rho, k, a);
    const cplx ch = std::cosh(rho * a), sh = std::sinh(rho * a);
    const double scale = (1.0 + std::abs(k / rho)) * (std::abs(ch) + std::abs(sh));
    const double rel_f = std::abs(fg.f) / scale;
    const double rel_g = std::abs(fg.g) / scale;
    if (rel_g <= rel_f) return add(rho, Parity::Even, rel_g);
    return add(rho, Parity::Odd, rel_f);
  };

  // Zero eigenvalue: Neumann (constant) and k = -1/a (linear) cases.
  const double tol0 = 1e-10 * (1.0 + std::abs(k));
  if (std::abs(k) <= tol0) add(0.0, Parity::Even, 0.0);
  if (std::abs(k + 1.0 / a) <= tol0) add(0.0, Parity::Odd, 0.0);

  const int N0 = 4 + static_cast<int>(std::ceil(std::abs(2.0 * a * k / kPi)));
  d.box_halfwidth = N0;
  const double edge = N0 + 0.25;
  const int steps_re = static_cast<int>(std::lround(edge / 0.25));
  for (int ir = 0; ir <= steps_re; ++ir) {
    for (int ii = -steps_re; ii <= steps_re; ++ii) {
      cplx mu(0.25 * ir, 0.25 * ii);
      if (std::abs(mu) < 1e-12) continue;
      if (!newton_mu(mu, k, a)) {
        ++d.failed_seeds;
        continue;
      }
      add_mu(mu);
    }
  }
  for (const SlpRoot& r : roots)
    if (r.mu(a).real() < edge) ++d.near_origin_roots;

  for (int n = N0 + 1; roots.size() < count && n <= N0 + static_cast<int>(count) + 20; ++n) {
    cplx mu(n, 0.0);
    if (!newton_mu(mu, k, a)) {
      ++d.failed_seeds;
      continue;
    }
    add_mu(mu);
  }

  std::stable_sort(roots.begin(), roots.end(), [a](const SlpRoot& l, const SlpRoot& r) {
    return l.mu(a).real() < r.mu(a).real();
  });
  if (roots.size() > count) roots.resize(count);
  for (std::size_t i = 0; i < roots.size(); ++i) roots[i].index = static_cast<int>(i);
  return roots;
}

cplx eigenfunction_raw(const SlpRoot& root, double x) {
  if (root.rho == cplx(0.0)) return root.parity == Parity::Even ? cplx(1.0) : cplx(x);
  return root.parity == Parity::Even ? std::cosh(root.rho * x) : std::sinh(root.rho * x);
}

cplx eigenfunction_raw_deriv(const SlpRoot& root, double x) {
  if (root.rho == cplx(0.0)) return root.parity == Parity::Even ? cplx(0.0) : cplx(1.0);
  return root.parity == Parity::Even ? root.rho * std::sinh(root.rho * x) : root.rho * std::cosh(root.rho * x);
}

double eigenfunction_norm(const SlpRoot& root, double a) {
  if (root.rho == cplx(0.0)) return root.parity == Parity::Even ? std::sqrt(2.0 * a) : std::sqrt(2.0 * a * a * a / 3.0);
  // |cosh(rho x)|^2 = (cosh(2 al x) + cos(2 be x)) / 2, |sinh|^2 with a minus sign.
  const double al = root.rho.real(), be = root.rho.imag();
  const double hyper = std::abs(al) > 1e-12 ? std::sinh(2.0 * al * a) / al : 2.0 * a;
  const double trig = std::abs(be) > 1e-12 ? std::sin(2.0 * be * a) / be : 2.0 * a;
  const double sq = root.parity == Parity::Even ? 0.5 * (hyper + trig) : 0.5 * (hyper - trig);
  return std::sqrt(std::max(sq, 0.0));
}

cplx eigenfunction_eval(const SlpRoot& root, cplx /*k*/, double halfwidth, double x) {
  return eigenfunction_raw(root, x) / eigenfunction_norm(root, halfwidth);
}

cplx eigenfunction_deriv(const SlpRoot& root, cplx /*k*/, double halfwidth, double x) {
  return eigenfunction_raw_deriv(root, x) / eigenfunction_norm(root, halfwidth);
}

Eigen::VectorXcd BasisSet::raw_coefficients(const ComplexField& g) const {
  const auto m = static_cast<Eigen::Index>(transform.fields.size());
  Eigen::VectorXcd beta(m);
  for (Eigen::Index i = 0; i < m; ++i) beta[i] = inner(g, transform.fields[static_cast<std::size_t>(i)]);
  const Eigen::VectorXcd kept = transform.R.triangularView<Eigen::Upper>().solve(beta);
  Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(raw.size()));
  for (Eigen::Index i = 0; i < m; ++i) xi[static_cast<Eigen::Index>(transform.kept[static_cast<std::size_t>(i)])] = kept[i];
  return xi;
}

BasisSet basis_build(cplx z, const ModelParams& params, std::size_t n_x, std::size_t n_y,
                     std::shared_ptr<const QuadGrid> grid) {
  if (params.num_terms() != 1) throw InvalidArgument("basis_build supports a single kernel term");
  if (n_x == 0 || n_y == 0) throw InvalidArgument("basis_build: need at least one mode per axis");
  BasisSet B;
  B.z = z;
  B.k = term_data(z, 0, params).k;
  B.x_roots = slp_roots(B.k, params.a, n_x);
  B.y_roots = (params.a == params.b && n_x == n_y) ? B.x_roots : slp_roots(B.k, params.b, n_y);
  if (B.x_roots.size() < n_x || B.y_roots.size() < n_y)
    throw NonConvergence("basis_build: fewer Sturm-Liouville roots than requested");

  const cplx k2 = B.k * B.k;
  auto guard = [&](const SlpRoot& r) {
    const cplx r2 = r.rho * r.rho;
    if (std::abs(k2 - r2) <= 1e-8 * (std::abs(k2) + std::abs(r2)) || std::abs(k2) == 0.0)
      throw ResonantTruncation("basis_build: k(z)^2 coincides with a separation constant");
  };
  for (const auto& r : B.x_roots) guard(r);
  for (const auto& r : B.y_roots) guard(r);

  std::vector<Eigen::VectorXcd> phi, psi;
  for (const auto& r : B.x_roots) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(grid->nx()));
    for (std::size_t i = 0; i < grid->nx(); ++i)
      v[static_cast<Eigen::Index>(i)] = eigenfunction_eval(r, B.k, params.a, grid->x.nodes[i]);
    phi.push_back(std::move(v));
  }
  for (const auto& r : B.y_roots) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(grid->ny()));
    for (std::size_t j = 0; j < grid->ny(); ++j)
      v[static_cast<Eigen::Index>(j)] = eigenfunction_eval(r, B.k, params.b, grid->y.nodes[j]);
    psi.push_back(std::move(v));
  }
  for (std::size_t m = 0; m < n_x; ++m) {
    for (std::size_t n = 0; n < n_y; ++n) {
      ComplexField f(grid);
      f.matrix() = phi[m] * psi[n].transpose();
      B.raw.push_back(std::move(f));
      B.raw_m.push_back(m);
      B.raw_n.push_back(n);
    }
  }
  B.transform = gram_schmidt(B.raw);
  return B;
}

}  // namespace nfield
