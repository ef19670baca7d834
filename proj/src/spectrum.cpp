#include "nfield/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "nfield/errors.hpp"
#include "nfield/parallel.hpp"

namespace nfield {

namespace {

cplx sinhc_times(cplx rho, double h) {
  const cplx w = rho * h;
  if (std::abs(w) < 1e-4) return h * (1.0 + w * w / 6.0);
  return std::sinh(w) / rho;
}

// Even: k cosh(rho h) + rho sinh(rho h). Odd: k sinh(rho h)/rho + cosh(rho h).
cplx parity_condition(cplx k, cplx rho, double h, Parity parity) {
  if (parity == Parity::Even) return k * std::cosh(rho * h) + rho * std::sinh(rho * h);
  return k * sinhc_times(rho, h) + std::cosh(rho * h);
}

double parity_condition_scale(cplx k, cplx rho, double h, Parity parity) {
  if (parity == Parity::Even) return std::abs(k * std::cosh(rho * h)) + std::abs(rho * std::sinh(rho * h));
  return std::abs(k * sinhc_times(rho, h)) + std::abs(std::cosh(rho * h));
}

void require_single_term(const ModelParams& params, const char* what) {
  if (params.num_terms() != 1) throw InvalidArgument(std::string(what) + " supports a single kernel term");
}

}  // namespace

double parity_condition_residual(cplx k, cplx rho, double halfwidth, Parity parity) {
  return std::abs(parity_condition(k, rho, halfwidth, parity)) /
         std::max(parity_condition_scale(k, rho, halfwidth, parity), 1e-300);
}

EigenPair eigen_solve(const ModelParams& params, Parity parity_x, Parity parity_y, cplx z_seed, cplx rho_seed,
                      cplx nu_seed, const EigenSolveOptions& options) {
  require_single_term(params, "eigen_solve");

  const double sP = std::max(char_poly_scale(z_seed, rho_seed, nu_seed, params), 1e-300);
  const cplx k0 = term_data(z_seed, 0, params).k;
  const double sx = std::max(parity_condition_scale(k0, rho_seed, params.a, parity_x), 1e-300);
  const double sy = std::max(parity_condition_scale(k0, nu_seed, params.b, parity_y), 1e-300);

  const ResidualMap F = [&](const Eigen::VectorXcd& v) {
    const cplx z = v[0], rho = v[1], nu = v[2];
    const cplx k = term_data(z, 0, params).k;
    Eigen::VectorXcd r(3);
    r[0] = char_poly(z, rho, nu, params) / sP;
    r[1] = parity_condition(k, rho, params.a, parity_x) / sx;
    r[2] = parity_condition(k, nu, params.b, parity_y) / sy;
    return r;
  };
  Eigen::VectorXcd x0(3);
  x0 << z_seed, rho_seed, nu_seed;
  NewtonReport rep;
  const Eigen::VectorXcd x = complex_newton(F, x0, options.newton, &rep);

  EigenPair p;
  p.z = x[0];
  p.rho = canonical_root(x[1]);
  p.nu = canonical_root(x[2]);
  p.parity_x = parity_x;
  p.parity_y = parity_y;
  p.residual_newton = rep.residual;
  if (resonance_check(p.z, params)) throw ResonantSolution("eigen_solve: converged into the resonance set");

  const cplx k = term_data(p.z, 0, params).k;
  p.residual_poly = std::abs(char_poly(p.z, p.rho, p.nu, params)) /
                    std::max(char_poly_scale(p.z, p.rho, p.nu, params), 1e-300);
  p.residual_bc_x = parity_condition_residual(k, p.rho, params.a, parity_x);
  p.residual_bc_y = parity_condition_residual(k, p.nu, params.b, parity_y);
  if (options.evaluate_delta) p.residual_delta = eigen_residual_delta(p, params, options.delta_nodes);
  return p;
}

ComplexField eigenfunction_field(const EigenPair& pair, std::shared_ptr<const QuadGrid> grid) {
  auto factor = [](cplx r, Parity parity, double s) -> cplx {
    if (parity == Parity::Even) return std::cosh(r * s);
    return r == cplx(0.0) ? cplx(s) : std::sinh(r * s);
  };
  return ComplexField::sample(grid, [&](double x, double y) {
    return factor(pair.rho, pair.parity_x, x) * factor(pair.nu, pair.parity_y, y);
  });
}

double eigen_residual_delta(const EigenPair& pair, const ModelParams& params, std::size_t nodes) {
  auto grid = std::make_shared<const QuadGrid>(QuadGrid::rectangle(params.a, params.b, nodes, nodes));
  const ComplexField q = eigenfunction_field(pair, grid);
  return norm(apply_delta(pair.z, q, params)) / norm(q);
}

SpectrumReport spectrum_scan(const ModelParams& params, const Window& window, const ScanSettings& settings) {
  require_single_term(params, "spectrum_scan");
  if (settings.n_seeds < 1 || settings.mode_lo < 0 || settings.mode_hi < settings.mode_lo)
    throw InvalidArgument("spectrum_scan: invalid seed settings");

  struct Job {
    ScanSeed seed;
    Parity px, py;
  };
  std::vector<Job> jobs;
  const std::size_t ns = settings.n_seeds;
  const auto modes = static_cast<std::size_t>(settings.mode_hi) + 1;
  for (std::size_t iy = 0; iy < ns; ++iy) {
    for (std::size_t ix = 0; ix < ns; ++ix) {
      const double fx = ns == 1 ? 0.5 : static_cast<double>(ix) / static_cast<double>(ns - 1);
      const double fy = ns == 1 ? 0.5 : static_cast<double>(iy) / static_cast<double>(ns - 1);
      const cplx z(window.re_lo + fx * (window.re_hi - window.re_lo), window.im_lo + fy * (window.im_hi - window.im_lo));
      const cplx k = term_data(z, 0, params).k;
      if (std::abs(k) < 1e-6) continue;
      std::vector<SlpRoot> rx, ry;
      try {
        rx = slp_roots(k, params.a, modes);
        ry = params.a == params.b ? rx : slp_roots(k, params.b, modes);
      } catch (const Error&) {
        continue;
      }
      for (int m = settings.mode_lo; m <= settings.mode_hi && m < static_cast<int>(rx.size()); ++m)
        for (int n = settings.mode_lo; n <= settings.mode_hi && n < static_cast<int>(ry.size()); ++n)
          for (Parity px : settings.parities_x)
            for (Parity py : settings.parities_y)
              jobs.push_back({{z, rx[static_cast<std::size_t>(m)].rho, ry[static_cast<std::size_t>(n)].rho}, px, py});
    }
  }
  for (const ScanSeed& s : settings.extra_seeds)
    for (Parity px : settings.parities_x)
      for (Parity py : settings.parities_y) jobs.push_back({s, px, py});

  std::vector<std::optional<EigenPair>> results(jobs.size());
  EigenSolveOptions opts;
  opts.evaluate_delta = false;
  opts.newton.max_iter = 40;
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    try {
      results[j] = eigen_solve(params, job.px, job.py, job.seed.z, job.seed.rho, job.seed.nu, opts);
    } catch (const Error&) {
      // counted below
    }
  });

  SpectrumReport rep;
  rep.window = window;
  rep.seeds_used = jobs.size();
  for (const auto& r : results) {
    if (!r) {
      ++rep.failed;
      continue;
    }
    ++rep.converged;
    if (!window.contains(r->z)) continue;
    const bool dup = std::any_of(rep.eigenpairs.begin(), rep.eigenpairs.end(), [&](const EigenPair& e) {
      return std::abs(e.z - r->z) <= settings.dedupe_tol * (1.0 + std::abs(r->z));
    });
    if (!dup) rep.eigenpairs.push_back(*r);
  }

  rep.essential_point = -params.alpha;
  const cplx xi = params.terms[0].xi;
  const cplx c_minus_xi = term_data(-xi, 0, params).c;
  rep.minus_xi_value = xi - params.alpha + 4.0 * params.a * params.b * c_minus_xi;
  const double scale = std::abs(xi) + params.alpha + std::abs(4.0 * params.a * params.b * c_minus_xi);
  rep.minus_xi_eigenvalue = std::abs(rep.minus_xi_value) <= 1e-9 * scale;
  if (rep.minus_xi_eigenvalue && window.contains(-xi)) {
    EigenPair p;
    p.z = -xi;
    p.rho = 0.0;
    p.nu = 0.0;
    p.residual_poly = 0.0;
    rep.eigenpairs.push_back(p);
  }

  if (settings.evaluate_delta) {
    parallel_for(rep.eigenpairs.size(), [&](std::size_t i) {
      rep.eigenpairs[i].residual_delta = eigen_residual_delta(rep.eigenpairs[i], params, 32);
    });
  }
  std::sort(rep.eigenpairs.begin(), rep.eigenpairs.end(), [](const EigenPair& l, const EigenPair& r) {
    if (l.z.real() != r.z.real()) return l.z.real() > r.z.real();
    return l.z.imag() > r.z.imag();
  });
  return rep;
}

const char* to_string(ZKind kind) {
  switch (kind) {
    case ZKind::Essential: return "Essential";
    case ZKind::Eigenvalue: return "Eigenvalue";
    case ZKind::Resolvent: return "Resolvent";
    case ZKind::Resonant: return "Resonant";
  }
  return "?";
}

Classification classify(cplx z, const ModelParams& params, std::size_t n_x, std::size_t n_y,
                        const ClassifyOptions& options) {
  require_single_term(params, "classify");
  Classification out;
  if (std::abs(z + params.alpha) <= options.tol * (1.0 + std::abs(z))) {
    out.kind = ZKind::Essential;
    return out;
  }
  const cplx k = term_data(z, 0, params).k;
  if (std::abs(k) <= options.tol * (1.0 + std::abs(z))) {
    out.kind = ZKind::Resonant;
    const cplx xi = params.terms[0].xi;
    const cplx c = term_data(-xi, 0, params).c;
    const cplx v = xi - params.alpha + 4.0 * params.a * params.b * c;
    out.constant_mode = std::abs(v) <= 1e-9 * (std::abs(xi) + params.alpha + std::abs(4.0 * params.a * params.b * c));
    return out;
  }

  const auto rx = slp_roots(k, params.a, n_x);
  const auto ry = params.a == params.b && n_x == n_y ? rx : slp_roots(k, params.b, n_y);
  double best = std::numeric_limits<double>::infinity();
  const SlpRoot* bx = nullptr;
  const SlpRoot* by = nullptr;
  for (const auto& r : rx) {
    for (const auto& s : ry) {
      const double rel = std::abs(char_poly(z, r.rho, s.rho, params)) /
                         std::max(char_poly_scale(z, r.rho, s.rho, params), 1e-300);
      if (rel < best) {
        best = rel;
        bx = &r;
        by = &s;
      }
    }
  }
  out.margin = best;
  out.kind = ZKind::Resolvent;
  if (bx && best <= options.screen) {
    const double snap = options.snap_radius >= 0.0 ? options.snap_radius : 2e-3 * (1.0 + std::abs(z));
    try {
      EigenPair p = eigen_solve(params, bx->parity, by->parity, z, bx->rho, by->rho);
      if (std::abs(p.z - z) <= snap) {
        out.kind = ZKind::Eigenvalue;
        out.eigenpair = p;
      }
    } catch (const Error&) {
      // no eigenvalue nearby; stays Resolvent with the recorded margin
    }
  }
  return out;
}

ComplexField resolve(const BasisSet& basis, const ComplexField& g, const ModelParams& params) {
  const cplx z = basis.z;
  const TermData t = term_data(z, 0, params);
  const cplx za = z + params.alpha;
  const Eigen::VectorXcd xi = basis.raw_coefficients(g);
  ComplexField series(g.grid_ptr());
  for (std::size_t r = 0; r < basis.raw.size(); ++r) {
    const cplx rho = basis.raw_rho(r), nu = basis.raw_nu(r);
    const cplx P = char_poly(z, rho, nu, params);
    if (std::abs(P) <= 1e-10 * char_poly_scale(z, rho, nu, params))
      throw EigenvalueHit("resolve: z is an eigenvalue of the truncated problem");
    series += (xi[static_cast<Eigen::Index>(r)] / P) * basis.raw[r];
  }
  return (1.0 / za) * g + (4.0 * t.c * t.k * t.k / za) * series;
}

ComplexField resolve(cplx z, const ComplexField& g, const ModelParams& params, std::size_t n_x, std::size_t n_y) {
  require_single_term(params, "resolve");
  if (std::abs(z + params.alpha) <= 1e-12 * (1.0 + std::abs(z)))
    throw EigenvalueHit("resolve: z lies on the essential spectrum");
  const BasisSet basis = basis_build(z, params, n_x, n_y, g.grid_ptr());
  return resolve(basis, g, params);
}

}  // namespace nfield
