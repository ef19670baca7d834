#include "nfield/hopf.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nfield/errors.hpp"
#include "nfield/parallel.hpp"

namespace nfield {

ComplexField d3g_apply(const ComplexField& q, cplx z, const ModelParams& params) {
  const cplx lam = 2.0 * z + std::conj(z);
  const ComplexField cubic = hadamard(hadamard(q, q), q.conj());
  ComplexField out(q.grid_ptr());
  const double s3 = firing_rate_d3(params.gamma);
  for (const KernelTerm& t : params.terms)
    out += apply_exp_kernel(cubic, s3 * t.c_hat * std::exp(-lam * params.tau0), t.xi + lam);
  return out;
}

cplx LyapunovResult::field_at(Point2 r) const { return contour_field.value_at(r) / eigenfunction.value_at(r); }

LyapunovResult g21_compute(const EigenPair& pair, const ModelParams& params, const LyapunovSettings& settings) {
  if (!(settings.epsilon > 0.0)) throw InvalidArgument("g21_compute: epsilon must be positive");
  if (settings.n_z < 2) throw InvalidArgument("g21_compute: need at least 2 contour points");
  const double two_pi = 2.0 * std::numbers::pi;
  const cplx I(0.0, 1.0);

  if (settings.check_isolation) {
    ClassifyOptions opts;
    opts.snap_radius = 0.5 * settings.epsilon;
    for (int j = 0; j < 8; ++j) {
      const cplx w = pair.z + settings.epsilon * std::exp(I * (two_pi * j / 8.0));
      const Classification c = classify(w, params, settings.n_x, settings.n_y, opts);
      if (c.kind != ZKind::Resolvent)
        throw ContourHitsEigenvalue(std::string("g21_compute: contour point classified as ") + to_string(c.kind));
    }
  }

  auto grid = std::make_shared<const QuadGrid>(
      QuadGrid::rectangle(params.a, params.b, settings.nodes, settings.nodes));
  const ComplexField q = eigenfunction_field(pair, grid);
  const ComplexField h = d3g_apply(q, pair.z, params);

  std::vector<ComplexField> terms(settings.n_z);
  parallel_for(settings.n_z, [&](std::size_t j) {
    const cplx e = std::exp(I * (two_pi * static_cast<double>(j) / static_cast<double>(settings.n_z)));
    const cplx w = pair.z + settings.epsilon * e;
    try {
      terms[j] = (settings.epsilon * e) * resolve(w, h, params, settings.n_x, settings.n_y);
    } catch (const EigenvalueHit& err) {
      throw ContourHitsEigenvalue(std::string("g21_compute: ") + err.what());
    } catch (const ResonantTruncation& err) {
      throw ContourHitsEigenvalue(std::string("g21_compute: ") + err.what());
    }
  });
  ComplexField acc(grid);
  for (const auto& t : terms) acc += t;
  acc *= 1.0 / static_cast<double>(settings.n_z);

  LyapunovResult out;
  out.z = pair.z;
  out.settings = settings;
  const double qmax = q.max_abs();
  std::vector<cplx> samples;
  for (std::size_t j = 0; j < grid->ny(); ++j) {
    for (std::size_t i = 0; i < grid->nx(); ++i) {
      const double x = grid->x.nodes[i], y = grid->y.nodes[j];
      if (std::abs(x) > settings.interior_fraction * params.a || std::abs(y) > settings.interior_fraction * params.b)
        continue;
      if (std::abs(q(i, j)) < settings.zero_cutoff * qmax) continue;
      samples.push_back(acc(i, j) / q(i, j));
    }
  }
  if (samples.empty()) throw DegenerateEigenfunction("g21_compute: no interior sample points");
  cplx mean = 0.0;
  for (const cplx s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (const cplx s : samples) var += std::norm(s - mean);
  var /= static_cast<double>(samples.size());

  out.g21 = mean;
  // omega = |Im z| so that both members of the conjugate pair give the same l1.
  out.l1 = mean.real() / std::abs(pair.z.imag());
  out.constancy_rel_std = std::sqrt(var) / std::abs(mean);
  out.interior_points = samples.size();
  out.contour_field = std::move(acc);
  out.eigenfunction = q;
  return out;
}

EigenPair default_hopf_seed(const ModelParams& params, Parity px, Parity py, const Window& window) {
  ScanSettings s;
  s.parities_x = {px};
  s.parities_y = {py};
  s.evaluate_delta = false;
  const SpectrumReport rep = spectrum_scan(params, window, s);
  for (const EigenPair& p : rep.eigenpairs)  // ordered by decreasing Re z
    if (p.z.imag() > 1e-8 && p.parity_x == px && p.parity_y == py) return p;
  throw NoCrossing("hopf_find: no oscillatory eigenpair with the requested parities in the seed window");
}

HopfResult hopf_find(const ModelParams& params_template, double lo, double hi, Parity px, Parity py,
                     std::optional<EigenPair> seed, const HopfSettings& settings) {
  if (lo == hi) throw InvalidArgument("hopf_find: empty parameter range");
  auto at = [&](double c) { return with_c_hat(params_template, cplx(c, 0.0), settings.term); };

  EigenSolveOptions opts;
  opts.evaluate_delta = false;
  auto track = [&](double c, const EigenPair& from) {
    return eigen_solve(at(c), px, py, from.z, from.rho, from.nu, opts);
  };

  EigenPair prev = seed ? track(lo, *seed) : default_hopf_seed(at(lo), px, py, settings.seed_window);
  HopfResult out;
  const double dir = hi > lo ? 1.0 : -1.0;
  double c_prev = lo;
  std::optional<EigenPair> next;
  double c_next = lo;
  while (dir * (c_prev - hi) < 0.0) {
    double step = settings.step;
    for (int attempt = 0;; ++attempt) {
      c_next = c_prev + dir * std::min(step, std::abs(hi - c_prev));
      try {
        next = track(c_next, prev);
        if (std::abs(next->z - prev.z) > 0.5 + 0.5 * std::abs(prev.z)) throw LostTracking("jump");
        break;
      } catch (const Error&) {
        if (attempt >= 5) {
          std::ostringstream os;
          os << "hopf_find: continuation failed near c_hat = " << c_prev;
          throw LostTracking(os.str());
        }
        step *= 0.5;
      }
    }
    ++out.continuation_steps;
    if ((prev.z.real() < 0.0) != (next->z.real() < 0.0) || next->z.real() == 0.0) break;
    prev = *next;
    c_prev = c_next;
    next.reset();
  }
  if (!next) throw NoCrossing("hopf_find: Re z does not change sign on the range");

  double a = c_prev, b = c_next;
  EigenPair pa = prev, pb = *next;
  EigenPair mid = std::abs(pa.z.real()) < std::abs(pb.z.real()) ? pa : pb;
  double c_mid = std::abs(pa.z.real()) < std::abs(pb.z.real()) ? a : b;
  for (int it = 0; it < settings.max_bisections && std::abs(mid.z.real()) > settings.re_tol; ++it) {
    c_mid = 0.5 * (a + b);
    try {
      mid = track(c_mid, std::abs(c_mid - a) <= std::abs(c_mid - b) ? pa : pb);
    } catch (const Error& e) {
      throw LostTracking(std::string("hopf_find: bisection lost the eigenpair: ") + e.what());
    }
    if ((mid.z.real() < 0.0) == (pa.z.real() < 0.0)) {
      a = c_mid;
      pa = mid;
    } else {
      b = c_mid;
      pb = mid;
    }
    out.bracket_widths.push_back(std::abs(b - a));
    out.bracket_re.emplace_back(pa.z.real(), pb.z.real());
    if (std::abs(b - a) < 1e-15 * (1.0 + std::abs(a))) break;
  }
  opts.evaluate_delta = true;
  out.eigenpair = eigen_solve(at(c_mid), px, py, mid.z, mid.rho, mid.nu, opts);
  out.c_hat_critical = c_mid;
  out.omega = out.eigenpair.z.imag();
  out.bracket_lo = std::min(a, b);
  out.bracket_hi = std::max(a, b);
  return out;
}

}  // namespace nfield
