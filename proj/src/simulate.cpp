#include "nfield/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nfield/errors.hpp"
#include "nfield/parallel.hpp"

namespace nfield {

void SimConfig::validate(const ModelParams& params) const {
  if (n_grid < 8) throw ConfigError("simulate: n_grid must be at least 8");
  if (!(dt > 0.0)) throw ConfigError("simulate: dt must be positive");
  if (dt > params.tau0) throw ConfigError("simulate: dt must not exceed tau0");
  if (!(t_end > 0.0)) throw ConfigError("simulate: t_end must be positive");
  if (history.kind == HistorySpec::Kind::Eigenmode && !history.mode)
    throw ConfigError("simulate: eigenmode history needs an eigenpair");
  if (history.kind == HistorySpec::Kind::Samples && history.samples.size() != n_grid * n_grid)
    throw ConfigError("simulate: history samples must have n_grid^2 entries");
  for (const Point2& p : probes)
    if (std::abs(p.x) > params.a || std::abs(p.y) > params.b) throw ConfigError("simulate: probe outside the domain");
}

namespace {

Eigen::VectorXd initial_profile(const ModelParams& params, const SimConfig& cfg,
                                const std::shared_ptr<const QuadGrid>& grid) {
  const auto n = static_cast<Eigen::Index>(grid->size());
  switch (cfg.history.kind) {
    case HistorySpec::Kind::Constant:
      return Eigen::VectorXd::Constant(n, cfg.history.value);
    case HistorySpec::Kind::Samples:
      return Eigen::Map<const Eigen::VectorXd>(cfg.history.samples.data(), n);
    case HistorySpec::Kind::Eigenmode: {
      const ComplexField q = eigenfunction_field(*cfg.history.mode, grid);
      (void)params;
      const double m = q.max_abs();
      if (!(m > 0.0)) throw ConfigError("simulate: eigenmode history is identically zero");
      return cfg.history.amplitude * q.values().real() / m;
    }
  }
  return Eigen::VectorXd::Zero(n);
}

}  // namespace

Trajectory simulate(const ModelParams& params, const SimConfig& cfg) {
  cfg.validate(params);
  auto grid = std::make_shared<const QuadGrid>(QuadGrid::rectangle(params.a, params.b, cfg.n_grid, cfg.n_grid));
  const std::size_t P = grid->size();
  const double dt = cfg.dt, alpha = params.alpha;

  // Weighted kernel W_ij = J(r_i, r_j) w_j and delays in units of dt.
  std::vector<Point2> pts(P);
  std::vector<double> w(P);
  for (std::size_t j = 0; j < grid->ny(); ++j)
    for (std::size_t i = 0; i < grid->nx(); ++i) {
      pts[grid->index(i, j)] = {grid->x.nodes[i], grid->y.nodes[j]};
      w[grid->index(i, j)] = grid->weight(i, j);
    }
  std::vector<double> W(P * P), lag(P * P);
  double row_bound = 0.0;
  for (std::size_t i = 0; i < P; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < P; ++j) {
      W[i * P + j] = kernel_eval(pts[i], pts[j], params).real() * w[j];
      lag[i * P + j] = delay_eval(pts[i], pts[j], params) / dt;
      row += std::abs(W[i * P + j]);
    }
    row_bound = std::max(row_bound, row);
  }

  const Eigen::VectorXd V0 = initial_profile(params, cfg, grid);
  Trajectory tr;
  tr.nodes_x = grid->x.nodes;
  tr.nodes_y = grid->y.nodes;
  tr.initial_sup = V0.cwiseAbs().maxCoeff();
  tr.bound = cfg.blowup_bound > 0.0 ? cfg.blowup_bound : 1.01 * (tr.initial_sup + row_bound / (2.0 * alpha)) + 1e-12;

  const auto nsteps = static_cast<std::size_t>(std::ceil(cfg.t_end / dt - 1e-9));
  const auto ring = static_cast<std::size_t>(std::ceil(params.tau_max() / dt)) + 4;
  std::vector<Eigen::VectorXd> Vh(ring, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(P)));
  std::vector<Eigen::VectorXd> dVh(ring, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(P)));
  auto slot = [ring](std::size_t n) { return n % ring; };

  // Delayed synaptic input D_i(t_n + c dt) = sum_j W_ij S(V_j(t_n + c dt - tau_ij)).
  auto delayed_input = [&](std::size_t n, double c, Eigen::VectorXd& out) {
    out.resize(static_cast<Eigen::Index>(P));
    auto rows = [&](std::size_t i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < P; ++j) {
        const double s = static_cast<double>(n) + c - lag[i * P + j];  // delayed time in steps
        double v;
        if (s <= 0.0) {
          v = V0[static_cast<Eigen::Index>(j)];
        } else {
          const double fl = std::floor(s);
          auto m = static_cast<std::size_t>(fl);
          double th = s - fl;
          if (m >= n) {  // only reached for s == n exactly
            m = n - 1;
            th = 1.0;
          }
          const double th2 = th * th, th3 = th2 * th;
          const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + th;
          const double h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
          const auto je = static_cast<Eigen::Index>(j);
          const Eigen::VectorXd& Va = Vh[slot(m)];
          const Eigen::VectorXd& Vb = Vh[slot(m + 1)];
          v = h00 * Va[je] + h01 * Vb[je] + dt * (h10 * dVh[slot(m)][je] + h11 * dVh[slot(m + 1)][je]);
        }
        acc += W[i * P + j] * firing_rate(v, params.gamma);
      }
      out[static_cast<Eigen::Index>(i)] = acc;
    };
    if (thread_count() > 1) {
      parallel_for(P, rows);
    } else {
      for (std::size_t i = 0; i < P; ++i) rows(i);
    }
  };

  // Probe interpolation rows.
  std::vector<Eigen::RowVectorXd> probe_x, probe_y;
  for (const Point2& p : cfg.probes) {
    const double xs[1] = {p.x}, ys[1] = {p.y};
    probe_x.push_back(lagrange_matrix(grid->x, xs).row(0));
    probe_y.push_back(lagrange_matrix(grid->y, ys).row(0));
  }
  tr.probe_series.assign(cfg.probes.size(), {});
  auto record = [&](std::size_t n, const Eigen::VectorXd& V) {
    tr.times.push_back(static_cast<double>(n) * dt);
    const Eigen::Map<const Eigen::MatrixXd> M(V.data(), static_cast<Eigen::Index>(grid->nx()),
                                              static_cast<Eigen::Index>(grid->ny()));
    for (std::size_t p = 0; p < cfg.probes.size(); ++p)
      tr.probe_series[p].push_back((probe_x[p] * M * probe_y[p].transpose())(0, 0));
    const double sup = V.cwiseAbs().maxCoeff();
    tr.sup_norm.push_back(sup);
    if (cfg.snapshot_stride > 0 && n % cfg.snapshot_stride == 0) tr.snapshots.push_back({tr.times.back(), M});
    if (!std::isfinite(sup) || sup > tr.bound) {
      std::ostringstream os;
      os << "simulate: |V| = " << sup << " exceeds the bound " << tr.bound << " at t = " << tr.times.back();
      throw BlowUp(os.str());
    }
  };

  Vh[slot(0)] = V0;
  Eigen::VectorXd D0, Dh, D1;
  delayed_input(0, 0.0, D0);
  dVh[slot(0)] = -alpha * V0 + D0;
  record(0, V0);

  for (std::size_t n = 0; n < nsteps; ++n) {
    const Eigen::VectorXd& V = Vh[slot(n)];
    const Eigen::VectorXd& k1 = dVh[slot(n)];
    delayed_input(n, 0.5, Dh);
    delayed_input(n, 1.0, D1);
    const Eigen::VectorXd k2 = -alpha * (V + 0.5 * dt * k1) + Dh;
    const Eigen::VectorXd k3 = -alpha * (V + 0.5 * dt * k2) + Dh;
    const Eigen::VectorXd k4 = -alpha * (V + dt * k3) + D1;
    Eigen::VectorXd Vn = V + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // D(t_{n+1}) depends only on states up to t_n, so D1 is the next step's k1 input.
    dVh[slot(n + 1)] = -alpha * Vn + D1;
    Vh[slot(n + 1)] = std::move(Vn);
    record(n + 1, Vh[slot(n + 1)]);
  }
  return tr;
}

PeriodEstimate dominant_period(const std::vector<double>& times, const std::vector<double>& series, double t0,
                               double t1) {
  if (times.size() != series.size()) throw InvalidArgument("dominant_period: size mismatch");
  std::vector<double> t, v;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] >= t0 && times[i] <= t1) {
      t.push_back(times[i]);
      v.push_back(series[i]);
    }
  if (t.size() < 3) throw NoOscillation("dominant_period: window holds fewer than 3 samples");
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double spread = 0.0;
  for (double& x : v) {
    x -= mean;
    spread = std::max(spread, std::abs(x));
  }
  std::vector<double> crossings;
  if (spread > 0.0) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i - 1] < 0.0 && v[i] >= 0.0) crossings.push_back(t[i - 1] + (t[i] - t[i - 1]) * (-v[i - 1]) / (v[i] - v[i - 1]));
  }
  if (crossings.size() < 3) throw NoOscillation("dominant_period: fewer than 3 upward zero crossings");
  PeriodEstimate est;
  est.crossings = crossings.size();
  const std::size_t gaps = crossings.size() - 1;
  est.period = (crossings.back() - crossings.front()) / static_cast<double>(gaps);
  double var = 0.0;
  for (std::size_t i = 1; i < crossings.size(); ++i) {
    const double d = crossings[i] - crossings[i - 1] - est.period;
    var += d * d;
  }
  est.spread = std::sqrt(var / static_cast<double>(gaps));
  return est;
}

}  // namespace nfield
