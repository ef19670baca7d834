#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nfield/model.hpp"
#include "nfield/spectrum.hpp"

namespace nfield {

/// Initial history on [-tau_max, 0]; always constant in time.
struct HistorySpec {
  enum class Kind { Constant, Eigenmode, Samples };
  Kind kind = Kind::Constant;
  double value = 0.0;                 // Constant
  double amplitude = 0.0;             // Eigenmode: amplitude * Re(q) / max|q|
  std::optional<EigenPair> mode;      // Eigenmode
  std::vector<double> samples;        // Samples: one value per grid node, x fastest
};

struct SimConfig {
  std::size_t n_grid = 16;
  double dt = 0.05;
  double t_end = 100.0;
  HistorySpec history;
  std::vector<Point2> probes{{0.0, 0.0}};
  std::size_t snapshot_stride = 0;  // 0 disables snapshots
  double blowup_bound = -1.0;       // negative: derived from the a priori bound

  void validate(const ModelParams& params) const;
};

struct Snapshot {
  double t = 0.0;
  Eigen::MatrixXd values;  // rows x, columns y
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> probe_series;  // [probe][step]
  std::vector<double> sup_norm;
  std::vector<Snapshot> snapshots;
  std::vector<double> nodes_x, nodes_y;
  double initial_sup = 0.0;
  double bound = 0.0;
};

/// Explicit RK4 on the Gauss-Legendre grid. Delayed values come from cubic
/// Hermite interpolation of the stored states and their time derivatives.
Trajectory simulate(const ModelParams& params, const SimConfig& config);

struct PeriodEstimate {
  double period = 0.0;
  double spread = 0.0;  // standard deviation of the crossing spacings
  std::size_t crossings = 0;
};

/// Mean spacing of upward zero crossings of the mean-removed series on [t0, t1].
PeriodEstimate dominant_period(const std::vector<double>& times, const std::vector<double>& series, double t0,
                               double t1);

}  // namespace nfield
