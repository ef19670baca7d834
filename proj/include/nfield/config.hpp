#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nfield/model.hpp"
#include "nfield/spectrum.hpp"

namespace nfield {

struct SpectrumSection {
  Window window;
  std::size_t n_seeds = 12;
  int mode_lo = 0;
  int mode_hi = 2;
  std::vector<ScanSeed> seeds;
  bool operator==(const SpectrumSection& o) const;
};

struct HopfSection {
  double lo = -4.0;
  double hi = -2.5;
  Parity parity_x = Parity::Even;
  Parity parity_y = Parity::Even;
  double step = 0.05;
  bool operator==(const HopfSection&) const = default;
};

struct LyapunovSection {
  double epsilon = 0.01;
  std::size_t n_z = 32;
  std::size_t n_x = 3;
  std::size_t n_y = 3;
  bool operator==(const LyapunovSection&) const = default;
};

struct SimulateSection {
  std::size_t n_grid = 16;
  double dt = 0.05;
  double t_end = 150.0;
  std::string history = "eigenmode";  // zero | constant | eigenmode
  double amplitude = 0.01;
  std::vector<Point2> probes{{0.0, 0.0}};
  std::size_t snapshot_stride = 0;
  // Amplitudes for the stable and oscillating runs of reproduce-paper.
  std::vector<double> c_hat_runs{-0.5, -4.0};
  bool operator==(const SimulateSection&) const = default;
};

struct QuadratureSection {
  std::size_t operator_nodes = 32;
  std::size_t check_nodes = 64;
  bool operator==(const QuadratureSection&) const = default;
};

struct RunConfig {
  ModelParams model = reference_params();
  SpectrumSection spectrum;
  HopfSection hopf;
  LyapunovSection lyapunov;
  SimulateSection simulate;
  QuadratureSection quadrature;
  std::string output_dir;
  bool operator==(const RunConfig&) const = default;
};

void to_json(nlohmann::json& j, const RunConfig& cfg);
/// Missing sections keep their defaults; `model` is required.
void from_json(const nlohmann::json& j, RunConfig& cfg);

/// Parses JSON text; syntax errors become ConfigError with line and column.
RunConfig parse_run_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_run_config(const std::string& path);

}  // namespace nfield
