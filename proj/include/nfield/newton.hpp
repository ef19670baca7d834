#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "nfield/quadrature.hpp"

namespace nfield {

struct NewtonSettings {
  int max_iter = 60;
  double tol_residual = 1e-12;
  double tol_step = 1e-15;
  // Relative step of the central-difference Jacobian: h = fd_step * (1 + |x_j|).
  double fd_step = 1e-6;
};

enum class NewtonStatus { Converged, NonConvergence, SingularJacobian };

struct NewtonReport {
  Eigen::VectorXcd x;
  NewtonStatus status = NewtonStatus::NonConvergence;
  int iterations = 0;
  double residual = 0.0;
  // ||F|| at the seed and after every iteration.
  std::vector<double> history;

  bool converged() const { return status == NewtonStatus::Converged; }
};

using ResidualMap = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

/// Damped Newton iteration on a holomorphic map C^d -> C^d. Never throws on
/// numerical failure; the status says what happened.
NewtonReport newton_solve(const ResidualMap& F, Eigen::VectorXcd x0, const NewtonSettings& settings = {});

/// As newton_solve, but throws NonConvergence or SingularJacobian.
Eigen::VectorXcd complex_newton(const ResidualMap& F, Eigen::VectorXcd x0, const NewtonSettings& settings = {},
                                NewtonReport* report = nullptr);

/// Scalar convenience wrapper.
cplx complex_newton(const std::function<cplx(cplx)>& f, cplx x0, const NewtonSettings& settings = {},
                    NewtonReport* report = nullptr);

}  // namespace nfield
