#include "nfield/newton.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nfield/errors.hpp"

namespace nfield {

namespace {

double finite_norm(const Eigen::VectorXcd& v) {
  const double n = v.norm();
  return std::isfinite(n) ? n : std::numeric_limits<double>::infinity();
}

Eigen::MatrixXcd fd_jacobian(const ResidualMap& F, const Eigen::VectorXcd& x, double fd_step) {
  const Eigen::Index d = x.size();
  Eigen::MatrixXcd J(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double h = fd_step * (1.0 + std::abs(x[j]));
    Eigen::VectorXcd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Eigen::VectorXcd fp = F(xp), fm = F(xm);
    if (fp.size() != d) throw InvalidArgument("complex_newton: residual dimension mismatch");
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

}  // namespace

NewtonReport newton_solve(const ResidualMap& F, Eigen::VectorXcd x0, const NewtonSettings& settings) {
  if (!(settings.tol_residual > 0.0) || !(settings.tol_step > 0.0) || !(settings.fd_step > 0.0))
    throw InvalidArgument("NewtonSettings: tolerances must be positive");

  NewtonReport rep;
  rep.x = std::move(x0);
  Eigen::VectorXcd fx = F(rep.x);
  rep.residual = finite_norm(fx);
  rep.history.push_back(rep.residual);

  for (int it = 0; it < settings.max_iter; ++it) {
    if (rep.residual <= settings.tol_residual) {
      rep.status = NewtonStatus::Converged;
      return rep;
    }
    if (!std::isfinite(rep.residual)) break;

    const Eigen::MatrixXcd J = fd_jacobian(F, rep.x, settings.fd_step);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(J);
    const double det = std::abs(lu.determinant());
    if (!(det > 0.0) || !std::isfinite(det)) {
      rep.status = NewtonStatus::SingularJacobian;
      return rep;
    }
    Eigen::VectorXcd dx = lu.solve(-fx);
    if (!dx.allFinite()) {
      rep.status = NewtonStatus::SingularJacobian;
      return rep;
    }

    // Backtrack a few halvings if the full step increases the residual.
    Eigen::VectorXcd x_new = rep.x + dx;
    Eigen::VectorXcd f_new = F(x_new);
    double r_new = finite_norm(f_new);
    for (int h = 0; h < 4 && !(r_new < rep.residual); ++h) {
      dx *= 0.5;
      x_new = rep.x + dx;
      f_new = F(x_new);
      r_new = finite_norm(f_new);
    }

    rep.x = std::move(x_new);
    fx = std::move(f_new);
    rep.residual = r_new;
    rep.iterations = it + 1;
    rep.history.push_back(rep.residual);

    if (rep.residual <= settings.tol_residual) {
      rep.status = NewtonStatus::Converged;
      return rep;
    }
    if (dx.norm() <= settings.tol_step * (1.0 + rep.x.norm())) break;  // stagnated above tolerance
  }
  rep.status = NewtonStatus::NonConvergence;
  return rep;
}

Eigen::VectorXcd complex_newton(const ResidualMap& F, Eigen::VectorXcd x0, const NewtonSettings& settings,
                                NewtonReport* report) {
  NewtonReport rep = newton_solve(F, std::move(x0), settings);
  if (report) *report = rep;
  if (rep.status == NewtonStatus::SingularJacobian)
    throw SingularJacobian("complex_newton: singular Jacobian after " + std::to_string(rep.iterations) +
                           " iterations");
  if (rep.status != NewtonStatus::Converged) {
    std::ostringstream os;
    os << "complex_newton: no convergence after " << rep.iterations << " iterations (residual " << rep.residual
       << ")";
    throw NonConvergence(os.str());
  }
  return rep.x;
}

cplx complex_newton(const std::function<cplx(cplx)>& f, cplx x0, const NewtonSettings& settings,
                    NewtonReport* report) {
  const ResidualMap F = [&f](const Eigen::VectorXcd& x) {
    Eigen::VectorXcd r(1);
    r[0] = f(x[0]);
    return r;
  };
  Eigen::VectorXcd x(1);
  x[0] = x0;
  return complex_newton(F, x, settings, report)[0];
}

}  // namespace nfield
