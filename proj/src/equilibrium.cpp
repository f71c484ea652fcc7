#include "gridstab/equilibrium.hpp"

#include <cmath>
#include <numbers>

namespace gridstab {

namespace {

// Specified injections: Pm at generators, -Pd at loads.
Eigen::VectorXd specified_injection(const NetworkCase& net) {
  Eigen::VectorXd p(net.size());
  for (int i = 0; i < net.size(); ++i) {
    p[i] = net.is_generator(i) ? net.buses[i].mech_power : -net.load_p(i);
  }
  return p;
}

// dPe/ddelta, also assembled by linearization::flow_jacobian; kept local
// so the solver does not depend on that module.
Eigen::MatrixXd injection_jacobian(const NetworkCase& net,
                                   const AdmittanceMatrix& Y,
                                   const Eigen::VectorXd& delta) {
  const int n = net.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    const double vi = net.buses[i].voltage;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double term = -vi * net.buses[j].voltage * Y.magnitude(i, j) *
                          std::sin(Y.angle(i, j) - delta[i] + delta[j]);
      L(i, j) = term;
      diag -= term;
    }
    L(i, i) = diag;
  }
  return L;
}

}  // namespace

Eigen::VectorXd active_power_injection(const NetworkCase& net,
                                       const AdmittanceMatrix& Y,
                                       const Eigen::VectorXd& delta) {
  const int n = net.size();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double vi = net.buses[i].voltage;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (Y.at(i, j) == std::complex<double>(0.0, 0.0)) continue;
      acc += vi * net.buses[j].voltage * Y.magnitude(i, j) *
             std::cos(Y.angle(i, j) - delta[i] + delta[j]);
    }
    p[i] = acc;
  }
  return p;
}

Eigen::VectorXd reactive_power_injection(const NetworkCase& net,
                                         const AdmittanceMatrix& Y,
                                         const Eigen::VectorXd& delta) {
  const int n = net.size();
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double vi = net.buses[i].voltage;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (Y.at(i, j) == std::complex<double>(0.0, 0.0)) continue;
      acc -= vi * net.buses[j].voltage * Y.magnitude(i, j) *
             std::sin(Y.angle(i, j) - delta[i] + delta[j]);
    }
    q[i] = acc;
  }
  return q;
}

EquilibriumPoint solve_equilibrium(const NetworkCase& net,
                                   const AdmittanceMatrix& Y,
                                   const Eigen::VectorXd& init,
                                   const SolveOptions& opts) {
  const int n = net.size();
  const int ref = opts.reference_bus;
  if (ref < 0 || ref >= n) {
    throw PowerFlowError("reference bus index out of range");
  }
  if (init.size() != n || !init.allFinite()) {
    throw PowerFlowError("initial angle guess must be finite with n entries");
  }
  const Eigen::VectorXd p_spec = specified_injection(net);

  // work in referenced angles: delta[ref] pinned to 0
  Eigen::VectorXd delta = init;
  delta.array() -= init[ref];

  auto reduced = [&](const Eigen::VectorXd& full) {
    Eigen::VectorXd r(n - 1);
    int k = 0;
    for (int i = 0; i < n; ++i) {
      if (i != ref) r[k++] = full[i];
    }
    return r;
  };

  double residual = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter <= opts.max_iter; ++iter) {
    const Eigen::VectorXd mismatch =
        reduced(p_spec - active_power_injection(net, Y, delta));
    residual = mismatch.lpNorm<Eigen::Infinity>();
    if (residual <= opts.tol) break;
    if (iter == opts.max_iter) break;
    if (!mismatch.allFinite()) {
      throw PowerFlowError("power flow diverged: nonfinite mismatch");
    }
    const Eigen::MatrixXd L = injection_jacobian(net, Y, delta);
    Eigen::MatrixXd J(n - 1, n - 1);
    int r = 0;
    for (int i = 0; i < n; ++i) {
      if (i == ref) continue;
      int c = 0;
      for (int j = 0; j < n; ++j) {
        if (j == ref) continue;
        J(r, c++) = -L(i, j);
      }
      ++r;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) {
      throw PowerFlowError("singular power-flow Jacobian at iterate " +
                           std::to_string(iter));
    }
    const Eigen::VectorXd step = lu.solve(-mismatch);
    int k = 0;
    for (int i = 0; i < n; ++i) {
      if (i != ref) delta[i] += step[k++];
    }
  }
  if (residual > opts.tol) {
    throw PowerFlowError("power flow did not converge after " +
                         std::to_string(opts.max_iter) +
                         " iterations (residual " + std::to_string(residual) +
                         ")");
  }
  EquilibriumPoint eq;
  eq.delta = delta;
  eq.reference_bus = ref;
  eq.residual_norm = residual;
  eq.iterations = iter;
  eq.slack_injection = active_power_injection(net, Y, delta)[ref];
  return eq;
}

AssumptionReport check_assumption1(const NetworkCase& net,
                                   const AdmittanceMatrix& Y,
                                   const EquilibriumPoint& eq,
                                   std::optional<double> margin, double slack) {
  AssumptionReport report;
  report.margin = margin;
  report.pass = true;
  const Eigen::VectorXd& delta = eq.delta;
  for (const Line& line : net.lines) {
    for (auto [i, j] : {std::pair{line.from, line.to}, {line.to, line.from}}) {
      LineAngle la;
      la.from = i;
      la.to = j;
      la.alpha = Y.angle(i, j) - delta[i] + delta[j];
      if (margin) {
        la.pass = std::abs(delta[i] - delta[j]) < *margin - slack;
      } else {
        la.pass = la.alpha > slack && la.alpha < std::numbers::pi - slack;
      }
      report.pass = report.pass && la.pass;
      report.angles.push_back(la);
    }
  }
  return report;
}

}  // namespace gridstab
