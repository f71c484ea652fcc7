#include "gridstab/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "gridstab/equilibrium.hpp"
#include "gridstab/linearization.hpp"

namespace gridstab {

Eigen::VectorXd DynamicState::pack() const {
  Eigen::VectorXd x(delta.size() + omega.size());
  x << delta, omega;
  return x;
}

DynamicState DynamicState::unpack(const Eigen::VectorXd& x, int n,
                                  ModelKind model, double eps) {
  DynamicState s;
  s.model = model;
  s.eps = eps;
  s.delta = x.head(n);
  s.omega = x.tail(x.size() - n);
  return s;
}

Eigen::VectorXd rhs_unperturbed(const NetworkCase& net,
                                const AdmittanceMatrix& Y,
                                const Eigen::VectorXd& x) {
  const int n = net.size();
  const int n0 = net.gen_count();
  const Eigen::VectorXd delta = x.head(n);
  const Eigen::VectorXd omega = x.segment(n, n0);
  const Eigen::VectorXd pe = active_power_injection(net, Y, delta);
  Eigen::VectorXd dx(n + n0);
  for (int i = 0; i < n0; ++i) dx[i] = omega[i];
  for (int i = n0; i < n; ++i) dx[i] = (-net.load_p(i) - pe[i]) / net.load_d(i);
  for (int i = 0; i < n0; ++i) {
    dx[n + i] = (-net.gen_d(i) * omega[i] + net.buses[i].mech_power - pe[i]) /
                net.gen_m(i);
  }
  return dx;
}

Eigen::VectorXd rhs_perturbed(const NetworkCase& net,
                              const AdmittanceMatrix& Y,
                              const Eigen::VectorXd& x, double eps) {
  const int n = net.size();
  const int n0 = net.gen_count();
  const Eigen::VectorXd delta = x.head(n);
  const Eigen::VectorXd omega = x.tail(n);
  const Eigen::VectorXd pe = active_power_injection(net, Y, delta);
  Eigen::VectorXd dx(2 * n);
  dx.head(n) = omega;
  for (int i = 0; i < n0; ++i) {
    dx[n + i] = (-net.gen_d(i) * omega[i] + net.buses[i].mech_power - pe[i]) /
                net.gen_m(i);
  }
  for (int i = n0; i < n; ++i) {
    dx[n + i] = (-net.load_d(i) * omega[i] - net.load_p(i) - pe[i]) / eps;
  }
  return dx;
}

Eigen::MatrixXd rhs_unperturbed_jacobian(const NetworkCase& net,
                                         const AdmittanceMatrix& Y,
                                         const Eigen::VectorXd& x) {
  const Eigen::MatrixXd L = flow_jacobian(net, Y, x.head(net.size()));
  return system_jacobian(L, net, ModelKind::Unperturbed).A;
}

Eigen::MatrixXd rhs_perturbed_jacobian(const NetworkCase& net,
                                       const AdmittanceMatrix& Y,
                                       const Eigen::VectorXd& x, double eps) {
  const Eigen::MatrixXd L = flow_jacobian(net, Y, x.head(net.size()));
  return system_jacobian(L, net, ModelKind::Perturbed, eps).A;
}

Trajectory simulate(const NetworkCase& net, const AdmittanceMatrix& Y,
                    const Eigen::VectorXd& x0, const SimOptions& opts,
                    ModelKind model, double eps) {
  const int n = net.size();
  const int n0 = net.gen_count();
  if (opts.horizon <= 0.0 || opts.rtol <= 0.0 || opts.atol <= 0.0) {
    throw IntegrationError("horizon and tolerances must be positive");
  }
  const int expected =
      model == ModelKind::Unperturbed ? n + n0 : 2 * n;
  if (x0.size() != expected || !x0.allFinite()) {
    throw IntegrationError("initial state has wrong dimension or is nonfinite");
  }
  if (model == ModelKind::Perturbed && eps <= 0.0) {
    throw IntegrationError("perturbed model needs eps > 0");
  }

  std::vector<double> ts;
  const double dt = opts.sample_dt > 0.0 ? opts.sample_dt : opts.horizon / 200;
  for (double t = 0.0; t < opts.horizon - dt * 0.5; t += dt) ts.push_back(t);
  ts.push_back(opts.horizon);

  OdeOptions ode;
  ode.rtol = opts.rtol;
  ode.atol = opts.atol;
  ode.max_step = opts.max_step;
  if (model == ModelKind::Perturbed) {
    double dmax = 0.0;
    for (int i = n0; i < n; ++i) dmax = std::max(dmax, net.load_d(i));
    const double cap = eps / (2.0 * dmax);  // resolve the fast time scale
    ode.max_step = ode.max_step > 0.0 ? std::min(ode.max_step, cap) : cap;
  }

  OdeRhs f;
  if (model == ModelKind::Unperturbed) {
    f = [&](double, const Eigen::VectorXd& x) {
      return rhs_unperturbed(net, Y, x);
    };
  } else {
    f = [&, eps](double, const Eigen::VectorXd& x) {
      return rhs_perturbed(net, Y, x, eps);
    };
  }

  Trajectory traj;
  traj.model = model;
  traj.eps = eps;
  traj.t = ts;
  // eps below 1e-4 makes the fast rows too stiff for the explicit method
  const bool implicit =
      opts.force_implicit || (model == ModelKind::Perturbed && eps < 1e-4);
  if (implicit) {
    OdeJacobian jac;
    if (model == ModelKind::Unperturbed) {
      jac = [&](double, const Eigen::VectorXd& x) {
        return rhs_unperturbed_jacobian(net, Y, x);
      };
    } else {
      jac = [&, eps](double, const Eigen::VectorXd& x) {
        return rhs_perturbed_jacobian(net, Y, x, eps);
      };
    }
    ode.max_step = opts.max_step;  // L-stable: no fast-scale cap needed
    traj.integrator = "trbdf2";
    traj.x = integrate_trbdf2(f, jac, x0, ts, ode, &traj.stats);
  } else {
    traj.integrator = "dopri5";
    traj.x = integrate_dopri5(f, x0, ts, ode, &traj.stats);
  }
  return traj;
}

Eigen::VectorXd quasi_steady_load_omega(const NetworkCase& net,
                                        const AdmittanceMatrix& Y,
                                        const Eigen::VectorXd& delta) {
  const int n = net.size();
  const int n0 = net.gen_count();
  const Eigen::VectorXd pe = active_power_injection(net, Y, delta);
  Eigen::VectorXd omega(n - n0);
  for (int i = n0; i < n; ++i) {
    omega[i - n0] = (-net.load_p(i) - pe[i]) / net.load_d(i);
  }
  return omega;
}

Eigen::VectorXd boundary_layer_transform(const NetworkCase& net,
                                         const AdmittanceMatrix& Y,
                                         const Eigen::VectorXd& x) {
  const int n = net.size();
  const int n0 = net.gen_count();
  if (x.size() != 2 * n) {
    throw IntegrationError("boundary-layer transform needs a perturbed state");
  }
  const Eigen::VectorXd pe = active_power_injection(net, Y, x.head(n));
  Eigen::VectorXd y(n - n0);
  for (int i = n0; i < n; ++i) {
    y[i - n0] =
        x[n + i] + net.load_p(i) / net.load_d(i) + pe[i] / net.load_d(i);
  }
  return y;
}

Trajectory simulate_boundary_layer(const Eigen::VectorXd& dtilde,
                                   const Eigen::VectorXd& y0,
                                   double tau_horizon, const SimOptions& opts) {
  if ((dtilde.array() <= 0.0).any()) {
    throw IntegrationError("load frequency coefficients must be positive");
  }
  std::vector<double> ts;
  const double dt = opts.sample_dt > 0.0 ? opts.sample_dt : tau_horizon / 200;
  for (double t = 0.0; t < tau_horizon - dt * 0.5; t += dt) ts.push_back(t);
  ts.push_back(tau_horizon);
  OdeOptions ode;
  ode.rtol = opts.rtol;
  ode.atol = opts.atol;
  ode.max_step = opts.max_step;
  Trajectory traj;
  traj.model = ModelKind::Perturbed;
  traj.integrator = "dopri5";
  traj.t = ts;
  traj.x = integrate_dopri5(
      [&](double, const Eigen::VectorXd& y) {
        return (-dtilde.array() * y.array()).matrix().eval();
      },
      y0, ts, ode, &traj.stats);
  return traj;
}

namespace {

Eigen::VectorXd interpolate(const Trajectory& tr, double t) {
  const auto it = std::lower_bound(tr.t.begin(), tr.t.end(), t);
  if (it == tr.t.begin()) return tr.x.front();
  if (it == tr.t.end()) return tr.x.back();
  const size_t hi = it - tr.t.begin();
  const size_t lo = hi - 1;
  const double w = (t - tr.t[lo]) / (tr.t[hi] - tr.t[lo]);
  return (1.0 - w) * tr.x[lo] + w * tr.x[hi];
}

}  // namespace

double trajectory_divergence(const Trajectory& a, const Trajectory& b,
                             const std::vector<std::pair<int, int>>& vars) {
  const double t0 = std::max(a.t.front(), b.t.front());
  const double t1 = std::min(a.t.back(), b.t.back());
  if (t0 > t1) {
    throw IntegrationError("trajectories have disjoint time ranges");
  }
  std::vector<double> grid;
  for (double t : a.t) {
    if (t >= t0 && t <= t1) grid.push_back(t);
  }
  for (double t : b.t) {
    if (t >= t0 && t <= t1) grid.push_back(t);
  }
  std::sort(grid.begin(), grid.end());
  double gap = 0.0;
  for (double t : grid) {
    const Eigen::VectorXd xa = interpolate(a, t);
    const Eigen::VectorXd xb = interpolate(b, t);
    for (auto [ia, ib] : vars) {
      gap = std::max(gap, std::abs(xa[ia] - xb[ib]));
    }
  }
  return gap;
}

double generator_divergence(const Trajectory& a, const Trajectory& b, int n,
                            int n0) {
  std::vector<std::pair<int, int>> vars;
  for (int i = 0; i < n0; ++i) vars.emplace_back(i, i);  // generator angles
  for (int i = 0; i < n0; ++i) vars.emplace_back(n + i, n + i);
  return trajectory_divergence(a, b, vars);
}

}  // namespace gridstab
