#include "gridstab/ode.hpp"

#include <algorithm>
#include <cmath>

namespace gridstab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double error_norm(const VectorXd& err, const VectorXd& x0, const VectorXd& x1,
                  double rtol, double atol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double scale =
        atol + rtol * std::max(std::abs(x0[i]), std::abs(x1[i]));
    const double r = err[i] / scale;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

double initial_step_guess(const OdeRhs& f, double t0, const VectorXd& x0,
                          double rtol, double atol) {
  const VectorXd f0 = f(t0, x0);
  const double d0 = x0.norm() + atol;
  const double d1 = f0.norm() + atol;
  double h = 0.01 * d0 / d1;
  if (!std::isfinite(h) || h <= 0.0) h = 1e-6;
  return h;
}

void check_times(const std::vector<double>& ts) {
  if (ts.size() < 2) {
    throw IntegrationError("need at least two sample times");
  }
  for (size_t i = 1; i < ts.size(); ++i) {
    if (!(ts[i] > ts[i - 1])) {
      throw IntegrationError("sample times must be strictly increasing");
    }
  }
}

constexpr double kMinStepFactor = 1e-14;  // relative to the horizon

}  // namespace

std::vector<VectorXd> integrate_dopri5(const OdeRhs& f, const VectorXd& x0,
                                       const std::vector<double>& sample_times,
                                       const OdeOptions& opts, OdeStats* stats) {
  check_times(sample_times);
  // Dormand-Prince 5(4) tableau
  static const double c[7] = {0., 1. / 5, 3. / 10, 4. / 5, 8. / 9, 1., 1.};
  static const double a[7][6] = {
      {},
      {1. / 5},
      {3. / 40, 9. / 40},
      {44. / 45, -56. / 15, 32. / 9},
      {19372. / 6561, -25360. / 2187, 64448. / 6561, -212. / 729},
      {9017. / 3168, -355. / 33, 46732. / 5247, 49. / 176, -5103. / 18656},
      {35. / 384, 0., 500. / 1113, 125. / 192, -2187. / 6784, 11. / 84}};
  static const double e[7] = {71. / 57600,     0.,          -71. / 16695,
                              71. / 1920,      -17253. / 339200,
                              22. / 525,       -1. / 40};

  OdeStats local;
  OdeStats& st = stats ? *stats : local;
  const double t_end = sample_times.back();
  const double horizon = t_end - sample_times.front();
  const double min_step = horizon * kMinStepFactor;

  std::vector<VectorXd> out;
  out.reserve(sample_times.size());
  out.push_back(x0);

  double t = sample_times.front();
  VectorXd x = x0;
  VectorXd k[7];
  k[0] = f(t, x);
  ++st.rhs_evals;
  double h = opts.initial_step > 0.0
                 ? opts.initial_step
                 : initial_step_guess(f, t, x, opts.rtol, opts.atol);
  ++st.rhs_evals;
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  size_t next_sample = 1;

  while (next_sample < sample_times.size()) {
    const double target = sample_times[next_sample];
    if (target - t <= min_step) {
      // already at the sample up to rounding; emit without stepping
      out.push_back(x);
      ++next_sample;
      continue;
    }
    bool clipped = false;
    if (t + h >= target) {
      h = target - t;
      clipped = true;
    }
    if (h < min_step) {
      throw IntegrationError("step size underflow (stiffness failure) at t=" +
                             std::to_string(t));
    }
    VectorXd xs[7];
    xs[0] = x;
    for (int s = 1; s < 7; ++s) {
      VectorXd xi = x;
      for (int q = 0; q < s; ++q) xi += (h * a[s][q]) * k[q];
      k[s] = f(t + c[s] * h, xi);
      ++st.rhs_evals;
      if (s == 6) xs[6] = xi;  // FSAL: stage 7 input is the 5th-order result
    }
    const VectorXd x_new = xs[6];
    if (!x_new.allFinite()) {
      throw IntegrationError("nonfinite state at t=" + std::to_string(t));
    }
    VectorXd err = VectorXd::Zero(x.size());
    for (int s = 0; s < 7; ++s) err += (h * e[s]) * k[s];
    const double norm = error_norm(err, x, x_new, opts.rtol, opts.atol);
    ++st.steps;
    if (norm <= 1.0) {
      ++st.accepted;
      t += h;
      x = x_new;
      k[0] = k[6];  // FSAL
      if (clipped) {
        out.push_back(x);
        ++next_sample;
      }
    } else {
      ++st.rejected;
    }
    double factor = 0.9 * std::pow(std::max(norm, 1e-10), -0.2);
    factor = std::clamp(factor, 0.2, 5.0);
    h = std::max(h * factor, min_step);
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  }
  return out;
}

std::vector<VectorXd> integrate_trbdf2(const OdeRhs& f, const OdeJacobian& jac,
                                       const VectorXd& x0,
                                       const std::vector<double>& sample_times,
                                       const OdeOptions& opts, OdeStats* stats) {
  check_times(sample_times);
  OdeStats local;
  OdeStats& st = stats ? *stats : local;
  const double gamma = 2.0 - std::sqrt(2.0);
  const double t_end = sample_times.back();
  const double horizon = t_end - sample_times.front();
  const double min_step = horizon * kMinStepFactor;

  std::vector<VectorXd> out;
  out.push_back(x0);
  double t = sample_times.front();
  VectorXd x = x0;
  double h = opts.initial_step > 0.0 ? opts.initial_step : horizon * 1e-4;
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  size_t next_sample = 1;

  const Eigen::Index dim = x0.size();
  const MatrixXd identity = MatrixXd::Identity(dim, dim);

  // Newton solve of z = base + w*h*f(tz, z)
  auto implicit_solve = [&](double tz, const VectorXd& base, double w,
                            const VectorXd& guess, VectorXd& z) -> bool {
    z = guess;
    MatrixXd A = identity - (w * h) * jac(tz, z);
    ++st.jacobian_evals;
    Eigen::PartialPivLU<MatrixXd> lu(A);
    for (int it = 0; it < 12; ++it) {
      const VectorXd g = z - base - (w * h) * f(tz, z);
      ++st.rhs_evals;
      const VectorXd dz = lu.solve(g);
      z -= dz;
      if (!z.allFinite()) return false;
      if (error_norm(dz, z, z, opts.rtol, opts.atol) < 0.05) return true;
    }
    return false;
  };

  while (next_sample < sample_times.size()) {
    const double target = sample_times[next_sample];
    if (target - t <= min_step) {
      out.push_back(x);
      ++next_sample;
      continue;
    }
    bool clipped = false;
    if (t + h >= target) {
      h = target - t;
      clipped = true;
    }
    if (h < min_step) {
      throw IntegrationError("step size underflow (stiffness failure) at t=" +
                             std::to_string(t));
    }
    const VectorXd f0 = f(t, x);
    ++st.rhs_evals;
    // trapezoidal substep to t + gamma*h
    const VectorXd base_tr = x + (gamma / 2.0 * h) * f0;
    VectorXd x_mid;
    bool ok = implicit_solve(t + gamma * h, base_tr, gamma / 2.0, x, x_mid);
    VectorXd x_new;
    if (ok) {
      // BDF2 substep to t + h
      const double w = (1.0 - gamma) / (2.0 - gamma);
      const VectorXd base_bdf =
          (1.0 / (gamma * (2.0 - gamma))) * x_mid -
          ((1.0 - gamma) * (1.0 - gamma) / (gamma * (2.0 - gamma))) * x;
      ok = implicit_solve(t + h, base_bdf, w, x_mid, x_new);
    }
    double norm = 2.0;
    if (ok && x_new.allFinite()) {
      const VectorXd f2 = f(t + h, x_new);
      ++st.rhs_evals;
      const VectorXd f1 = f(t + gamma * h, x_mid);
      ++st.rhs_evals;
      // embedded error estimate (Hosea & Shampine)
      const double kgamma = (-3.0 * gamma * gamma + 4.0 * gamma - 2.0) /
                            (12.0 * (2.0 - gamma));
      const VectorXd err =
          (kgamma * h) *
          (f0 / gamma - f1 / (gamma * (1.0 - gamma)) + f2 / (1.0 - gamma));
      norm = error_norm(err, x, x_new, opts.rtol, opts.atol);
    }
    ++st.steps;
    if (norm <= 1.0) {
      ++st.accepted;
      t += h;
      x = x_new;
      if (clipped) {
        out.push_back(x);
        ++next_sample;
      }
    } else {
      ++st.rejected;
    }
    double factor = ok ? 0.9 * std::pow(std::max(norm, 1e-10), -1.0 / 3.0) : 0.3;
    factor = std::clamp(factor, 0.2, 4.0);
    h = std::max(h * factor, min_step);
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  }
  return out;
}

}  // namespace gridstab
