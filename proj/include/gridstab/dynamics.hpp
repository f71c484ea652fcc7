#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "gridstab/netmodel.hpp"
#include "gridstab/ode.hpp"

namespace gridstab {

enum class ModelKind { Unperturbed, Perturbed };

// Flat state layout:
//   Unperturbed: [delta_1..delta_n, omega_1..omega_n0]      (n + n0)
//   Perturbed:   [delta_1..delta_n, omega_1..omega_n]       (2n)
struct DynamicState {
  Eigen::VectorXd delta;
  Eigen::VectorXd omega;
  ModelKind model = ModelKind::Unperturbed;
  double eps = 0.0;  // > 0 when perturbed

  Eigen::VectorXd pack() const;
  static DynamicState unpack(const Eigen::VectorXd& x, int n, ModelKind model,
                             double eps = 0.0);
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;  // flat states, layout per model
  ModelKind model = ModelKind::Unperturbed;
  double eps = 0.0;
  std::string integrator;
  OdeStats stats;
};

struct SimOptions {
  double horizon = 20.0;
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0.0;       // 0 = automatic (eps-aware cap for perturbed)
  double sample_dt = 0.01;
  bool force_implicit = false;
};

// delta_dot_i = omega_i (gen), (-Pd_i - Pe_i)/dtilde_i (load);
// omega_dot_i = (-d_i omega_i + Pm_i - Pe_i)/m_i (gen).
Eigen::VectorXd rhs_unperturbed(const NetworkCase& net,
                                const AdmittanceMatrix& Y,
                                const Eigen::VectorXd& x);

// delta_dot_i = omega_i (all); omega_dot load rows divided by eps.
Eigen::VectorXd rhs_perturbed(const NetworkCase& net,
                              const AdmittanceMatrix& Y,
                              const Eigen::VectorXd& x, double eps);

// Analytic Jacobians of the above, used by the implicit integrator.
Eigen::MatrixXd rhs_unperturbed_jacobian(const NetworkCase& net,
                                         const AdmittanceMatrix& Y,
                                         const Eigen::VectorXd& x);
Eigen::MatrixXd rhs_perturbed_jacobian(const NetworkCase& net,
                                       const AdmittanceMatrix& Y,
                                       const Eigen::VectorXd& x, double eps);

Trajectory simulate(const NetworkCase& net, const AdmittanceMatrix& Y,
                    const Eigen::VectorXd& x0, const SimOptions& opts,
                    ModelKind model, double eps = 0.0);

// Quasi-steady load-bus frequency (-Pd_i - Pe_i)/dtilde_i at the given
// angles; the default initial condition placing the perturbed model on
// the slow manifold.
Eigen::VectorXd quasi_steady_load_omega(const NetworkCase& net,
                                        const AdmittanceMatrix& Y,
                                        const Eigen::VectorXd& delta);

// Boundary-layer variable y_i = omega_i + Pd_i/dtilde_i + Pe_i/dtilde_i
// over load buses, for a perturbed-model state.
Eigen::VectorXd boundary_layer_transform(const NetworkCase& net,
                                         const AdmittanceMatrix& Y,
                                         const Eigen::VectorXd& x);

// dy_i/dtau = -dtilde_i y_i in stretched time tau.
Trajectory simulate_boundary_layer(const Eigen::VectorXd& dtilde,
                                   const Eigen::VectorXd& y0,
                                   double tau_horizon,
                                   const SimOptions& opts = {});

// Sup-norm gap between two trajectories over the shared time range,
// evaluated on the given state-index pairs (index_in_a, index_in_b) with
// linear interpolation between samples.
double trajectory_divergence(const Trajectory& a, const Trajectory& b,
                             const std::vector<std::pair<int, int>>& vars);

// Convenience: gap on generator angles and generator frequencies, the
// variables shared by the two model variants.
double generator_divergence(const Trajectory& a, const Trajectory& b, int n,
                            int n0);

}  // namespace gridstab
