#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

#include "gridstab/netmodel.hpp"

namespace gridstab {

class PowerFlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EquilibriumPoint {
  Eigen::VectorXd delta;   // bus angles, radians; delta[reference_bus] == 0
  int reference_bus = 0;
  double residual_norm = 0.0;  // inf-norm of the non-reference mismatch
  int iterations = 0;
  double slack_injection = 0.0;  // electrical power absorbed by the reference bus
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 50;
  int reference_bus = 0;
};

// P_e,i = sum_j V_i V_j Y_ij cos(theta_ij - delta_i + delta_j)
Eigen::VectorXd active_power_injection(const NetworkCase& net,
                                       const AdmittanceMatrix& Y,
                                       const Eigen::VectorXd& delta);

// Q_i = -sum_j V_i V_j Y_ij sin(theta_ij - delta_i + delta_j)
Eigen::VectorXd reactive_power_injection(const NetworkCase& net,
                                         const AdmittanceMatrix& Y,
                                         const Eigen::VectorXd& delta);

// Newton iteration on the n-1 non-reference active-power mismatch
// equations. The reference bus keeps delta = 0 and absorbs the network
// loss; its mechanical power is reported back via slack_injection.
EquilibriumPoint solve_equilibrium(const NetworkCase& net,
                                   const AdmittanceMatrix& Y,
                                   const Eigen::VectorXd& init,
                                   const SolveOptions& opts = {});

struct LineAngle {
  int from = 0;
  int to = 0;
  double alpha = 0.0;  // theta_ij - delta_i + delta_j
  bool pass = false;
};

struct AssumptionReport {
  std::vector<LineAngle> angles;  // both orientations of every line
  std::optional<double> margin;   // gamma, when margin mode is on
  bool pass = false;
};

// Checks 0 < alpha_ij < pi for all directed line orientations, with a
// small numerical slack on the strict inequalities. When a margin gamma
// is given, checks |delta_i - delta_j| < gamma instead.
AssumptionReport check_assumption1(const NetworkCase& net,
                                   const AdmittanceMatrix& Y,
                                   const EquilibriumPoint& eq,
                                   std::optional<double> margin = std::nullopt,
                                   double slack = 1e-9);

}  // namespace gridstab
