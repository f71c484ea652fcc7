#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <vector>

namespace gridstab {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0.0;      // 0 = unlimited
  double initial_step = 0.0;  // 0 = automatic
};

struct OdeStats {
  long steps = 0;
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
  long jacobian_evals = 0;
};

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
using OdeJacobian =
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)>;

// Adaptive Dormand-Prince RK5(4). Steps are clipped to land exactly on
// the requested sample times, so returned states carry integrator
// accuracy rather than interpolation accuracy. sample_times must be
// strictly increasing; the first entry is the initial time.
std::vector<Eigen::VectorXd> integrate_dopri5(
    const OdeRhs& f, const Eigen::VectorXd& x0,
    const std::vector<double>& sample_times, const OdeOptions& opts,
    OdeStats* stats = nullptr);

// Adaptive TR-BDF2 (L-stable, one-sided) with Newton iterations using the
// supplied Jacobian. Used for strongly stiff perturbed runs.
std::vector<Eigen::VectorXd> integrate_trbdf2(
    const OdeRhs& f, const OdeJacobian& jac, const Eigen::VectorXd& x0,
    const std::vector<double>& sample_times, const OdeOptions& opts,
    OdeStats* stats = nullptr);

}  // namespace gridstab
