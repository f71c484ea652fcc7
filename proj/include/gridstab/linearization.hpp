#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "gridstab/dynamics.hpp"
#include "gridstab/netmodel.hpp"

namespace gridstab {

// L_ij = dPe_i/ddelta_j. Row sums vanish identically; under Assumption 1
// all off-diagonal entries are nonpositive.
Eigen::MatrixXd flow_jacobian(const NetworkCase& net,
                              const AdmittanceMatrix& Y,
                              const Eigen::VectorXd& delta);

struct SystemJacobian {
  Eigen::MatrixXd A;
  ModelKind kind = ModelKind::Perturbed;
  double eps = 0.0;
  Eigen::VectorXd M;  // diagonal of the inertia matrix (perturbed kind)
  Eigen::VectorXd D;  // diagonal of the damping matrix
};

// Perturbed kind: the 2n block matrix [[0, I], [-M^-1 L, -M^-1 D]] with
// M = diag(m_G, eps..eps), D = diag(d_G, dtilde_L). Unperturbed kind:
// the (n+n0)-dimensional Jacobian of the structure-preserving first-order
// system.
SystemJacobian system_jacobian(const Eigen::MatrixXd& L,
                               const NetworkCase& net, ModelKind kind,
                               double eps = 0.0);

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;  // sorted by real part
  int zero_modes = 0;              // |lambda| <= zero_tol
  double zero_tol = 0.0;
  double max_nonzero_real = 0.0;   // max real part outside the zero modes
  double max_backward_error = 0.0; // max ||Av - lambda v|| / ||A||
};

// Dense nonsymmetric eigensolve (balanced Hessenberg QR) with a mandatory
// backward-error check on every eigenpair. zero_tol_factor scales ||A||
// to classify the rotational zero mode.
SpectrumReport eigenvalues(const Eigen::MatrixXd& A,
                           double zero_tol_factor = 1e-8,
                           int dimension_cap = 512);

// Smallest singular value of (L + lambda D + lambda^2 M), normalized by
// ||L|| + |lambda| ||D|| + |lambda|^2 ||M||. Vanishes exactly at the
// eigenvalues of the corresponding system Jacobian.
double pencil_residual(const Eigen::MatrixXd& L, const Eigen::VectorXd& D,
                       const Eigen::VectorXd& M, std::complex<double> lambda);

struct MatchedPair {
  std::complex<double> k;
  std::complex<double> j;
  double dist = 0.0;
};

struct FastEigenvalue {
  std::complex<double> lambda;
  double predicted = 0.0;  // -dtilde_i / eps
  double rel_err = 0.0;
};

struct ModalComparison {
  std::vector<MatchedPair> matched;
  std::vector<FastEigenvalue> fast;
  double max_matched_dist = 0.0;
  bool ambiguous = false;
};

// Greedy nearest-neighbor matching of K's spectrum into J's, in
// descending |lambda| of K (ties broken by imaginary part). The n - n0
// unmatched J eigenvalues are the fast group, compared against the
// boundary-layer predictions -dtilde_i/eps.
ModalComparison modal_compare(const SpectrumReport& k_spectrum,
                              const SpectrumReport& j_spectrum, double eps,
                              const Eigen::VectorXd& dtilde);

}  // namespace gridstab
