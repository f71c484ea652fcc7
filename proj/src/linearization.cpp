#include "gridstab/linearization.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gridstab {

Eigen::MatrixXd flow_jacobian(const NetworkCase& net,
                              const AdmittanceMatrix& Y,
                              const Eigen::VectorXd& delta) {
  const int n = net.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double vi = net.buses[i].voltage;
    double diag = 0.0;
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

SystemJacobian system_jacobian(const Eigen::MatrixXd& L,
                               const NetworkCase& net, ModelKind kind,
                               double eps) {
  const int n = net.size();
  const int n0 = net.gen_count();
  SystemJacobian sj;
  sj.kind = kind;
  sj.eps = eps;
  if (kind == ModelKind::Perturbed) {
    if (eps <= 0.0) {
      throw std::invalid_argument("perturbed Jacobian needs eps > 0");
    }
    sj.M.resize(n);
    sj.D.resize(n);
    for (int i = 0; i < n0; ++i) {
      sj.M[i] = net.gen_m(i);
      sj.D[i] = net.gen_d(i);
    }
    for (int i = n0; i < n; ++i) {
      sj.M[i] = eps;
      sj.D[i] = net.load_d(i);
    }
    sj.A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    sj.A.topRightCorner(n, n).setIdentity();
    sj.A.bottomLeftCorner(n, n) = (-sj.M.cwiseInverse()).asDiagonal() * L;
    sj.A.bottomRightCorner(n, n) =
        (-(sj.D.array() / sj.M.array())).matrix().asDiagonal();
  } else {
    // state [delta_1..delta_n, omega_1..omega_n0]
    sj.A = Eigen::MatrixXd::Zero(n + n0, n + n0);
    for (int i = 0; i < n0; ++i) sj.A(i, n + i) = 1.0;
    for (int i = n0; i < n; ++i) {
      sj.A.row(i).head(n) = -L.row(i) / net.load_d(i);
    }
    for (int i = 0; i < n0; ++i) {
      sj.A.row(n + i).head(n) = -L.row(i) / net.gen_m(i);
      sj.A(n + i, n + i) = -net.gen_d(i) / net.gen_m(i);
    }
  }
  return sj;
}

SpectrumReport eigenvalues(const Eigen::MatrixXd& A, double zero_tol_factor,
                           int dimension_cap) {
  if (A.rows() != A.cols()) {
    throw std::invalid_argument("eigenvalue input must be square");
  }
  if (A.rows() > dimension_cap) {
    throw std::invalid_argument("matrix exceeds the configured dimension cap");
  }
  if (!A.allFinite()) {
    throw std::invalid_argument("eigenvalue input has nonfinite entries");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("QR eigenvalue iteration did not converge");
  }
  SpectrumReport report;
  const double norm_a = A.norm();
  report.zero_tol = zero_tol_factor * norm_a;
  const auto& vals = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();
  double max_nonzero = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    const std::complex<double> lambda = vals[i];
    const Eigen::VectorXcd v = vecs.col(i);
    const double backward =
        (A.cast<std::complex<double>>() * v - lambda * v).norm() /
        (norm_a * v.norm());
    report.max_backward_error = std::max(report.max_backward_error, backward);
    report.eigenvalues.push_back(lambda);
    if (std::abs(lambda) <= report.zero_tol) {
      ++report.zero_modes;
    } else {
      max_nonzero = std::max(max_nonzero, lambda.real());
    }
  }
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() < b.real();
              return a.imag() < b.imag();
            });
  report.max_nonzero_real = max_nonzero;
  return report;
}

double pencil_residual(const Eigen::MatrixXd& L, const Eigen::VectorXd& D,
                       const Eigen::VectorXd& M, std::complex<double> lambda) {
  const Eigen::MatrixXcd P =
      L.cast<std::complex<double>>() +
      lambda * Eigen::MatrixXcd(D.cast<std::complex<double>>().asDiagonal()) +
      (lambda * lambda) *
          Eigen::MatrixXcd(M.cast<std::complex<double>>().asDiagonal());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P);
  const double smin = svd.singularValues().tail(1)(0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_l(L);
  const double norm_l = svd_l.singularValues()(0);
  const double scale = norm_l + std::abs(lambda) * D.cwiseAbs().maxCoeff() +
                       std::norm(lambda) * M.cwiseAbs().maxCoeff();
  return smin / scale;
}

ModalComparison modal_compare(const SpectrumReport& k_spectrum,
                              const SpectrumReport& j_spectrum, double eps,
                              const Eigen::VectorXd& dtilde) {
  ModalComparison cmp;
  std::vector<std::complex<double>> ks = k_spectrum.eigenvalues;
  // greedy order: descending |lambda|, ties by imaginary part sign
  std::sort(ks.begin(), ks.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
              return a.imag() > b.imag();
            });
  const auto& js = j_spectrum.eigenvalues;
  std::vector<char> used(js.size(), 0);
  for (const auto& lk : ks) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    double best_any = std::numeric_limits<double>::infinity();
    for (size_t idx = 0; idx < js.size(); ++idx) {
      const double dist = std::abs(js[idx] - lk);
      best_any = std::min(best_any, dist);
      if (used[idx]) continue;
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(idx);
      }
    }
    if (best < 0) break;
    used[best] = 1;
    // a used eigenvalue was strictly closer: two K eigenvalues contend
    if (best_any < best_dist * (1.0 - 1e-12)) cmp.ambiguous = true;
    cmp.matched.push_back({lk, js[best], best_dist});
    cmp.max_matched_dist = std::max(cmp.max_matched_dist, best_dist);
  }
  std::vector<std::complex<double>> fast;
  for (size_t idx = 0; idx < js.size(); ++idx) {
    if (!used[idx]) fast.push_back(js[idx]);
  }
  // pair the most negative fast eigenvalue with the largest -dtilde/eps
  std::sort(fast.begin(), fast.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              return a.real() < b.real();
            });
  Eigen::VectorXd predictions = -dtilde / eps;
  std::sort(predictions.data(), predictions.data() + predictions.size());
  for (size_t i = 0; i < fast.size(); ++i) {
    FastEigenvalue fe;
    fe.lambda = fast[i];
    fe.predicted = i < static_cast<size_t>(predictions.size())
                       ? predictions[i]
                       : predictions[predictions.size() - 1];
    fe.rel_err = std::abs(fe.lambda - fe.predicted) / std::abs(fe.predicted);
    cmp.fast.push_back(fe);
  }
  return cmp;
}

}  // namespace gridstab
