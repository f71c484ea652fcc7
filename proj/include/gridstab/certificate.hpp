#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "gridstab/equilibrium.hpp"
#include "gridstab/netmodel.hpp"

namespace gridstab {

// C_i = -Q_i - V_i^2 B_ii - d_i^2 / (2 m_i). Nonpositive values certify
// local asymptotic stability of an Assumption-1 equilibrium.
double stability_index(double Q_i, double V_i, double B_ii, double d_i,
                       double m_i);

struct GeneratorAssessment {
  int bus = 0;
  double Q = 0.0;
  double B_ii = 0.0;
  double V = 0.0;
  double threshold = 0.0;       // d_i^2 / (2 m_i)
  double C = 0.0;
  bool theorem1_pass = false;   // C <= 0
  double corollary1_lhs = 0.0;  // sum_{j != i} V_i V_j Y_ij
  bool corollary1_pass = false;
  bool positive_shunt_flag = false;  // B_ii > 0 (shunt-dominated diagonal)
};

struct CertificateReport {
  std::vector<GeneratorAssessment> generators;
  bool applicable = true;  // false when Assumption 1 fails (Theorem 1 path)
  bool theorem1_all_pass = false;
  bool corollary1_all_pass = false;
  double average_C = 0.0;
  AssumptionReport assumption;  // recorded by the Theorem 1 path
};

// Per-generator Theorem 1 evaluation at a solved equilibrium. Verifies
// Assumption 1 first; when it fails the report is marked inapplicable and
// carries no pass/fail claim.
CertificateReport assess_theorem1(const NetworkCase& net,
                                  const AdmittanceMatrix& Y,
                                  const EquilibriumPoint& eq);

// Operating-point-independent topology condition of Corollary 1.
CertificateReport assess_corollary1(const NetworkCase& net,
                                    const AdmittanceMatrix& Y);

// sum_{j != i} V_i V_j Y_ij sin(theta_ij - delta_i + delta_j); identical
// to -Q_i - V_i^2 B_ii at any angle vector.
double neighbor_sum(const NetworkCase& net, const AdmittanceMatrix& Y,
                    const Eigen::VectorXd& delta, int i);

// --- Distributed monitoring -------------------------------------------------

struct MonitorSample {
  double t = 0.0;
  double V = 0.0;
  double Q = 0.0;
};

struct MonitorVerdict {
  double t = 0.0;
  double C = 0.0;
  bool pass = false;
  bool stale = false;  // emitted when a measurement sample was missing
};

// One per-generator agent. Holds only its own constants and consumes only
// its own measurement stream; the signature admits no other agent's data.
class MonitorAgent {
 public:
  MonitorAgent(int bus, double B_ii, double damping_d, double inertia_m);

  // A missing sample yields a stale verdict repeating the last index.
  MonitorVerdict process(const std::optional<MonitorSample>& sample);

  int bus() const { return bus_; }

 private:
  int bus_;
  double B_ii_;
  double d_;
  double m_;
  MonitorVerdict last_{0.0, 0.0, false, true};
};

// Builds the agent for generator bus i from case constants.
MonitorAgent make_agent(const NetworkCase& net, const AdmittanceMatrix& Y,
                        int bus);

// Collector side: conjunction of the latest verdict of every agent.
bool collect_all_pass(const std::vector<MonitorVerdict>& latest);

}  // namespace gridstab
