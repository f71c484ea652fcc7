#include "gridstab/certificate.hpp"

#include <cmath>
#include <stdexcept>

namespace gridstab {

double stability_index(double Q_i, double V_i, double B_ii, double d_i,
                       double m_i) {
  if (m_i <= 0.0) {
    throw std::invalid_argument("stability index needs positive inertia");
  }
  return -Q_i - V_i * V_i * B_ii - d_i * d_i / (2.0 * m_i);
}

namespace {

GeneratorAssessment base_assessment(const NetworkCase& net,
                                    const AdmittanceMatrix& Y, int i) {
  GeneratorAssessment a;
  a.bus = i;
  a.V = net.buses[i].voltage;
  a.B_ii = Y.b_diag(i);
  a.positive_shunt_flag = a.B_ii > 0.0;
  a.threshold =
      net.gen_d(i) * net.gen_d(i) / (2.0 * net.gen_m(i));
  double lhs = 0.0;
  for (int j = 0; j < net.size(); ++j) {
    if (j == i) continue;
    lhs += a.V * net.buses[j].voltage * Y.magnitude(i, j);
  }
  a.corollary1_lhs = lhs;
  a.corollary1_pass = lhs <= a.threshold;
  return a;
}

void finalize_aggregate(CertificateReport& report) {
  report.theorem1_all_pass = !report.generators.empty();
  report.corollary1_all_pass = !report.generators.empty();
  double sum = 0.0;
  for (const auto& g : report.generators) {
    report.theorem1_all_pass = report.theorem1_all_pass && g.theorem1_pass;
    report.corollary1_all_pass = report.corollary1_all_pass && g.corollary1_pass;
    sum += g.C;
  }
  report.average_C =
      report.generators.empty() ? 0.0 : sum / report.generators.size();
}

}  // namespace

CertificateReport assess_theorem1(const NetworkCase& net,
                                  const AdmittanceMatrix& Y,
                                  const EquilibriumPoint& eq) {
  CertificateReport report;
  report.assumption = check_assumption1(net, Y, eq);
  report.applicable = report.assumption.pass;
  const Eigen::VectorXd q = reactive_power_injection(net, Y, eq.delta);
  for (int i = 0; i < net.gen_count(); ++i) {
    GeneratorAssessment a = base_assessment(net, Y, i);
    a.Q = q[i];
    a.C = stability_index(a.Q, a.V, a.B_ii, net.gen_d(i), net.gen_m(i));
    a.theorem1_pass = a.C <= 0.0;  // boundary counts as a pass
    report.generators.push_back(a);
  }
  finalize_aggregate(report);
  if (!report.applicable) {
    // hypothesis unmet: the indices are reported but carry no verdict
    report.theorem1_all_pass = false;
  }
  return report;
}

CertificateReport assess_corollary1(const NetworkCase& net,
                                    const AdmittanceMatrix& Y) {
  CertificateReport report;
  for (int i = 0; i < net.gen_count(); ++i) {
    GeneratorAssessment a = base_assessment(net, Y, i);
    // Q unavailable on the topology-only path; C reported as the
    // corollary margin instead
    a.C = a.corollary1_lhs - a.threshold;
    a.theorem1_pass = false;
    report.generators.push_back(a);
  }
  finalize_aggregate(report);
  report.theorem1_all_pass = false;
  return report;
}

double neighbor_sum(const NetworkCase& net, const AdmittanceMatrix& Y,
                    const Eigen::VectorXd& delta, int i) {
  double acc = 0.0;
  const double vi = net.buses[i].voltage;
  for (int j = 0; j < net.size(); ++j) {
    if (j == i) continue;
    acc += vi * net.buses[j].voltage * Y.magnitude(i, j) *
           std::sin(Y.angle(i, j) - delta[i] + delta[j]);
  }
  return acc;
}

MonitorAgent::MonitorAgent(int bus, double B_ii, double damping_d,
                           double inertia_m)
    : bus_(bus), B_ii_(B_ii), d_(damping_d), m_(inertia_m) {
  if (m_ <= 0.0) {
    throw std::invalid_argument("monitor agent needs positive inertia");
  }
}

MonitorVerdict MonitorAgent::process(
    const std::optional<MonitorSample>& sample) {
  if (!sample || !std::isfinite(sample->V) || !std::isfinite(sample->Q)) {
    MonitorVerdict stale = last_;
    stale.stale = true;
    return stale;
  }
  MonitorVerdict v;
  v.t = sample->t;
  v.C = stability_index(sample->Q, sample->V, B_ii_, d_, m_);
  v.pass = v.C <= 0.0;
  v.stale = false;
  last_ = v;
  return v;
}

MonitorAgent make_agent(const NetworkCase& net, const AdmittanceMatrix& Y,
                        int bus) {
  if (bus < 0 || bus >= net.gen_count()) {
    throw std::invalid_argument("monitor agents exist for generator buses only");
  }
  return MonitorAgent(bus, Y.b_diag(bus), net.gen_d(bus), net.gen_m(bus));
}

bool collect_all_pass(const std::vector<MonitorVerdict>& latest) {
  if (latest.empty()) return false;
  for (const auto& v : latest) {
    if (v.stale || !v.pass) return false;
  }
  return true;
}

}  // namespace gridstab
