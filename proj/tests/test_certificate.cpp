#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>

#include "gridstab/certificate.hpp"
#include "gridstab/equilibrium.hpp"
#include "gridstab/linearization.hpp"
#include "gridstab/netmodel.hpp"
#include "testutil.hpp"

using namespace gridstab;
using Eigen::VectorXd;

TEST_CASE("stability index closed forms") {
  // two-bus lossless x=0.5, V=1, delta*=(0,0): Q=0, B=-2
  CHECK(stability_index(0.0, 1.0, -2.0, 2.0, 1.0) == doctest::Approx(0.0));
  CHECK(stability_index(0.0, 1.0, -2.0, 1.0, 1.0) == doctest::Approx(1.5));
  CHECK_THROWS_AS(stability_index(0.0, 1.0, -2.0, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("index is monotone in damping and inertia") {
  const double c1 = stability_index(0.1, 1.0, -2.0, 1.0, 1.0);
  const double c2 = stability_index(0.1, 1.0, -2.0, 1.5, 1.0);
  CHECK(c2 < c1);  // more damping, smaller index
  const double c3 = stability_index(0.1, 1.0, -2.0, 1.0, 2.0);
  CHECK(c3 > c1);  // more inertia, larger index
}

TEST_CASE("boundary two-bus case passes exactly at zero") {
  testutil::TwoBusParams p;
  p.D = 2.0;
  const NetworkCase net = testutil::twobus_case(p);
  const AdmittanceMatrix Y = build_admittance(net);
  const EquilibriumPoint eq =
      solve_equilibrium(net, Y, Eigen::VectorXd::Zero(2));
  const CertificateReport report = assess_theorem1(net, Y, eq);
  REQUIRE(report.generators.size() == 1);
  CHECK(report.applicable);
  CHECK(report.generators[0].C == doctest::Approx(0.0));
  CHECK(report.generators[0].theorem1_pass);
  CHECK(report.theorem1_all_pass);
}

TEST_CASE("certificate is sufficient but not necessary") {
  const NetworkCase net = testutil::twobus_case();  // d = 1
  const AdmittanceMatrix Y = build_admittance(net);
  const EquilibriumPoint eq =
      solve_equilibrium(net, Y, Eigen::VectorXd::Zero(2));
  const CertificateReport report = assess_theorem1(net, Y, eq);
  CHECK(report.generators[0].C == doctest::Approx(1.5));
  CHECK_FALSE(report.theorem1_all_pass);
  // yet the actual spectrum is stable apart from the zero mode
  const Eigen::MatrixXd L = flow_jacobian(net, Y, eq.delta);
  const SpectrumReport spec =
      eigenvalues(system_jacobian(L, net, ModelKind::Perturbed, 0.1).A);
  CHECK(spec.zero_modes == 1);
  CHECK(spec.max_nonzero_real < 0.0);
}

TEST_CASE("corollary check and the parallel-line paradox") {
  testutil::TwoBusParams p;
  p.D = 2.0;
  const NetworkCase net = testutil::twobus_case(p);
  const AdmittanceMatrix Y = build_admittance(net);
  const CertificateReport a = assess_corollary1(net, Y);
  CHECK(a.generators[0].corollary1_lhs == doctest::Approx(2.0));
  CHECK(a.generators[0].corollary1_pass);
  CHECK(a.corollary1_all_pass);

  // an identical parallel line doubles the coupling past the threshold
  NetworkCase doubled = net;
  doubled.lines.push_back(Line{0, 1, 0.0, -2.0});
  const CertificateReport b = assess_corollary1(doubled, build_admittance(doubled));
  CHECK(b.generators[0].corollary1_lhs == doctest::Approx(4.0));
  CHECK_FALSE(b.generators[0].corollary1_pass);
}

TEST_CASE("adding a line never lowers the corollary left-hand side") {
  std::mt19937 rng(31);
  for (int k = 0; k < 20; ++k) {
    NetworkCase net = testutil::random_case(rng).net;
    const CertificateReport before =
        assess_corollary1(net, build_admittance(net));
    net.lines.push_back(Line{0, net.size() - 1, 0.0, -1.5});
    const CertificateReport after =
        assess_corollary1(net, build_admittance(net));
    for (size_t i = 0; i < before.generators.size(); ++i) {
      CHECK(after.generators[i].corollary1_lhs >=
            before.generators[i].corollary1_lhs - 1e-12);
    }
  }
}

TEST_CASE("neighbor sum identity holds everywhere") {
  const NetworkCase net = load_case_file(testutil::data_path("wscc9.json"));
  const AdmittanceMatrix Y = build_admittance(net);
  const EquilibriumPoint eq =
      solve_equilibrium(net, Y, Eigen::VectorXd::Zero(9));
  const VectorXd q = reactive_power_injection(net, Y, eq.delta);
  for (int i = 0; i < net.gen_count(); ++i) {
    const double lhs =
        -q[i] - net.buses[i].voltage * net.buses[i].voltage * Y.b_diag(i);
    CHECK(std::abs(lhs - neighbor_sum(net, Y, eq.delta, i)) <= 1e-12);
  }
}

TEST_CASE("corollary dominates the theorem on assumption-satisfying points") {
  std::mt19937 rng(37);
  for (int k = 0; k < 50; ++k) {
    const auto rc = testutil::random_case(rng);
    const AdmittanceMatrix Y = build_admittance(rc.net);
    const EquilibriumPoint eq =
        solve_equilibrium(rc.net, Y, Eigen::VectorXd::Zero(rc.net.size()));
    if (!check_assumption1(rc.net, Y, eq).pass) continue;
    const CertificateReport thm = assess_theorem1(rc.net, Y, eq);
    const CertificateReport cor = assess_corollary1(rc.net, Y);
    for (size_t i = 0; i < thm.generators.size(); ++i) {
      const auto& g = thm.generators[i];
      // sine-bounded: the corollary LHS dominates the theorem LHS
      CHECK(cor.generators[i].corollary1_lhs >= -g.Q - g.V * g.V * g.B_ii - 1e-12);
      if (cor.generators[i].corollary1_pass) CHECK(g.theorem1_pass);
    }
  }
}

TEST_CASE("assumption failure marks the certificate inapplicable") {
  const NetworkCase net = testutil::twobus_case();
  const AdmittanceMatrix Y = build_admittance(net);
  EquilibriumPoint eq;
  eq.delta = VectorXd::Zero(2);
  eq.delta[0] = 1.7;  // violates the angle window
  const CertificateReport report = assess_theorem1(net, Y, eq);
  CHECK_FALSE(report.applicable);
  CHECK_FALSE(report.theorem1_all_pass);
  CHECK_FALSE(report.assumption.pass);
}

TEST_CASE("positive diagonal susceptance is flagged") {
  testutil::TwoBusParams p;
  p.shunt_b1 = 3.0;  // capacitive shunt dominates the line susceptance
  const NetworkCase net = testutil::twobus_case(p);
  const AdmittanceMatrix Y = build_admittance(net);
  const CertificateReport report = assess_corollary1(net, Y);
  CHECK(report.generators[0].positive_shunt_flag);
}

TEST_CASE("monitor agents reproduce the batch verdicts") {
  const NetworkCase net = load_case_file(testutil::data_path("wscc9.json"));
  const AdmittanceMatrix Y = build_admittance(net);
  const EquilibriumPoint eq =
      solve_equilibrium(net, Y, Eigen::VectorXd::Zero(9));
  const CertificateReport batch = assess_theorem1(net, Y, eq);
  const VectorXd q = reactive_power_injection(net, Y, eq.delta);
  for (int i = 0; i < 3; ++i) {
    MonitorAgent agent = make_agent(net, Y, i);
    MonitorVerdict last;
    for (int t = 0; t < 5; ++t) {
      last = agent.process(
          MonitorSample{static_cast<double>(t), net.buses[i].voltage, q[i]});
      CHECK_FALSE(last.stale);
    }
    CHECK(last.C == doctest::Approx(batch.generators[i].C).epsilon(1e-12));
    CHECK(last.pass == batch.generators[i].theorem1_pass);
  }
}

TEST_CASE("rising reactive supply strictly lowers the index") {
  const NetworkCase net = testutil::twobus_case();
  const AdmittanceMatrix Y = build_admittance(net);
  MonitorAgent agent = make_agent(net, Y, 0);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 10; ++k) {
    const MonitorVerdict v =
        agent.process(MonitorSample{static_cast<double>(k), 1.0, 0.1 * k});
    CHECK(v.C < prev);
    prev = v.C;
  }
}

TEST_CASE("identical samples yield identical verdicts") {
  const NetworkCase net = testutil::twobus_case();
  const AdmittanceMatrix Y = build_admittance(net);
  MonitorAgent agent = make_agent(net, Y, 0);
  const MonitorVerdict a = agent.process(MonitorSample{0.0, 1.0, 0.2});
  const MonitorVerdict b = agent.process(MonitorSample{0.0, 1.0, 0.2});
  CHECK(a.C == b.C);
  CHECK(a.pass == b.pass);
}

TEST_CASE("missing samples produce stale verdicts") {
  const NetworkCase net = testutil::twobus_case();
  const AdmittanceMatrix Y = build_admittance(net);
  MonitorAgent agent = make_agent(net, Y, 0);
  const MonitorVerdict v0 = agent.process(MonitorSample{0.0, 1.0, 0.2});
  const MonitorVerdict v1 = agent.process(std::nullopt);
  CHECK(v1.stale);
  CHECK(v1.C == v0.C);  // carries the last good verdict
  const MonitorVerdict v2 = agent.process(
      MonitorSample{2.0, std::numeric_limits<double>::quiet_NaN(), 0.2});
  CHECK(v2.stale);
  // collector conjunction
  CHECK_FALSE(collect_all_pass({v0, v1}));
  CHECK(collect_all_pass({v0}) == v0.pass);
  CHECK_FALSE(collect_all_pass({}));
}

TEST_CASE("agents exist only for generator buses") {
  const NetworkCase net = testutil::twobus_case();
  const AdmittanceMatrix Y = build_admittance(net);
  CHECK_THROWS_AS(make_agent(net, Y, 1), std::invalid_argument);
}
