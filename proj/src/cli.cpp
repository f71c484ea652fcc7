#include "gridstab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "gridstab/certificate.hpp"
#include "gridstab/dynamics.hpp"
#include "gridstab/equilibrium.hpp"
#include "gridstab/linearization.hpp"
#include "gridstab/netmodel.hpp"

namespace gridstab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct CommonOpts {
  std::string case_path;
  bool augment = false;
  std::vector<double> xdprime;
  std::string out_dir;
  std::string format = "csv";
  unsigned seed = 42;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--case", opts.case_path, "case file (JSON)")->required();
  cmd->add_flag("--augment-internal", opts.augment,
                "insert fictitious internal generator buses");
  cmd->add_option("--xdprime", opts.xdprime,
                  "per-generator transient reactances for --augment-internal");
  cmd->add_option("--out", opts.out_dir, "directory for output artifacts");
  cmd->add_option("--format", opts.format, "stdout format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", opts.seed, "seed for randomized harness runs");
}

NetworkCase load_net(const CommonOpts& opts) {
  NetworkCase net = load_case_file(opts.case_path);
  if (opts.augment) {
    net = augment_internal_buses(net, opts.xdprime);
  }
  return net;
}

void write_file(const CommonOpts& opts, const std::string& name,
                const std::string& content) {
  if (opts.out_dir.empty()) return;
  fs::create_directories(opts.out_dir);
  std::ofstream f(fs::path(opts.out_dir) / name);
  f << content;
}

json report_to_json(const NetworkCase& net, const CertificateReport& report) {
  json doc;
  doc["applicable"] = report.applicable;
  doc["theorem1_all_pass"] = report.theorem1_all_pass;
  doc["corollary1_all_pass"] = report.corollary1_all_pass;
  doc["average_C"] = report.average_C;
  json gens = json::array();
  for (const auto& g : report.generators) {
    gens.push_back({{"bus", net.buses[g.bus].name},
                    {"Q", g.Q},
                    {"B_ii", g.B_ii},
                    {"V", g.V},
                    {"threshold", g.threshold},
                    {"C", g.C},
                    {"theorem1_pass", g.theorem1_pass},
                    {"corollary1_lhs", g.corollary1_lhs},
                    {"corollary1_pass", g.corollary1_pass},
                    {"positive_shunt_flag", g.positive_shunt_flag}});
  }
  doc["generators"] = std::move(gens);
  json angles = json::array();
  for (const auto& la : report.assumption.angles) {
    angles.push_back({{"from", net.buses[la.from].name},
                      {"to", net.buses[la.to].name},
                      {"alpha_rad", la.alpha},
                      {"pass", la.pass}});
  }
  doc["assumption1"] = {{"pass", report.assumption.pass},
                        {"angles", std::move(angles)}};
  return doc;
}

struct Pipeline {
  NetworkCase net;
  AdmittanceMatrix Y;
  EquilibriumPoint eq;
};

Pipeline run_power_flow(const CommonOpts& opts) {
  NetworkCase net = load_net(opts);
  AdmittanceMatrix Y = build_admittance(net);
  EquilibriumPoint eq = solve_equilibrium(
      net, Y, Eigen::VectorXd::Zero(net.size()), SolveOptions{});
  return Pipeline{std::move(net), std::move(Y), std::move(eq)};
}

// ---- assess ----------------------------------------------------------------

int cmd_assess(const CommonOpts& opts, std::ostream& out) {
  Pipeline p = run_power_flow(opts);
  const CertificateReport thm1 = assess_theorem1(p.net, p.Y, p.eq);
  const CertificateReport cor1 = assess_corollary1(p.net, p.Y);

  json doc = report_to_json(p.net, thm1);
  doc["corollary1_all_pass"] = cor1.corollary1_all_pass;
  for (size_t i = 0; i < cor1.generators.size(); ++i) {
    doc["generators"][i]["corollary1_lhs"] = cor1.generators[i].corollary1_lhs;
    doc["generators"][i]["corollary1_pass"] = cor1.generators[i].corollary1_pass;
  }
  write_file(opts, "assess.json", doc.dump(2) + "\n");

  if (opts.format == "json") {
    out << doc.dump(2) << "\n";
  } else {
    out << "bus        Q          B_ii       C          thm1  cor1\n";
    for (size_t i = 0; i < thm1.generators.size(); ++i) {
      const auto& g = thm1.generators[i];
      char line[160];
      std::snprintf(line, sizeof line, "%-10s %-10s %-10s %-10s %-5s %-5s\n",
                    p.net.buses[g.bus].name.c_str(), fmt4(g.Q).c_str(),
                    fmt4(g.B_ii).c_str(), fmt4(g.C).c_str(),
                    g.theorem1_pass ? "pass" : "fail",
                    cor1.generators[i].corollary1_pass ? "pass" : "fail");
      out << line;
    }
    out << "assumption1: " << (thm1.assumption.pass ? "pass" : "FAIL") << "\n";
    for (const auto& la : thm1.assumption.angles) {
      out << "  " << p.net.buses[la.from].name << " -> "
          << p.net.buses[la.to].name << "  alpha=" << fmt4(la.alpha) << "  "
          << (la.pass ? "pass" : "fail") << "\n";
    }
    out << "theorem1_all_pass: " << (thm1.theorem1_all_pass ? "yes" : "no")
        << "\ncorollary1_all_pass: "
        << (cor1.corollary1_all_pass ? "yes" : "no") << "\n";
  }
  if (!thm1.applicable) return kExitAssumption;
  return thm1.theorem1_all_pass ? kExitOk : kExitFail;
}

// ---- check-assumption ------------------------------------------------------

int cmd_check_assumption(const CommonOpts& opts, std::optional<double> margin,
                         std::ostream& out) {
  Pipeline p = run_power_flow(opts);
  const AssumptionReport report =
      check_assumption1(p.net, p.Y, p.eq, margin);
  std::ostringstream csv;
  csv << "line_from,line_to,alpha_rad,pass\n";
  for (const auto& la : report.angles) {
    csv << p.net.buses[la.from].name << "," << p.net.buses[la.to].name << ","
        << fmt17(la.alpha) << "," << (la.pass ? "true" : "false") << "\n";
  }
  out << csv.str();
  write_file(opts, "assumption.csv", csv.str());
  return report.pass ? kExitOk : kExitAssumption;
}

// ---- modal -----------------------------------------------------------------

json spectrum_to_json(const std::vector<std::complex<double>>& eigs) {
  json arr = json::array();
  for (const auto& z : eigs) arr.push_back({{"re", z.real()}, {"im", z.imag()}});
  return arr;
}

int cmd_modal(const CommonOpts& opts, const std::vector<double>& eps_list,
              std::ostream& out, std::ostream& err) {
  for (double eps : eps_list) {
    if (eps <= 0.0) {
      err << "modal: eps must be positive (the unperturbed spectrum is "
             "reported as K)\n";
      return kExitFail;
    }
  }
  Pipeline p = run_power_flow(opts);
  const Eigen::MatrixXd L = flow_jacobian(p.net, p.Y, p.eq.delta);
  const SpectrumReport k_spec =
      eigenvalues(system_jacobian(L, p.net, ModelKind::Unperturbed).A);
  const int n = p.net.size();
  const int n0 = p.net.gen_count();
  Eigen::VectorXd dtilde(n - n0);
  for (int i = n0; i < n; ++i) dtilde[i - n0] = p.net.load_d(i);

  std::ostringstream csv;
  csv << "re,im,source\n";
  for (const auto& z : k_spec.eigenvalues) {
    csv << fmt17(z.real()) << "," << fmt17(z.imag()) << ",K\n";
  }
  for (double eps : eps_list) {
    const SpectrumReport j_spec =
        eigenvalues(system_jacobian(L, p.net, ModelKind::Perturbed, eps).A);
    const ModalComparison cmp = modal_compare(k_spec, j_spec, eps, dtilde);
    json doc;
    doc["eps"] = eps;
    doc["eigenvalues_K"] = spectrum_to_json(k_spec.eigenvalues);
    doc["eigenvalues_J"] = spectrum_to_json(j_spec.eigenvalues);
    json matched = json::array();
    for (const auto& mp : cmp.matched) {
      matched.push_back({{"k", {{"re", mp.k.real()}, {"im", mp.k.imag()}}},
                         {"j", {{"re", mp.j.real()}, {"im", mp.j.imag()}}},
                         {"dist", mp.dist}});
    }
    doc["matched"] = std::move(matched);
    json fast = json::array();
    for (const auto& fe : cmp.fast) {
      fast.push_back(
          {{"lambda", {{"re", fe.lambda.real()}, {"im", fe.lambda.imag()}}},
           {"predicted", fe.predicted},
           {"rel_err", fe.rel_err}});
    }
    doc["fast"] = std::move(fast);
    doc["max_matched_dist"] = cmp.max_matched_dist;
    doc["ambiguous"] = cmp.ambiguous;
    write_file(opts, "modal_eps" + fmt4(eps) + ".json", doc.dump(2) + "\n");
    if (opts.format == "json") out << doc.dump(2) << "\n";
    for (const auto& z : j_spec.eigenvalues) {
      csv << fmt17(z.real()) << "," << fmt17(z.imag()) << ",J@" << fmt4(eps)
          << "\n";
    }
  }
  if (opts.format == "csv") out << csv.str();
  write_file(opts, "modal.csv", csv.str());
  return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

NetworkCase scaled_case(const NetworkCase& base, const std::string& parameter,
                        double s) {
  NetworkCase net = base;
  for (Bus& bus : net.buses) {
    if (parameter == "damping_scale" && bus.machine) {
      bus.machine->damping_D *= s;
    } else if (parameter == "inertia_scale" && bus.machine) {
      bus.machine->inertia_M *= s;
    } else if (parameter == "load_scale") {
      if (bus.load) {
        bus.load->demand *= s;
      } else {
        bus.mech_power *= s;
      }
    }
  }
  return net;
}

struct SweepRow {
  double multiplier = 0.0;
  double avg_C = 0.0;
  double avg_re_lambda = 0.0;
  bool thm1_all_pass = false;
  bool cor1_all_pass = false;
  bool assumption1_pass = false;
  std::string status = "ok";  // ok | powerflow_failed | assumption_failed
};

SweepRow sweep_row(const NetworkCase& base, const std::string& parameter,
                   double s, double eps) {
  SweepRow row;
  row.multiplier = s;
  const NetworkCase net = scaled_case(base, parameter, s);
  const AdmittanceMatrix Y = build_admittance(net);
  EquilibriumPoint eq;
  try {
    eq = solve_equilibrium(net, Y, Eigen::VectorXd::Zero(net.size()));
  } catch (const PowerFlowError&) {
    row.status = "powerflow_failed";
    return row;
  }
  const CertificateReport thm1 = assess_theorem1(net, Y, eq);
  const CertificateReport cor1 = assess_corollary1(net, Y);
  row.assumption1_pass = thm1.assumption.pass;
  row.avg_C = thm1.average_C;
  row.thm1_all_pass = thm1.theorem1_all_pass;
  row.cor1_all_pass = cor1.corollary1_all_pass;
  if (!row.assumption1_pass) {
    row.status = "assumption_failed";
    return row;
  }
  const Eigen::MatrixXd L = flow_jacobian(net, Y, eq.delta);
  const SpectrumReport spec =
      eigenvalues(system_jacobian(L, net, ModelKind::Perturbed, eps).A);
  double sum = 0.0;
  int count = 0;
  for (const auto& z : spec.eigenvalues) {
    if (std::abs(z) <= spec.zero_tol) continue;  // zero mode excluded
    sum += z.real();
    ++count;
  }
  row.avg_re_lambda = count ? sum / count : 0.0;
  return row;
}

int cmd_sweep(const CommonOpts& opts, const std::string& parameter,
              const std::vector<double>& values, double eps, std::ostream& out,
              std::ostream& err) {
  if (values.empty()) {
    err << "sweep: need at least one multiplier\n";
    return kExitFail;
  }
  for (double v : values) {
    if (v <= 0.0) {
      err << "sweep: multipliers must be positive\n";
      return kExitFail;
    }
  }
  const NetworkCase base = load_net(opts);
  std::vector<std::future<SweepRow>> futures;
  for (double s : values) {
    futures.push_back(std::async(std::launch::async, sweep_row, std::cref(base),
                                 parameter, s, eps));
  }
  std::ostringstream csv;
  csv << "multiplier,avg_C,avg_re_lambda,thm1_all_pass,cor1_all_pass,"
         "assumption1_pass,status\n";
  for (auto& fut : futures) {
    const SweepRow row = fut.get();
    if (row.status != "ok") {
      err << "sweep: multiplier " << fmt4(row.multiplier) << " flagged: "
          << row.status << "\n";
    }
    csv << fmt17(row.multiplier) << "," << fmt17(row.avg_C) << ","
        << fmt17(row.avg_re_lambda) << ","
        << (row.thm1_all_pass ? "true" : "false") << ","
        << (row.cor1_all_pass ? "true" : "false") << ","
        << (row.assumption1_pass ? "true" : "false") << "," << row.status
        << "\n";
  }
  out << csv.str();
  write_file(opts, "sweep.csv", csv.str());
  return kExitOk;
}

// ---- simulate --------------------------------------------------------------

struct Disturbance {
  std::map<std::string, double> delta_offsets;
  std::map<std::string, double> omega_offsets;
  double gen_delta = 0.0;  // shorthand: offset on every generator angle
};

std::string trajectory_csv(const NetworkCase& net, const Trajectory& traj) {
  const int n = net.size();
  const int n0 = net.gen_count();
  const int n_omega = traj.model == ModelKind::Unperturbed ? n0 : n;
  std::ostringstream csv;
  csv << "t";
  for (int i = 0; i < n; ++i) csv << ",delta_" << net.buses[i].name;
  for (int i = 0; i < n_omega; ++i) csv << ",omega_" << net.buses[i].name;
  csv << "\n";
  for (size_t k = 0; k < traj.t.size(); ++k) {
    csv << fmt17(traj.t[k]);
    for (int i = 0; i < n + n_omega; ++i) csv << "," << fmt17(traj.x[k][i]);
    csv << "\n";
  }
  return csv.str();
}

json stats_json(const Trajectory& traj) {
  return {{"integrator", traj.integrator},
          {"eps", traj.eps},
          {"steps", traj.stats.steps},
          {"accepted", traj.stats.accepted},
          {"rejected", traj.stats.rejected},
          {"rhs_evals", traj.stats.rhs_evals},
          {"jacobian_evals", traj.stats.jacobian_evals}};
}

int cmd_simulate(const CommonOpts& opts, const std::string& model,
                 const std::vector<double>& eps_list, const Disturbance& dist,
                 const SimOptions& sim, std::ostream& out, std::ostream& err) {
  Pipeline p = run_power_flow(opts);
  const int n = p.net.size();
  const int n0 = p.net.gen_count();

  Eigen::VectorXd delta0 = p.eq.delta;
  for (int i = 0; i < n0; ++i) delta0[i] += dist.gen_delta;
  for (const auto& [name, off] : dist.delta_offsets) {
    delta0[p.net.index_of(name)] += off;
  }
  Eigen::VectorXd omega_gen = Eigen::VectorXd::Zero(n0);
  for (const auto& [name, off] : dist.omega_offsets) {
    const int idx = p.net.index_of(name);
    if (idx < n0) omega_gen[idx] += off;
  }

  const bool run_unperturbed = model == "unperturbed" || model == "both";
  const bool run_perturbed = model == "perturbed" || model == "both";
  if (run_perturbed && eps_list.empty()) {
    err << "simulate: perturbed runs need --eps\n";
    return kExitFail;
  }

  json sidecar;
  std::optional<Trajectory> unp;
  if (run_unperturbed) {
    Eigen::VectorXd x0(n + n0);
    x0 << delta0, omega_gen;
    Trajectory traj = simulate(p.net, p.Y, x0, sim, ModelKind::Unperturbed);
    write_file(opts, "sim_unperturbed.csv", trajectory_csv(p.net, traj));
    if (opts.out_dir.empty()) out << trajectory_csv(p.net, traj);
    sidecar["unperturbed"] = stats_json(traj);
    unp = std::move(traj);
  }
  for (double eps : run_perturbed ? eps_list : std::vector<double>{}) {
    Eigen::VectorXd omega_load = quasi_steady_load_omega(p.net, p.Y, delta0);
    for (const auto& [name, off] : dist.omega_offsets) {
      const int idx = p.net.index_of(name);
      if (idx >= n0) omega_load[idx - n0] += off;
    }
    Eigen::VectorXd x0(2 * n);
    x0 << delta0, omega_gen, omega_load;
    Trajectory traj = simulate(p.net, p.Y, x0, sim, ModelKind::Perturbed, eps);
    const std::string name = "sim_perturbed_eps" + fmt4(eps) + ".csv";
    write_file(opts, name, trajectory_csv(p.net, traj));
    if (opts.out_dir.empty()) out << trajectory_csv(p.net, traj);
    json meta = stats_json(traj);
    if (unp) {
      meta["generator_divergence_vs_unperturbed"] =
          generator_divergence(*unp, traj, n, n0);
    }
    sidecar["perturbed_eps" + fmt4(eps)] = std::move(meta);
  }
  write_file(opts, "simulate_meta.json", sidecar.dump(2) + "\n");
  if (opts.format == "json") out << sidecar.dump(2) << "\n";
  return kExitOk;
}

// ---- monitor ---------------------------------------------------------------

int cmd_monitor(const CommonOpts& opts, const std::string& measurements,
                std::ostream& out, std::ostream& err) {
  NetworkCase net = load_net(opts);
  AdmittanceMatrix Y = build_admittance(net);
  std::ifstream in(measurements);
  if (!in) {
    err << "monitor: cannot open measurement stream " << measurements << "\n";
    return kExitParse;
  }
  // per-agent ordered streams
  std::map<int, std::vector<std::optional<MonitorSample>>> streams;
  std::string header;
  std::getline(in, header);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string t_s, bus_s, v_s, q_s;
    std::getline(row, t_s, ',');
    std::getline(row, bus_s, ',');
    std::getline(row, v_s, ',');
    std::getline(row, q_s, ',');
    int bus;
    try {
      bus = net.index_of(bus_s);
    } catch (const CaseError&) {
      err << "monitor: unknown bus " << bus_s << "\n";
      return kExitParse;
    }
    if (v_s.empty() || q_s.empty()) {
      streams[bus].push_back(std::nullopt);
    } else {
      streams[bus].push_back(
          MonitorSample{std::stod(t_s), std::stod(v_s), std::stod(q_s)});
    }
  }
  // each agent runs independently over its own stream
  std::map<int, std::future<std::vector<MonitorVerdict>>> agent_runs;
  for (const auto& [bus, stream] : streams) {
    agent_runs.emplace(
        bus, std::async(std::launch::async, [&net, &Y, bus = bus,
                                             stream = stream]() {
          MonitorAgent agent = make_agent(net, Y, bus);
          std::vector<MonitorVerdict> verdicts;
          for (const auto& s : stream) verdicts.push_back(agent.process(s));
          return verdicts;
        }));
  }
  std::ostringstream csv;
  csv << "t,bus,C,pass,stale\n";
  std::vector<MonitorVerdict> latest;
  for (auto& [bus, fut] : agent_runs) {
    const auto verdicts = fut.get();
    for (const auto& v : verdicts) {
      csv << fmt17(v.t) << "," << net.buses[bus].name << "," << fmt17(v.C)
          << "," << (v.pass ? "true" : "false") << ","
          << (v.stale ? "true" : "false") << "\n";
    }
    if (!verdicts.empty()) latest.push_back(verdicts.back());
  }
  out << csv.str();
  write_file(opts, "monitor.csv", csv.str());
  out << "all_pass: " << (collect_all_pass(latest) ? "true" : "false") << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"small-signal stability toolkit for structure-preserving "
               "swing models"};
  app.require_subcommand(1);

  CommonOpts assess_opts, assume_opts, modal_opts, sweep_opts, sim_opts_c,
      monitor_opts;
  std::optional<double> margin;
  std::vector<double> modal_eps{1e-3};
  std::string sweep_param = "damping_scale";
  std::vector<double> sweep_values;
  double sweep_eps = 1e-3;
  std::string sim_model = "both";
  std::vector<double> sim_eps;
  SimOptions sim_opts;
  Disturbance dist;
  std::vector<std::string> disturb_specs;
  std::string measurements;

  CLI::App* assess = app.add_subcommand("assess", "run the stability certificate");
  add_common(assess, assess_opts);

  CLI::App* assume =
      app.add_subcommand("check-assumption", "report per-line angles");
  add_common(assume, assume_opts);
  double margin_value = 0.0;
  CLI::Option* margin_opt = assume->add_option(
      "--margin", margin_value, "use the |delta_i - delta_j| < gamma form");

  CLI::App* modal = app.add_subcommand("modal", "eigenvalue comparison");
  add_common(modal, modal_opts);
  modal->add_option("--eps", modal_eps, "perturbation parameters");

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep");
  add_common(sweep, sweep_opts);
  sweep->add_option("--parameter", sweep_param, "swept parameter")
      ->check(CLI::IsMember({"damping_scale", "inertia_scale", "load_scale"}));
  sweep->add_option("--values", sweep_values, "multipliers")->required();
  sweep->add_option("--eps", sweep_eps, "eps for J assembly");

  CLI::App* simulate = app.add_subcommand("simulate", "time-domain simulation");
  add_common(simulate, sim_opts_c);
  simulate->add_option("--model", sim_model, "unperturbed|perturbed|both")
      ->check(CLI::IsMember({"unperturbed", "perturbed", "both"}));
  simulate->add_option("--eps", sim_eps, "perturbation parameters");
  simulate->add_option("--horizon", sim_opts.horizon, "horizon, seconds");
  simulate->add_option("--sample-dt", sim_opts.sample_dt, "output sampling");
  simulate->add_option("--rtol", sim_opts.rtol, "relative tolerance");
  simulate->add_option("--atol", sim_opts.atol, "absolute tolerance");
  simulate->add_flag("--implicit", sim_opts.force_implicit,
                     "force the L-stable integrator");
  simulate->add_option("--gen-delta", dist.gen_delta,
                       "angle offset applied to every generator");
  simulate->add_option("--disturb", disturb_specs,
                       "per-bus offset BUS:delta|omega:VALUE");

  CLI::App* monitor =
      app.add_subcommand("monitor", "distributed per-generator monitoring");
  add_common(monitor, monitor_opts);
  monitor->add_option("--measurements", measurements,
                      "CSV measurement stream (t,bus,V,Q)")
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    const int code = app.exit(e, out, msg);
    err << msg.str();
    return code;
  }

  if (*margin_opt) margin = margin_value;
  for (const std::string& spec : disturb_specs) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      err << "bad disturbance spec: " << spec << "\n";
      return kExitFail;
    }
    const std::string bus = spec.substr(0, c1);
    const std::string var = spec.substr(c1 + 1, c2 - c1 - 1);
    const double value = std::stod(spec.substr(c2 + 1));
    if (var == "delta") {
      dist.delta_offsets[bus] += value;
    } else if (var == "omega") {
      dist.omega_offsets[bus] += value;
    } else {
      err << "bad disturbance variable: " << var << "\n";
      return kExitFail;
    }
  }

  try {
    if (assess->parsed()) return cmd_assess(assess_opts, out);
    if (assume->parsed()) return cmd_check_assumption(assume_opts, margin, out);
    if (modal->parsed()) return cmd_modal(modal_opts, modal_eps, out, err);
    if (sweep->parsed()) {
      return cmd_sweep(sweep_opts, sweep_param, sweep_values, sweep_eps, out,
                       err);
    }
    if (simulate->parsed()) {
      return cmd_simulate(sim_opts_c, sim_model, sim_eps, dist, sim_opts, out,
                          err);
    }
    if (monitor->parsed()) return cmd_monitor(monitor_opts, measurements, out, err);
  } catch (const CaseError& e) {
    err << "case error: " << e.what() << "\n";
    return kExitParse;
  } catch (const PowerFlowError& e) {
    err << "power flow error: " << e.what() << "\n";
    return kExitPowerFlow;
  } catch (const IntegrationError& e) {
    err << "integration error: " << e.what() << "\n";
    return kExitFail;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitFail;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace gridstab::cli
