#include "gridstab/netmodel.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

namespace gridstab {

namespace {

using nlohmann::json;

constexpr double kDefaultLoadFreqCoeff = 0.1;  // pu / (rad/s)

void require(bool cond, CaseError::Kind kind, const std::string& msg) {
  if (!cond) throw CaseError(kind, msg);
}

void validate(const NetworkCase& net) {
  using K = CaseError::Kind;
  const int n = net.size();
  require(net.omega_s > 0.0, K::Validation, "omega_s must be positive");
  require(n >= 2, K::Validation, "a case needs at least two buses");
  require(net.gen_count() >= 1, K::Validation, "no generator buses");
  require(net.gen_count() < n, K::Validation, "no load buses");
  for (int i = 0; i < n; ++i) {
    const Bus& bus = net.buses[i];
    require(bus.voltage > 0.0, K::Validation,
            "bus " + bus.name + ": voltage must be positive");
    if (bus.kind == BusKind::Generator) {
      require(bus.machine.has_value() && !bus.load.has_value(), K::Validation,
              "bus " + bus.name + ": generator bus needs machine parameters only");
      require(bus.machine->inertia_M > 0.0, K::Validation,
              "bus " + bus.name + ": inertia M must be positive");
      require(bus.machine->damping_D > 0.0, K::Validation,
              "bus " + bus.name + ": damping D must be positive");
    } else {
      require(bus.load.has_value() && !bus.machine.has_value(), K::Validation,
              "bus " + bus.name + ": load bus needs load parameters only");
      require(bus.load->freq_coeff > 0.0, K::Validation,
              "bus " + bus.name + ": load frequency coefficient must be positive");
    }
  }
  // ordering invariant
  for (int i = 0; i < n; ++i) {
    require((i < net.gen_count()) == (net.buses[i].kind == BusKind::Generator),
            K::Validation, "bus ordering invariant broken");
  }
  // connectivity
  std::vector<std::vector<int>> adj(n);
  for (const Line& line : net.lines) {
    require(line.from != line.to, K::Validation, "line endpoints coincide");
    require(line.from >= 0 && line.from < n && line.to >= 0 && line.to < n,
            K::Validation, "line endpoint out of range");
    require(line.g >= 0.0, K::Validation, "line conductance must be >= 0");
    require(line.b <= 0.0, K::Validation,
            "line susceptance must be <= 0 (inductive series branch)");
    require(line.g > 0.0 || line.b < 0.0, K::Validation,
            "line admittance must be nonzero");
    adj[line.from].push_back(line.to);
    adj[line.to].push_back(line.from);
  }
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        frontier.push(w);
      }
    }
  }
  require(reached == n, K::Validation, "network graph is not connected");
}

NetworkCase finalize(double omega_s, std::vector<Bus> buses,
                     std::vector<Line> raw_lines) {
  NetworkCase net;
  net.omega_s = omega_s;
  // generators first, preserving relative order
  std::stable_sort(buses.begin(), buses.end(), [](const Bus& a, const Bus& b) {
    return (a.kind == BusKind::Generator) > (b.kind == BusKind::Generator);
  });
  std::map<std::string, int> remap;  // old index via name
  net.buses = std::move(buses);
  net.gen_count_ = 0;
  for (int i = 0; i < net.size(); ++i) {
    if (net.buses[i].kind == BusKind::Generator) ++net.gen_count_;
    require(remap.emplace(net.buses[i].name, i).second,
            CaseError::Kind::Validation,
            "duplicate bus name " + net.buses[i].name);
  }
  // aggregate parallel lines by admittance addition
  std::map<std::pair<int, int>, Line> agg;
  for (Line line : raw_lines) {
    if (line.from > line.to) std::swap(line.from, line.to);
    auto key = std::make_pair(line.from, line.to);
    auto it = agg.find(key);
    if (it == agg.end()) {
      agg.emplace(key, line);
    } else {
      it->second.g += line.g;
      it->second.b += line.b;
    }
  }
  net.lines.clear();
  for (const auto& [key, line] : agg) net.lines.push_back(line);
  validate(net);
  return net;
}

}  // namespace

int NetworkCase::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i) {
    if (buses[i].name == name) return i;
  }
  throw CaseError(CaseError::Kind::Validation, "unknown bus name " + name);
}

NetworkCase load_case(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw CaseError(CaseError::Kind::Parse, std::string("bad JSON: ") + e.what());
  }
  try {
    require(doc.is_object() && doc.contains("omega_s") && doc.contains("buses") &&
                doc.contains("lines"),
            CaseError::Kind::Parse,
            "case file needs omega_s, buses and lines");
    const double omega_s = doc.at("omega_s").get<double>();
    std::vector<Bus> buses;
    std::map<std::string, int> by_name;
    for (const json& jb : doc.at("buses")) {
      Bus bus;
      bus.name = jb.at("name").get<std::string>();
      const std::string kind = jb.at("kind").get<std::string>();
      require(kind == "generator" || kind == "load", CaseError::Kind::Parse,
              "bus " + bus.name + ": kind must be generator or load");
      bus.kind = kind == "generator" ? BusKind::Generator : BusKind::Load;
      bus.voltage = jb.at("V").get<double>();
      bus.shunt_b = jb.value("shunt_b", 0.0);
      if (bus.kind == BusKind::Generator) {
        bus.mech_power = jb.value("Pm", 0.0);
        bus.machine = MachineParams{jb.at("M").get<double>(),
                                    jb.at("D").get<double>()};
      } else {
        bus.load = LoadParams{jb.value("d_load", kDefaultLoadFreqCoeff),
                              jb.value("Pd", 0.0)};
      }
      by_name.emplace(bus.name, static_cast<int>(buses.size()));
      buses.push_back(std::move(bus));
    }
    std::vector<Line> lines;
    for (const json& jl : doc.at("lines")) {
      Line line;
      const std::string from = jl.at("from").get<std::string>();
      const std::string to = jl.at("to").get<std::string>();
      require(by_name.count(from) && by_name.count(to), CaseError::Kind::Parse,
              "line references unknown bus");
      line.from = by_name.at(from);
      line.to = by_name.at(to);
      line.g = jl.value("g", 0.0);
      line.b = jl.at("b").get<double>();
      lines.push_back(line);
    }
    // reorder generators first and remap line endpoints accordingly
    std::vector<int> order(buses.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return (buses[a].kind == BusKind::Generator) >
             (buses[b].kind == BusKind::Generator);
    });
    std::vector<int> new_index(buses.size());
    std::vector<Bus> sorted;
    for (size_t i = 0; i < order.size(); ++i) {
      new_index[order[i]] = static_cast<int>(i);
      sorted.push_back(buses[order[i]]);
    }
    for (Line& line : lines) {
      line.from = new_index[line.from];
      line.to = new_index[line.to];
    }
    return finalize(omega_s, std::move(sorted), std::move(lines));
  } catch (const json::exception& e) {
    throw CaseError(CaseError::Kind::Parse,
                    std::string("case schema violation: ") + e.what());
  }
}

NetworkCase load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CaseError(CaseError::Kind::Parse, "cannot open case file " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return load_case(buf.str());
}

std::string serialize_case(const NetworkCase& net) {
  json doc;
  doc["omega_s"] = net.omega_s;
  json jbuses = json::array();
  for (const Bus& bus : net.buses) {
    json jb;
    jb["name"] = bus.name;
    jb["V"] = bus.voltage;
    if (bus.shunt_b != 0.0) jb["shunt_b"] = bus.shunt_b;
    if (bus.kind == BusKind::Generator) {
      jb["kind"] = "generator";
      jb["Pm"] = bus.mech_power;
      jb["M"] = bus.machine->inertia_M;
      jb["D"] = bus.machine->damping_D;
    } else {
      jb["kind"] = "load";
      jb["Pd"] = bus.load->demand;
      jb["d_load"] = bus.load->freq_coeff;
    }
    jbuses.push_back(std::move(jb));
  }
  doc["buses"] = std::move(jbuses);
  json jlines = json::array();
  for (const Line& line : net.lines) {
    json jl;
    jl["from"] = net.buses[line.from].name;
    jl["to"] = net.buses[line.to].name;
    jl["g"] = line.g;
    jl["b"] = line.b;
    jlines.push_back(std::move(jl));
  }
  doc["lines"] = std::move(jlines);
  return doc.dump(2);
}

AdmittanceMatrix build_admittance(const NetworkCase& net) {
  const int n = net.size();
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  for (const Line& line : net.lines) {
    const std::complex<double> adm(line.g, line.b);
    y(line.from, line.to) -= adm;
    y(line.to, line.from) -= adm;
    y(line.from, line.from) += adm;
    y(line.to, line.to) += adm;
  }
  for (int i = 0; i < n; ++i) {
    y(i, i) += std::complex<double>(0.0, net.buses[i].shunt_b);
  }
  return AdmittanceMatrix(std::move(y));
}

NetworkCase augment_internal_buses(const NetworkCase& net,
                                   const std::vector<double>& xd_prime,
                                   double terminal_freq_coeff) {
  using K = CaseError::Kind;
  const int n0 = net.gen_count();
  require(static_cast<int>(xd_prime.size()) == n0, K::Validation,
          "need one transient reactance per generator");
  for (double x : xd_prime) {
    require(x > 0.0, K::Validation, "transient reactance must be positive");
  }
  std::vector<Bus> buses;
  std::vector<Line> lines;
  // internal buses first; they carry the machine and the injection
  for (int i = 0; i < n0; ++i) {
    const Bus& term = net.buses[i];
    Bus internal;
    internal.name = term.name + "_int";
    internal.kind = BusKind::Generator;
    internal.voltage = term.voltage;
    internal.mech_power = term.mech_power;
    internal.machine = term.machine;
    buses.push_back(std::move(internal));
  }
  // former buses, generators demoted to zero-demand loads
  for (int i = 0; i < net.size(); ++i) {
    Bus bus = net.buses[i];
    if (bus.kind == BusKind::Generator) {
      bus.kind = BusKind::Load;
      bus.machine.reset();
      bus.mech_power = 0.0;
      bus.load = LoadParams{terminal_freq_coeff, 0.0};
    }
    buses.push_back(std::move(bus));
  }
  // original lines, endpoints shifted past the internal block
  for (Line line : net.lines) {
    line.from += n0;
    line.to += n0;
    lines.push_back(line);
  }
  // transient-reactance links
  for (int i = 0; i < n0; ++i) {
    lines.push_back(Line{i, n0 + i, 0.0, -1.0 / xd_prime[i]});
  }
  NetworkCase out;
  out.omega_s = net.omega_s;
  out.buses = std::move(buses);
  out.lines = std::move(lines);
  out.gen_count_ = n0;
  // reuse the aggregation/validation path; names keep the mapping stable
  return load_case(serialize_case(out));
}

}  // namespace gridstab
