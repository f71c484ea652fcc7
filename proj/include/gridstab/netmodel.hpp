#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridstab {

// Thrown by case ingestion. Parse errors cover malformed JSON or missing
// fields, validation errors cover violated physical invariants
// (nonpositive parameters, disconnected graph, inconsistent bus kinds).
class CaseError : public std::runtime_error {
 public:
  enum class Kind { Parse, Validation };

  CaseError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class BusKind { Generator, Load };

struct MachineParams {
  double inertia_M = 0.0;  // seconds
  double damping_D = 0.0;  // dimensionless
};

struct LoadParams {
  double freq_coeff = 0.0;  // pu power per (rad/s)
  double demand = 0.0;      // pu
};

struct Bus {
  std::string name;
  BusKind kind = BusKind::Load;
  double voltage = 1.0;     // pu magnitude, fixed
  double mech_power = 0.0;  // pu, generators only
  std::optional<MachineParams> machine;
  std::optional<LoadParams> load;
  double shunt_b = 0.0;  // shunt susceptance to ground, pu
};

struct Line {
  int from = 0;
  int to = 0;
  double g = 0.0;  // series conductance, pu
  double b = 0.0;  // series susceptance, pu (<= 0 for inductive branches)
};

// A validated case. Buses are ordered generators first (indices 0..n0-1),
// then loads (n0..n-1); parallel lines have been aggregated.
struct NetworkCase {
  double omega_s = 0.0;  // synchronous speed, electrical rad/s
  std::vector<Bus> buses;
  std::vector<Line> lines;

  int size() const { return static_cast<int>(buses.size()); }
  int gen_count() const { return gen_count_; }
  bool is_generator(int i) const { return i < gen_count_; }

  // Swing-equation coefficients m = M/omega_s, d = D/omega_s.
  double gen_m(int i) const { return buses[i].machine->inertia_M / omega_s; }
  double gen_d(int i) const { return buses[i].machine->damping_D / omega_s; }
  double load_d(int i) const { return buses[i].load->freq_coeff; }
  double load_p(int i) const { return buses[i].load->demand; }

  int index_of(const std::string& name) const;

  int gen_count_ = 0;
};

// Dense complex nodal admittance matrix with polar-form access.
class AdmittanceMatrix {
 public:
  explicit AdmittanceMatrix(Eigen::MatrixXcd y) : y_(std::move(y)) {}

  int size() const { return static_cast<int>(y_.rows()); }
  std::complex<double> at(int i, int j) const { return y_(i, j); }
  double magnitude(int i, int j) const { return std::abs(y_(i, j)); }
  double angle(int i, int j) const { return std::arg(y_(i, j)); }
  double g_diag(int i) const { return y_(i, i).real(); }
  double b_diag(int i) const { return y_(i, i).imag(); }
  const Eigen::MatrixXcd& matrix() const { return y_; }

 private:
  Eigen::MatrixXcd y_;
};

// Parse and validate a case from JSON text (schema in README).
NetworkCase load_case(const std::string& json_text);
NetworkCase load_case_file(const std::string& path);

// Emit a case back into the JSON case-file schema. The output reparses
// into an identical case.
std::string serialize_case(const NetworkCase& net);

// Y_ii = sum of incident series admittances plus the bus shunt,
// Y_ij = -y_ij for lines. Exactly symmetric by construction.
AdmittanceMatrix build_admittance(const NetworkCase& net);

// Insert a fictitious internal bus behind each generator terminal,
// connected through the transient reactance xd_prime. The former
// terminal becomes a load bus with zero demand and frequency
// coefficient `terminal_freq_coeff`.
NetworkCase augment_internal_buses(const NetworkCase& net,
                                   const std::vector<double>& xd_prime,
                                   double terminal_freq_coeff = 0.1);

}  // namespace gridstab
