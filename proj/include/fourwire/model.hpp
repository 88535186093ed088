#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fourwire {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Conductor labels in fixed order A < B < C < N. Every matrix and vector
/// layout in this library follows that order.
enum class Conductor : std::uint8_t { A = 0, B = 1, C = 2, N = 3 };

inline constexpr std::array<Conductor, 4> kConductors{Conductor::A, Conductor::B,
                                                      Conductor::C, Conductor::N};
inline constexpr std::array<Conductor, 3> kPhases{Conductor::A, Conductor::B, Conductor::C};

char conductor_char(Conductor c);
std::optional<Conductor> conductor_from_char(char c);
std::optional<Conductor> conductor_from_string(std::string_view s);

/// Library error with a stable machine-readable kind, e.g. "parse",
/// "unsupported_element", "singular_neutral", "collapse", "domain", "io".
struct Error : std::runtime_error {
  std::string kind;
  Error(std::string kind_, const std::string& message)
      : std::runtime_error(message), kind(std::move(kind_)) {}
};

/// Dense complex conductor-by-conductor series impedance block (ohm).
/// Asymmetric matrices are accepted; labels are strictly increasing in
/// conductor order.
struct ImpedanceMatrix {
  std::vector<Conductor> labels;
  CMatrix z;

  ImpedanceMatrix() = default;
  ImpedanceMatrix(std::vector<Conductor> labels_, CMatrix z_);

  static ImpedanceMatrix zero(std::vector<Conductor> labels_);

  Eigen::Index dim() const { return z.rows(); }
  bool has(Conductor c) const;
  Eigen::Index index_of(Conductor c) const;  // throws if absent
  Complex at(Conductor p, Conductor q) const { return z(index_of(p), index_of(q)); }
  bool ends_with_neutral() const { return !labels.empty() && labels.back() == Conductor::N; }
  std::vector<Conductor> phase_labels() const;  // labels minus N
};

/// Shunt admittance block (siemens), same layout rules as ImpedanceMatrix.
struct AdmittanceMatrix {
  std::vector<Conductor> labels;
  CMatrix y;

  AdmittanceMatrix() = default;
  AdmittanceMatrix(std::vector<Conductor> labels_, CMatrix y_);

  static AdmittanceMatrix zero(std::vector<Conductor> labels_);

  Eigen::Index dim() const { return y.rows(); }
  bool has(Conductor c) const;
  Eigen::Index index_of(Conductor c) const;
  Complex at(Conductor p, Conductor q) const { return y(index_of(p), index_of(q)); }
  bool is_zero() const { return y.size() == 0 || y.isZero(0.0); }
};

struct Bus {
  std::string id;
  std::vector<Conductor> conductors;  // sorted, unique
  double base_voltage = 0.0;          // volt, phase-to-neutral nominal
  bool grounded = false;              // neutral bonded to ground at 0 V

  bool has(Conductor c) const;
};

/// Pi-section line: series impedance plus one shunt admittance half per end.
struct LineSegment {
  std::string id;
  std::string from_bus;
  std::string to_bus;
  ImpedanceMatrix series_z;
  AdmittanceMatrix shunt_y_from;
  AdmittanceMatrix shunt_y_to;
};

/// Wye-connected constant-power load; s_ref entries are phase-to-neutral
/// complex powers (volt-ampere), one per listed phase.
struct Load {
  std::string id;
  std::string bus;
  std::vector<Conductor> phases;  // subset of {A,B,C}, sorted
  std::vector<Complex> s_ref;
};

/// Ideal grounded voltage source fixing every conductor of its bus.
struct Source {
  std::string id;
  std::string bus;
  std::vector<Conductor> labels;  // == bus conductors
  std::vector<Complex> v_ref;     // volt, phase-to-ground phasors

  Complex v_at(Conductor c) const;
};

struct Network {
  std::string name;
  std::vector<Bus> buses;
  std::vector<LineSegment> lines;
  std::vector<Load> loads;
  std::vector<Source> sources;

  const Bus* find_bus(std::string_view id) const;
  const LineSegment* find_line(std::string_view id) const;
  int bus_index(std::string_view id) const;  // -1 if absent
  bool has_neutral() const;
};

struct Violation {
  std::string entity;  // id of the offending bus/line/load/source, or "network"
  std::string rule;    // stable rule tag
  std::string message;
};

/// Structural validation; empty result means all invariants hold.
/// Side-effect free and idempotent.
std::vector<Violation> validate_network(const Network& net);

struct PerUnitBase {
  double s_base = 1.0;  // volt-ampere
};

inline double to_pu(double si, double base) { return si / base; }
inline double from_pu(double pu, double base) { return pu * base; }

/// Toleranced deep equality on SI values (used by round-trip checks).
bool networks_equal(const Network& a, const Network& b, double rtol = 1e-12);

namespace detail {
bool labels_sorted_unique(const std::vector<Conductor>& labels);
std::string labels_to_string(const std::vector<Conductor>& labels);
}  // namespace detail

}  // namespace fourwire
