#include "fourwire/model.hpp"

#include <algorithm>
#include <cctype>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace fourwire {

char conductor_char(Conductor c) {
  switch (c) {
    case Conductor::A: return 'a';
    case Conductor::B: return 'b';
    case Conductor::C: return 'c';
    case Conductor::N: return 'n';
  }
  return '?';
}

std::optional<Conductor> conductor_from_char(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'a': return Conductor::A;
    case 'b': return Conductor::B;
    case 'c': return Conductor::C;
    case 'n': return Conductor::N;
    default: return std::nullopt;
  }
}

std::optional<Conductor> conductor_from_string(std::string_view s) {
  if (s.size() != 1) return std::nullopt;
  return conductor_from_char(s[0]);
}

namespace detail {

bool labels_sorted_unique(const std::vector<Conductor>& labels) {
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (static_cast<int>(labels[i - 1]) >= static_cast<int>(labels[i])) return false;
  return true;
}

std::string labels_to_string(const std::vector<Conductor>& labels) {
  std::string out;
  for (Conductor c : labels) {
    if (!out.empty()) out += ',';
    out += conductor_char(c);
  }
  return out;
}

void check_labeled_square(const std::vector<Conductor>& labels, const CMatrix& m,
                          const char* what) {
  if (m.rows() != m.cols())
    throw Error("domain", std::string(what) + ": matrix is not square");
  if (labels.empty() || labels.size() > 4)
    throw Error("domain", std::string(what) + ": label count must be 1..4");
  if (static_cast<std::size_t>(m.rows()) != labels.size())
    throw Error("domain", std::string(what) + ": dimension does not match label count");
  if (!labels_sorted_unique(labels))
    throw Error("domain", std::string(what) + ": labels must be unique and in a,b,c,n order");
  if (!m.allFinite())
    throw Error("domain", std::string(what) + ": entries must be finite");
}

}  // namespace detail

ImpedanceMatrix::ImpedanceMatrix(std::vector<Conductor> labels_, CMatrix z_)
    : labels(std::move(labels_)), z(std::move(z_)) {
  detail::check_labeled_square(labels, z, "impedance matrix");
}

ImpedanceMatrix ImpedanceMatrix::zero(std::vector<Conductor> labels_) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  return ImpedanceMatrix(std::move(labels_), CMatrix::Zero(n, n));
}

bool ImpedanceMatrix::has(Conductor c) const {
  return std::find(labels.begin(), labels.end(), c) != labels.end();
}

Eigen::Index ImpedanceMatrix::index_of(Conductor c) const {
  auto it = std::find(labels.begin(), labels.end(), c);
  if (it == labels.end())
    throw Error("domain", std::string("impedance matrix has no conductor '") +
                              conductor_char(c) + "'");
  return static_cast<Eigen::Index>(it - labels.begin());
}

std::vector<Conductor> ImpedanceMatrix::phase_labels() const {
  std::vector<Conductor> out;
  for (Conductor c : labels)
    if (c != Conductor::N) out.push_back(c);
  return out;
}

AdmittanceMatrix::AdmittanceMatrix(std::vector<Conductor> labels_, CMatrix y_)
    : labels(std::move(labels_)), y(std::move(y_)) {
  detail::check_labeled_square(labels, y, "admittance matrix");
}

AdmittanceMatrix AdmittanceMatrix::zero(std::vector<Conductor> labels_) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  return AdmittanceMatrix(std::move(labels_), CMatrix::Zero(n, n));
}

bool AdmittanceMatrix::has(Conductor c) const {
  return std::find(labels.begin(), labels.end(), c) != labels.end();
}

Eigen::Index AdmittanceMatrix::index_of(Conductor c) const {
  auto it = std::find(labels.begin(), labels.end(), c);
  if (it == labels.end())
    throw Error("domain", std::string("admittance matrix has no conductor '") +
                              conductor_char(c) + "'");
  return static_cast<Eigen::Index>(it - labels.begin());
}

bool Bus::has(Conductor c) const {
  return std::find(conductors.begin(), conductors.end(), c) != conductors.end();
}

Complex Source::v_at(Conductor c) const {
  auto it = std::find(labels.begin(), labels.end(), c);
  if (it == labels.end())
    throw Error("domain", "source '" + id + "' has no conductor '" +
                              std::string(1, conductor_char(c)) + "'");
  return v_ref[static_cast<std::size_t>(it - labels.begin())];
}

const Bus* Network::find_bus(std::string_view id) const {
  for (const Bus& b : buses)
    if (b.id == id) return &b;
  return nullptr;
}

const LineSegment* Network::find_line(std::string_view id) const {
  for (const LineSegment& l : lines)
    if (l.id == id) return &l;
  return nullptr;
}

int Network::bus_index(std::string_view id) const {
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == id) return static_cast<int>(i);
  return -1;
}

bool Network::has_neutral() const {
  for (const Bus& b : buses)
    if (b.has(Conductor::N)) return true;
  return false;
}

namespace {

void add(std::vector<Violation>& out, std::string entity, std::string rule,
         std::string message) {
  out.push_back({std::move(entity), std::move(rule), std::move(message)});
}

bool subset_of(const std::vector<Conductor>& sub, const std::vector<Conductor>& super) {
  for (Conductor c : sub)
    if (std::find(super.begin(), super.end(), c) == super.end()) return false;
  return true;
}

}  // namespace

std::vector<Violation> validate_network(const Network& net) {
  std::vector<Violation> out;

  std::unordered_map<std::string, std::size_t> bus_idx;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const Bus& b = net.buses[i];
    if (!seen.insert(b.id).second)
      add(out, b.id, "duplicate_id", "duplicate bus id '" + b.id + "'");
    bus_idx.emplace(b.id, i);
    if (b.conductors.empty())
      add(out, b.id, "empty_conductors", "bus '" + b.id + "' lists no conductors");
    if (!detail::labels_sorted_unique(b.conductors))
      add(out, b.id, "conductor_order",
          "bus '" + b.id + "' conductors must be unique and in a,b,c,n order");
    if (!(b.base_voltage > 0.0))
      add(out, b.id, "base_voltage", "bus '" + b.id + "' base voltage must be positive");
    if (b.grounded && !b.has(Conductor::N))
      add(out, b.id, "grounded_without_neutral",
          "bus '" + b.id + "' is grounded but has no neutral conductor");
  }

  // Conductor coverage: every declared bus conductor must be reachable
  // through a line or the source, otherwise the nodal system is singular.
  std::vector<std::set<Conductor>> covered(net.buses.size());

  seen.clear();
  for (const LineSegment& l : net.lines) {
    if (!seen.insert(l.id).second)
      add(out, l.id, "duplicate_id", "duplicate line id '" + l.id + "'");
    if (l.from_bus == l.to_bus)
      add(out, l.id, "self_loop", "line '" + l.id + "' connects a bus to itself");
    auto from = bus_idx.find(l.from_bus);
    auto to = bus_idx.find(l.to_bus);
    if (from == bus_idx.end())
      add(out, l.id, "dangling_reference",
          "line '" + l.id + "' references unknown bus '" + l.from_bus + "'");
    if (to == bus_idx.end())
      add(out, l.id, "dangling_reference",
          "line '" + l.id + "' references unknown bus '" + l.to_bus + "'");
    if (l.series_z.labels.empty()) {
      add(out, l.id, "empty_matrix", "line '" + l.id + "' has no series impedance");
      continue;
    }
    for (auto* end : {&from, &to}) {
      if (*end == bus_idx.end()) continue;
      const Bus& b = net.buses[(*end)->second];
      if (!subset_of(l.series_z.labels, b.conductors))
        add(out, l.id, "conductor_mismatch",
            "line '" + l.id + "' conductors [" + detail::labels_to_string(l.series_z.labels) +
                "] are not all present at bus '" + b.id + "'");
      else
        covered[(*end)->second].insert(l.series_z.labels.begin(), l.series_z.labels.end());
    }
    for (const AdmittanceMatrix* sh : {&l.shunt_y_from, &l.shunt_y_to}) {
      if (sh->labels != l.series_z.labels)
        add(out, l.id, "shunt_labels",
            "line '" + l.id + "' shunt labels must match its series labels");
    }
  }

  seen.clear();
  for (const Load& d : net.loads) {
    if (!seen.insert(d.id).second)
      add(out, d.id, "duplicate_id", "duplicate load id '" + d.id + "'");
    auto it = bus_idx.find(d.bus);
    if (it == bus_idx.end())
      add(out, d.id, "dangling_reference",
          "load '" + d.id + "' references unknown bus '" + d.bus + "'");
    if (d.phases.empty())
      add(out, d.id, "empty_phases", "load '" + d.id + "' lists no phases");
    if (!detail::labels_sorted_unique(d.phases) ||
        std::find(d.phases.begin(), d.phases.end(), Conductor::N) != d.phases.end())
      add(out, d.id, "load_phases",
          "load '" + d.id + "' phases must be a sorted subset of a,b,c");
    if (d.s_ref.size() != d.phases.size())
      add(out, d.id, "setpoint_arity",
          "load '" + d.id + "' needs one power set point per phase");
    if (it != bus_idx.end() && !subset_of(d.phases, net.buses[it->second].conductors))
      add(out, d.id, "conductor_mismatch",
          "load '" + d.id + "' uses phases absent at bus '" + d.bus + "'");
  }

  if (net.sources.size() != 1) {
    add(out, "network", "source_count",
        "network must have exactly one source, found " + std::to_string(net.sources.size()));
  }
  seen.clear();
  for (const Source& s : net.sources) {
    if (!seen.insert(s.id).second)
      add(out, s.id, "duplicate_id", "duplicate source id '" + s.id + "'");
    auto it = bus_idx.find(s.bus);
    if (it == bus_idx.end()) {
      add(out, s.id, "dangling_reference",
          "source '" + s.id + "' references unknown bus '" + s.bus + "'");
      continue;
    }
    const Bus& b = net.buses[it->second];
    if (s.labels != b.conductors)
      add(out, s.id, "conductor_mismatch",
          "source '" + s.id + "' must fix every conductor of bus '" + b.id + "'");
    if (s.v_ref.size() != s.labels.size())
      add(out, s.id, "setpoint_arity", "source '" + s.id + "' v_ref arity mismatch");
    if (b.has(Conductor::N)) {
      if (!b.grounded)
        add(out, s.id, "source_ungrounded",
            "source bus '" + b.id + "' must be grounded");
      auto n = std::find(s.labels.begin(), s.labels.end(), Conductor::N);
      if (n != s.labels.end() && s.v_ref.size() == s.labels.size() &&
          std::abs(s.v_ref[static_cast<std::size_t>(n - s.labels.begin())]) != 0.0)
        add(out, s.id, "source_neutral_voltage",
            "source '" + s.id + "' neutral reference must be 0 V");
    }
    covered[it->second].insert(s.labels.begin(), s.labels.end());
  }

  // Grounding requirement applies to explicit-neutral networks; transformed
  // 3-wire networks take their reference from the source alone.
  if (net.has_neutral()) {
    bool any_grounded = false;
    for (const Bus& b : net.buses) any_grounded |= b.grounded;
    if (!any_grounded)
      add(out, "network", "no_grounding",
          "explicit-neutral network needs at least one grounded bus");
  }

  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    for (Conductor c : net.buses[i].conductors)
      if (!covered[i].count(c))
        add(out, net.buses[i].id, "floating_conductor",
            "bus '" + net.buses[i].id + "' conductor '" +
                std::string(1, conductor_char(c)) +
                "' is attached to no line or source");
  }

  // Connectivity over lines, undirected.
  if (!net.buses.empty()) {
    std::vector<char> reached(net.buses.size(), 0);
    std::queue<std::size_t> frontier;
    reached[0] = 1;
    frontier.push(0);
    while (!frontier.empty()) {
      std::size_t i = frontier.front();
      frontier.pop();
      for (const LineSegment& l : net.lines) {
        auto a = bus_idx.find(l.from_bus);
        auto b = bus_idx.find(l.to_bus);
        if (a == bus_idx.end() || b == bus_idx.end()) continue;
        std::size_t other;
        if (a->second == i) other = b->second;
        else if (b->second == i) other = a->second;
        else continue;
        if (!reached[other]) {
          reached[other] = 1;
          frontier.push(other);
        }
      }
    }
    if (std::find(reached.begin(), reached.end(), 0) != reached.end())
      add(out, "network", "disconnected",
          "network graph has isolated subgraphs");
  }

  return out;
}

namespace {

bool close(double a, double b, double rtol) {
  double diff = std::abs(a - b);
  return diff <= rtol * std::max({std::abs(a), std::abs(b), 1e-300});
}

bool close(Complex a, Complex b, double rtol) {
  double diff = std::abs(a - b);
  return diff <= rtol * std::max({std::abs(a), std::abs(b), 1e-300});
}

bool close(const CMatrix& a, const CMatrix& b, double rtol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!close(a(i, j), b(i, j), rtol)) return false;
  return true;
}

template <typename T, typename Cmp>
std::vector<const T*> sorted_by_id(const std::vector<T>& v, Cmp) {
  std::vector<const T*> out;
  out.reserve(v.size());
  for (const T& x : v) out.push_back(&x);
  std::sort(out.begin(), out.end(), [](const T* a, const T* b) { return a->id < b->id; });
  return out;
}

struct ById {};

}  // namespace

bool networks_equal(const Network& a, const Network& b, double rtol) {
  if (a.name != b.name) return false;
  if (a.buses.size() != b.buses.size() || a.lines.size() != b.lines.size() ||
      a.loads.size() != b.loads.size() || a.sources.size() != b.sources.size())
    return false;

  auto ba = sorted_by_id(a.buses, ById{});
  auto bb = sorted_by_id(b.buses, ById{});
  for (std::size_t i = 0; i < ba.size(); ++i) {
    if (ba[i]->id != bb[i]->id || ba[i]->conductors != bb[i]->conductors ||
        ba[i]->grounded != bb[i]->grounded ||
        !close(ba[i]->base_voltage, bb[i]->base_voltage, rtol))
      return false;
  }

  auto la = sorted_by_id(a.lines, ById{});
  auto lb = sorted_by_id(b.lines, ById{});
  for (std::size_t i = 0; i < la.size(); ++i) {
    const LineSegment &x = *la[i], &y = *lb[i];
    if (x.id != y.id || x.from_bus != y.from_bus || x.to_bus != y.to_bus) return false;
    if (x.series_z.labels != y.series_z.labels) return false;
    if (!close(x.series_z.z, y.series_z.z, rtol)) return false;
    if (x.shunt_y_from.labels != y.shunt_y_from.labels ||
        !close(x.shunt_y_from.y, y.shunt_y_from.y, rtol))
      return false;
    if (x.shunt_y_to.labels != y.shunt_y_to.labels ||
        !close(x.shunt_y_to.y, y.shunt_y_to.y, rtol))
      return false;
  }

  auto da = sorted_by_id(a.loads, ById{});
  auto db = sorted_by_id(b.loads, ById{});
  for (std::size_t i = 0; i < da.size(); ++i) {
    const Load &x = *da[i], &y = *db[i];
    if (x.id != y.id || x.bus != y.bus || x.phases != y.phases ||
        x.s_ref.size() != y.s_ref.size())
      return false;
    for (std::size_t k = 0; k < x.s_ref.size(); ++k)
      if (!close(x.s_ref[k], y.s_ref[k], rtol)) return false;
  }

  auto sa = sorted_by_id(a.sources, ById{});
  auto sb = sorted_by_id(b.sources, ById{});
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const Source &x = *sa[i], &y = *sb[i];
    if (x.id != y.id || x.bus != y.bus || x.labels != y.labels ||
        x.v_ref.size() != y.v_ref.size())
      return false;
    for (std::size_t k = 0; k < x.v_ref.size(); ++k)
      if (!close(x.v_ref[k], y.v_ref[k], rtol)) return false;
  }
  return true;
}

}  // namespace fourwire
