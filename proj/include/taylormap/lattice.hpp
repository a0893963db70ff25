#pragma once

// A ring of per-element Taylor maps acting on (x, x', y, y'), with beam
// position monitors that read (x, y) only.

#include "taylormap/network.hpp"
#include "taylormap/ode2map.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace taylormap {

enum class MagnetKind { drift, quadrupole, sextupole };

/// Hill-type element: x'' = -k x, y'' = +k y for a quadrupole of strength k,
/// x'' = -k (x^2 - y^2), y'' = 2 k x y for a sextupole, free flight for a
/// drift. Integrated over `length` along the ring.
struct MagnetSpec {
  MagnetKind kind = MagnetKind::drift;
  double strength = 0.0;
  double length = 1.0;
  int substeps = 200;
};

PolynomialODE magnet_ode(const MagnetSpec& spec);

struct OdeSource {
  PolynomialODE ode;
  FlowConfig flow;
};

/// One ring element. At most one of `magnet` and `ode` is set; an element
/// with neither is a directly specified map.
struct Element {
  std::string name;
  TaylorMap map;
  std::optional<MagnetSpec> magnet;
  std::optional<OdeSource> ode;
};

Element make_magnet(std::string name, const MagnetSpec& spec, int order = 2);
Element make_ode_element(std::string name, PolynomialODE ode, const FlowConfig& flow);
Element make_map_element(std::string name, TaylorMap map);

class Lattice {
 public:
  /// Monitors are strictly increasing element boundaries in [1, size()].
  Lattice(std::vector<Element> elements, std::vector<std::size_t> monitors, bool ring = true);

  std::size_t size() const { return elements_.size(); }
  int dim() const { return elements_.front().map.dim(); }
  int order() const { return elements_.front().map.order(); }
  bool ring() const { return ring_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<std::size_t>& monitors() const { return monitors_; }

  std::vector<TaylorMap> maps() const;

  /// Same names and monitors with new maps; the generating sources are
  /// dropped since the maps no longer derive from them.
  Lattice with_maps(std::vector<TaylorMap> maps) const;

 private:
  std::vector<Element> elements_;
  std::vector<std::size_t> monitors_;
  bool ring_;
};

/// Indices of x and y in the state (x, x', y, y').
inline constexpr int kX = 0;
inline constexpr int kY = 2;

struct MonitorReading {
  std::size_t boundary = 0;
  double x = 0.0;
  double y = 0.0;
};

std::vector<MonitorReading> one_turn_readings(const Lattice& lat, const Eigen::VectorXd& x0);

/// End-of-ring states for turns 1..n.
using TurnSeries = std::vector<Eigen::VectorXd>;

TurnSeries multi_turn(const Lattice& lat, const Eigen::VectorXd& x0, int n_turns);

/// The one-turn map composed element by element, truncated at order k.
TaylorMap one_turn_map(const Lattice& lat, int k);

struct FrequencyEstimate {
  double frequency = 0.0;
  bool degenerate = false;
};

/// Dominant normalized frequency in [0, 0.5] of a real series: Hann window,
/// mean removed, zero-padded DFT magnitude, parabolic peak interpolation on
/// the log magnitude. A constant series gives 0 with `degenerate` set.
/// Frequencies Q and 1 - Q are indistinguishable and both report as the
/// folded value.
FrequencyEstimate estimate_frequency(std::span<const double> series);

struct TuneEstimate {
  FrequencyEstimate horizontal;
  FrequencyEstimate vertical;
};

/// Requires at least 64 turns.
TuneEstimate estimate_tunes(const TurnSeries& series);

/// Scales the strength of element `index` by `factor`: magnet elements are
/// rebuilt from their scaled ODE, ODE elements have their force rows
/// (x'' and y'') scaled and are rebuilt, and plain maps have the
/// position-to-momentum entries of W_1 scaled.
Lattice perturb_element(const Lattice& lat, std::size_t index, double factor);

/// Monitor readings as observations with only x and y unmasked.
ObservationSeries readings_to_observations(std::span<const MonitorReading> readings);

/// The lattice as an untied network tapped at the monitors.
Network lattice_network(const Lattice& lat);

struct FineTuneResult {
  Lattice lattice;
  LossReport report;
};

/// Trains every element's weights on one turn of monitor readings from a
/// known initial state. The symplectic penalty uses the (x, x'), (y, y')
/// pairing regardless of cfg.layout. Observations must not expose x' or y'.
FineTuneResult fine_tune(const Lattice& assumed, const Eigen::VectorXd& x0, const ObservationSeries& obs,
                         const TrainConfig& cfg);

struct DeskRingOptions {
  int cells = 4;
  double quad_strength = 1.2;
  double quad_length = 0.3;
  double drift_length = 1.0;
  double sextupole_strength = 0.02;
  double sextupole_length = 0.1;
  int substeps = 200;
};

/// FODO cells (QF, drift, QD, drift) followed by one weak sextupole; a
/// monitor after every element.
Lattice desk_ring(const DeskRingOptions& options = {});

}  // namespace taylormap
