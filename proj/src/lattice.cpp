#include "taylormap/lattice.hpp"

#include "taylormap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace taylormap {

PolynomialODE magnet_ode(const MagnetSpec& spec) {
  auto c = PolynomialODE::zeros(4, 2).coeffs();
  c[1](0, 1) = 1.0;
  c[1](2, 3) = 1.0;
  const double k = spec.strength;
  switch (spec.kind) {
    case MagnetKind::drift:
      break;
    case MagnetKind::quadrupole:
      c[1](1, 0) = -k;
      c[1](3, 2) = k;
      break;
    case MagnetKind::sextupole:
      c[2](1, static_cast<Eigen::Index>(monomial_rank(std::vector{2, 0, 0, 0}))) = -k;
      c[2](1, static_cast<Eigen::Index>(monomial_rank(std::vector{0, 0, 2, 0}))) = k;
      c[2](3, static_cast<Eigen::Index>(monomial_rank(std::vector{1, 0, 1, 0}))) = 2.0 * k;
      break;
  }
  return PolynomialODE(std::move(c));
}

Element make_magnet(std::string name, const MagnetSpec& spec, int order) {
  if (!(spec.length > 0.0)) throw DomainError("magnet length must be positive");
  FlowConfig flow{spec.length, spec.substeps, order};
  return Element{std::move(name), ode_to_map(magnet_ode(spec), flow), spec, std::nullopt};
}

Element make_ode_element(std::string name, PolynomialODE ode, const FlowConfig& flow) {
  TaylorMap map = ode_to_map(ode, flow);
  return Element{std::move(name), std::move(map), std::nullopt, OdeSource{std::move(ode), flow}};
}

Element make_map_element(std::string name, TaylorMap map) {
  return Element{std::move(name), std::move(map), std::nullopt, std::nullopt};
}

Lattice::Lattice(std::vector<Element> elements, std::vector<std::size_t> monitors, bool ring)
    : elements_(std::move(elements)), monitors_(std::move(monitors)), ring_(ring) {
  if (elements_.empty()) throw ShapeError("lattice needs at least one element");
  for (const auto& e : elements_)
    if (e.map.dim() != elements_.front().map.dim() || e.map.order() != elements_.front().map.order())
      throw ShapeError("lattice elements must share dimension and order");
  if (elements_.front().map.dim() != 4) throw ShapeError("lattice elements act on (x, x', y, y')");
  for (std::size_t i = 0; i < monitors_.size(); ++i) {
    if (monitors_[i] < 1 || monitors_[i] > elements_.size())
      throw ShapeError("monitor " + std::to_string(monitors_[i]) + " is not an element boundary");
    if (i > 0 && monitors_[i] <= monitors_[i - 1]) throw ShapeError("monitors must be strictly increasing");
  }
}

std::vector<TaylorMap> Lattice::maps() const {
  std::vector<TaylorMap> out;
  out.reserve(elements_.size());
  for (const auto& e : elements_) out.push_back(e.map);
  return out;
}

Lattice Lattice::with_maps(std::vector<TaylorMap> maps) const {
  if (maps.size() != elements_.size()) throw ShapeError("with_maps: element count mismatch");
  std::vector<Element> elements;
  elements.reserve(maps.size());
  for (std::size_t i = 0; i < maps.size(); ++i)
    elements.push_back(make_map_element(elements_[i].name, std::move(maps[i])));
  return Lattice(std::move(elements), monitors_, ring_);
}

std::vector<MonitorReading> one_turn_readings(const Lattice& lat, const Eigen::VectorXd& x0) {
  if (x0.size() != lat.dim()) throw ShapeError("one_turn_readings: initial state must have dim 4");
  std::vector<MonitorReading> readings;
  readings.reserve(lat.monitors().size());
  Eigen::VectorXd x = x0;
  auto monitor = lat.monitors().begin();
  for (std::size_t i = 0; i < lat.size(); ++i) {
    x = apply(lat.elements()[i].map, x);
    if (!x.allFinite()) throw DivergenceError("tracking diverged in element " + std::to_string(i + 1));
    if (monitor != lat.monitors().end() && *monitor == i + 1) {
      readings.push_back({i + 1, x[kX], x[kY]});
      ++monitor;
    }
  }
  return readings;
}

TurnSeries multi_turn(const Lattice& lat, const Eigen::VectorXd& x0, int n_turns) {
  if (!lat.ring()) throw DomainError("multi-turn tracking needs a ring lattice");
  if (x0.size() != lat.dim()) throw ShapeError("multi_turn: initial state must have dim 4");
  if (n_turns < 0) throw DomainError("turn count must be >= 0");
  TurnSeries series;
  series.reserve(static_cast<std::size_t>(n_turns));
  Eigen::VectorXd x = x0;
  for (int turn = 1; turn <= n_turns; ++turn) {
    for (const auto& e : lat.elements()) x = apply(e.map, x);
    if (!x.allFinite()) throw DivergenceError("tracking diverged on turn " + std::to_string(turn));
    series.push_back(x);
  }
  return series;
}

TaylorMap one_turn_map(const Lattice& lat, int k) {
  TaylorMap total = lat.elements().front().map;
  for (std::size_t i = 1; i < lat.size(); ++i) total = compose(lat.elements()[i].map, total, k);
  return total;
}

FrequencyEstimate estimate_frequency(std::span<const double> series) {
  const auto n = series.size();
  if (n < 64) throw DomainError("frequency estimation needs at least 64 samples");

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double spread = 0.0;
  for (double v : series) spread = std::max(spread, std::abs(v - mean));
  if (spread <= 1e-14 * std::max(1.0, std::abs(mean))) return {0.0, true};

  std::vector<double> windowed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    windowed[i] = w * (series[i] - mean);
  }

  // Zero-padded spectrum on [0, 0.5].
  const std::size_t padded = 8 * n;
  const std::size_t bins = padded / 2 + 1;
  std::vector<double> magnitude(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double omega = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(padded);
    // Rotation recurrence for exp(-i omega t).
    const double c = std::cos(omega);
    const double s = std::sin(omega);
    double re = 0.0, im = 0.0, cr = 1.0, ci = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      re += windowed[t] * cr;
      im -= windowed[t] * ci;
      const double next = cr * c - ci * s;
      ci = cr * s + ci * c;
      cr = next;
    }
    magnitude[k] = std::hypot(re, im);
  }

  std::size_t peak = 1;
  for (std::size_t k = 1; k < bins; ++k)
    if (magnitude[k] > magnitude[peak]) peak = k;

  double offset = 0.0;
  if (peak > 0 && peak + 1 < bins) {
    const double a = std::log(magnitude[peak - 1] + 1e-300);
    const double b = std::log(magnitude[peak] + 1e-300);
    const double g = std::log(magnitude[peak + 1] + 1e-300);
    const double denom = a - 2.0 * b + g;
    if (denom < 0.0) offset = 0.5 * (a - g) / denom;
  }
  const double freq = (static_cast<double>(peak) + offset) / static_cast<double>(padded);
  return {std::clamp(freq, 0.0, 0.5), false};
}

TuneEstimate estimate_tunes(const TurnSeries& series) {
  if (series.size() < 64) throw DomainError("tune estimation needs at least 64 turns");
  std::vector<double> xs, ys;
  xs.reserve(series.size());
  ys.reserve(series.size());
  for (const auto& s : series) {
    if (s.size() != 4) throw ShapeError("turn series states must have dim 4");
    xs.push_back(s[kX]);
    ys.push_back(s[kY]);
  }
  return {estimate_frequency(xs), estimate_frequency(ys)};
}

Lattice perturb_element(const Lattice& lat, std::size_t index, double factor) {
  if (index >= lat.size()) throw DomainError("element index " + std::to_string(index) + " out of range");
  if (!(factor > 0.0)) throw DomainError("perturbation factor must be positive");
  std::vector<Element> elements = lat.elements();
  Element& e = elements[index];
  if (e.magnet) {
    MagnetSpec spec = *e.magnet;
    spec.strength *= factor;
    e = make_magnet(e.name, spec, e.map.order());
  } else if (e.ode) {
    WeightBlocks coeffs = e.ode->ode.coeffs();
    for (std::size_t d = 1; d < coeffs.size(); ++d)
      for (Eigen::Index r = 1; r < coeffs[d].rows(); r += 2) coeffs[d].row(r) *= factor;
    e = make_ode_element(e.name, PolynomialODE(std::move(coeffs)), e.ode->flow);
  } else {
    WeightBlocks w = e.map.weights();
    for (Eigen::Index r = 1; r < w[1].rows(); r += 2)
      for (Eigen::Index c = 0; c < w[1].cols(); c += 2) w[1](r, c) *= factor;
    e.map = TaylorMap(std::move(w));
  }
  return Lattice(std::move(elements), lat.monitors(), lat.ring());
}

ObservationSeries readings_to_observations(std::span<const MonitorReading> readings) {
  std::vector<Observation> records;
  records.reserve(readings.size());
  for (const auto& r : readings) {
    Observation obs{r.boundary, Eigen::VectorXd::Zero(4), {true, false, true, false}};
    obs.values[kX] = r.x;
    obs.values[kY] = r.y;
    records.push_back(std::move(obs));
  }
  return ObservationSeries(std::move(records));
}

Network lattice_network(const Lattice& lat) { return build_untied_chain(lat.maps(), lat.monitors()); }

FineTuneResult fine_tune(const Lattice& assumed, const Eigen::VectorXd& x0, const ObservationSeries& obs,
                         const TrainConfig& cfg) {
  for (const auto& r : obs.records())
    if (r.mask.size() != 4 || r.mask[1] || r.mask[3])
      throw DomainError("lattice observations may only expose x and y");
  TrainConfig tuned = cfg;
  tuned.layout = SymplecticLayout::interleaved;
  auto result = train_one_shot(lattice_network(assumed), x0, obs, tuned);
  return {assumed.with_maps(result.network.groups()), std::move(result.report)};
}

Lattice desk_ring(const DeskRingOptions& o) {
  if (o.cells < 1) throw DomainError("desk ring needs at least one cell");
  std::vector<Element> elements;
  for (int c = 0; c < o.cells; ++c) {
    const std::string tag = std::to_string(c + 1);
    elements.push_back(make_magnet("QF" + tag, {MagnetKind::quadrupole, o.quad_strength, o.quad_length, o.substeps}));
    elements.push_back(make_magnet("DA" + tag, {MagnetKind::drift, 0.0, o.drift_length, o.substeps}));
    elements.push_back(make_magnet("QD" + tag, {MagnetKind::quadrupole, -o.quad_strength, o.quad_length, o.substeps}));
    elements.push_back(make_magnet("DB" + tag, {MagnetKind::drift, 0.0, o.drift_length, o.substeps}));
  }
  elements.push_back(
      make_magnet("SX1", {MagnetKind::sextupole, o.sextupole_strength, o.sextupole_length, o.substeps}));
  std::vector<std::size_t> monitors(elements.size());
  for (std::size_t i = 0; i < monitors.size(); ++i) monitors[i] = i + 1;
  return Lattice(std::move(elements), std::move(monitors), true);
}

}  // namespace taylormap
