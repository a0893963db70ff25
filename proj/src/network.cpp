#include "taylormap/network.hpp"

#include "taylormap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace taylormap {

Network::Network(std::vector<TaylorMap> groups, std::vector<std::size_t> slot_groups,
                 std::vector<std::size_t> taps)
    : groups_(std::move(groups)), slot_groups_(std::move(slot_groups)), taps_(std::move(taps)) {
  if (groups_.empty()) throw ShapeError("network needs at least one weight group");
  if (slot_groups_.empty()) throw ShapeError("network needs at least one layer");
  for (const auto& g : groups_)
    if (g.dim() != groups_.front().dim() || g.order() != groups_.front().order())
      throw ShapeError("all weight groups must share dimension and order");
  for (auto g : slot_groups_)
    if (g >= groups_.size()) throw ShapeError("layer references a missing weight group");
  for (std::size_t i = 0; i < taps_.size(); ++i) {
    if (taps_[i] < 1 || taps_[i] > slot_groups_.size())
      throw ShapeError("tap " + std::to_string(taps_[i]) + " outside [1, layers]");
    if (i > 0 && taps_[i] <= taps_[i - 1]) throw ShapeError("taps must be strictly increasing");
  }
}

bool Network::has_tap(std::size_t boundary) const {
  return std::binary_search(taps_.begin(), taps_.end(), boundary);
}

Network Network::with_groups(std::vector<TaylorMap> groups) const {
  if (groups.size() != groups_.size()) throw ShapeError("with_groups: group count mismatch");
  return Network(std::move(groups), slot_groups_, taps_);
}

Network build_shared_chain(const TaylorMap& map, std::size_t length) {
  if (length < 1) throw DomainError("chain length must be >= 1");
  std::vector<std::size_t> taps(length);
  std::iota(taps.begin(), taps.end(), std::size_t{1});
  return Network({map}, std::vector<std::size_t>(length, 0), std::move(taps));
}

Network build_untied_chain(std::vector<TaylorMap> maps, std::vector<std::size_t> taps) {
  const std::size_t length = maps.size();
  std::vector<std::size_t> slots(length);
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  if (taps.empty()) {
    taps.resize(length);
    std::iota(taps.begin(), taps.end(), std::size_t{1});
  }
  return Network(std::move(maps), std::move(slots), std::move(taps));
}

std::vector<Eigen::VectorXd> forward_states(const Network& net, const Eigen::VectorXd& x0) {
  if (x0.size() != net.dim()) throw ShapeError("forward: initial state dimension mismatch");
  std::vector<Eigen::VectorXd> states;
  states.reserve(net.layers() + 1);
  states.push_back(x0);
  for (std::size_t j = 0; j < net.layers(); ++j) {
    states.push_back(apply(net.groups()[net.group_of(j)], states.back()));
    if (!states.back().allFinite())
      throw DivergenceError("forward pass diverged at layer " + std::to_string(j + 1));
  }
  return states;
}

std::vector<Eigen::VectorXd> forward(const Network& net, const Eigen::VectorXd& x0) {
  const auto states = forward_states(net, x0);
  std::vector<Eigen::VectorXd> tapped;
  tapped.reserve(net.taps().size());
  for (auto t : net.taps()) tapped.push_back(states[t]);
  return tapped;
}

Eigen::MatrixXd predict_trajectory(const Network& net, const Eigen::VectorXd& x0,
                                   const std::vector<bool>& observed) {
  if (observed.size() != static_cast<std::size_t>(net.dim()))
    throw ShapeError("predict_trajectory: mask length differs from state dimension");
  const auto tapped = forward(net, x0);
  const auto cols = std::count(observed.begin(), observed.end(), true);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(tapped.size()), cols);
  for (std::size_t i = 0; i < tapped.size(); ++i) {
    Eigen::Index c = 0;
    for (std::size_t k = 0; k < observed.size(); ++k)
      if (observed[k]) out(static_cast<Eigen::Index>(i), c++) = tapped[i][static_cast<Eigen::Index>(k)];
  }
  return out;
}

SymplecticStructure make_structure(SymplecticLayout layout, int dim) {
  return layout == SymplecticLayout::interleaved ? SymplecticStructure::interleaved(dim)
                                                 : SymplecticStructure::canonical(dim);
}

namespace {

void check_observations(const Network& net, const ObservationSeries& obs) {
  if (obs.empty() || obs.observed_count() == 0) throw DomainError("loss needs at least one observed entry");
  for (const auto& r : obs.records()) {
    if (!net.has_tap(r.tap)) throw ShapeError("observation at tap " + std::to_string(r.tap) + " has no network tap");
    if (r.values.size() != net.dim()) throw ShapeError("observation dimension differs from network dimension");
  }
}

double penalty_sum(const Network& net, double lambda, SymplecticLayout layout) {
  if (net.dim() % 2 != 0) {
    if (lambda > 0.0) throw DomainError("symplectic penalty needs an even state dimension");
    return 0.0;
  }
  const auto structure = make_structure(layout, net.dim());
  double sum = 0.0;
  for (const auto& g : net.groups()) sum += symplectic_penalty(g, structure);
  return sum;
}

}  // namespace

LossValue loss(const Network& net, const Eigen::VectorXd& x0, const ObservationSeries& obs, double lambda,
               SymplecticLayout layout) {
  check_observations(net, obs);
  const auto states = forward_states(net, x0);
  double sq = 0.0;
  for (const auto& r : obs.records())
    for (Eigen::Index c = 0; c < r.values.size(); ++c)
      if (r.mask[static_cast<std::size_t>(c)]) {
        const double diff = states[r.tap][c] - r.values[c];
        sq += diff * diff;
      }
  LossValue v;
  v.data = sq / static_cast<double>(obs.observed_count());
  v.penalty = penalty_sum(net, lambda, layout);
  v.total = v.data + lambda * v.penalty;
  return v;
}

Gradients backward(const Network& net, const Eigen::VectorXd& x0, const ObservationSeries& obs, double lambda,
                   SymplecticLayout layout) {
  check_observations(net, obs);
  const auto states = forward_states(net, x0);
  const double scale = 2.0 / static_cast<double>(obs.observed_count());

  Gradients out;
  out.groups.reserve(net.groups().size());
  for (const auto& g : net.groups()) out.groups.push_back(zero_blocks_like(g));

  double sq = 0.0;
  Eigen::VectorXd adjoint = Eigen::VectorXd::Zero(net.dim());
  auto record = obs.records().rbegin();
  for (std::size_t boundary = net.layers(); boundary >= 1; --boundary) {
    if (record != obs.records().rend() && record->tap == boundary) {
      for (Eigen::Index c = 0; c < record->values.size(); ++c) {
        if (!record->mask[static_cast<std::size_t>(c)]) continue;
        const double diff = states[boundary][c] - record->values[c];
        sq += diff * diff;
        adjoint[c] += scale * diff;
      }
      ++record;
    }
    const auto group = net.group_of(boundary - 1);
    const auto& map = net.groups()[group];
    const auto& input = states[boundary - 1];
    add_scaled(out.groups[group], weight_gradients(map, input, adjoint));
    adjoint = jacobian_state(map, input).transpose() * adjoint;
  }

  out.value.data = sq / static_cast<double>(obs.observed_count());
  out.value.penalty = penalty_sum(net, lambda, layout);
  out.value.total = out.value.data + lambda * out.value.penalty;
  if (lambda > 0.0) {
    const auto structure = make_structure(layout, net.dim());
    for (std::size_t g = 0; g < net.groups().size(); ++g)
      add_scaled(out.groups[g], symplectic_penalty_gradient(net.groups()[g], structure), lambda);
  }
  return out;
}

void TrainConfig::validate() const {
  if (!(step_size > 0.0)) throw DomainError("step size must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
    throw DomainError("Adam moments must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw DomainError("Adam epsilon must be positive");
  if (!(clip_norm > 0.0)) throw DomainError("clip norm must be positive");
  if (epochs < 0) throw DomainError("epochs must be >= 0");
  if (!(lambda >= 0.0)) throw DomainError("penalty rate must be >= 0");
}

namespace {

Eigen::VectorXd pack(const std::vector<WeightBlocks>& groups) {
  Eigen::Index size = 0;
  for (const auto& g : groups)
    for (const auto& b : g) size += b.size();
  Eigen::VectorXd packed(size);
  Eigen::Index pos = 0;
  for (const auto& g : groups)
    for (const auto& b : g) {
      packed.segment(pos, b.size()) = b.reshaped();
      pos += b.size();
    }
  return packed;
}

Network unpack(const Network& like, const Eigen::VectorXd& packed) {
  std::vector<TaylorMap> groups;
  groups.reserve(like.groups().size());
  Eigen::Index pos = 0;
  for (const auto& g : like.groups()) {
    const auto count = static_cast<Eigen::Index>(g.parameter_count());
    groups.push_back(g.with_parameters(packed.segment(pos, count)));
    pos += count;
  }
  return like.with_groups(std::move(groups));
}

}  // namespace

TrainResult train_one_shot(const Network& net, const Eigen::VectorXd& x0, const ObservationSeries& obs,
                           const TrainConfig& cfg, const EpochObserver& observer) {
  cfg.validate();
  std::vector<WeightBlocks> initial;
  for (const auto& g : net.groups()) initial.push_back(g.weights());
  Eigen::VectorXd params = pack(initial);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(params.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(params.size());

  TrainResult result{net, {}};
  result.report.history.reserve(static_cast<std::size_t>(cfg.epochs));
  double beta1_power = 1.0;
  double beta2_power = 1.0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Gradients grads;
    try {
      grads = backward(result.network, x0, obs, cfg.lambda, cfg.layout);
    } catch (const DivergenceError& e) {
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }
    if (!std::isfinite(grads.value.total)) {
      std::ostringstream msg;
      msg << "training diverged at epoch " << epoch << ": loss " << grads.value.total;
      throw DivergenceError(msg.str());
    }
    result.report.history.push_back(grads.value);

    if (!cfg.train_offsets)
      for (auto& blocks : grads.groups) blocks[0].setZero();
    Eigen::VectorXd g = pack(grads.groups);
    const double norm = g.norm();
    if (!std::isfinite(norm))
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + ": non-finite gradient");
    if (norm > cfg.clip_norm) g *= cfg.clip_norm / norm;

    beta1_power *= cfg.beta1;
    beta2_power *= cfg.beta2;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseAbs2();
    const Eigen::VectorXd m_hat = m / (1.0 - beta1_power);
    const Eigen::VectorXd v_hat = v / (1.0 - beta2_power);
    params.array() -= cfg.step_size * m_hat.array() / (v_hat.array().sqrt() + cfg.epsilon);

    result.network = unpack(result.network, params);
    if (observer) observer(epoch, result.network);
  }
  try {
    result.report.final = loss(result.network, x0, obs, cfg.lambda, cfg.layout);
  } catch (const DivergenceError& e) {
    throw DivergenceError("training diverged after epoch " + std::to_string(cfg.epochs) + ": " + e.what());
  }
  return result;
}

}  // namespace taylormap
