#pragma once

// Chains of Taylor-map layers with optional weight sharing, trained on a
// single trajectory with a masked MSE plus symplectic penalty.

#include "taylormap/observations.hpp"
#include "taylormap/taylor_map.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace taylormap {

/// An unrolled chain of layer slots. Slot j maps the state at boundary j to
/// boundary j + 1 using the weights of group group_of(j). Boundary 0 is the
/// input; taps are boundaries in [1, layers()] whose states are emitted.
class Network {
 public:
  Network(std::vector<TaylorMap> groups, std::vector<std::size_t> slot_groups, std::vector<std::size_t> taps);

  std::size_t layers() const { return slot_groups_.size(); }
  int dim() const { return groups_.front().dim(); }
  int order() const { return groups_.front().order(); }

  const std::vector<TaylorMap>& groups() const { return groups_; }
  std::size_t group_of(std::size_t slot) const { return slot_groups_[slot]; }
  const std::vector<std::size_t>& slot_groups() const { return slot_groups_; }
  const std::vector<std::size_t>& taps() const { return taps_; }
  bool has_tap(std::size_t boundary) const;

  /// Same topology, new group weights.
  Network with_groups(std::vector<TaylorMap> groups) const;

 private:
  std::vector<TaylorMap> groups_;
  std::vector<std::size_t> slot_groups_;
  std::vector<std::size_t> taps_;
};

/// `length` slots sharing one map, every boundary tapped.
Network build_shared_chain(const TaylorMap& map, std::size_t length);

/// One slot per map with unique weights. Empty taps selects every boundary.
Network build_untied_chain(std::vector<TaylorMap> maps, std::vector<std::size_t> taps = {});

/// States at every boundary 0..layers(). Throws DivergenceError on a
/// non-finite state.
std::vector<Eigen::VectorXd> forward_states(const Network& net, const Eigen::VectorXd& x0);

/// States at the network's taps, in tap order.
std::vector<Eigen::VectorXd> forward(const Network& net, const Eigen::VectorXd& x0);

/// Tapped states projected onto the observed components: one row per tap.
Eigen::MatrixXd predict_trajectory(const Network& net, const Eigen::VectorXd& x0,
                                   const std::vector<bool>& observed);

enum class SymplecticLayout { canonical, interleaved };

SymplecticStructure make_structure(SymplecticLayout layout, int dim);

struct LossValue {
  double total = 0.0;
  double data = 0.0;
  double penalty = 0.0;
};

/// data = mean squared error over observed (tap, component) pairs,
/// penalty = sum of symplectic_penalty over weight groups (0 for odd dim),
/// total = data + lambda * penalty.
LossValue loss(const Network& net, const Eigen::VectorXd& x0, const ObservationSeries& obs, double lambda,
               SymplecticLayout layout = SymplecticLayout::canonical);

struct Gradients {
  LossValue value;
  /// One gradient per weight group, shaped like the group's weights.
  std::vector<WeightBlocks> groups;
};

/// Exact gradient of loss() by reverse accumulation through the chain.
Gradients backward(const Network& net, const Eigen::VectorXd& x0, const ObservationSeries& obs, double lambda,
                   SymplecticLayout layout = SymplecticLayout::canonical);

struct TrainConfig {
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Gradients whose global L2 norm exceeds this are rescaled onto it.
  double clip_norm = 1.0;
  int epochs = 1000;
  /// Weight of the symplectic penalty. The data term is a mean, so lambda
  /// is relative to a per-entry squared error.
  double lambda = 0.0;
  std::uint64_t seed = 0;
  /// When false, the constant blocks W_0 keep their initial values.
  bool train_offsets = true;
  SymplecticLayout layout = SymplecticLayout::canonical;

  void validate() const;
};

struct LossReport {
  /// Loss at the start of each epoch, before that epoch's update.
  std::vector<LossValue> history;
  /// Loss of the returned network.
  LossValue final;
};

struct TrainResult {
  Network network;
  LossReport report;
};

/// Called after each epoch's update with the 1-based epoch number.
using EpochObserver = std::function<void(int epoch, const Network& net)>;

/// Full-batch Adam with global-norm clipping on one trajectory. The
/// initial state x0 is fixed. Throws DivergenceError naming the epoch when
/// the loss becomes non-finite.
TrainResult train_one_shot(const Network& net, const Eigen::VectorXd& x0, const ObservationSeries& obs,
                           const TrainConfig& cfg, const EpochObserver& observer = {});

}  // namespace taylormap
