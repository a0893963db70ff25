#pragma once

// Autonomous polynomial ODEs dX/dt = P_0 + P_1 X + ... + P_k X^[k] and their
// conversion into Taylor maps over a fixed time step.

#include "taylormap/taylor_map.hpp"

#include <functional>
#include <vector>

namespace taylormap {

class PolynomialODE {
 public:
  /// Takes P_0..P_k with the same shape rules as TaylorMap weights.
  explicit PolynomialODE(WeightBlocks coeffs);

  static PolynomialODE zeros(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  const Eigen::MatrixXd& coeff(int d) const { return coeffs_[static_cast<std::size_t>(d)]; }
  const WeightBlocks& coeffs() const { return coeffs_; }

  /// Right-hand side at state x.
  Eigen::VectorXd rhs(const Eigen::VectorXd& x) const;

 private:
  int dim_;
  int order_;
  WeightBlocks coeffs_;
};

struct FlowConfig {
  double dt = 0.1;
  int substeps = 1000;
  /// Order of the produced map; 0 selects the ODE's own order.
  int order = 0;
};

/// dW_d/dt for every block of the current map: the ODE right-hand side with
/// the map substituted for the state, truncated at the map's order.
WeightBlocks weight_flow_rhs(const TaylorMap& current, const PolynomialODE& ode);

/// Integrates the weight flow from the identity map over [0, cfg.dt] with
/// cfg.substeps RK4 steps. Throws DivergenceError on non-finite weights.
TaylorMap ode_to_map(const PolynomialODE& ode, const FlowConfig& cfg);

/// The map of one explicit Euler step, X + dt * F(X).
TaylorMap euler_map(const PolynomialODE& ode, double dt);

using StateRhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Dense RK4 integration sampled every dt; returns steps + 1 states starting
/// with x0. Each sampling interval is split into `substeps` RK4 steps.
std::vector<Eigen::VectorXd> integrate_trajectory(const StateRhs& rhs, const Eigen::VectorXd& x0,
                                                  double dt, int steps, int substeps = 100);

/// integrate_trajectory for a polynomial ODE.
std::vector<Eigen::VectorXd> reference_trajectory(const PolynomialODE& ode, const Eigen::VectorXd& x0,
                                                  double dt, int steps, int substeps = 100);

}  // namespace taylormap
