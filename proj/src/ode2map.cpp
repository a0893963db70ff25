#include "taylormap/ode2map.hpp"

#include "taylormap/errors.hpp"
#include "taylormap/rk4.hpp"

#include <sstream>

namespace taylormap {

PolynomialODE::PolynomialODE(WeightBlocks coeffs) : coeffs_(std::move(coeffs)) {
  dim_ = check_blocks(coeffs_, "PolynomialODE");
  order_ = static_cast<int>(coeffs_.size()) - 1;
}

PolynomialODE PolynomialODE::zeros(int dim, int order) {
  return PolynomialODE(TaylorMap::zeros(dim, order).weights());
}

Eigen::VectorXd PolynomialODE::rhs(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw ShapeError("PolynomialODE::rhs: state dimension mismatch");
  Eigen::VectorXd out = coeffs_[0].col(0) + coeffs_[1] * x;
  for (int d = 2; d <= order_; ++d) out.noalias() += coeffs_[static_cast<std::size_t>(d)] * kron_power(x, d);
  return out;
}

namespace {

// The weight flow over maps stacked as one n x N matrix.
class WeightFlow {
 public:
  WeightFlow(const PolynomialODE& ode, int order) : ode_(ode), algebra_(ode.dim(), order) {}

  const TruncatedAlgebra& algebra() const { return algebra_; }

  Eigen::MatrixXd operator()(const Eigen::MatrixXd& stacked) const {
    const auto blocks = algebra_.split(stacked);
    const auto powers = component_powers(blocks, ode_.order(), algebra_);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(stacked.rows(), stacked.cols());
    for (int d = 0; d <= ode_.order(); ++d) out.noalias() += ode_.coeff(d) * powers[d];
    return out;
  }

 private:
  const PolynomialODE& ode_;
  TruncatedAlgebra algebra_;
};

void check_flow_config(const FlowConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw DomainError("flow time step must be positive");
  if (cfg.substeps < 1) throw DomainError("flow substeps must be >= 1");
  if (cfg.order < 0) throw DomainError("flow order must be >= 0");
}

}  // namespace

WeightBlocks weight_flow_rhs(const TaylorMap& current, const PolynomialODE& ode) {
  if (current.dim() != ode.dim()) throw ShapeError("weight_flow_rhs: dimension mismatch");
  const WeightFlow flow(ode, current.order());
  return flow.algebra().split(flow(flow.algebra().stack(current.weights())));
}

TaylorMap ode_to_map(const PolynomialODE& ode, const FlowConfig& cfg) {
  check_flow_config(cfg);
  const int order = cfg.order == 0 ? ode.order() : cfg.order;
  const WeightFlow flow(ode, order);
  Eigen::MatrixXd stacked = flow.algebra().stack(identity_map(ode.dim(), order).weights());
  const double h = cfg.dt / cfg.substeps;
  for (int step = 0; step < cfg.substeps; ++step) {
    stacked = rk4_step(flow, stacked, h);
    if (!stacked.allFinite()) {
      std::ostringstream msg;
      msg << "weight flow diverged at t = " << (step + 1) * h << " of " << cfg.dt
          << "; reduce dt or raise substeps";
      throw DivergenceError(msg.str());
    }
  }
  return TaylorMap(flow.algebra().split(stacked));
}

TaylorMap euler_map(const PolynomialODE& ode, double dt) {
  if (!(dt > 0.0)) throw DomainError("Euler step must be positive");
  WeightBlocks w;
  for (const auto& p : ode.coeffs()) w.push_back(dt * p);
  w[1] += Eigen::MatrixXd::Identity(ode.dim(), ode.dim());
  return TaylorMap(std::move(w));
}

std::vector<Eigen::VectorXd> integrate_trajectory(const StateRhs& rhs, const Eigen::VectorXd& x0,
                                                  double dt, int steps, int substeps) {
  if (!(dt > 0.0)) throw DomainError("sampling step must be positive");
  if (steps < 0 || substeps < 1) throw DomainError("steps must be >= 0 and substeps >= 1");
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(steps + 1));
  out.push_back(x0);
  Eigen::VectorXd x = x0;
  const double h = dt / substeps;
  for (int i = 0; i < steps; ++i) {
    for (int s = 0; s < substeps; ++s) x = rk4_step(rhs, x, h);
    if (!x.allFinite()) {
      std::ostringstream msg;
      msg << "reference integration diverged at t = " << (i + 1) * dt;
      throw DivergenceError(msg.str());
    }
    out.push_back(x);
  }
  return out;
}

std::vector<Eigen::VectorXd> reference_trajectory(const PolynomialODE& ode, const Eigen::VectorXd& x0,
                                                  double dt, int steps, int substeps) {
  if (x0.size() != ode.dim()) throw ShapeError("reference_trajectory: state dimension mismatch");
  return integrate_trajectory([&ode](const Eigen::VectorXd& x) { return ode.rhs(x); }, x0, dt, steps,
                              substeps);
}

}  // namespace taylormap
