#pragma once

// Polynomial transformation X -> W_0 + W_1 X + W_2 X^[2] + ... + W_k X^[k].

#include "taylormap/poly_basis.hpp"

#include <utility>
#include <vector>

namespace taylormap {

class TaylorMap {
 public:
  /// Takes W_0..W_k; W_d must be n x basis_size(n, d) with finite entries.
  explicit TaylorMap(WeightBlocks weights);

  static TaylorMap zeros(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  const Eigen::MatrixXd& weight(int d) const { return weights_[static_cast<std::size_t>(d)]; }
  const WeightBlocks& weights() const { return weights_; }

  /// Total number of weight entries.
  std::size_t parameter_count() const;

  /// All weights packed block by block, each block column-major.
  Eigen::VectorXd flatten() const;

  /// Same shape as this map, weights taken from a packed vector.
  TaylorMap with_parameters(const Eigen::VectorXd& packed) const;

 private:
  int dim_;
  int order_;
  WeightBlocks weights_;
};

/// W_0 = 0, W_1 = I, higher blocks zero.
TaylorMap identity_map(int n, int k);

Eigen::VectorXd apply(const TaylorMap& map, const Eigen::VectorXd& x);

/// d apply(map, x) / dx, an n x n matrix.
Eigen::MatrixXd jacobian_state(const TaylorMap& map, const Eigen::VectorXd& x);

/// Gradient of <upstream, apply(map, x)> with respect to every weight:
/// block d is upstream * kron_power(x, d)^T.
WeightBlocks weight_gradients(const TaylorMap& map, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& upstream);

/// outer(inner(X)) with every monomial above degree k dropped.
TaylorMap compose(const TaylorMap& outer, const TaylorMap& inner, int k);
/// Truncates at the larger operand order.
TaylorMap compose(const TaylorMap& outer, const TaylorMap& inner);

/// Block-shaped helpers for gradient accumulation.
WeightBlocks zero_blocks_like(const TaylorMap& map);
void add_scaled(WeightBlocks& into, const WeightBlocks& from, double scale = 1.0);

/// The antisymmetric form J of a phase space with n = 2m coordinates.
class SymplecticStructure {
 public:
  /// Coordinates (q_1..q_m, p_1..p_m), J = [[0, I], [-I, 0]].
  static SymplecticStructure canonical(int dim);
  /// Coordinates (q_1, p_1, q_2, p_2, ...), J = diag([[0, 1], [-1, 0]], ...).
  static SymplecticStructure interleaved(int dim);

  int dim() const { return static_cast<int>(j_.rows()); }
  const Eigen::MatrixXd& matrix() const { return j_; }

 private:
  explicit SymplecticStructure(Eigen::MatrixXd j) : j_(std::move(j)) {}
  Eigen::MatrixXd j_;
};

/// Coefficients of the polynomial matrix Jac(X)^T J Jac(X) - J.
///
/// The residual matrix is antisymmetric with an identically zero diagonal,
/// so only the entries (a, b) with a < b are listed. Each row of
/// `coefficients` holds one entry's coefficients on the monomials of
/// degrees 0..max_degree = 2(k-1), ordered as in TruncatedAlgebra.
struct SymplecticResidual {
  int dim = 0;
  int max_degree = 0;
  std::vector<std::pair<int, int>> entries;
  Eigen::MatrixXd coefficients;
};

SymplecticResidual symplectic_residual(const TaylorMap& map, const SymplecticStructure& structure);
SymplecticResidual symplectic_residual(const TaylorMap& map);

/// Sum of squares of every residual coefficient. Zero iff the map is
/// symplectic at every state. Because only the upper triangle is listed,
/// a linear 2x2 map contributes exactly (det W_1 - 1)^2.
double symplectic_penalty(const TaylorMap& map, const SymplecticStructure& structure);
double symplectic_penalty(const TaylorMap& map);

/// Gradient of symplectic_penalty with respect to every weight (block 0 is
/// always zero).
WeightBlocks symplectic_penalty_gradient(const TaylorMap& map, const SymplecticStructure& structure);

}  // namespace taylormap
