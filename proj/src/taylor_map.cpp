#include "taylormap/taylor_map.hpp"

#include "taylormap/errors.hpp"

#include <algorithm>
#include <string>

namespace taylormap {
namespace {

void check_state(const TaylorMap& map, const Eigen::VectorXd& x, const char* what) {
  if (x.size() != map.dim())
    throw ShapeError(std::string(what) + ": state has " + std::to_string(x.size()) +
                     " components, map has dim " + std::to_string(map.dim()));
}

// Entries of the state Jacobian as polynomials, stored row-major (r * n + c)
// over an algebra wide enough to hold products of two entries.
struct JacobianPolys {
  TruncatedAlgebra algebra;
  std::vector<Eigen::VectorXd> entries;
};

JacobianPolys jacobian_polys(const TaylorMap& map) {
  const int n = map.dim();
  const int k = map.order();
  JacobianPolys jp{TruncatedAlgebra(n, 2 * (k - 1)), {}};
  const auto size = static_cast<Eigen::Index>(jp.algebra.size());
  jp.entries.assign(static_cast<std::size_t>(n * n), Eigen::VectorXd::Zero(size));

  std::vector<int> lowered;
  for (int d = 1; d <= k; ++d) {
    const MonomialBasis basis(n, d);
    const auto& w = map.weight(d);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const auto& e = basis[j].exponents;
      for (int c = 0; c < n; ++c) {
        if (e[c] == 0) continue;
        lowered = e;
        --lowered[c];
        const auto target = jp.algebra.index_of(lowered);
        for (int r = 0; r < n; ++r)
          jp.entries[static_cast<std::size_t>(r * n + c)][target] +=
              e[c] * w(r, static_cast<Eigen::Index>(j));
      }
    }
  }
  return jp;
}

void check_structure(const TaylorMap& map, const SymplecticStructure& s) {
  if (s.dim() != map.dim())
    throw ShapeError("symplectic structure has dim " + std::to_string(s.dim()) +
                     ", map has dim " + std::to_string(map.dim()));
}

}  // namespace

TaylorMap::TaylorMap(WeightBlocks weights) : weights_(std::move(weights)) {
  dim_ = check_blocks(weights_, "TaylorMap");
  order_ = static_cast<int>(weights_.size()) - 1;
}

TaylorMap TaylorMap::zeros(int dim, int order) {
  if (dim < 1 || order < 1) throw DomainError("TaylorMap requires dim >= 1 and order >= 1");
  WeightBlocks w;
  for (int d = 0; d <= order; ++d)
    w.push_back(Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(basis_size(dim, d))));
  return TaylorMap(std::move(w));
}

std::size_t TaylorMap::parameter_count() const {
  std::size_t count = 0;
  for (const auto& w : weights_) count += static_cast<std::size_t>(w.size());
  return count;
}

Eigen::VectorXd TaylorMap::flatten() const {
  Eigen::VectorXd packed(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index pos = 0;
  for (const auto& w : weights_) {
    packed.segment(pos, w.size()) = w.reshaped();
    pos += w.size();
  }
  return packed;
}

TaylorMap TaylorMap::with_parameters(const Eigen::VectorXd& packed) const {
  if (packed.size() != static_cast<Eigen::Index>(parameter_count()))
    throw ShapeError("packed weight vector has wrong length");
  WeightBlocks w = weights_;
  Eigen::Index pos = 0;
  for (auto& block : w) {
    block = packed.segment(pos, block.size()).reshaped(block.rows(), block.cols());
    pos += block.size();
  }
  return TaylorMap(std::move(w));
}

TaylorMap identity_map(int n, int k) {
  TaylorMap zero = TaylorMap::zeros(n, k);
  WeightBlocks w = zero.weights();
  w[1] = Eigen::MatrixXd::Identity(n, n);
  return TaylorMap(std::move(w));
}

Eigen::VectorXd apply(const TaylorMap& map, const Eigen::VectorXd& x) {
  check_state(map, x, "apply");
  Eigen::VectorXd out = map.weight(0).col(0) + map.weight(1) * x;
  for (int d = 2; d <= map.order(); ++d) out.noalias() += map.weight(d) * kron_power(x, d);
  return out;
}

Eigen::MatrixXd jacobian_state(const TaylorMap& map, const Eigen::VectorXd& x) {
  check_state(map, x, "jacobian_state");
  Eigen::MatrixXd jac = map.weight(1);
  for (int d = 2; d <= map.order(); ++d) jac.noalias() += map.weight(d) * kron_power_jacobian(x, d);
  return jac;
}

WeightBlocks weight_gradients(const TaylorMap& map, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& upstream) {
  check_state(map, x, "weight_gradients");
  if (upstream.size() != map.dim()) throw ShapeError("weight_gradients: upstream has wrong dimension");
  WeightBlocks grads;
  grads.reserve(static_cast<std::size_t>(map.order() + 1));
  grads.push_back(upstream);
  grads.push_back(upstream * x.transpose());
  for (int d = 2; d <= map.order(); ++d) grads.push_back(upstream * kron_power(x, d).transpose());
  return grads;
}

TaylorMap compose(const TaylorMap& outer, const TaylorMap& inner, int k) {
  if (outer.dim() != inner.dim()) throw ShapeError("compose: dimension mismatch");
  if (k < 1) throw DomainError("compose: truncation order must be >= 1");
  const TruncatedAlgebra algebra(outer.dim(), k);
  const auto powers = component_powers(inner.weights(), outer.order(), algebra);
  Eigen::MatrixXd stacked = Eigen::MatrixXd::Zero(outer.dim(), static_cast<Eigen::Index>(algebra.size()));
  for (int p = 0; p <= outer.order(); ++p) stacked.noalias() += outer.weight(p) * powers[p];
  return TaylorMap(algebra.split(stacked));
}

TaylorMap compose(const TaylorMap& outer, const TaylorMap& inner) {
  return compose(outer, inner, std::max(outer.order(), inner.order()));
}

WeightBlocks zero_blocks_like(const TaylorMap& map) {
  WeightBlocks out;
  for (const auto& w : map.weights()) out.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  return out;
}

void add_scaled(WeightBlocks& into, const WeightBlocks& from, double scale) {
  if (into.size() != from.size()) throw ShapeError("add_scaled: block count mismatch");
  for (std::size_t d = 0; d < into.size(); ++d) into[d] += scale * from[d];
}

SymplecticStructure SymplecticStructure::canonical(int dim) {
  if (dim < 2 || dim % 2 != 0) throw DomainError("symplectic structure needs an even dimension");
  const int m = dim / 2;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
  j.topRightCorner(m, m).setIdentity();
  j.bottomLeftCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  return SymplecticStructure(std::move(j));
}

SymplecticStructure SymplecticStructure::interleaved(int dim) {
  if (dim < 2 || dim % 2 != 0) throw DomainError("symplectic structure needs an even dimension");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
  for (int p = 0; p < dim; p += 2) {
    j(p, p + 1) = 1.0;
    j(p + 1, p) = -1.0;
  }
  return SymplecticStructure(std::move(j));
}

SymplecticResidual symplectic_residual(const TaylorMap& map, const SymplecticStructure& structure) {
  check_structure(map, structure);
  const int n = map.dim();
  const auto jp = jacobian_polys(map);
  const auto& j = structure.matrix();

  SymplecticResidual res;
  res.dim = n;
  res.max_degree = jp.algebra.max_degree();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) res.entries.emplace_back(a, b);
  res.coefficients.setZero(static_cast<Eigen::Index>(res.entries.size()),
                           static_cast<Eigen::Index>(jp.algebra.size()));

  for (std::size_t e = 0; e < res.entries.size(); ++e) {
    const auto [a, b] = res.entries[e];
    Eigen::VectorXd poly = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(jp.algebra.size()));
    poly[0] = -j(a, b);
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) {
        if (j(r, s) == 0.0) continue;
        poly += j(r, s) * jp.algebra.multiply(jp.entries[static_cast<std::size_t>(r * n + a)],
                                              jp.entries[static_cast<std::size_t>(s * n + b)]);
      }
    res.coefficients.row(static_cast<Eigen::Index>(e)) = poly.transpose();
  }
  return res;
}

SymplecticResidual symplectic_residual(const TaylorMap& map) {
  return symplectic_residual(map, SymplecticStructure::canonical(map.dim()));
}

double symplectic_penalty(const TaylorMap& map, const SymplecticStructure& structure) {
  return symplectic_residual(map, structure).coefficients.squaredNorm();
}

double symplectic_penalty(const TaylorMap& map) {
  return symplectic_penalty(map, SymplecticStructure::canonical(map.dim()));
}

WeightBlocks symplectic_penalty_gradient(const TaylorMap& map, const SymplecticStructure& structure) {
  const auto residual = symplectic_residual(map, structure);
  const int n = map.dim();
  const auto jp = jacobian_polys(map);
  const auto& j = structure.matrix();
  const auto size = static_cast<Eigen::Index>(jp.algebra.size());

  std::vector<Eigen::VectorXd> jac_grad(static_cast<std::size_t>(n * n), Eigen::VectorXd::Zero(size));
  for (std::size_t e = 0; e < residual.entries.size(); ++e) {
    const auto [a, b] = residual.entries[e];
    const Eigen::VectorXd g = 2.0 * residual.coefficients.row(static_cast<Eigen::Index>(e)).transpose();
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) {
        if (j(r, s) == 0.0) continue;
        const auto ra = static_cast<std::size_t>(r * n + a);
        const auto sb = static_cast<std::size_t>(s * n + b);
        Eigen::VectorXd tmp = Eigen::VectorXd::Zero(size);
        jp.algebra.multiply_adjoint(g, jp.entries[sb], tmp);
        jac_grad[ra] += j(r, s) * tmp;
        tmp.setZero();
        jp.algebra.multiply_adjoint(g, jp.entries[ra], tmp);
        jac_grad[sb] += j(r, s) * tmp;
      }
  }

  WeightBlocks grads = zero_blocks_like(map);
  std::vector<int> lowered;
  for (int d = 1; d <= map.order(); ++d) {
    const MonomialBasis basis(n, d);
    for (std::size_t col = 0; col < basis.size(); ++col) {
      const auto& e = basis[col].exponents;
      for (int c = 0; c < n; ++c) {
        if (e[c] == 0) continue;
        lowered = e;
        --lowered[c];
        const auto source = jp.algebra.index_of(lowered);
        for (int r = 0; r < n; ++r)
          grads[static_cast<std::size_t>(d)](r, static_cast<Eigen::Index>(col)) +=
              e[c] * jac_grad[static_cast<std::size_t>(r * n + c)][source];
      }
    }
  }
  return grads;
}

}  // namespace taylormap
