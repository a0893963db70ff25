#include "taylormap/poly_basis.hpp"

#include "taylormap/errors.hpp"

#include <numeric>
#include <string>

namespace taylormap {
namespace {

void enumerate_into(int remaining_vars, int remaining_degree,
                    std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  if (remaining_vars == 1) {
    prefix.push_back(remaining_degree);
    out.push_back(MultiIndex{prefix});
    prefix.pop_back();
    return;
  }
  for (int e = remaining_degree; e >= 0; --e) {
    prefix.push_back(e);
    enumerate_into(remaining_vars - 1, remaining_degree - e, prefix, out);
    prefix.pop_back();
  }
}

double monomial_value(const Eigen::VectorXd& x, std::span<const int> e) {
  double v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (int p = 0; p < e[i]; ++p) v *= x[static_cast<Eigen::Index>(i)];
  return v;
}

void check_state(const Eigen::VectorXd& x) {
  if (x.size() < 1) throw ShapeError("state vector must have at least one component");
}

}  // namespace

int MultiIndex::degree() const {
  return std::accumulate(exponents.begin(), exponents.end(), 0);
}

std::size_t basis_size(int n, int d) {
  if (n < 1 || d < 0) throw DomainError("basis_size requires n >= 1 and d >= 0");
  std::size_t result = 1;
  for (int i = 1; i <= d; ++i)
    result = result * static_cast<std::size_t>(n - 1 + i) / static_cast<std::size_t>(i);
  return result;
}

std::size_t monomial_rank(std::span<const int> exponents) {
  const int n = static_cast<int>(exponents.size());
  int remaining = std::accumulate(exponents.begin(), exponents.end(), 0);
  std::size_t rank = 0;
  for (int i = 0; i + 1 < n; ++i) {
    // Every monomial whose i-th exponent is larger comes first.
    for (int t = remaining; t > exponents[i]; --t)
      rank += basis_size(n - i - 1, remaining - t);
    remaining -= exponents[i];
  }
  return rank;
}

MonomialBasis::MonomialBasis(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 1 || degree < 0)
    throw DomainError("monomial basis requires dim >= 1 and degree >= 0");
  indices_.reserve(basis_size(dim, degree));
  std::vector<int> prefix;
  prefix.reserve(static_cast<std::size_t>(dim));
  enumerate_into(dim, degree, prefix, indices_);
}

MonomialBasis enumerate_monomials(int n, int d) { return MonomialBasis(n, d); }

Eigen::VectorXd kron_power(const Eigen::VectorXd& x, int d) {
  check_state(x);
  const MonomialBasis basis(static_cast<int>(x.size()), d);
  Eigen::VectorXd out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j)
    out[static_cast<Eigen::Index>(j)] = monomial_value(x, basis[j].exponents);
  return out;
}

Eigen::MatrixXd kron_power_jacobian(const Eigen::VectorXd& x, int d) {
  check_state(x);
  if (d < 1) throw DomainError("kron_power_jacobian requires d >= 1");
  const int n = static_cast<int>(x.size());
  const MonomialBasis basis(n, d);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.size()), n);
  std::vector<int> e;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    for (int i = 0; i < n; ++i) {
      e = basis[j].exponents;
      if (e[i] == 0) continue;
      const int power = e[i]--;
      jac(static_cast<Eigen::Index>(j), i) = power * monomial_value(x, e);
    }
  }
  return jac;
}

Eigen::MatrixXd lift_linear(const Eigen::MatrixXd& w, int d) {
  if (w.rows() != w.cols() || w.rows() < 1)
    throw ShapeError("lift_linear requires a non-empty square matrix");
  if (d < 1) throw DomainError("lift_linear requires d >= 1");
  const int n = static_cast<int>(w.rows());
  const MonomialBasis basis(n, d);
  const auto size = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(size, size);

  std::vector<int> rows(static_cast<std::size_t>(d));
  std::vector<int> cols(static_cast<std::size_t>(d));
  std::vector<int> counts(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < size; ++j) {
    // Representative row tuple of output monomial j, e.g. x1^2 x2 -> (0,0,1).
    const auto& e = basis[static_cast<std::size_t>(j)].exponents;
    std::size_t pos = 0;
    for (int i = 0; i < n; ++i)
      for (int p = 0; p < e[i]; ++p) rows[pos++] = i;

    std::fill(cols.begin(), cols.end(), 0);
    while (true) {
      double product = 1.0;
      for (int t = 0; t < d; ++t) product *= w(rows[t], cols[t]);
      if (product != 0.0) {
        std::fill(counts.begin(), counts.end(), 0);
        for (int t = 0; t < d; ++t) ++counts[cols[t]];
        lifted(j, static_cast<Eigen::Index>(monomial_rank(counts))) += product;
      }
      int t = d - 1;
      while (t >= 0 && ++cols[t] == n) cols[t--] = 0;
      if (t < 0) break;
    }
  }
  return lifted;
}

TruncatedAlgebra::TruncatedAlgebra(int dim, int max_degree)
    : dim_(dim), max_degree_(max_degree) {
  if (dim < 1 || max_degree < 0)
    throw DomainError("truncated algebra requires dim >= 1 and max_degree >= 0");
  for (int d = 0; d <= max_degree; ++d) {
    offsets_.push_back(monomials_.size());
    const MonomialBasis basis(dim, d);
    monomials_.insert(monomials_.end(), basis.begin(), basis.end());
  }
  offsets_.push_back(monomials_.size());

  std::vector<int> sum(static_cast<std::size_t>(dim));
  for (std::size_t a = 0; a < monomials_.size(); ++a) {
    for (std::size_t b = 0; b < monomials_.size(); ++b) {
      if (monomials_[a].degree() + monomials_[b].degree() > max_degree) continue;
      for (int i = 0; i < dim; ++i)
        sum[i] = monomials_[a].exponents[i] + monomials_[b].exponents[i];
      products_.push_back({a, b, static_cast<std::size_t>(index_of(sum))});
    }
  }
}

std::ptrdiff_t TruncatedAlgebra::index_of(std::span<const int> exponents) const {
  if (static_cast<int>(exponents.size()) != dim_)
    throw ShapeError("monomial has " + std::to_string(exponents.size()) +
                     " exponents, algebra has dim " + std::to_string(dim_));
  const int degree = std::accumulate(exponents.begin(), exponents.end(), 0);
  if (degree > max_degree_) return -1;
  return static_cast<std::ptrdiff_t>(offsets_[degree] + monomial_rank(exponents));
}

Eigen::VectorXd TruncatedAlgebra::multiply(const Eigen::VectorXd& a,
                                           const Eigen::VectorXd& b) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  for (const auto& p : products_) {
    const double av = a[static_cast<Eigen::Index>(p.a)];
    if (av == 0.0) continue;
    out[static_cast<Eigen::Index>(p.out)] += av * b[static_cast<Eigen::Index>(p.b)];
  }
  return out;
}

void TruncatedAlgebra::multiply_adjoint(const Eigen::VectorXd& g,
                                        const Eigen::VectorXd& b,
                                        Eigen::VectorXd& grad_a) const {
  for (const auto& p : products_)
    grad_a[static_cast<Eigen::Index>(p.a)] +=
        g[static_cast<Eigen::Index>(p.out)] * b[static_cast<Eigen::Index>(p.b)];
}

Eigen::MatrixXd TruncatedAlgebra::stack(std::span<const Eigen::MatrixXd> blocks) const {
  if (blocks.empty()) throw ShapeError("cannot stack an empty block list");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(blocks[0].rows(), static_cast<Eigen::Index>(size()));
  const int top = std::min<int>(static_cast<int>(blocks.size()) - 1, max_degree_);
  for (int d = 0; d <= top; ++d)
    out.middleCols(static_cast<Eigen::Index>(offsets_[d]), blocks[d].cols()) = blocks[d];
  return out;
}

WeightBlocks TruncatedAlgebra::split(const Eigen::MatrixXd& stacked) const {
  WeightBlocks blocks;
  blocks.reserve(static_cast<std::size_t>(max_degree_ + 1));
  for (int d = 0; d <= max_degree_; ++d)
    blocks.emplace_back(stacked.middleCols(static_cast<Eigen::Index>(offsets_[d]),
                                           static_cast<Eigen::Index>(offsets_[d + 1] - offsets_[d])));
  return blocks;
}

int check_blocks(std::span<const Eigen::MatrixXd> blocks, std::string_view what) {
  if (blocks.size() < 2)
    throw ShapeError(std::string(what) + ": need at least blocks of degree 0 and 1");
  const auto n = blocks[0].rows();
  if (n < 1) throw ShapeError(std::string(what) + ": dimension must be positive");
  for (std::size_t d = 0; d < blocks.size(); ++d) {
    const auto cols = static_cast<Eigen::Index>(basis_size(static_cast<int>(n), static_cast<int>(d)));
    if (blocks[d].rows() != n || blocks[d].cols() != cols)
      throw ShapeError(std::string(what) + ": block " + std::to_string(d) + " is " +
                       std::to_string(blocks[d].rows()) + "x" + std::to_string(blocks[d].cols()) +
                       ", expected " + std::to_string(n) + "x" + std::to_string(cols));
    if (!blocks[d].allFinite())
      throw DomainError(std::string(what) + ": block " + std::to_string(d) + " has non-finite entries");
  }
  return static_cast<int>(n);
}

std::vector<Eigen::MatrixXd> component_powers(std::span<const Eigen::MatrixXd> map_blocks,
                                              int max_power, const TruncatedAlgebra& algebra) {
  const int n = algebra.dim();
  const Eigen::MatrixXd comps = algebra.stack(map_blocks);
  const auto size = static_cast<Eigen::Index>(algebra.size());

  std::vector<Eigen::MatrixXd> powers;
  powers.reserve(static_cast<std::size_t>(max_power + 1));
  powers.push_back(Eigen::MatrixXd::Zero(1, size));
  powers[0](0, 0) = 1.0;

  std::vector<int> prev;
  for (int p = 1; p <= max_power; ++p) {
    const MonomialBasis basis(n, p);
    Eigen::MatrixXd current(static_cast<Eigen::Index>(basis.size()), size);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      prev = basis[j].exponents;
      int i = 0;
      while (prev[i] == 0) ++i;
      --prev[i];
      const auto prev_row = static_cast<Eigen::Index>(monomial_rank(prev));
      current.row(static_cast<Eigen::Index>(j)) =
          algebra.multiply(powers[p - 1].row(prev_row).transpose(), comps.row(i).transpose()).transpose();
    }
    powers.push_back(std::move(current));
  }
  return powers;
}

WeightBlocks compose_power_truncate(std::span<const Eigen::MatrixXd> map_blocks, int d, int k) {
  const int n = check_blocks(map_blocks, "compose_power_truncate");
  if (d < 1 || k < 1) throw DomainError("compose_power_truncate requires d >= 1 and k >= 1");
  const TruncatedAlgebra algebra(n, k);
  const auto powers = component_powers(map_blocks, d, algebra);
  return algebra.split(powers[d]);
}

}  // namespace taylormap
