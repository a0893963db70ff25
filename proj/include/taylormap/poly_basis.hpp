#pragma once

// Reduced Kronecker powers of a state vector and the truncated polynomial
// algebra built on them.
//
// Monomials of one degree are ordered graded-lexicographically with the
// exponent of x1 decreasing first: for n = 2, d = 2 the basis is
// (x1^2, x1 x2, x2^2). The degree-0 basis is the single constant monomial.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace taylormap {

/// Identifier recorded in serialized maps for the monomial ordering.
inline constexpr std::string_view kBasisOrdering = "graded_lex_x1_desc";

/// Dense coefficient blocks, one matrix per degree 0..k. Block d has
/// basis_size(n, d) columns.
using WeightBlocks = std::vector<Eigen::MatrixXd>;

struct MultiIndex {
  std::vector<int> exponents;

  int degree() const;
  bool operator==(const MultiIndex&) const = default;
};

/// Number of monomials of exact degree d in n variables, C(n+d-1, d).
std::size_t basis_size(int n, int d);

/// Position of a monomial inside the basis of its own degree.
std::size_t monomial_rank(std::span<const int> exponents);

class MonomialBasis {
 public:
  MonomialBasis(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return indices_.size(); }

  const MultiIndex& operator[](std::size_t j) const { return indices_[j]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

 private:
  int dim_;
  int degree_;
  std::vector<MultiIndex> indices_;
};

MonomialBasis enumerate_monomials(int n, int d);

/// Values of every degree-d monomial at x, in basis order.
Eigen::VectorXd kron_power(const Eigen::VectorXd& x, int d);

/// Jacobian of kron_power(x, d) with respect to x: basis_size(n,d) x n.
Eigen::MatrixXd kron_power_jacobian(const Eigen::VectorXd& x, int d);

/// The matrix L with L * kron_power(x, d) == kron_power(w * x, d).
///
/// Built by folding the full Kronecker power w^{(x)d} onto the reduced
/// basis: row j picks one index tuple for output monomial j and sums the
/// products over all column tuples that collapse onto the same monomial.
Eigen::MatrixXd lift_linear(const Eigen::MatrixXd& w, int d);

/// Dense polynomials in n variables truncated at a maximum total degree.
///
/// A polynomial is a coefficient vector over the concatenated bases of
/// degrees 0..max_degree. Products drop every term above max_degree.
class TruncatedAlgebra {
 public:
  TruncatedAlgebra(int dim, int max_degree);

  int dim() const { return dim_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return monomials_.size(); }

  /// Start of the degree-d block inside a coefficient vector.
  std::size_t offset(int degree) const { return offsets_[degree]; }
  const MultiIndex& monomial(std::size_t i) const { return monomials_[i]; }

  /// Global index of a monomial, or -1 when its degree exceeds max_degree.
  std::ptrdiff_t index_of(std::span<const int> exponents) const;

  Eigen::VectorXd multiply(const Eigen::VectorXd& a,
                           const Eigen::VectorXd& b) const;

  /// Accumulates into grad_a the gradient of <g, a*b> with respect to a.
  void multiply_adjoint(const Eigen::VectorXd& g, const Eigen::VectorXd& b,
                        Eigen::VectorXd& grad_a) const;

  /// Stacks a list of degree blocks (degrees 0..m, m <= max_degree) into one
  /// n x size() matrix; missing degrees are zero.
  Eigen::MatrixXd stack(std::span<const Eigen::MatrixXd> blocks) const;

  /// Inverse of stack for degrees 0..max_degree.
  WeightBlocks split(const Eigen::MatrixXd& stacked) const;

 private:
  struct Product {
    std::size_t a;
    std::size_t b;
    std::size_t out;
  };

  int dim_;
  int max_degree_;
  std::vector<std::size_t> offsets_;
  std::vector<MultiIndex> monomials_;
  std::vector<Product> products_;
};

/// Coefficients of every monomial of degree 0..max_power of the mapped
/// state, M(X)^[p], over the algebra's input monomials. Entry p is a
/// basis_size(n, p) x algebra.size() matrix.
std::vector<Eigen::MatrixXd> component_powers(
    std::span<const Eigen::MatrixXd> map_blocks, int max_power,
    const TruncatedAlgebra& algebra);

/// Checks that blocks form a polynomial map of n outputs in n variables
/// (n rows, basis_size(n, d) columns for block d) and returns n.
int check_blocks(std::span<const Eigen::MatrixXd> blocks, std::string_view what);

/// Expansion of M(X)^[d] over input monomials of degrees 0..k, with all
/// terms above degree k dropped. Returns blocks e = 0..k, each
/// basis_size(n, d) x basis_size(n, e).
WeightBlocks compose_power_truncate(std::span<const Eigen::MatrixXd> map_blocks,
                                    int d, int k);

}  // namespace taylormap
