#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's basis, map or flow code.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using Exponents = std::vector<int>;

/// Every exponent tuple of total degree d, sorted lexicographically
/// descending (x1 exponent first).
inline std::vector<Exponents> brute_monomials(int n, int d) {
  std::vector<Exponents> out;
  Exponents e(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n - 1) {
      e[static_cast<std::size_t>(i)] = left;
      out.push_back(e);
      return;
    }
    for (int a = 0; a <= left; ++a) {
      e[static_cast<std::size_t>(i)] = a;
      rec(i + 1, left - a);
    }
  };
  rec(0, d);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline double eval_monomial(const Eigen::VectorXd& x, const Exponents& e) {
  double v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i) v *= std::pow(x[static_cast<Eigen::Index>(i)], e[i]);
  return v;
}

inline Eigen::VectorXd eval_monomials(const Eigen::VectorXd& x, int d) {
  const auto basis = brute_monomials(static_cast<int>(x.size()), d);
  Eigen::VectorXd out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) out[static_cast<Eigen::Index>(j)] = eval_monomial(x, basis[j]);
  return out;
}

/// Sparse multivariate polynomial keyed by exponent tuple.
struct Poly {
  int n = 0;
  std::map<Exponents, double> terms;

  static Poly constant(int n, double c) {
    Poly p{n, {}};
    if (c != 0.0) p.terms[Exponents(static_cast<std::size_t>(n), 0)] = c;
    return p;
  }
  static Poly variable(int n, int i) {
    Poly p{n, {}};
    Exponents e(static_cast<std::size_t>(n), 0);
    e[static_cast<std::size_t>(i)] = 1;
    p.terms[e] = 1.0;
    return p;
  }

  Poly operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.terms) r.terms[e] += c;
    return r;
  }
  Poly operator*(double s) const {
    Poly r = *this;
    for (auto& [e, c] : r.terms) c *= s;
    return r;
  }
  Poly operator*(const Poly& o) const {
    Poly r{n, {}};
    for (const auto& [a, ca] : terms)
      for (const auto& [b, cb] : o.terms) {
        Exponents e(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) e[i] = a[i] + b[i];
        r.terms[e] += ca * cb;
      }
    return r;
  }
  Poly truncated(int k) const {
    Poly r{n, {}};
    for (const auto& [e, c] : terms) {
      int deg = 0;
      for (int v : e) deg += v;
      if (deg <= k) r.terms[e] = c;
    }
    return r;
  }
  Poly derivative(int i) const {
    Poly r{n, {}};
    for (const auto& [e, c] : terms) {
      const int p = e[static_cast<std::size_t>(i)];
      if (p == 0) continue;
      Exponents f = e;
      f[static_cast<std::size_t>(i)] -= 1;
      r.terms[f] += c * p;
    }
    return r;
  }
  double coeff(const Exponents& e) const {
    const auto it = terms.find(e);
    return it == terms.end() ? 0.0 : it->second;
  }
  double eval(const Eigen::VectorXd& x) const {
    double v = 0.0;
    for (const auto& [e, c] : terms) v += c * eval_monomial(x, e);
    return v;
  }
};

/// Map components as polynomials, from per-degree weight blocks whose
/// columns follow brute_monomials.
inline std::vector<Poly> map_polys(const std::vector<Eigen::MatrixXd>& blocks) {
  const int n = static_cast<int>(blocks.front().rows());
  std::vector<Poly> out(static_cast<std::size_t>(n), Poly{n, {}});
  for (std::size_t d = 0; d < blocks.size(); ++d) {
    const auto basis = brute_monomials(n, static_cast<int>(d));
    for (int r = 0; r < n; ++r)
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const double c = blocks[d](r, static_cast<Eigen::Index>(j));
        if (c != 0.0) out[static_cast<std::size_t>(r)].terms[basis[j]] += c;
      }
  }
  return out;
}

/// Per-degree blocks of a polynomial vector, degrees 0..k.
inline std::vector<Eigen::MatrixXd> poly_blocks(const std::vector<Poly>& comps, int k) {
  const int n = comps.front().n;
  std::vector<Eigen::MatrixXd> blocks;
  for (int d = 0; d <= k; ++d) {
    const auto basis = brute_monomials(n, d);
    Eigen::MatrixXd b(static_cast<Eigen::Index>(comps.size()), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t r = 0; r < comps.size(); ++r)
      for (std::size_t j = 0; j < basis.size(); ++j)
        b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = comps[r].coeff(basis[j]);
    blocks.push_back(std::move(b));
  }
  return blocks;
}

/// Central-difference gradient of a scalar function.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y[i] = x[i] + h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    y[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Central-difference Jacobian of a vector function.
inline Eigen::MatrixXd numeric_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h = 1e-6) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  Eigen::VectorXd y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y[i] = x[i] + h;
    const Eigen::VectorXd fp = f(y);
    y[i] = x[i] - h;
    const Eigen::VectorXd fm = f(y);
    y[i] = x[i];
    jac.col(i) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

/// ||a - b|| / max(||a||, ||b||, floor).
inline double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor = 1e-12) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

using Field = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Classic RK4 over [0, t] in `steps` equal steps.
inline Eigen::VectorXd flow(const Field& f, Eigen::VectorXd x, double t, int steps) {
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Eigen::VectorXd k1 = f(x);
    const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

/// Taylor coefficients of the time-t flow at the origin, estimated by a
/// least-squares polynomial fit of degree `fit_degree` to flow samples on a
/// grid over [-radius, radius]^n. Returns blocks for degrees 0..k.
inline std::vector<Eigen::MatrixXd> fit_flow_taylor(const Field& f, int n, double t, int k, double radius,
                                                    int fit_degree = 9, int grid = 15, int steps = 2000) {
  std::vector<Exponents> columns;
  for (int d = 0; d <= fit_degree; ++d)
    for (auto& e : brute_monomials(n, d)) columns.push_back(e);

  std::vector<Eigen::VectorXd> points;
  Eigen::VectorXi idx = Eigen::VectorXi::Zero(n);
  for (;;) {
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p[i] = -radius + 2.0 * radius * idx[i] / (grid - 1);
    points.push_back(p);
    int i = 0;
    while (i < n && ++idx[i] == grid) idx[i++] = 0;
    if (i == n) break;
  }

  // Scaled monomials keep the normal matrix well conditioned.
  Eigen::MatrixXd a(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(columns.size()));
  Eigen::MatrixXd y(static_cast<Eigen::Index>(points.size()), n);
  for (std::size_t r = 0; r < points.size(); ++r) {
    const Eigen::VectorXd u = points[r] / radius;
    for (std::size_t c = 0; c < columns.size(); ++c)
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = eval_monomial(u, columns[c]);
    y.row(static_cast<Eigen::Index>(r)) = flow(f, points[r], t, steps).transpose();
  }
  const Eigen::MatrixXd coef = a.colPivHouseholderQr().solve(y);

  std::vector<Poly> comps(static_cast<std::size_t>(n), Poly{n, {}});
  for (std::size_t c = 0; c < columns.size(); ++c) {
    int deg = 0;
    for (int v : columns[c]) deg += v;
    for (int r = 0; r < n; ++r)
      comps[static_cast<std::size_t>(r)].terms[columns[c]] =
          coef(static_cast<Eigen::Index>(c), r) / std::pow(radius, deg);
  }
  return poly_blocks(comps, k);
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double lo = -1.0,
                                     double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

inline std::size_t binomial(int n, int k) {
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

}  // namespace oracle
