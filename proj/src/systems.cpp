#include "taylormap/systems.hpp"

#include "taylormap/errors.hpp"

#include <cmath>
#include <random>

namespace taylormap {
namespace {

void set_coeff(WeightBlocks& blocks, int row, std::vector<int> exponents, double value) {
  int degree = 0;
  for (int e : exponents) degree += e;
  blocks[static_cast<std::size_t>(degree)](row, static_cast<Eigen::Index>(monomial_rank(exponents))) = value;
}

WeightBlocks zero_coeffs(int dim, int order) { return PolynomialODE::zeros(dim, order).coeffs(); }

double param(const std::map<std::string, double>& params, const std::map<std::string, double>& defaults,
             const std::string& key) {
  auto it = params.find(key);
  return it != params.end() ? it->second : defaults.at(key);
}

}  // namespace

PolynomialODE free_fall(double m, double g, double k_drag) {
  if (!(m > 0.0)) throw DomainError("free_fall: mass must be positive");
  auto c = zero_coeffs(1, 2);
  c[0](0, 0) = g;
  c[2](0, 0) = -k_drag / m;
  return PolynomialODE(std::move(c));
}

double free_fall_analytic(double t, double m, double g, double k_drag) {
  if (!(k_drag > 0.0)) throw DomainError("free_fall_analytic: drag coefficient must be positive (use v = g t)");
  if (!(m > 0.0)) throw DomainError("free_fall_analytic: mass must be positive");
  if (t < 0.0) throw DomainError("free_fall_analytic: time must be non-negative");
  return std::sqrt(m * g / k_drag) * std::tanh(t * std::sqrt(k_drag * g / m));
}

PolynomialODE free_fall_augmented(double g) {
  auto c = zero_coeffs(2, 3);
  c[0](0, 0) = g;
  set_coeff(c, 0, {2, 1}, -1.0);  // -mu v^2
  return PolynomialODE(std::move(c));
}

PolynomialODE lotka_volterra() {
  auto c = zero_coeffs(2, 2);
  c[1] << 0.0, 1.0, -2.0, 0.0;
  set_coeff(c, 0, {1, 1}, 1.0);
  set_coeff(c, 1, {1, 1}, -1.0);
  return PolynomialODE(std::move(c));
}

PolynomialODE pendulum(double g, double length) {
  if (!(length > 0.0)) throw DomainError("pendulum: length must be positive");
  auto c = zero_coeffs(2, 3);
  c[1] << 0.0, 1.0, -g / length, 0.0;
  set_coeff(c, 1, {3, 0}, g / (6.0 * length));
  return PolynomialODE(std::move(c));
}

StateRhs damped_pendulum_rhs(double g, double length, double damping) {
  if (!(length > 0.0)) throw DomainError("pendulum: length must be positive");
  return [=](const Eigen::VectorXd& x) {
    Eigen::VectorXd dx(2);
    dx << x[1], -(g / length) * std::sin(x[0]) - damping * x[1];
    return dx;
  };
}

PolynomialODE rayleigh_plesset(const RayleighPlessetParams& p) {
  if (!(p.rho > 0.0)) throw DomainError("rayleigh_plesset: density must be positive");
  // State order (x, y, z, s, c).
  auto c = zero_coeffs(5, 3);
  set_coeff(c, 0, {0, 1, 0, 0, 0}, 1.0);
  set_coeff(c, 1, {0, 2, 1, 0, 0}, -1.5);
  set_coeff(c, 1, {0, 0, 1, 0, 0}, (p.p_b - p.p0) / p.rho);
  set_coeff(c, 1, {0, 0, 1, 1, 0}, p.p_a / p.rho);
  set_coeff(c, 1, {0, 0, 2, 0, 0}, -2.0 * p.sigma / p.rho);
  set_coeff(c, 1, {0, 1, 2, 0, 0}, -4.0 * p.mu / p.rho);
  set_coeff(c, 2, {0, 1, 2, 0, 0}, -1.0);
  set_coeff(c, 3, {0, 0, 0, 0, 1}, p.omega);
  set_coeff(c, 4, {0, 0, 0, 1, 0}, -p.omega);
  return PolynomialODE(std::move(c));
}

ObservationSeries synthesize(const StateRhs& rhs, const Eigen::VectorXd& x0, double dt, int steps,
                             const NoiseSpec& noise, const std::vector<bool>& mask) {
  const auto n = static_cast<std::size_t>(x0.size());
  std::vector<bool> observed = mask.empty() ? std::vector<bool>(n, true) : mask;
  if (observed.size() != n) throw ShapeError("synthesize: mask length differs from state dimension");

  std::vector<double> sigma(n, 0.0);
  if (noise.kind == NoiseSpec::Kind::gaussian) {
    if (noise.sigma.size() == 1) {
      sigma.assign(n, noise.sigma[0]);
    } else if (noise.sigma.size() == n) {
      sigma = noise.sigma;
    } else {
      throw ShapeError("synthesize: sigma needs one value or one per component");
    }
    for (double s : sigma)
      if (s < 0.0) throw DomainError("synthesize: noise sigma must be non-negative");
  }

  const auto states = integrate_trajectory(rhs, x0, dt, steps);
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Observation> records;
  records.reserve(static_cast<std::size_t>(steps));
  for (int i = 1; i <= steps; ++i) {
    Observation obs{static_cast<std::size_t>(i), Eigen::VectorXd::Zero(x0.size()), observed};
    for (std::size_t c = 0; c < n; ++c) {
      if (!observed[c]) continue;
      const auto ci = static_cast<Eigen::Index>(c);
      obs.values[ci] = states[static_cast<std::size_t>(i)][ci];
      if (noise.kind == NoiseSpec::Kind::gaussian) obs.values[ci] += sigma[c] * normal(rng);
    }
    records.push_back(std::move(obs));
  }
  return ObservationSeries(std::move(records));
}

ObservationSeries synthesize(const PolynomialODE& ode, const Eigen::VectorXd& x0, double dt, int steps,
                             const NoiseSpec& noise, const std::vector<bool>& mask) {
  if (x0.size() != ode.dim()) throw ShapeError("synthesize: state dimension mismatch");
  return synthesize([&ode](const Eigen::VectorXd& x) { return ode.rhs(x); }, x0, dt, steps, noise, mask);
}

std::vector<std::string> system_names() {
  return {"free_fall", "free_fall_augmented", "lotka_volterra", "pendulum", "rayleigh_plesset"};
}

std::vector<std::string> system_components(std::string_view name) {
  if (name == "free_fall") return {"v"};
  if (name == "free_fall_augmented") return {"v", "mu"};
  if (name == "lotka_volterra") return {"x", "y"};
  if (name == "pendulum") return {"phi", "dphi"};
  if (name == "rayleigh_plesset") return {"x", "y", "z", "s", "c"};
  throw DomainError("unknown system '" + std::string(name) + "'");
}

std::map<std::string, double> system_defaults(std::string_view name) {
  if (name == "free_fall") return {{"m", 100.0}, {"g", 9.8}, {"k", 0.392}};
  if (name == "free_fall_augmented") return {{"g", 9.8}};
  if (name == "lotka_volterra") return {};
  if (name == "pendulum") return {{"g", 9.8}, {"L", 0.3}};
  if (name == "rayleigh_plesset") {
    const RayleighPlessetParams d;
    return {{"rho", d.rho}, {"sigma", d.sigma}, {"mu", d.mu}, {"omega", d.omega},
            {"pB", d.p_b},  {"p0", d.p0},       {"pa", d.p_a}};
  }
  throw DomainError("unknown system '" + std::string(name) + "'");
}

PolynomialODE make_system(std::string_view name, const std::map<std::string, double>& params) {
  const auto defaults = system_defaults(name);
  for (const auto& [key, value] : params)
    if (!defaults.contains(key))
      throw DomainError("system '" + std::string(name) + "' has no parameter '" + key + "'");

  auto get = [&](const char* key) { return param(params, defaults, key); };
  if (name == "free_fall") return free_fall(get("m"), get("g"), get("k"));
  if (name == "free_fall_augmented") return free_fall_augmented(get("g"));
  if (name == "lotka_volterra") return lotka_volterra();
  if (name == "pendulum") return pendulum(get("g"), get("L"));
  RayleighPlessetParams rp;
  rp.rho = get("rho");
  rp.sigma = get("sigma");
  rp.mu = get("mu");
  rp.omega = get("omega");
  rp.p_b = get("pB");
  rp.p0 = get("p0");
  rp.p_a = get("pa");
  return rayleigh_plesset(rp);
}

}  // namespace taylormap
