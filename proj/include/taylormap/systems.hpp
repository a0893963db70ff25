#pragma once

// Example dynamical systems with polynomial right-hand sides, their closed
// forms where they exist, and synthetic measurement generation.

#include "taylormap/observations.hpp"
#include "taylormap/ode2map.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace taylormap {

/// v' = g - (k/m) v^2.
PolynomialODE free_fall(double m, double g, double k_drag);

/// sqrt(mg/k) tanh(t sqrt(kg/m)); requires k_drag > 0.
double free_fall_analytic(double t, double m, double g, double k_drag);

/// State (v, mu) with mu = k/m carried as a constant: v' = g - mu v^2, mu' = 0.
PolynomialODE free_fall_augmented(double g);

/// x' = y + xy, y' = -2x - xy.
PolynomialODE lotka_volterra();

/// (phi, phi')' = (phi', -(g/L) phi + (g/(6L)) phi^3).
PolynomialODE pendulum(double g, double length);

/// Non-polynomial damped pendulum phi'' = -(g/L) sin(phi) - damping * phi',
/// used as the "real" system when synthesizing measurements.
StateRhs damped_pendulum_rhs(double g, double length, double damping);

struct RayleighPlessetParams {
  double rho = 1.0;
  double sigma = 0.1;
  double mu = 0.05;
  double omega = 1.0;
  double p_b = 1.2;
  double p0 = 1.0;
  double p_a = 0.5;
};

/// Bubble dynamics with state (x, y, z, s, c) = (R, R', 1/R, sin wt, cos wt).
PolynomialODE rayleigh_plesset(const RayleighPlessetParams& params);

struct NoiseSpec {
  enum class Kind { none, gaussian };
  Kind kind = Kind::none;
  /// One value for all components or one per component.
  std::vector<double> sigma;
  std::uint64_t seed = 0;
};

/// Samples states 1..steps of a trajectory as observations at taps 1..steps,
/// adding i.i.d. Gaussian noise to observed components. An empty mask
/// observes every component.
ObservationSeries synthesize(const StateRhs& rhs, const Eigen::VectorXd& x0, double dt, int steps,
                             const NoiseSpec& noise, const std::vector<bool>& mask = {});
ObservationSeries synthesize(const PolynomialODE& ode, const Eigen::VectorXd& x0, double dt, int steps,
                             const NoiseSpec& noise, const std::vector<bool>& mask = {});

/// Named constructors addressable from the command line. Missing parameters
/// take the defaults listed by system_defaults(name).
PolynomialODE make_system(std::string_view name, const std::map<std::string, double>& params);
std::map<std::string, double> system_defaults(std::string_view name);
std::vector<std::string> system_names();
/// State component names, used as CSV column headers.
std::vector<std::string> system_components(std::string_view name);

}  // namespace taylormap
