#include "cli.hpp"

#include "taylormap/errors.hpp"
#include "taylormap/io.hpp"
#include "taylormap/lattice.hpp"
#include "taylormap/network.hpp"
#include "taylormap/systems.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef TAYLORMAP_VERSION
#define TAYLORMAP_VERSION "0.0.0"
#endif

namespace taylormap::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw ParseError("sha256 failed for " + path.string());
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

/// Records what a command read and wrote; saved next to the primary output.
class Manifest {
 public:
  Manifest(std::string command, int argc, const char* const* argv)
      : command_(std::move(command)), started_(std::chrono::steady_clock::now()), started_at_(utc_now()) {
    for (int i = 1; i < argc; ++i) arguments_.emplace_back(argv[i]);
  }

  void param(const std::string& key, Json value) { params_[key] = std::move(value); }
  void input(const fs::path& path) { inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}}); }
  void output(const fs::path& path) { outputs_.push_back(path); }
  void seed(std::uint64_t s) { seed_ = s; }

  void write(const fs::path& primary) const {
    Json j{{"command", command_},
           {"arguments", arguments_},
           {"parameters", params_},
           {"inputs", inputs_},
           {"version", TAYLORMAP_VERSION},
           {"started_at", started_at_},
           {"duration_seconds",
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count()}};
    j["seed"] = seed_ ? Json(*seed_) : Json(nullptr);
    Json outs = Json::array();
    for (const auto& p : outputs_) outs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    j["outputs"] = std::move(outs);
    fs::path path = primary;
    path.replace_extension(".manifest.json");
    io::write_json_file(path, j);
  }

 private:
  std::string command_;
  std::vector<std::string> arguments_;
  Json params_ = Json::object();
  Json inputs_ = Json::array();
  std::vector<fs::path> outputs_;
  std::optional<std::uint64_t> seed_;
  std::chrono::steady_clock::time_point started_;
  std::string started_at_;
};

Eigen::VectorXd parse_vector(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      values.push_back(io::parse_double(field));
    } catch (const ParseError&) {
      throw ParseError(std::string(what) + ": '" + field + "' is not a number");
    }
  }
  if (values.empty()) throw ParseError(std::string(what) + " is empty");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<bool> parse_mask(const std::string& text, Eigen::Index dim) {
  std::vector<bool> mask;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    if (field == "1") mask.push_back(true);
    else if (field == "0") mask.push_back(false);
    else throw ParseError("--observe entries must be 0 or 1");
  }
  if (static_cast<Eigen::Index>(mask.size()) != dim) throw ParseError("--observe length differs from state dimension");
  return mask;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> params;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("--param expects key=value, got '" + item + "'");
    params[item.substr(0, eq)] = io::parse_double(item.substr(eq + 1));
  }
  return params;
}

bool all_finite(const WeightBlocks& blocks) {
  for (const auto& b : blocks)
    if (!b.allFinite()) return false;
  return true;
}

void require_finite(bool ok, const char* what) {
  if (!ok) throw DivergenceError(std::string(what) + " contains non-finite values");
}

/// --system/--param or --ode selection shared by several commands.
struct SystemSource {
  std::string system;
  std::vector<std::string> params;
  std::string ode_path;

  void add_to(CLI::App* app) {
    auto* sys = app->add_option("--system", system, "Built-in system name");
    app->add_option("--param", params, "System parameter key=value (repeatable)")->needs(sys);
    app->add_option("--ode", ode_path, "Polynomial ODE JSON file")->excludes(sys)->check(CLI::ExistingFile);
  }

  bool given() const { return !system.empty() || !ode_path.empty(); }

  PolynomialODE load(Manifest& manifest) const {
    if (!ode_path.empty()) {
      manifest.input(ode_path);
      manifest.param("ode", ode_path);
      return io::ode_from_json(io::read_json_file(ode_path));
    }
    const auto parsed = parse_params(params);
    auto resolved = system_defaults(system);
    for (const auto& [k, v] : parsed) resolved[k] = v;
    manifest.param("system", system);
    manifest.param("system_parameters", resolved);
    return make_system(system, parsed);
  }

  std::vector<std::string> names(int dim) const {
    if (!system.empty()) return system_components(system);
    return io::component_names(dim);
  }
};

std::vector<std::string> with_prefix(const std::vector<std::string>& names, const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(prefix + n);
  return out;
}

// derive ---------------------------------------------------------------------

struct DeriveArgs {
  SystemSource source;
  double dt = 0.0;
  int substeps = 1000;
  int order = 0;
  bool euler = false;
  std::string out;
};

int derive(const DeriveArgs& a, int argc, const char* const* argv, std::ostream& out) {
  Manifest manifest("derive", argc, argv);
  const PolynomialODE ode = a.source.load(manifest);
  manifest.param("dt", a.dt);
  manifest.param("euler", a.euler);
  TaylorMap map = TaylorMap::zeros(1, 1);
  if (a.euler) {
    map = euler_map(ode, a.dt);
  } else {
    manifest.param("substeps", a.substeps);
    manifest.param("order", a.order == 0 ? ode.order() : a.order);
    map = ode_to_map(ode, FlowConfig{a.dt, a.substeps, a.order});
  }
  require_finite(all_finite(map.weights()), "derived map");
  io::write_json_file(a.out, io::map_to_json(map));
  manifest.output(a.out);
  manifest.write(a.out);

  for (int d = 0; d <= map.order(); ++d) {
    out << "W" << d << ":";
    const auto& w = map.weight(d);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      out << (r ? " |" : "");
      for (Eigen::Index c = 0; c < w.cols(); ++c) out << ' ' << io::format_double(w(r, c));
    }
    out << '\n';
  }
  return 0;
}

// simulate -------------------------------------------------------------------

struct SimulateArgs {
  SystemSource source;
  std::string map_path;
  double dt = 0.0;
  int substeps = 1000;
  int order = 0;
  bool euler = false;
  bool oracle = false;
  std::string x0;
  int steps = 0;
  std::string out;
};

int simulate(const SimulateArgs& a, int argc, const char* const* argv, std::ostream& out) {
  Manifest manifest("simulate", argc, argv);
  const Eigen::VectorXd x0 = parse_vector(a.x0, "--x0");
  manifest.param("x0", std::vector<double>(x0.begin(), x0.end()));
  manifest.param("steps", a.steps);

  std::optional<PolynomialODE> ode;
  TaylorMap map = TaylorMap::zeros(1, 1);
  std::vector<std::string> names;
  if (!a.map_path.empty()) {
    manifest.input(a.map_path);
    map = io::map_from_json(io::read_json_file(a.map_path));
    names = io::component_names(map.dim());
  } else {
    if (!(a.dt > 0.0)) throw DomainError("--dt must be positive when simulating a system");
    ode = a.source.load(manifest);
    manifest.param("dt", a.dt);
    manifest.param("euler", a.euler);
    map = a.euler ? euler_map(*ode, a.dt) : ode_to_map(*ode, FlowConfig{a.dt, a.substeps, a.order});
    names = a.source.names(ode->dim());
  }
  if (x0.size() != map.dim()) throw ShapeError("--x0 has " + std::to_string(x0.size()) + " entries, map needs " +
                                               std::to_string(map.dim()));

  std::vector<Eigen::VectorXd> states{x0};
  for (int i = 0; i < a.steps; ++i) {
    states.push_back(apply(map, states.back()));
    if (!states.back().allFinite()) throw DivergenceError("simulation diverged at step " + std::to_string(i + 1));
  }

  io::CsvTable table = io::states_to_csv("step", states, names);
  if (a.oracle) {
    if (!ode) throw DomainError("--oracle needs --system or --ode");
    manifest.param("oracle", true);
    const auto reference = reference_trajectory(*ode, x0, a.dt, a.steps);
    for (const auto& n : with_prefix(names, "ref_")) table.header.push_back(n);
    for (std::size_t i = 0; i < reference.size(); ++i) {
      if (!reference[i].allFinite()) throw DivergenceError("reference diverged at step " + std::to_string(i));
      for (Eigen::Index c = 0; c < reference[i].size(); ++c) table.rows[i].emplace_back(reference[i][c]);
    }
  }
  io::write_csv_file(a.out, table);
  manifest.output(a.out);
  manifest.write(a.out);
  out << "wrote " << states.size() << " states to " << a.out << '\n';
  return 0;
}

// synthesize -----------------------------------------------------------------

struct SynthesizeArgs {
  std::string system;
  std::vector<std::string> params;
  std::string x0;
  double dt = 0.0;
  int steps = 0;
  std::vector<double> noise;
  std::uint64_t seed = 0;
  std::string observe;
  std::string out;
};

int synthesize_cmd(const SynthesizeArgs& a, int argc, const char* const* argv, std::ostream& out) {
  Manifest manifest("synthesize", argc, argv);
  const Eigen::VectorXd x0 = parse_vector(a.x0, "--x0");
  const auto parsed = parse_params(a.params);
  manifest.param("system", a.system);
  manifest.param("x0", std::vector<double>(x0.begin(), x0.end()));
  manifest.param("dt", a.dt);
  manifest.param("steps", a.steps);
  manifest.param("noise", a.noise);
  manifest.seed(a.seed);

  StateRhs rhs;
  std::vector<std::string> names;
  if (a.system == "damped_pendulum") {
    std::map<std::string, double> p{{"g", 9.8}, {"L", 0.28}, {"damping", 0.1}};
    for (const auto& [k, v] : parsed) {
      if (!p.contains(k)) throw DomainError("system 'damped_pendulum' has no parameter '" + k + "'");
      p[k] = v;
    }
    manifest.param("system_parameters", p);
    rhs = damped_pendulum_rhs(p["g"], p["L"], p["damping"]);
    names = {"phi", "dphi"};
  } else {
    auto resolved = system_defaults(a.system);
    for (const auto& [k, v] : parsed) resolved[k] = v;
    manifest.param("system_parameters", resolved);
    PolynomialODE ode = make_system(a.system, parsed);
    rhs = [ode](const Eigen::VectorXd& x) { return ode.rhs(x); };
    names = system_components(a.system);
  }
  if (x0.size() != static_cast<Eigen::Index>(names.size()))
    throw ShapeError("--x0 must have " + std::to_string(names.size()) + " entries");

  NoiseSpec noise;
  if (!a.noise.empty()) {
    noise.kind = NoiseSpec::Kind::gaussian;
    noise.sigma = a.noise;
  }
  noise.seed = a.seed;
  const std::vector<bool> mask = a.observe.empty() ? std::vector<bool>{} : parse_mask(a.observe, x0.size());
  const ObservationSeries obs = synthesize(rhs, x0, a.dt, a.steps, noise, mask);
  for (const auto& r : obs.records()) require_finite(r.values.allFinite(), "synthesized series");
  io::write_csv_file(a.out, io::observations_to_csv(obs, names));
  manifest.output(a.out);
  manifest.write(a.out);
  out << "wrote " << obs.size() << " observations to " << a.out << '\n';
  return 0;
}

// train ----------------------------------------------------------------------

struct TrainArgs {
  SystemSource source;
  std::string map_path;
  std::string lattice_path;
  bool identity = false;
  int order = 0;
  double dt = 0.0;
  int substeps = 1000;
  std::string obs_path;
  std::string x0;
  std::size_t layers = 0;
  int epochs = 1000;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip = 1.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::string layout = "canonical";
  bool freeze_offsets = false;
  std::string out;
  std::string history;
};

io::CsvTable history_table(const LossReport& report) {
  io::CsvTable t;
  t.header = {"epoch", "total", "data", "penalty"};
  auto row = [&](std::size_t epoch, const LossValue& v) {
    t.rows.push_back({static_cast<double>(epoch), v.total, v.data, v.penalty});
  };
  for (std::size_t e = 0; e < report.history.size(); ++e) row(e, report.history[e]);
  row(report.history.size(), report.final);
  return t;
}

int train(const TrainArgs& a, int argc, const char* const* argv, std::ostream& out) {
  Manifest manifest("train", argc, argv);
  TrainConfig cfg;
  cfg.step_size = a.lr;
  cfg.beta1 = a.beta1;
  cfg.beta2 = a.beta2;
  cfg.epsilon = a.epsilon;
  cfg.clip_norm = a.clip;
  cfg.epochs = a.epochs;
  cfg.lambda = a.lambda;
  cfg.seed = a.seed;
  cfg.train_offsets = !a.freeze_offsets;
  if (a.layout == "interleaved") cfg.layout = SymplecticLayout::interleaved;
  else if (a.layout != "canonical") throw DomainError("--layout must be canonical or interleaved");
  cfg.validate();
  manifest.param("epochs", a.epochs);
  manifest.param("lr", a.lr);
  manifest.param("beta1", a.beta1);
  manifest.param("beta2", a.beta2);
  manifest.param("epsilon", a.epsilon);
  manifest.param("clip", a.clip);
  manifest.param("lambda", a.lambda);
  manifest.param("layout", a.layout);
  manifest.param("freeze_offsets", a.freeze_offsets);
  manifest.seed(a.seed);

  manifest.input(a.obs_path);
  const ObservationSeries obs = io::observations_from_csv(io::read_csv_file(a.obs_path));
  if (obs.empty()) throw DomainError("observation file has no records");
  const Eigen::VectorXd x0 = parse_vector(a.x0, "--x0");
  manifest.param("x0", std::vector<double>(x0.begin(), x0.end()));

  LossReport report;
  if (!a.lattice_path.empty()) {
    manifest.input(a.lattice_path);
    const Lattice assumed = io::lattice_from_json(io::read_json_file(a.lattice_path));
    auto result = fine_tune(assumed, x0, obs, cfg);
    for (const auto& m : result.lattice.maps()) require_finite(all_finite(m.weights()), "trained lattice");
    io::write_json_file(a.out, io::lattice_to_json(result.lattice));
    report = std::move(result.report);
  } else {
    TaylorMap init = TaylorMap::zeros(1, 1);
    if (!a.map_path.empty()) {
      manifest.input(a.map_path);
      init = io::map_from_json(io::read_json_file(a.map_path));
    } else if (a.identity) {
      if (a.order < 1) throw DomainError("--identity needs --order >= 1");
      init = identity_map(static_cast<int>(x0.size()), a.order);
      manifest.param("init", "identity");
      manifest.param("order", a.order);
    } else if (a.source.given()) {
      if (!(a.dt > 0.0)) throw DomainError("--dt must be positive when initializing from a system");
      init = ode_to_map(a.source.load(manifest), FlowConfig{a.dt, a.substeps, a.order});
      manifest.param("dt", a.dt);
      manifest.param("substeps", a.substeps);
    } else {
      throw DomainError("train needs one of --map, --lattice, --identity or --system/--ode");
    }
    const std::size_t layers = a.layers ? a.layers : obs.last_tap();
    manifest.param("layers", layers);
    const Network net = build_shared_chain(init, layers);
    auto result = train_one_shot(net, x0, obs, cfg);
    const TaylorMap& trained = result.network.groups().front();
    require_finite(all_finite(trained.weights()), "trained map");
    io::write_json_file(a.out, io::map_to_json(trained));
    report = std::move(result.report);
  }
  manifest.output(a.out);
  if (!a.history.empty()) {
    io::write_csv_file(a.history, history_table(report));
    manifest.output(a.history);
  }
  manifest.write(a.out);
  const LossValue first = report.history.empty() ? report.final : report.history.front();
  out << "loss " << io::format_double(first.total) << " -> " << io::format_double(report.final.total)
      << " (data " << io::format_double(report.final.data) << ", penalty "
      << io::format_double(report.final.penalty) << ")\n";
  return 0;
}

// track / tunes --------------------------------------------------------------

struct TrackArgs {
  std::string lattice_path;
  std::string x0;
  int turns = 0;
  std::string out;
  std::string readings;
};

int track(const TrackArgs& a, int argc, const char* const* argv, std::ostream& out) {
  Manifest manifest("track", argc, argv);
  manifest.input(a.lattice_path);
  const Lattice lat = io::lattice_from_json(io::read_json_file(a.lattice_path));
  const Eigen::VectorXd x0 = parse_vector(a.x0, "--x0");
  manifest.param("x0", std::vector<double>(x0.begin(), x0.end()));
  manifest.param("turns", a.turns);
  if (a.out.empty() && a.readings.empty()) throw DomainError("track needs --out and/or --readings");

  const fs::path primary = a.out.empty() ? fs::path(a.readings) : fs::path(a.out);
  if (!a.out.empty()) {
    const TurnSeries series = multi_turn(lat, x0, a.turns);
    io::write_csv_file(a.out, io::states_to_csv("turn", series, io::lattice_component_names(), 1));
    manifest.output(a.out);
    out << "tracked " << series.size() << " turns\n";
  }
  if (!a.readings.empty()) {
    const auto readings = one_turn_readings(lat, x0);
    io::write_csv_file(a.readings,
                       io::observations_to_csv(readings_to_observations(readings), io::lattice_component_names()));
    manifest.output(a.readings);
    out << "recorded " << readings.size() << " monitor readings\n";
  }
  manifest.write(primary);
  return 0;
}

struct TunesArgs {
  std::string series;
  std::string out;
};

int tunes(const TunesArgs& a, int argc, const char* const* argv, std::ostream& out) {
  Manifest manifest("tunes", argc, argv);
  manifest.input(a.series);
  const io::CsvTable table = io::read_csv_file(a.series);
  Json report = Json::object();
  bool any = false;
  for (const char* plane : {"x", "y"}) {
    const auto it = std::find(table.header.begin(), table.header.end(), plane);
    if (it == table.header.end()) continue;
    const auto col = static_cast<std::size_t>(it - table.header.begin());
    std::vector<double> values;
    for (const auto& row : table.rows) {
      if (!row[col]) throw ParseError(std::string("column '") + plane + "' has an empty field");
      values.push_back(*row[col]);
    }
    const auto est = estimate_frequency(values);
    const std::string key = plane == std::string("x") ? "Qx" : "Qy";
    report[key] = {{"frequency", est.frequency}, {"degenerate", est.degenerate}};
    out << key << " " << io::format_double(est.frequency) << (est.degenerate ? " (degenerate)" : "") << '\n';
    any = true;
  }
  if (!any) throw ParseError("series has neither an 'x' nor a 'y' column");
  if (!a.out.empty()) {
    io::write_json_file(a.out, report);
    manifest.output(a.out);
    manifest.write(a.out);
  }
  return 0;
}

// check ----------------------------------------------------------------------

struct CheckArgs {
  std::string map_path;
  std::string layout = "canonical";
  std::string out;
};

int check(const CheckArgs& a, int argc, const char* const* argv, std::ostream& out) {
  Manifest manifest("check", argc, argv);
  manifest.input(a.map_path);
  manifest.param("layout", a.layout);
  const TaylorMap map = io::map_from_json(io::read_json_file(a.map_path));
  SymplecticLayout layout = SymplecticLayout::canonical;
  if (a.layout == "interleaved") layout = SymplecticLayout::interleaved;
  else if (a.layout != "canonical") throw DomainError("--layout must be canonical or interleaved");
  const auto structure = make_structure(layout, map.dim());
  const auto residual = symplectic_residual(map, structure);
  const double penalty = symplectic_penalty(map, structure);
  const double worst = residual.coefficients.size() ? residual.coefficients.cwiseAbs().maxCoeff() : 0.0;
  require_finite(std::isfinite(penalty), "penalty");
  out << "penalty " << io::format_double(penalty) << "\nmax_residual " << io::format_double(worst)
      << "\nconstraints " << residual.coefficients.size() << '\n';
  if (!a.out.empty()) {
    io::write_json_file(a.out, Json{{"penalty", penalty},
                                    {"max_residual", worst},
                                    {"constraints", residual.coefficients.size()},
                                    {"residual_degree", residual.max_degree},
                                    {"layout", a.layout}});
    manifest.output(a.out);
    manifest.write(a.out);
  }
  return 0;
}

// ring -----------------------------------------------------------------------

struct RingArgs {
  DeskRingOptions options;
  int perturb = -1;
  double factor = 0.8;
  std::string out;
};

int ring(const RingArgs& a, int argc, const char* const* argv, std::ostream& out) {
  Manifest manifest("ring", argc, argv);
  manifest.param("cells", a.options.cells);
  manifest.param("quad_strength", a.options.quad_strength);
  manifest.param("quad_length", a.options.quad_length);
  manifest.param("drift_length", a.options.drift_length);
  manifest.param("sextupole_strength", a.options.sextupole_strength);
  manifest.param("sextupole_length", a.options.sextupole_length);
  manifest.param("substeps", a.options.substeps);
  Lattice lat = desk_ring(a.options);
  if (a.perturb >= 0) {
    manifest.param("perturb", a.perturb);
    manifest.param("factor", a.factor);
    lat = perturb_element(lat, static_cast<std::size_t>(a.perturb), a.factor);
  }
  io::write_json_file(a.out, io::lattice_to_json(lat));
  manifest.output(a.out);
  manifest.write(a.out);
  out << "wrote " << lat.size() << " elements to " << a.out << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Taylor-map models of polynomial dynamical systems", "taylormap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TAYLORMAP_VERSION);
  app.set_config("--config", "", "INI/TOML file; options go under a [<command>] section");

  DeriveArgs derive_args;
  auto* derive_cmd = app.add_subcommand("derive", "Compute the Taylor map of an ODE over one time step");
  derive_args.source.add_to(derive_cmd);
  derive_cmd->add_option("--dt", derive_args.dt, "Time step")->required()->check(CLI::PositiveNumber);
  derive_cmd->add_option("--substeps", derive_args.substeps, "RK4 steps for the weight flow")->check(CLI::PositiveNumber);
  derive_cmd->add_option("--order", derive_args.order, "Map order (default: ODE order)")->check(CLI::NonNegativeNumber);
  derive_cmd->add_flag("--euler", derive_args.euler, "Emit the explicit Euler map instead");
  derive_cmd->add_option("--out", derive_args.out, "Output map JSON")->required();

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Iterate a map from an initial state");
  sim_args.source.add_to(sim_cmd);
  sim_cmd->add_option("--map", sim_args.map_path, "Taylor map JSON")->check(CLI::ExistingFile);
  sim_cmd->add_option("--dt", sim_args.dt, "Time step when deriving from a system");
  sim_cmd->add_option("--substeps", sim_args.substeps, "RK4 steps for the weight flow")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--order", sim_args.order, "Map order (default: ODE order)")->check(CLI::NonNegativeNumber);
  sim_cmd->add_flag("--euler", sim_args.euler, "Use the explicit Euler map");
  sim_cmd->add_flag("--oracle", sim_args.oracle, "Add dense RK4 reference columns");
  sim_cmd->add_option("--x0", sim_args.x0, "Initial state a,b,...")->required();
  sim_cmd->add_option("--steps", sim_args.steps, "Number of map applications")->required()->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--out", sim_args.out, "Output trajectory CSV")->required();

  SynthesizeArgs syn_args;
  auto* syn_cmd = app.add_subcommand("synthesize", "Sample a reference trajectory as observations");
  syn_cmd->add_option("--system", syn_args.system, "System name (or damped_pendulum)")->required();
  syn_cmd->add_option("--param", syn_args.params, "System parameter key=value (repeatable)");
  syn_cmd->add_option("--x0", syn_args.x0, "Initial state a,b,...")->required();
  syn_cmd->add_option("--dt", syn_args.dt, "Sampling interval")->required()->check(CLI::PositiveNumber);
  syn_cmd->add_option("--steps", syn_args.steps, "Number of samples")->required()->check(CLI::PositiveNumber);
  syn_cmd->add_option("--noise", syn_args.noise, "Gaussian noise sigma, one value or one per component")
      ->delimiter(',');
  syn_cmd->add_option("--seed", syn_args.seed, "Noise seed");
  syn_cmd->add_option("--observe", syn_args.observe, "Observed components mask, e.g. 1,0");
  syn_cmd->add_option("--out", syn_args.out, "Output observation CSV")->required();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Fit a map chain or lattice to one observed trajectory");
  train_args.source.add_to(train_cmd);
  train_cmd->add_option("--map", train_args.map_path, "Initial map JSON")->check(CLI::ExistingFile);
  train_cmd->add_option("--lattice", train_args.lattice_path, "Assumed lattice JSON")->check(CLI::ExistingFile);
  train_cmd->add_flag("--identity", train_args.identity, "Start from the identity map");
  train_cmd->add_option("--order", train_args.order, "Order of the identity or derived map")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--dt", train_args.dt, "Time step when deriving the initial map");
  train_cmd->add_option("--substeps", train_args.substeps, "RK4 steps for the weight flow")->check(CLI::PositiveNumber);
  train_cmd->add_option("--obs", train_args.obs_path, "Observation CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--x0", train_args.x0, "Known initial state a,b,...")->required();
  train_cmd->add_option("--layers", train_args.layers, "Chain length (default: last observed tap)");
  train_cmd->add_option("--epochs", train_args.epochs, "Adam epochs")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--lr", train_args.lr, "Adam step size");
  train_cmd->add_option("--beta1", train_args.beta1, "Adam first-moment decay");
  train_cmd->add_option("--beta2", train_args.beta2, "Adam second-moment decay");
  train_cmd->add_option("--epsilon", train_args.epsilon, "Adam denominator offset");
  train_cmd->add_option("--clip", train_args.clip, "Global gradient-norm ceiling");
  train_cmd->add_option("--lambda", train_args.lambda,
                        "Symplectic penalty weight, relative to a mean squared error per observed entry");
  train_cmd->add_option("--seed", train_args.seed, "Seed recorded with the run");
  train_cmd->add_option("--layout", train_args.layout, "Symplectic pairing: canonical or interleaved");
  train_cmd->add_flag("--freeze-offsets", train_args.freeze_offsets, "Keep the constant terms W0 fixed");
  train_cmd->add_option("--out", train_args.out, "Trained map or lattice JSON")->required();
  train_cmd->add_option("--history", train_args.history, "Loss history CSV");

  TrackArgs track_args;
  auto* track_cmd = app.add_subcommand("track", "Track a lattice over many turns or record one-turn readings");
  track_cmd->add_option("--lattice", track_args.lattice_path, "Lattice JSON")->required()->check(CLI::ExistingFile);
  track_cmd->add_option("--x0", track_args.x0, "Initial state x,xp,y,yp")->required();
  track_cmd->add_option("--turns", track_args.turns, "Number of turns")->check(CLI::NonNegativeNumber);
  track_cmd->add_option("--out", track_args.out, "Turn series CSV");
  track_cmd->add_option("--readings", track_args.readings, "One-turn monitor readings CSV");

  TunesArgs tunes_args;
  auto* tunes_cmd = app.add_subcommand("tunes", "Estimate the main frequencies of a turn series");
  tunes_cmd->add_option("--series", tunes_args.series, "Series CSV with x and/or y columns")
      ->required()
      ->check(CLI::ExistingFile);
  tunes_cmd->add_option("--out", tunes_args.out, "Tune report JSON");

  CheckArgs check_args;
  auto* check_cmd = app.add_subcommand("check", "Report the symplectic penalty of a map");
  check_cmd->add_option("--map", check_args.map_path, "Taylor map JSON")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--layout", check_args.layout, "Symplectic pairing: canonical or interleaved");
  check_cmd->add_option("--out", check_args.out, "Report JSON");

  RingArgs ring_args;
  auto* ring_cmd = app.add_subcommand("ring", "Write the FODO desk ring as a lattice file");
  ring_cmd->add_option("--cells", ring_args.options.cells, "FODO cells")->check(CLI::PositiveNumber);
  ring_cmd->add_option("--quad-strength", ring_args.options.quad_strength, "Quadrupole strength");
  ring_cmd->add_option("--quad-length", ring_args.options.quad_length, "Quadrupole length");
  ring_cmd->add_option("--drift-length", ring_args.options.drift_length, "Drift length");
  ring_cmd->add_option("--sextupole-strength", ring_args.options.sextupole_strength, "Sextupole strength");
  ring_cmd->add_option("--sextupole-length", ring_args.options.sextupole_length, "Sextupole length");
  ring_cmd->add_option("--substeps", ring_args.options.substeps, "RK4 steps per element")->check(CLI::PositiveNumber);
  ring_cmd->add_option("--perturb", ring_args.perturb, "Element index (0-based) to rescale");
  ring_cmd->add_option("--factor", ring_args.factor, "Strength factor for --perturb");
  ring_cmd->add_option("--out", ring_args.out, "Output lattice JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*derive_cmd) {
      if (!derive_args.source.given()) throw CLI::RequiredError("--system or --ode");
      return derive(derive_args, argc, argv, out);
    }
    if (*sim_cmd) {
      if (sim_args.map_path.empty() == !sim_args.source.given())
        throw CLI::RequiredError("exactly one of --map and --system/--ode");
      return simulate(sim_args, argc, argv, out);
    }
    if (*syn_cmd) return synthesize_cmd(syn_args, argc, argv, out);
    if (*train_cmd) return train(train_args, argc, argv, out);
    if (*track_cmd) return track(track_args, argc, argv, out);
    if (*tunes_cmd) return tunes(tunes_args, argc, argv, out);
    if (*check_cmd) return check(check_args, argc, argv, out);
    if (*ring_cmd) return ring(ring_args, argc, argv, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace taylormap::cli
