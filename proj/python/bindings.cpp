#include "taylormap/errors.hpp"
#include "taylormap/io.hpp"
#include "taylormap/lattice.hpp"
#include "taylormap/network.hpp"
#include "taylormap/systems.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace taylormap;

namespace {

ObservationSeries make_series(const std::vector<std::size_t>& taps, const Eigen::MatrixXd& values,
                              const std::optional<std::vector<std::vector<bool>>>& masks) {
  if (static_cast<Eigen::Index>(taps.size()) != values.rows())
    throw ShapeError("observations: taps and value rows differ in length");
  std::vector<Observation> records;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    std::vector<bool> mask = masks ? masks->at(i) : std::vector<bool>(static_cast<std::size_t>(values.cols()), true);
    records.push_back({taps[i], values.row(row).transpose(), std::move(mask)});
  }
  return ObservationSeries(std::move(records));
}

Eigen::MatrixXd stack(const std::vector<Eigen::VectorXd>& states) {
  if (states.empty()) return {};
  Eigen::MatrixXd out(static_cast<Eigen::Index>(states.size()), states.front().size());
  for (std::size_t i = 0; i < states.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = states[i].transpose();
  return out;
}

}  // namespace

PYBIND11_MODULE(_taylormap, m) {
  m.doc() = "Polynomial Taylor maps of ODE flows and Taylor-map networks";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.def("basis_size", &basis_size, py::arg("n"), py::arg("d"));
  m.def("kron_power", &kron_power, py::arg("x"), py::arg("d"), "Reduced Kronecker power X^[d].");

  py::class_<TaylorMap>(m, "TaylorMap")
      .def(py::init<WeightBlocks>(), py::arg("weights"))
      .def_static("zeros", &TaylorMap::zeros, py::arg("dim"), py::arg("order"))
      .def_property_readonly("dim", &TaylorMap::dim)
      .def_property_readonly("order", &TaylorMap::order)
      .def_property_readonly("weights", &TaylorMap::weights)
      .def("weight", &TaylorMap::weight, py::arg("d"))
      .def("flatten", &TaylorMap::flatten)
      .def("__call__", [](const TaylorMap& map, const Eigen::VectorXd& x) { return apply(map, x); })
      .def("jacobian", [](const TaylorMap& map, const Eigen::VectorXd& x) { return jacobian_state(map, x); })
      .def("to_json", [](const TaylorMap& map) { return io::map_to_json(map).dump(); })
      .def_static("from_json", [](const std::string& s) { return io::map_from_json(io::Json::parse(s)); })
      .def("__repr__", [](const TaylorMap& map) {
        return "<TaylorMap dim=" + std::to_string(map.dim()) + " order=" + std::to_string(map.order()) + ">";
      });

  m.def("identity_map", &identity_map, py::arg("n"), py::arg("k"));
  m.def("compose", py::overload_cast<const TaylorMap&, const TaylorMap&, int>(&compose), py::arg("outer"),
        py::arg("inner"), py::arg("k"));

  py::enum_<SymplecticLayout>(m, "SymplecticLayout")
      .value("canonical", SymplecticLayout::canonical)
      .value("interleaved", SymplecticLayout::interleaved);

  m.def(
      "symplectic_penalty",
      [](const TaylorMap& map, SymplecticLayout layout) {
        return symplectic_penalty(map, make_structure(layout, map.dim()));
      },
      py::arg("map"), py::arg("layout") = SymplecticLayout::canonical);
  m.def(
      "symplectic_residual",
      [](const TaylorMap& map, SymplecticLayout layout) {
        return symplectic_residual(map, make_structure(layout, map.dim())).coefficients;
      },
      py::arg("map"), py::arg("layout") = SymplecticLayout::canonical);

  py::class_<PolynomialODE>(m, "PolynomialODE")
      .def(py::init<WeightBlocks>(), py::arg("coeffs"))
      .def_property_readonly("dim", &PolynomialODE::dim)
      .def_property_readonly("order", &PolynomialODE::order)
      .def_property_readonly("coeffs", &PolynomialODE::coeffs)
      .def("rhs", &PolynomialODE::rhs, py::arg("x"));

  m.def(
      "ode_to_map",
      [](const PolynomialODE& ode, double dt, int substeps, int order) {
        return ode_to_map(ode, {dt, substeps, order});
      },
      py::arg("ode"), py::arg("dt"), py::arg("substeps") = 1000, py::arg("order") = 0);
  m.def("euler_map", &euler_map, py::arg("ode"), py::arg("dt"));
  m.def(
      "reference_trajectory",
      [](const PolynomialODE& ode, const Eigen::VectorXd& x0, double dt, int steps, int substeps) {
        return stack(reference_trajectory(ode, x0, dt, steps, substeps));
      },
      py::arg("ode"), py::arg("x0"), py::arg("dt"), py::arg("steps"), py::arg("substeps") = 100);

  m.def("make_system", &make_system, py::arg("name"), py::arg("params") = std::map<std::string, double>{});
  m.def("system_names", &system_names);
  m.def("system_defaults", &system_defaults, py::arg("name"));
  m.def("free_fall_analytic", &free_fall_analytic, py::arg("t"), py::arg("m"), py::arg("g"), py::arg("k_drag"));

  py::class_<ObservationSeries>(m, "ObservationSeries")
      .def(py::init(&make_series), py::arg("taps"), py::arg("values"), py::arg("masks") = std::nullopt)
      .def("__len__", &ObservationSeries::size)
      .def_property_readonly("taps",
                             [](const ObservationSeries& s) {
                               std::vector<std::size_t> taps;
                               for (const auto& r : s.records()) taps.push_back(r.tap);
                               return taps;
                             })
      .def_property_readonly("values", [](const ObservationSeries& s) {
        std::vector<Eigen::VectorXd> v;
        for (const auto& r : s.records()) v.push_back(r.values);
        return stack(v);
      });

  m.def(
      "synthesize",
      [](const PolynomialODE& ode, const Eigen::VectorXd& x0, double dt, int steps, std::vector<double> sigma,
         std::uint64_t seed, std::vector<bool> mask) {
        NoiseSpec noise;
        if (!sigma.empty()) noise = {NoiseSpec::Kind::gaussian, std::move(sigma), seed};
        return synthesize(ode, x0, dt, steps, noise, mask);
      },
      py::arg("ode"), py::arg("x0"), py::arg("dt"), py::arg("steps"), py::arg("sigma") = std::vector<double>{},
      py::arg("seed") = 0, py::arg("mask") = std::vector<bool>{});

  py::class_<Network>(m, "Network")
      .def_property_readonly("layers", &Network::layers)
      .def_property_readonly("groups", &Network::groups)
      .def_property_readonly("taps", &Network::taps)
      .def("forward", [](const Network& net, const Eigen::VectorXd& x0) { return stack(forward(net, x0)); })
      .def("states", [](const Network& net, const Eigen::VectorXd& x0) { return stack(forward_states(net, x0)); });

  m.def("build_shared_chain", &build_shared_chain, py::arg("map"), py::arg("length"));
  m.def("build_untied_chain", &build_untied_chain, py::arg("maps"), py::arg("taps") = std::vector<std::size_t>{});

  py::class_<LossValue>(m, "LossValue")
      .def_readonly("total", &LossValue::total)
      .def_readonly("data", &LossValue::data)
      .def_readonly("penalty", &LossValue::penalty);

  m.def(
      "loss",
      [](const Network& net, const Eigen::VectorXd& x0, const ObservationSeries& obs, double lambda,
         SymplecticLayout layout) { return loss(net, x0, obs, lambda, layout); },
      py::arg("net"), py::arg("x0"), py::arg("obs"), py::arg("lam") = 0.0,
      py::arg("layout") = SymplecticLayout::canonical);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("step_size", &TrainConfig::step_size)
      .def_readwrite("beta1", &TrainConfig::beta1)
      .def_readwrite("beta2", &TrainConfig::beta2)
      .def_readwrite("epsilon", &TrainConfig::epsilon)
      .def_readwrite("clip_norm", &TrainConfig::clip_norm)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("lam", &TrainConfig::lambda)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("train_offsets", &TrainConfig::train_offsets)
      .def_readwrite("layout", &TrainConfig::layout);

  m.def(
      "train_one_shot",
      [](const Network& net, const Eigen::VectorXd& x0, const ObservationSeries& obs, const TrainConfig& cfg) {
        auto r = train_one_shot(net, x0, obs, cfg);
        return py::make_tuple(r.network, r.report.history, r.report.final);
      },
      py::arg("net"), py::arg("x0"), py::arg("obs"), py::arg("config") = TrainConfig{},
      "Returns (network, history, final loss).");

  py::class_<Lattice>(m, "Lattice")
      .def("__len__", &Lattice::size)
      .def_property_readonly("monitors", &Lattice::monitors)
      .def_property_readonly("maps", &Lattice::maps)
      .def("to_json", [](const Lattice& lat) { return io::lattice_to_json(lat).dump(); })
      .def_static("from_json", [](const std::string& s) { return io::lattice_from_json(io::Json::parse(s)); });

  m.def(
      "desk_ring",
      [](int cells) {
        DeskRingOptions o;
        o.cells = cells;
        return desk_ring(o);
      },
      py::arg("cells") = 4);
  m.def("perturb_element", &perturb_element, py::arg("lattice"), py::arg("index"), py::arg("factor"));
  m.def(
      "multi_turn",
      [](const Lattice& lat, const Eigen::VectorXd& x0, int turns) { return stack(multi_turn(lat, x0, turns)); },
      py::arg("lattice"), py::arg("x0"), py::arg("turns"));
  m.def(
      "one_turn_observations",
      [](const Lattice& lat, const Eigen::VectorXd& x0) {
        return readings_to_observations(one_turn_readings(lat, x0));
      },
      py::arg("lattice"), py::arg("x0"));
  m.def(
      "estimate_frequency",
      [](const std::vector<double>& xs) {
        const auto e = estimate_frequency(xs);
        return py::make_tuple(e.frequency, e.degenerate);
      },
      py::arg("series"), "Returns (frequency, degenerate).");
  m.def(
      "estimate_tunes",
      [](const Lattice& lat, const Eigen::VectorXd& x0, int turns) {
        const auto t = estimate_tunes(multi_turn(lat, x0, turns));
        return py::make_tuple(t.horizontal.frequency, t.vertical.frequency);
      },
      py::arg("lattice"), py::arg("x0"), py::arg("turns") = 500, "Returns (Qx, Qy) over `turns` turns.");
  m.def(
      "fine_tune",
      [](const Lattice& lat, const Eigen::VectorXd& x0, const ObservationSeries& obs, const TrainConfig& cfg) {
        auto r = fine_tune(lat, x0, obs, cfg);
        return py::make_tuple(r.lattice, r.report.history, r.report.final);
      },
      py::arg("lattice"), py::arg("x0"), py::arg("obs"), py::arg("config") = TrainConfig{});
}
