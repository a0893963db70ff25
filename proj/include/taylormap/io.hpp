#pragma once

// JSON and CSV formats for maps, ODEs, lattices, observations and series.
//
// Numbers are written in the shortest form that parses back to the same
// double. CSV files carry a header row; an empty field is an unobserved
// value.

#include "taylormap/lattice.hpp"
#include "taylormap/observations.hpp"
#include "taylormap/ode2map.hpp"
#include "taylormap/taylor_map.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace taylormap::io {

using Json = nlohmann::json;

/// {dim, order, basis_ordering, weights: [W_0 rows, W_1 rows, ...]}
Json map_to_json(const TaylorMap& map);
TaylorMap map_from_json(const Json& j);

/// {dim, order, basis_ordering, coeffs: [P_0 rows, P_1 rows, ...]}
Json ode_to_json(const PolynomialODE& ode);
PolynomialODE ode_from_json(const Json& j);

/// {dim, order, basis_ordering, ring, monitors, elements: [...]} where each
/// element is a magnet spec, an ODE spec with dt and substeps, or a map.
Json lattice_to_json(const Lattice& lat);
Lattice lattice_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

std::string format_double(double v);
double parse_double(std::string_view text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);

/// Header `tap,<component names>`.
CsvTable observations_to_csv(const ObservationSeries& obs, const std::vector<std::string>& names);
ObservationSeries observations_from_csv(const CsvTable& table);

/// Header `<index_name>,<component names>`, rows numbered from `first_index`.
CsvTable states_to_csv(std::string_view index_name, const std::vector<Eigen::VectorXd>& states,
                       const std::vector<std::string>& names, std::size_t first_index = 0);
/// Drops the first (index) column.
std::vector<Eigen::VectorXd> states_from_csv(const CsvTable& table);

/// Default component names: x1..xn, or the system's own names when known.
std::vector<std::string> component_names(int dim);
std::vector<std::string> lattice_component_names();

}  // namespace taylormap::io
