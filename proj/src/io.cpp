#include "taylormap/io.hpp"

#include "taylormap/errors.hpp"
#include "taylormap/poly_basis.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace taylormap::io {

namespace {

Json blocks_to_json(const WeightBlocks& blocks) {
  Json out = Json::array();
  for (const auto& b : blocks) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < b.cols(); ++c) row.push_back(b(r, c));
      rows.push_back(std::move(row));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

template <typename T>
T require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

void check_ordering(const Json& j) {
  if (j.contains("basis_ordering") && require<std::string>(j, "basis_ordering") != kBasisOrdering)
    throw ParseError("unsupported basis ordering '" + j.at("basis_ordering").get<std::string>() + "'");
}

WeightBlocks blocks_from_json(const Json& j, const char* key) {
  const int dim = require<int>(j, "dim");
  const int order = require<int>(j, "order");
  if (dim < 1) throw ParseError("dim must be >= 1");
  if (order < 1) throw ParseError("order must be >= 1");
  check_ordering(j);
  const Json& arr = field(j, key);
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(order) + 1)
    throw ParseError(std::string("'") + key + "' must list " + std::to_string(order + 1) + " blocks");
  WeightBlocks blocks;
  for (int d = 0; d <= order; ++d) {
    const auto cols = basis_size(dim, d);
    const Json& rows = arr[static_cast<std::size_t>(d)];
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(dim))
      throw ParseError("block " + std::to_string(d) + " must have " + std::to_string(dim) + " rows");
    Eigen::MatrixXd b(dim, static_cast<Eigen::Index>(cols));
    for (int r = 0; r < dim; ++r) {
      const Json& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || row.size() != cols)
        throw ParseError("block " + std::to_string(d) + " row " + std::to_string(r) + " must have " +
                         std::to_string(cols) + " entries");
      for (std::size_t c = 0; c < cols; ++c) {
        if (!row[c].is_number()) throw ParseError("non-numeric weight in block " + std::to_string(d));
        b(r, static_cast<Eigen::Index>(c)) = row[c].get<double>();
      }
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

const char* magnet_kind_name(MagnetKind k) {
  switch (k) {
    case MagnetKind::drift:
      return "drift";
    case MagnetKind::quadrupole:
      return "quadrupole";
    case MagnetKind::sextupole:
      return "sextupole";
  }
  return "drift";
}

MagnetKind magnet_kind_from(const std::string& s) {
  if (s == "drift") return MagnetKind::drift;
  if (s == "quadrupole") return MagnetKind::quadrupole;
  if (s == "sextupole") return MagnetKind::sextupole;
  throw ParseError("unknown magnet type '" + s + "'");
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  if (line.empty()) fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Json map_to_json(const TaylorMap& map) {
  return Json{{"dim", map.dim()},
              {"order", map.order()},
              {"basis_ordering", kBasisOrdering},
              {"weights", blocks_to_json(map.weights())}};
}

TaylorMap map_from_json(const Json& j) {
  try {
    return TaylorMap(blocks_from_json(j, "weights"));
  } catch (const ShapeError& e) {
    throw ParseError(e.what());
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

Json ode_to_json(const PolynomialODE& ode) {
  return Json{{"dim", ode.dim()},
              {"order", ode.order()},
              {"basis_ordering", kBasisOrdering},
              {"coeffs", blocks_to_json(ode.coeffs())}};
}

PolynomialODE ode_from_json(const Json& j) {
  try {
    return PolynomialODE(blocks_from_json(j, "coeffs"));
  } catch (const ShapeError& e) {
    throw ParseError(e.what());
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

Json lattice_to_json(const Lattice& lat) {
  Json elements = Json::array();
  for (const auto& e : lat.elements()) {
    Json el{{"name", e.name}};
    if (e.magnet) {
      el["kind"] = "magnet";
      el["type"] = magnet_kind_name(e.magnet->kind);
      el["strength"] = e.magnet->strength;
      el["length"] = e.magnet->length;
      el["substeps"] = e.magnet->substeps;
    } else if (e.ode) {
      el["kind"] = "ode";
      el["ode"] = ode_to_json(e.ode->ode);
      el["dt"] = e.ode->flow.dt;
      el["substeps"] = e.ode->flow.substeps;
    } else {
      el["kind"] = "map";
      el["map"] = map_to_json(e.map);
    }
    elements.push_back(std::move(el));
  }
  return Json{{"dim", lat.dim()},         {"order", lat.order()}, {"basis_ordering", kBasisOrdering},
              {"ring", lat.ring()},       {"monitors", lat.monitors()}, {"elements", std::move(elements)}};
}

Lattice lattice_from_json(const Json& j) {
  const int order = require<int>(j, "order");
  check_ordering(j);
  if (j.contains("dim") && require<int>(j, "dim") != 4) throw ParseError("lattice dim must be 4");
  const Json& arr = j.contains("elements") ? j.at("elements") : Json();
  if (!arr.is_array() || arr.empty()) throw ParseError("lattice needs a non-empty 'elements' array");
  std::vector<Element> elements;
  try {
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Json& el = arr[i];
      const std::string name = el.contains("name") ? require<std::string>(el, "name") : "E" + std::to_string(i + 1);
      const std::string kind = require<std::string>(el, "kind");
      if (kind == "magnet") {
        MagnetSpec spec;
        spec.kind = magnet_kind_from(require<std::string>(el, "type"));
        spec.strength = el.contains("strength") ? require<double>(el, "strength") : 0.0;
        spec.length = require<double>(el, "length");
        if (el.contains("substeps")) spec.substeps = require<int>(el, "substeps");
        elements.push_back(make_magnet(name, spec, order));
      } else if (kind == "ode") {
        FlowConfig flow;
        flow.dt = require<double>(el, "dt");
        if (el.contains("substeps")) flow.substeps = require<int>(el, "substeps");
        flow.order = order;
        elements.push_back(make_ode_element(name, ode_from_json(field(el, "ode")), flow));
      } else if (kind == "map") {
        elements.push_back(make_map_element(name, map_from_json(field(el, "map"))));
      } else {
        throw ParseError("unknown element kind '" + kind + "'");
      }
    }
    std::vector<std::size_t> monitors;
    if (j.contains("monitors")) monitors = require<std::vector<std::size_t>>(j, "monitors");
    const bool ring = j.contains("ring") ? require<bool>(j, "ring") : true;
    return Lattice(std::move(elements), std::move(monitors), ring);
  } catch (const ShapeError& e) {
    throw ParseError(e.what());
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw ParseError("write failed for " + path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ParseError("not a number: '" + std::string(text) + "'");
  return v;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    auto fields = split_line(line);
    for (auto& f : fields) f = trim(f);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(table.header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    std::vector<std::optional<double>> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      if (f.empty()) {
        row.emplace_back();
        continue;
      }
      try {
        row.emplace_back(parse_double(f));
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ParseError("CSV has no header row");
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return read_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (row[i]) out << format_double(*row[i]);
    }
    out << '\n';
  }
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  write_csv(out, table);
  if (!out) throw ParseError("write failed for " + path.string());
}

CsvTable observations_to_csv(const ObservationSeries& obs, const std::vector<std::string>& names) {
  CsvTable table;
  table.header.push_back("tap");
  table.header.insert(table.header.end(), names.begin(), names.end());
  for (const auto& r : obs.records()) {
    if (static_cast<std::size_t>(r.values.size()) != names.size())
      throw ShapeError("observation dimension differs from column names");
    std::vector<std::optional<double>> row{static_cast<double>(r.tap)};
    for (Eigen::Index c = 0; c < r.values.size(); ++c)
      row.push_back(r.mask[static_cast<std::size_t>(c)] ? std::optional<double>(r.values[c]) : std::nullopt);
    table.rows.push_back(std::move(row));
  }
  return table;
}

ObservationSeries observations_from_csv(const CsvTable& table) {
  if (table.header.size() < 2 || table.header.front() != "tap")
    throw ParseError("observation CSV must start with a 'tap' column and at least one component");
  const auto dim = static_cast<Eigen::Index>(table.header.size() - 1);
  std::vector<Observation> records;
  for (const auto& row : table.rows) {
    if (!row[0] || *row[0] < 1 || std::floor(*row[0]) != *row[0])
      throw ParseError("tap must be a positive integer");
    Observation obs{static_cast<std::size_t>(*row[0]), Eigen::VectorXd::Zero(dim),
                    std::vector<bool>(static_cast<std::size_t>(dim), false)};
    for (Eigen::Index c = 0; c < dim; ++c)
      if (const auto& v = row[static_cast<std::size_t>(c) + 1]) {
        obs.values[c] = *v;
        obs.mask[static_cast<std::size_t>(c)] = true;
      }
    records.push_back(std::move(obs));
  }
  try {
    return ObservationSeries(std::move(records));
  } catch (const ShapeError& e) {
    throw ParseError(e.what());
  }
}

CsvTable states_to_csv(std::string_view index_name, const std::vector<Eigen::VectorXd>& states,
                       const std::vector<std::string>& names, std::size_t first_index) {
  CsvTable table;
  table.header.emplace_back(index_name);
  table.header.insert(table.header.end(), names.begin(), names.end());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (static_cast<std::size_t>(states[i].size()) != names.size())
      throw ShapeError("state dimension differs from column names");
    std::vector<std::optional<double>> row{static_cast<double>(first_index + i)};
    for (Eigen::Index c = 0; c < states[i].size(); ++c) row.emplace_back(states[i][c]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<Eigen::VectorXd> states_from_csv(const CsvTable& table) {
  if (table.header.size() < 2) throw ParseError("state CSV needs an index column and at least one component");
  std::vector<Eigen::VectorXd> states;
  for (const auto& row : table.rows) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(row.size() - 1));
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (!row[c]) throw ParseError("state CSV has an empty field");
      x[static_cast<Eigen::Index>(c - 1)] = *row[c];
    }
    states.push_back(std::move(x));
  }
  return states;
}

std::vector<std::string> component_names(int dim) {
  std::vector<std::string> names;
  for (int i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

std::vector<std::string> lattice_component_names() { return {"x", "xp", "y", "yp"}; }

}  // namespace taylormap::io
