#ifndef KELLER_IO_HPP
#define KELLER_IO_HPP

// CSV and JSON serialization of grids, grid functions, ground states and reports.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "keller/error.hpp"
#include "keller/grid.hpp"
#include "keller/groundstate.hpp"
#include "keller/hessian.hpp"

namespace keller::io {

using json = nlohmann::json;

class FormatError : public Error {
public:
  using Error::Error;
};

/// Shortest text that reads back as the same double (17 significant digits).
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json grid_to_json(const Grid &g) {
  return json{{"kind", to_string(g.kind())},
              {"d", g.dim()},
              {"L", g.extent()},
              {"n", g.size()},
              {"h", g.spacing()}};
}

inline GridPtr grid_from_json(const json &j) {
  const std::string kind = j.at("kind").get<std::string>();
  const double L = j.at("L").get<double>();
  const auto n = j.at("n").get<std::size_t>();
  if (kind == "line")
    return Grid::line(L, n);
  if (kind == "radial")
    return Grid::radial(j.at("d").get<int>(), L, n);
  throw FormatError("unknown grid kind '" + kind + "'");
}

inline json to_json(const GridFunction &f) {
  return json{{"grid", grid_to_json(*f.grid())},
              {"values", std::vector<double>(f.values().begin(), f.values().end())}};
}

inline GridFunction grid_function_from_json(const json &j) {
  return GridFunction(grid_from_json(j.at("grid")), j.at("values").get<std::vector<double>>());
}

inline void write_csv(std::ostream &os, const GridFunction &f) {
  os << (f.grid()->kind() == GridKind::Line ? "x" : "r") << ",value\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    os << format_double(f.grid()->coord(i)) << ',' << format_double(f[i]) << '\n';
}

struct Column2 {
  std::vector<double> x;
  std::vector<double> y;
};

/// Two numeric columns after a mandatory header row.
inline Column2 read_csv_columns(std::istream &is) {
  Column2 c;
  std::string line;
  if (!std::getline(is, line))
    throw FormatError("csv: empty input");
  {
    // A first row that parses as a number is data, not a header.
    const std::string first = line.substr(0, line.find(','));
    char *end = nullptr;
    std::strtod(first.c_str(), &end);
    if (!first.empty() && end == first.c_str() + first.size())
      throw FormatError("csv: header row required");
  }
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw FormatError("csv: row " + std::to_string(row) + " has fewer than two columns");
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      const double x = std::stod(a, &used);
      if (used != a.size())
        throw std::invalid_argument(a);
      const double y = std::stod(b, &used);
      if (used != b.size())
        throw std::invalid_argument(b);
      c.x.push_back(x);
      c.y.push_back(y);
    } catch (const std::logic_error &) {
      throw FormatError("csv: row " + std::to_string(row) + " is not two numeric columns");
    }
  }
  if (c.x.size() < 2)
    throw FormatError("csv: need at least two data rows");
  for (std::size_t i = 1; i < c.x.size(); ++i)
    if (!(c.x[i] > c.x[i - 1]))
      throw FormatError("csv: coordinates must increase strictly");
  return c;
}

/// Exact read-back of a function written by write_csv on the same grid.
inline GridFunction read_csv(std::istream &is, const GridPtr &grid) {
  const Column2 c = read_csv_columns(is);
  if (c.x.size() != grid->size())
    throw DimensionError("csv: row count does not match the grid");
  return GridFunction(grid, c.y);
}

/// Samples tabulated (x, V) onto the grid by linear interpolation. The table
/// must span every node and may not reach more than one cell past the domain.
inline GridFunction resample_potential(const Column2 &c, const GridPtr &grid) {
  const double h = grid->spacing();
  const double lo = grid->kind() == GridKind::Line ? -grid->extent() : 0.0;
  const double hi = grid->extent();
  const double first = grid->coord(0), last = grid->coord(grid->size() - 1);
  if (c.x.front() > first || c.x.back() < last)
    throw DimensionError("potential table does not cover the grid nodes");
  if (c.x.front() < lo - h || c.x.back() > hi + h)
    throw DimensionError("potential table extends beyond the grid domain");
  std::vector<double> v(grid->size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = grid->coord(i);
    while (k + 2 < c.x.size() && c.x[k + 1] < x)
      ++k;
    const double t = (x - c.x[k]) / (c.x[k + 1] - c.x[k]);
    v[i] = (1.0 - t) * c.y[k] + t * c.y[k + 1];
  }
  return GridFunction(grid, std::move(v));
}

inline json to_json(const groundstate::GroundState &gs) {
  return json{{"q", gs.q},
              {"d", gs.d},
              {"E", gs.E},
              {"C_prime", gs.C_prime},
              {"S", gs.S},
              {"norm_q", gs.norm_q},
              {"el_residual", gs.el_residual},
              {"domain_warning", gs.domain_warning},
              {"grid", grid_to_json(*gs.grid())},
              {"Q", std::vector<double>(gs.Q.values().begin(), gs.Q.values().end())}};
}

inline groundstate::GroundState ground_state_from_json(const json &j) {
  const GridPtr grid = grid_from_json(j.at("grid"));
  groundstate::GroundState gs{GridFunction(grid, j.at("Q").get<std::vector<double>>())};
  gs.q = j.at("q").get<double>();
  gs.d = j.at("d").get<int>();
  gs.E = j.at("E").get<double>();
  gs.C_prime = j.at("C_prime").get<double>();
  gs.S = j.at("S").get<double>();
  gs.norm_q = j.at("norm_q").get<double>();
  gs.el_residual = j.at("el_residual").get<double>();
  gs.domain_warning = j.value("domain_warning", false);
  return gs;
}

inline json to_json(const hessian::KernelReport &r) {
  json channels = json::array();
  for (const auto &c : r.channels)
    channels.push_back({{"ell", c.ell},
                        {"multiplicity", c.multiplicity},
                        {"eigs", c.eigs},
                        {"overlaps", c.overlaps},
                        {"near_zero", c.near_zero},
                        {"tol_kernel", c.tol_kernel}});
  json j{{"channels", channels},
         {"kernel_dim", r.kernel_dim},
         {"expected_dim", r.expected_dim},
         {"gap", r.gap},
         {"chain_C", r.chain_C},
         {"anomalies", r.anomalies}};
  j["empirical_c"] = r.empirical_c ? json(*r.empirical_c) : json("undefined");
  return j;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw FormatError("cannot write '" + path + "'");
  out << text;
}

} // namespace keller::io

#endif // KELLER_IO_HPP
