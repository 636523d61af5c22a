#include "polyreg/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "polyreg/errors.hpp"

namespace polyreg {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && *begin == ' ') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || (ptr != end && *ptr != '\r')) {
    throw ConfigError("not a number: '" + s + "'");
  }
  return v;
}

// Writes dim values per row for `rows` rows with header `names`.
void write_table(const fs::path& path, const std::string& header, std::size_t rows, int width,
                 const std::vector<double>& values) {
  std::ostringstream out;
  out << "index," << header << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out << r;
    for (int c = 0; c < width; ++c) out << ',' << format_double(values[r * width + c]);
    out << '\n';
  }
  write_text(path, out.str());
}

std::vector<double> read_table(const fs::path& path, std::size_t rows, int width) {
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  std::vector<double> values;
  values.reserve(rows * width);
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) != width + 1) {
      throw ConfigError(path.string() + ": expected " + std::to_string(width + 1) + " columns");
    }
    for (int c = 0; c < width; ++c) values.push_back(parse_double(cells[c + 1]));
    ++seen;
  }
  if (seen != rows) {
    throw ConfigError(path.string() + ": expected " + std::to_string(rows) + " rows, found " +
                      std::to_string(seen));
  }
  return values;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_field_csv(const fs::path& path, const MatrixField& u) {
  const Grid& g = u.grid();
  std::ostringstream out;
  out << "i,j,x,y";
  for (int r = 0; r < u.dim(); ++r) out << ",u" << r + 1;
  out << '\n';
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const Point x = g.node(i, j);
      const std::size_t k = g.node_index(i, j);
      out << i << ',' << j << ',' << format_double(x.x()) << ',' << format_double(x.y());
      for (int r = 0; r < u.dim(); ++r) out << ',' << format_double(u.values()[k * u.dim() + r]);
      out << '\n';
    }
  }
  write_text(path, out.str());
}

MatrixField read_field_csv(const fs::path& path, std::shared_ptr<const Domain> domain) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  const auto header = split(line);
  if (header.size() < 5 || header[0] != "i" || header[1] != "j") {
    throw ConfigError(path.string() + ": header must start with i,j,x,y");
  }
  const int dim = static_cast<int>(header.size()) - 4;
  const Grid& g = domain->grid();
  MatrixField u(domain, dim);
  std::vector<std::uint8_t> seen(g.num_nodes(), 0);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) != dim + 4) throw ConfigError(path.string() + ": ragged row");
    const int i = static_cast<int>(parse_double(cells[0]));
    const int j = static_cast<int>(parse_double(cells[1]));
    if (i < 0 || j < 0 || i >= g.nx() || j >= g.ny()) {
      throw ConfigError(path.string() + ": node index out of range");
    }
    const std::size_t k = g.node_index(i, j);
    for (int r = 0; r < dim; ++r) u.values()[k * dim + r] = parse_double(cells[4 + r]);
    seen[k] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw ConfigError(path.string() + ": missing nodes");
  }
  return u;
}

void write_mask_csv(const fs::path& path, const Domain& domain) {
  const Grid& g = domain.grid();
  std::ostringstream out;
  for (int cj = 0; cj < g.cells_y(); ++cj) {
    for (int ci = 0; ci < g.cells_x(); ++ci) {
      if (ci > 0) out << ',';
      out << (domain.cell_active(g.cell_index(ci, cj)) ? 1 : 0);
    }
    out << '\n';
  }
  write_text(path, out.str());
}

std::vector<std::uint8_t> read_mask_csv(const fs::path& path, const Grid& grid) {
  std::istringstream in(read_text(path));
  std::vector<std::uint8_t> mask;
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) != grid.cells_x()) {
      throw ConfigError(path.string() + ": mask row has wrong length");
    }
    for (const auto& c : cells) {
      const double v = parse_double(c);
      if (v != 0.0 && v != 1.0) throw ConfigError(path.string() + ": mask entries must be 0 or 1");
      mask.push_back(v == 1.0 ? 1 : 0);
    }
    ++rows;
  }
  if (rows != grid.cells_y()) throw ConfigError(path.string() + ": mask has wrong number of rows");
  return mask;
}

void write_image_csv(const fs::path& path, const ScalarImage& image) {
  const Grid& g = image.grid();
  std::ostringstream out;
  out << "i,j,value\n";
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      out << i << ',' << j << ',' << format_double(image.samples()[g.node_index(i, j)]) << '\n';
    }
  }
  write_text(path, out.str());
}

void write_pgm(const fs::path& path, const ScalarImage& image) {
  const Grid& g = image.grid();
  const auto& s = image.samples();
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double offset = *lo;
  const double scale = *hi > *lo ? (*hi - *lo) / 65535.0 : 1.0;
  std::ostringstream out;
  out << "P5\n# scale " << format_double(scale) << " offset " << format_double(offset) << '\n'
      << g.nx() << ' ' << g.ny() << "\n65535\n";
  for (int j = g.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double level = std::round((s[g.node_index(i, j)] - offset) / scale);
      const auto v = static_cast<std::uint16_t>(std::clamp(level, 0.0, 65535.0));
      out.put(static_cast<char>(v >> 8));
      out.put(static_cast<char>(v & 0xff));
    }
  }
  write_text(path, out.str());
}

ScalarImage read_pgm(const fs::path& path, const Grid& grid) {
  const std::string data = read_text(path);
  std::istringstream in(data);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw ConfigError(path.string() + ": not a binary PGM");
  double scale = 1.0, offset = 0.0;
  std::vector<long> header;
  while (header.size() < 3) {
    in >> std::ws;
    if (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      std::istringstream c(comment);
      std::string hash, key1, key2;
      double a = 0.0, b = 0.0;
      if (c >> hash >> key1 >> a >> key2 >> b && key1 == "scale" && key2 == "offset") {
        scale = a;
        offset = b;
      }
      continue;
    }
    long v = 0;
    if (!(in >> v)) throw ConfigError(path.string() + ": truncated PGM header");
    header.push_back(v);
  }
  in.get();  // single whitespace before the raster
  if (header[0] != grid.nx() || header[1] != grid.ny()) {
    throw ConfigError(path.string() + ": PGM size does not match the grid");
  }
  if (header[2] != 65535) throw ConfigError(path.string() + ": only 16-bit PGM is supported");
  std::vector<double> samples(grid.num_nodes());
  for (int j = grid.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const int hi = in.get();
      const int lo = in.get();
      if (!in) throw ConfigError(path.string() + ": truncated PGM raster");
      samples[grid.node_index(i, j)] = offset + scale * ((hi << 8) | lo);
    }
  }
  return ScalarImage(grid, std::move(samples));
}

void write_certificate(const fs::path& dir, const PolySubgradient& w, const std::string& protocol) {
  fs::create_directories(dir);
  const MinorsLayout& l = w.layout;
  const nlohmann::json header = {
      {"rows", l.rows()},
      {"cols", l.cols()},
      {"tau", l.tau()},
      {"tau2", l.tau2()},
      {"nodes", w.base_point.num_nodes()},
      {"cells", w.base_point.grid().num_cells()},
      {"base_energy", w.base_energy},
      {"classical", w.classical()},
      {"protocol", protocol},
  };
  write_text(dir / "header.json", header.dump(2) + "\n");
  const int dim = l.rows();
  std::string names;
  for (int r = 0; r < dim; ++r) names += (r ? ",u0_" : "u0_") + std::to_string(r + 1);
  write_table(dir / "u0.csv", names, w.base_point.num_nodes(), dim, w.u0);
  names.clear();
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < l.cols(); ++c) {
      names += (names.empty() ? "" : ",") + ("u1_" + std::to_string(r + 1) + std::to_string(c + 1));
    }
  }
  write_table(dir / "u1.csv", names, w.base_point.grid().num_cells(), dim * l.cols(), w.u1);
  names.clear();
  for (int s = 0; s < l.tau2(); ++s) names += (s ? ",v2_" : "v2_") + std::to_string(s + 1);
  if (l.tau2() > 0) {
    write_table(dir / "v2.csv", names, w.base_point.grid().num_cells(), l.tau2(), w.v2);
  } else {
    write_text(dir / "v2.csv", "index\n");
  }
  write_field_csv(dir / "base_point.csv", w.base_point);
}

PolySubgradient read_certificate(const fs::path& dir, std::shared_ptr<const Domain> domain) {
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(read_text(dir / "header.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError((dir / "header.json").string() + ": " + e.what());
  }
  const MinorsLayout layout(header.at("rows").get<int>(), header.at("cols").get<int>());
  MatrixField base = read_field_csv(dir / "base_point.csv", domain);
  if (base.dim() != layout.rows()) throw ConfigError("certificate base point has the wrong dimension");
  PolySubgradient w = PolySubgradient::zero(base, header.at("base_energy").get<double>());
  const std::size_t nodes = base.num_nodes();
  const std::size_t cells = base.grid().num_cells();
  w.u0 = read_table(dir / "u0.csv", nodes, layout.rows());
  w.u1 = read_table(dir / "u1.csv", cells, layout.rows() * layout.cols());
  if (layout.tau2() > 0) w.v2 = read_table(dir / "v2.csv", cells, layout.tau2());
  return w;
}

}  // namespace polyreg
