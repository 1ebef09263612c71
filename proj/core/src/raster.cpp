#include "spatialcv/raster.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spatialcv/error.hpp"

namespace spcv {

std::optional<std::size_t> GridGeometry::cell_of(Point p) const {
  const double width = static_cast<double>(ncols) * cellsize;
  const double height = static_cast<double>(nrows) * cellsize;
  const double fx = (p.x - xll) / cellsize;
  const double fy = (yll + height - p.y) / cellsize;
  if (!(p.x >= xll && p.x <= xll + width && p.y >= yll && p.y <= yll + height)) return std::nullopt;
  auto c = std::min(static_cast<std::size_t>(fx), ncols - 1);
  auto r = std::min(static_cast<std::size_t>(fy), nrows - 1);
  return index(r, c);
}

std::size_t Grid::valid_cells() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return !is_nodata(v); }));
}

const Band* RasterStack::find(const std::string& name) const {
  for (const auto& b : bands)
    if (b.name == name) return &b;
  return nullptr;
}

const Band& RasterStack::band(const std::string& name) const {
  if (const Band* b = find(name)) return *b;
  throw DataError("raster stack has no band named '" + name + "'");
}

std::vector<std::string> RasterStack::names() const {
  std::vector<std::string> out;
  for (const auto& b : bands) out.push_back(b.name);
  return out;
}

bool RasterStack::cell_valid(std::size_t cell) const {
  return std::none_of(bands.begin(), bands.end(), [cell](const Band& b) { return is_nodata(b.values[cell]); });
}

std::vector<std::size_t> RasterStack::valid_cells() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < geometry.cells(); ++c)
    if (cell_valid(c)) out.push_back(c);
  return out;
}

void RasterStack::validate() const {
  if (!(geometry.cellsize > 0.0)) throw DataError("raster cellsize must be positive");
  std::set<std::string> seen;
  for (const auto& b : bands) {
    if (!seen.insert(b.name).second) throw DataError("duplicate band name '" + b.name + "'");
    if (b.values.size() != geometry.cells())
      throw DataError("band '" + b.name + "' has " + std::to_string(b.values.size()) + " cells, expected " +
                      std::to_string(geometry.cells()));
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& tok, const std::filesystem::path& path) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw DataError(path.string() + ": cannot parse number '" + tok + "'");
  return v;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Grid read_ascii_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open grid file " + path.string());
  Grid grid;
  GridGeometry& g = grid.geometry;
  bool have_ncols = false, have_nrows = false, have_x = false, have_y = false, have_cs = false;
  bool center_x = false, center_y = false;
  std::string key, value;
  // Header lines start with a letter; the first numeric token begins the data.
  while (in >> std::ws && std::isalpha(in.peek())) {
    in >> key >> value;
    key = lower(key);
    const double v = parse_double(value, path);
    if (key == "ncols") { g.ncols = static_cast<std::size_t>(v); have_ncols = true; }
    else if (key == "nrows") { g.nrows = static_cast<std::size_t>(v); have_nrows = true; }
    else if (key == "xllcorner") { g.xll = v; have_x = true; }
    else if (key == "yllcorner") { g.yll = v; have_y = true; }
    else if (key == "xllcenter") { g.xll = v; have_x = center_x = true; }
    else if (key == "yllcenter") { g.yll = v; have_y = center_y = true; }
    else if (key == "cellsize") { g.cellsize = v; have_cs = true; }
    else if (key == "nodata_value") { g.nodata_value = v; }
    else throw DataError(path.string() + ": unknown header field '" + key + "'");
  }
  if (!(have_ncols && have_nrows && have_x && have_y && have_cs))
    throw DataError(path.string() + ": incomplete ASCII grid header");
  if (!(g.cellsize > 0.0)) throw DataError(path.string() + ": cellsize must be positive");
  if (center_x) g.xll -= 0.5 * g.cellsize;
  if (center_y) g.yll -= 0.5 * g.cellsize;

  grid.values.reserve(g.cells());
  std::string tok;
  while (grid.values.size() < g.cells() && in >> tok) {
    const double v = parse_double(tok, path);
    grid.values.push_back(v == g.nodata_value ? kNoData : v);
  }
  if (grid.values.size() != g.cells())
    throw DataError(path.string() + ": expected " + std::to_string(g.cells()) + " values, found " +
                    std::to_string(grid.values.size()));
  if (in >> tok) throw DataError(path.string() + ": trailing data after grid values");
  return grid;
}

void write_ascii_grid(const Grid& grid, const std::filesystem::path& path) {
  const GridGeometry& g = grid.geometry;
  if (grid.values.size() != g.cells()) throw DataError("grid values do not match its shape");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write grid file " + path.string());
  std::string text;
  text.reserve(g.cells() * 12 + 200);
  text += "ncols " + std::to_string(g.ncols) + "\n";
  text += "nrows " + std::to_string(g.nrows) + "\n";
  text += "xllcorner " + format_double(g.xll) + "\n";
  text += "yllcorner " + format_double(g.yll) + "\n";
  text += "cellsize " + format_double(g.cellsize) + "\n";
  text += "NODATA_value " + format_double(g.nodata_value) + "\n";
  for (std::size_t r = 0; r < g.nrows; ++r) {
    for (std::size_t c = 0; c < g.ncols; ++c) {
      if (c) text += ' ';
      const double v = grid.values[g.index(r, c)];
      text += format_double(is_nodata(v) ? g.nodata_value : v);
    }
    text += '\n';
  }
  out << text;
}

RasterStack read_raster_stack(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw DataError("cannot open raster manifest " + manifest.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(manifest.string() + ": " + e.what());
  }
  const auto dir = manifest.parent_path();
  RasterStack stack;
  const CrsKind crs = parse_crs(j.value("crs", std::string("projected")));
  if (!j.contains("bands") || !j["bands"].is_array() || j["bands"].empty())
    throw DataError(manifest.string() + ": manifest lists no bands");
  bool first = true;
  for (const auto& entry : j["bands"]) {
    const std::string name = entry.at("name").get<std::string>();
    const auto file = dir / entry.at("file").get<std::string>();
    if (!std::filesystem::exists(file))
      throw DataError("band '" + name + "' references missing file " + file.string());
    Grid g = read_ascii_grid(file);
    g.geometry.crs = crs;
    if (first) {
      stack.geometry = g.geometry;
      first = false;
    } else if (!stack.geometry.same_shape(g.geometry)) {
      throw DataError("band '" + name + "' does not match the shape/georeference of the first band");
    }
    stack.bands.push_back({name, std::move(g.values)});
  }
  stack.validate();
  return stack;
}

void write_raster_stack(const RasterStack& stack, const std::filesystem::path& manifest) {
  stack.validate();
  const auto dir = manifest.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["schema_version"] = 1;
  j["crs"] = std::string(to_string(stack.geometry.crs));
  j["bands"] = nlohmann::json::array();
  for (const auto& b : stack.bands) {
    const std::string file = b.name + ".asc";
    Grid g(stack.geometry);
    g.values = b.values;
    write_ascii_grid(g, dir / file);
    j["bands"].push_back({{"name", b.name}, {"file", file}});
  }
  std::ofstream out(manifest, std::ios::binary);
  if (!out) throw DataError("cannot write manifest " + manifest.string());
  out << j.dump(2) << '\n';
}

}  // namespace spcv
