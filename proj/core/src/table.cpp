#include "spatialcv/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spatialcv/error.hpp"
#include "spatialcv/log.hpp"

namespace spcv {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (quoted) throw DataError("csv: unterminated quoted field");
  out.push_back(std::move(field));
  return out;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

namespace {

double parse_number(const std::string& text, const std::string& column, std::size_t line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last)
    throw DataError("csv line " + std::to_string(line) + ": column '" + column + "' is not a number: '" + text + "'");
  if (!std::isfinite(v))
    throw DataError("csv line " + std::to_string(line) + ": column '" + column + "' is not finite");
  return v;
}

}  // namespace

TrainingTable parse_training_csv(const std::string& text, CrsKind crs, const std::optional<std::string>& response) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: empty input");
  const auto header = split_csv_line(line);
  std::set<std::string> seen;
  for (const auto& h : header)
    if (!seen.insert(h).second) throw DataError("csv: duplicate column name '" + h + "'");

  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };
  const auto xcol = find("x"), ycol = find("y"), tcol = find("t");
  if (!xcol || !ycol) throw DataError("csv: columns 'x' and 'y' are required");
  std::size_t rcol = header.size() - 1;
  if (response) {
    const auto r = find(*response);
    if (!r) throw DataError("csv: missing response column '" + *response + "'");
    rcol = *r;
  }
  if (rcol == *xcol || rcol == *ycol || (tcol && rcol == *tcol))
    throw DataError("csv: missing response column (last column is a coordinate)");

  TrainingTable table;
  table.response = header[rcol];
  std::vector<std::size_t> pcols;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (i != *xcol && i != *ycol && (!tcol || i != *tcol) && i != rcol) {
      pcols.push_back(i);
      table.data.names.push_back(header[i]);
    }
  if (pcols.empty()) throw DataError("csv: no predictor columns");

  PointSet points;
  points.crs = crs;
  if (tcol) points.time.emplace();
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw DataError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(f.size()));
    points.coords.push_back({parse_number(f[*xcol], "x", lineno), parse_number(f[*ycol], "y", lineno)});
    if (tcol) {
      const double t = parse_number(f[*tcol], "t", lineno);
      if (t != std::floor(t)) throw DataError("csv line " + std::to_string(lineno) + ": 't' must be an integer");
      points.time->push_back(static_cast<std::int64_t>(t));
    }
    for (std::size_t c : pcols) values.push_back(parse_number(f[c], header[c], lineno));
    table.data.y.push_back(parse_number(f[rcol], header[rcol], lineno));
  }
  const std::size_t n = table.data.y.size();
  table.data.X = Matrix(n, pcols.size(), std::move(values));
  points.validate();
  table.data.points = std::move(points);
  table.data.validate();
  return table;
}

TrainingTable read_training_csv(const std::filesystem::path& path, CrsKind crs,
                                const std::optional<std::string>& response) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open training table '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_training_csv(ss.str(), crs, response);
}

std::string format_training_csv(const TrainingTable& table) {
  const Dataset& d = table.data;
  require(d.points.has_value(), "format_training_csv: dataset has no coordinates");
  const bool has_t = d.points->time.has_value();
  std::string out = "x,y";
  if (has_t) out += ",t";
  for (const auto& nm : d.names) out += "," + csv_quote(nm);
  out += "," + csv_quote(table.response) + "\n";
  for (std::size_t r = 0; r < d.rows(); ++r) {
    out += format_double(d.points->coords[r].x) + "," + format_double(d.points->coords[r].y);
    if (has_t) out += "," + std::to_string((*d.points->time)[r]);
    for (std::size_t c = 0; c < d.cols(); ++c) out += "," + format_double(d.X(r, c));
    out += "," + format_double(d.y[r]) + "\n";
  }
  return out;
}

void write_training_csv(const TrainingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write training table '" + path.string() + "'");
  out << format_training_csv(table);
}

Extraction extract_at_points(const RasterStack& stack, const PointSet& points, const std::vector<std::string>& names) {
  Extraction ex;
  ex.names = names.empty() ? stack.names() : names;
  std::vector<const Band*> bands;
  for (const auto& nm : ex.names) bands.push_back(&stack.band(nm));
  std::vector<double> values;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point p = points.coords[i];
    const auto cell = stack.geometry.cell_of(p);
    if (!cell)
      throw DataError("extract_at_points: point " + std::to_string(i) + " (" + format_double(p.x) + ", " +
                      format_double(p.y) + ") lies outside the raster extent");
    bool valid = true;
    for (const Band* b : bands) valid = valid && !is_nodata(b->values[*cell]);
    if (!valid) {
      ++dropped;
      continue;
    }
    for (const Band* b : bands) values.push_back(b->values[*cell]);
    ex.kept.push_back(i);
    ex.cells.push_back(*cell);
  }
  if (dropped > 0) warn("extract_at_points: dropped " + std::to_string(dropped) + " point(s) on nodata cells");
  ex.X = Matrix(ex.kept.size(), ex.names.size(), std::move(values));
  return ex;
}

}  // namespace spcv
