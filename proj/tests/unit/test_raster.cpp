#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "spatialcv/error.hpp"
#include "spatialcv/raster.hpp"

using namespace spcv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spatialcv_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RasterStack small_stack() {
  RasterStack s;
  s.geometry.ncols = 4;
  s.geometry.nrows = 3;
  s.geometry.xll = -10.5;
  s.geometry.yll = 100.25;
  s.geometry.cellsize = 0.5;
  for (int b = 0; b < 3; ++b) {
    Band band{"b" + std::to_string(b), {}};
    for (std::size_t c = 0; c < s.geometry.cells(); ++c) band.values.push_back(0.1 * static_cast<double>(c) / 3.0 + b);
    s.bands.push_back(band);
  }
  s.bands[1].values[5] = kNoData;
  s.bands[2].values[0] = 1e-300;
  s.bands[2].values[1] = -123456.789e10;
  return s;
}

}  // namespace

TEST_SUITE("raster") {
  TEST_CASE("stack round trip is bit-exact and keeps nodata") {
    const auto dir = scratch("stack");
    const RasterStack s = small_stack();
    write_raster_stack(s, dir / "manifest.json");
    const RasterStack r = read_raster_stack(dir / "manifest.json");
    CHECK(r.geometry == s.geometry);
    REQUIRE(r.bands.size() == 3);
    for (std::size_t b = 0; b < 3; ++b) {
      CHECK(r.bands[b].name == s.bands[b].name);
      for (std::size_t c = 0; c < s.geometry.cells(); ++c) {
        if (is_nodata(s.bands[b].values[c]))
          CHECK(is_nodata(r.bands[b].values[c]));
        else
          CHECK(r.bands[b].values[c] == s.bands[b].values[c]);
      }
    }
    CHECK_FALSE(r.cell_valid(5));
    CHECK(r.cell_valid(4));
  }

  TEST_CASE("missing band file is an error") {
    const auto dir = scratch("missing");
    write_raster_stack(small_stack(), dir / "manifest.json");
    fs::remove(dir / "b1.asc");
    CHECK_THROWS_AS(read_raster_stack(dir / "manifest.json"), DataError);
  }

  TEST_CASE("mismatched band shape names the band") {
    const auto dir = scratch("mismatch");
    write_raster_stack(small_stack(), dir / "manifest.json");
    Grid g(GridGeometry{5, 3, -10.5, 100.25, 0.5}, 1.0);
    write_ascii_grid(g, dir / "b2.asc");
    try {
      read_raster_stack(dir / "manifest.json");
      FAIL("expected an error");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("b2") != std::string::npos);
    }
  }

  TEST_CASE("ascii header is parsed") {
    const auto dir = scratch("ascii");
    std::ofstream(dir / "g.asc") << "ncols 2\nnrows 2\nxllcorner 1\nyllcorner 2\ncellsize 10\nNODATA_value -1\n"
                                    "1 -1\n3.5 4\n";
    const Grid g = read_ascii_grid(dir / "g.asc");
    CHECK(g.geometry.ncols == 2);
    CHECK(g.geometry.cellsize == 10.0);
    CHECK(g.values[0] == 1.0);
    CHECK(is_nodata(g.values[1]));
    CHECK(g.values[2] == 3.5);
    CHECK(g.valid_cells() == 3);
  }

  TEST_CASE("cell lookup") {
    GridGeometry g{4, 3, 0.0, 0.0, 1.0};
    CHECK(g.cell_of({0.5, 2.5}) == std::optional<std::size_t>(0));
    CHECK(g.cell_of({3.5, 0.5}) == std::optional<std::size_t>(11));
    CHECK(g.cell_of({4.0, 3.0}) == std::optional<std::size_t>(3));
    CHECK_FALSE(g.cell_of({-0.1, 1}).has_value());
    for (std::size_t c = 0; c < g.cells(); ++c) CHECK(g.cell_of(g.cell_center(c)) == std::optional<std::size_t>(c));
  }
}
