#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ddfem/error.hpp"
#include "ddfem/fem/io.hpp"

using namespace ddfem;
using namespace ddfem::fem;

namespace {

Point p2(double x, double y) { return make_point({x, y}); }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "ddfem_test_fem_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("doubles round-trip") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-2.0) == "-2");
  for (double v : {0.1, 1.0 / 3.0, -1e-300, 6.02214076e23, 2.0 - 1e-16}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("csv layout") {
  const auto path = scratch("table.csv");
  write_csv(path, {"a", "b"}, {{1.0, 0.25}, {-3.0, 0.125}});
  CHECK(slurp(path) == "a,b\n1,0.25\n-3,0.125\n");
  CHECK_THROWS_AS(write_csv(path, {"a", "b"}, {{1.0}}), Error);
}

TEST_CASE("structured vtk") {
  const auto path = scratch("grid.vtk");
  std::vector<Point> points{p2(0, 0), p2(1, 0), p2(0, 1), p2(1, 1)};
  write_vtk_structured(path, 2, 2, points, {{"phi", {0.0, 0.5, 0.5, 1.0}, 1}});
  const auto text = slurp(path);
  CHECK(text.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  CHECK(text.find("DIMENSIONS 2 2 1\n") != std::string::npos);
  CHECK(text.find("1 1 0\n") != std::string::npos);
  CHECK(text.find("POINT_DATA 4\nSCALARS phi double 1\nLOOKUP_TABLE default\n0\n0.5\n0.5\n1\n") !=
        std::string::npos);
  CHECK_THROWS_AS(write_vtk_structured(path, 3, 2, points, {}), Error);
  CHECK_THROWS_AS(write_vtk_structured(path, 2, 2, points, {{"bad", {1.0}, 1}}), Error);
}

TEST_CASE("unstructured vtk of a field") {
  const auto mesh = build_mesh(p2(0, 0), p2(1, 1), 2);
  const auto field = DiscreteField::interpolate(mesh, 2, [](const Point& x) {
    return make_state({x[0], x[1]});
  });
  const auto path = scratch("field.vtk");
  write_vtk_unstructured(path, field, "U");
  const auto text = slurp(path);
  CHECK(text.find("POINTS 9 double\n") != std::string::npos);
  CHECK(text.find("CELLS 8 32\n") != std::string::npos);
  CHECK(text.find("CELL_TYPES 8\n5\n") != std::string::npos);
  CHECK(text.find("FIELD U 1\nU 2 9 double\n0 0\n0.5 0\n") != std::string::npos);

  const auto again = scratch("field_again.vtk");
  write_vtk_unstructured(again, field, "U");
  CHECK(slurp(again) == text);
}

TEST_CASE("unwritable paths are io errors") {
  const auto blocker = scratch("blocker");
  { std::ofstream(blocker) << "x"; }
  try {
    write_csv(blocker / "inner.csv", {"a"}, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}
