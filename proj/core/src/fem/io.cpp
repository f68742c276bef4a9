#include "ddfem/fem/io.hpp"

#include <cstdio>
#include <fstream>

#include "ddfem/error.hpp"

namespace ddfem::fem {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "error while writing " + path.string());
}

void write_point_data(std::ofstream& out, std::size_t points, const std::vector<NamedData>& data) {
  if (data.empty()) return;
  out << "POINT_DATA " << points << "\n";
  for (const auto& d : data) {
    if (d.values.size() != points * static_cast<std::size_t>(d.components)) {
      throw Error(ErrorCode::kDimensionMismatch, "data '" + d.name + "' has " +
                                                     std::to_string(d.values.size()) +
                                                     " values for " + std::to_string(points) +
                                                     " points");
    }
    if (d.components == 1) {
      out << "SCALARS " << d.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : d.values) out << format_double(v) << "\n";
    } else {
      out << "FIELD " << d.name << " 1\n" << d.name << " " << d.components << " " << points
          << " double\n";
      for (std::size_t p = 0; p < points; ++p) {
        for (int c = 0; c < d.components; ++c) {
          out << (c ? " " : "") << format_double(d.values[p * static_cast<std::size_t>(d.components) + static_cast<std::size_t>(c)]);
        }
        out << "\n";
      }
    }
  }
}

void write_point(std::ofstream& out, const Point& p) {
  out << format_double(p[0]) << " " << format_double(p.size() > 1 ? p[1] : 0.0) << " "
      << format_double(p.size() > 2 ? p[2] : 0.0) << "\n";
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_vtk_structured(const std::filesystem::path& path, int nx, int ny,
                          const std::vector<Point>& points, const std::vector<NamedData>& data) {
  if (points.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)) {
    throw Error(ErrorCode::kDimensionMismatch, "structured grid point count mismatch");
  }
  auto out = open_output(path);
  out << "# vtk DataFile Version 3.0\nddfem sample\nASCII\nDATASET STRUCTURED_GRID\n";
  out << "DIMENSIONS " << nx << " " << ny << " 1\n";
  out << "POINTS " << points.size() << " double\n";
  for (const auto& p : points) write_point(out, p);
  write_point_data(out, points.size(), data);
  finish(out, path);
}

void write_vtk_unstructured(const std::filesystem::path& path, const StructuredMesh& mesh,
                            const std::vector<NamedData>& data) {
  auto out = open_output(path);
  const auto& verts = mesh.active_vertices();
  out << "# vtk DataFile Version 3.0\nddfem solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << verts.size() << " double\n";
  for (int v : verts) write_point(out, mesh.vertex(v));
  const auto cells = mesh.active_cells();
  out << "CELLS " << cells.size() << " " << cells.size() * 4 << "\n";
  for (int c : cells) {
    const auto v = mesh.cell(c);
    out << 3 << " " << mesh.active_index(v[0]) << " " << mesh.active_index(v[1]) << " "
        << mesh.active_index(v[2]) << "\n";
  }
  out << "CELL_TYPES " << cells.size() << "\n";
  for (std::size_t k = 0; k < cells.size(); ++k) out << "5\n";
  write_point_data(out, verts.size(), data);
  finish(out, path);
}

void write_vtk_unstructured(const std::filesystem::path& path, const DiscreteField& field,
                            const std::string& name) {
  NamedData d{name, std::vector<double>(field.values().data(), field.values().data() + field.size()),
              field.components()};
  write_vtk_unstructured(path, *field.mesh(), {d});
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto out = open_output(path);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "CSV row width differs from the header");
    }
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
    out << "\n";
  }
  finish(out, path);
}

}  // namespace ddfem::fem
