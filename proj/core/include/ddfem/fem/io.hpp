#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ddfem/fem/field.hpp"

namespace ddfem::fem {

/// Round-trip representation with 17 significant digits ("%.17g").
std::string format_double(double value);

struct NamedData {
  std::string name;
  std::vector<double> values;  // point-major, `components` per point
  int components = 1;
};

/// Legacy ASCII VTK STRUCTURED_GRID of nx x ny sample points (x fastest).
void write_vtk_structured(const std::filesystem::path& path, int nx, int ny,
                          const std::vector<Point>& points, const std::vector<NamedData>& data);

/// Legacy ASCII VTK UNSTRUCTURED_GRID of the active cells; point data over
/// active vertices.
void write_vtk_unstructured(const std::filesystem::path& path, const StructuredMesh& mesh,
                            const std::vector<NamedData>& data);
void write_vtk_unstructured(const std::filesystem::path& path, const DiscreteField& field,
                            const std::string& name = "U");

/// Comma separated table with a header row; numbers via format_double.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace ddfem::fem
