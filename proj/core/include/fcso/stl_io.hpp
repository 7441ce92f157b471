#pragma once

#include <iosfwd>
#include <string>

#include "fcso/trimesh.hpp"

namespace fcso {

/// Raised by the STL parser; `byte_offset` locates the defect in the input.
struct StlParseError : std::runtime_error {
  StlParseError(const std::string& what, std::size_t byte_offset);
  std::size_t byte_offset;
};

enum class StlFormat { binary, ascii };

/// Parse binary or ASCII STL (format auto-detected). Coordinates are
/// interpreted as millimeters after multiplying by `unit_scale`; vertices
/// are merged within 1e-6 mm and face winding is preserved.
TriMesh load_stl(const std::string& bytes, double unit_scale = 1.0);
TriMesh load_stl_file(const std::string& path, double unit_scale = 1.0);

std::string save_stl(const TriMesh& mesh, StlFormat format = StlFormat::binary);
void save_stl_file(const TriMesh& mesh, const std::string& path,
                   StlFormat format = StlFormat::binary);

}  // namespace fcso
