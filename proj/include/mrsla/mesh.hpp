#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mrsla/tensor2.hpp"

namespace mrsla {

/// Boundary part an edge belongs to. The numeric values are the labels used in mesh files.
enum class BoundaryKind : int {
  Traction = 1,  ///< prescribed surface traction
  Slip = 2,      ///< zero normal displacement, zero tangential traction
  Clamped = 3,   ///< prescribed displacement (zero in the homogeneous problem)
};

struct BoundaryEdge {
  int a = 0;  ///< first node; (a, b) runs counter-clockwise around the owning triangle
  int b = 0;
  BoundaryKind kind = BoundaryKind::Clamped;
  int triangle = -1;  ///< owning triangle, filled in by validation
};

/// 2D P1 triangulation. Coordinates are those of the current configuration.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
};

struct MeshOptions {
  bool allow_empty_clamped = false;  ///< accept meshes without any label-3 edge
};

/// Parses the plain-text mesh format:
///
///     nodes N triangles M edges K [base 0|1]
///     x y            (N lines)
///     i j k          (M lines)
///     i j label      (K lines)
///
/// Blank lines and lines starting with '#' are ignored. Clockwise triangles are reordered
/// with a warning. Throws MeshParse (with line number) or MeshValidation.
Mesh parse_mesh(std::istream& in, const MeshOptions& options = {}, std::vector<std::string>* warnings = nullptr);
Mesh load_mesh(const std::filesystem::path& path, const MeshOptions& options = {},
               std::vector<std::string>* warnings = nullptr);
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);

/// Checks orientation, boundary tiling and labels; fills BoundaryEdge::triangle and
/// re-orients boundary edges to follow their triangle. Triangles with negative area are
/// swapped when `fix_orientation` is set.
void validate_mesh(Mesh& mesh, const MeshOptions& options = {}, std::vector<std::string>* warnings = nullptr,
                   bool fix_orientation = true);

double signed_area(const Mesh& mesh, std::size_t triangle);
double total_area(const Mesh& mesh);

/// Unit outward normal of a boundary edge from the current coordinates.
/// Throws DegenerateEdge for edges shorter than 1e-14.
Vec2 edge_normal(const Mesh& mesh, const BoundaryEdge& edge);
double edge_length(const Mesh& mesh, const BoundaryEdge& edge);

struct RectangleSpec {
  double width = 1.0;
  double height = 1.0;
  int nx = 1;
  int ny = 1;
  BoundaryKind bottom = BoundaryKind::Clamped;
  BoundaryKind right = BoundaryKind::Clamped;
  BoundaryKind top = BoundaryKind::Clamped;
  BoundaryKind left = BoundaryKind::Clamped;
  /// Each cell split into four triangles around a centre node; otherwise two triangles.
  bool crossed = true;
  Vec2 origin{};
};

/// Structured rectangle mesh. Grid nodes come first, row by row from the bottom, then
/// (for crossed cells) one centre node per cell.
Mesh rectangle_mesh(const RectangleSpec& spec);

struct VtkFields {
  std::vector<std::pair<std::string, std::vector<Vec2>>> point_vectors;
  std::vector<std::pair<std::string, std::vector<Tensor2>>> cell_tensors;  ///< written row-major, 4 components
  std::vector<std::pair<std::string, std::vector<double>>> cell_scalars;
};

/// Legacy ASCII VTK unstructured grid (triangles, z = 0), 17 significant digits.
void write_vtk(const Mesh& mesh, const VtkFields& fields, const std::filesystem::path& path,
               const std::string& title = "mrsla");
void write_vtk(const Mesh& mesh, const VtkFields& fields, std::ostream& out, const std::string& title = "mrsla");

/// Per-node CSV: node_id,x,y,ux,uy.
void write_displacement_csv(const Mesh& mesh, const std::vector<Vec2>& displacement, std::ostream& out);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

}  // namespace mrsla
