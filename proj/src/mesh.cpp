#include "mrsla/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mrsla/errors.hpp"

namespace mrsla {

namespace {

std::string edge_name(int a, int b) { return "(" + std::to_string(a) + ", " + std::to_string(b) + ")"; }

std::pair<int, int> edge_key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::MeshParse, "line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::MeshValidation, msg); }

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Mesh parse_mesh(std::istream& in, const MeshOptions& options, std::vector<std::string>* warnings) {
  std::string line;
  std::size_t line_no = 0;
  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      const auto first = out.find_first_not_of(" \t\r");
      if (first == std::string::npos || out[first] == '#') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) parse_fail(line_no, "missing header 'nodes N triangles M edges K'");
  std::size_t n_nodes = 0;
  std::size_t n_tri = 0;
  std::size_t n_edges = 0;
  int base = 0;
  {
    std::istringstream hs(line);
    std::string w1, w2, w3;
    if (!(hs >> w1 >> n_nodes >> w2 >> n_tri >> w3 >> n_edges) || w1 != "nodes" || w2 != "triangles" ||
        w3 != "edges") {
      parse_fail(line_no, "malformed header, expected 'nodes N triangles M edges K'");
    }
    std::string w4;
    if (hs >> w4) {
      if (w4 != "base" || !(hs >> base) || (base != 0 && base != 1)) {
        parse_fail(line_no, "header suffix must be 'base 0' or 'base 1'");
      }
    }
  }

  Mesh mesh;
  mesh.nodes.reserve(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    if (!next_data_line(line)) parse_fail(line_no, "unexpected end of file in node block");
    std::istringstream ls(line);
    Vec2 p;
    std::string extra;
    if (!(ls >> p.x >> p.y) || (ls >> extra) || !std::isfinite(p.x) || !std::isfinite(p.y)) {
      parse_fail(line_no, "expected 'x y'");
    }
    mesh.nodes.push_back(p);
  }
  auto read_index = [&](std::istringstream& ls, int& idx) {
    long long v = 0;
    if (!(ls >> v)) return false;
    v -= base;
    if (v < 0 || v >= static_cast<long long>(n_nodes)) parse_fail(line_no, "node index out of range");
    idx = static_cast<int>(v);
    return true;
  };
  mesh.triangles.reserve(n_tri);
  for (std::size_t t = 0; t < n_tri; ++t) {
    if (!next_data_line(line)) parse_fail(line_no, "unexpected end of file in triangle block");
    std::istringstream ls(line);
    std::array<int, 3> tri{};
    std::string extra;
    if (!read_index(ls, tri[0]) || !read_index(ls, tri[1]) || !read_index(ls, tri[2]) || (ls >> extra)) {
      parse_fail(line_no, "expected 'i j k'");
    }
    mesh.triangles.push_back(tri);
  }
  mesh.boundary_edges.reserve(n_edges);
  for (std::size_t e = 0; e < n_edges; ++e) {
    if (!next_data_line(line)) parse_fail(line_no, "unexpected end of file in edge block");
    std::istringstream ls(line);
    BoundaryEdge edge;
    int label = 0;
    std::string extra;
    if (!read_index(ls, edge.a) || !read_index(ls, edge.b) || !(ls >> label) || (ls >> extra)) {
      parse_fail(line_no, "expected 'i j label'");
    }
    if (label < 1 || label > 3) parse_fail(line_no, "boundary label must be 1, 2 or 3");
    edge.kind = static_cast<BoundaryKind>(label);
    mesh.boundary_edges.push_back(edge);
  }
  if (next_data_line(line)) parse_fail(line_no, "trailing data after edge block");

  validate_mesh(mesh, options, warnings, true);
  return mesh;
}

Mesh load_mesh(const std::filesystem::path& path, const MeshOptions& options, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open mesh file " + path.string());
  return parse_mesh(in, options, warnings);
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write mesh file " + path.string());
  out << "nodes " << mesh.nodes.size() << " triangles " << mesh.triangles.size() << " edges "
      << mesh.boundary_edges.size() << "\n";
  for (const auto& p : mesh.nodes) out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges) out << e.a << ' ' << e.b << ' ' << static_cast<int>(e.kind) << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

double signed_area(const Mesh& mesh, std::size_t triangle) {
  const auto& t = mesh.triangles[triangle];
  const Vec2 p0 = mesh.nodes[t[0]];
  return 0.5 * cross(mesh.nodes[t[1]] - p0, mesh.nodes[t[2]] - p0);
}

double total_area(const Mesh& mesh) {
  double a = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) a += signed_area(mesh, t);
  return a;
}

void validate_mesh(Mesh& mesh, const MeshOptions& options, std::vector<std::string>* warnings,
                   bool fix_orientation) {
  const int n = static_cast<int>(mesh.nodes.size());
  if (mesh.triangles.empty()) invalid("mesh has no triangles");

  // undirected edge -> (triangle, directed start node) for every triangle side
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> sides;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    auto& tri = mesh.triangles[t];
    for (int v : tri) {
      if (v < 0 || v >= n) invalid("triangle " + std::to_string(t) + " references a missing node");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      invalid("triangle " + std::to_string(t) + " repeats a vertex");
    }
    double area = signed_area(mesh, t);
    if (area < 0.0 && fix_orientation) {
      std::swap(tri[1], tri[2]);
      area = -area;
      if (warnings) {
        warnings->push_back("triangle " + std::to_string(t) + " was clockwise; vertices reordered");
      }
    }
    if (!(area > 0.0)) invalid("triangle " + std::to_string(t) + " has non-positive area");
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      sides[edge_key(a, b)].emplace_back(static_cast<int>(t), a);
    }
  }

  std::map<std::pair<int, int>, int> boundary;  // key -> index into mesh.boundary_edges, -1 unlabeled
  for (const auto& [key, owners] : sides) {
    if (owners.size() > 2) invalid("edge " + edge_name(key.first, key.second) + " is shared by more than two triangles");
    if (owners.size() == 1) boundary[key] = -1;
  }

  bool has_clamped = false;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    auto& edge = mesh.boundary_edges[e];
    const auto key = edge_key(edge.a, edge.b);
    auto it = boundary.find(key);
    if (it == boundary.end()) invalid("labeled edge " + edge_name(edge.a, edge.b) + " is not on the boundary");
    if (it->second >= 0) invalid("boundary edge " + edge_name(edge.a, edge.b) + " is labeled twice");
    it->second = static_cast<int>(e);
    const auto [tri, start] = sides[key].front();
    const auto& t = mesh.triangles[tri];
    int k = 0;
    while (t[k] != start) ++k;
    edge.a = start;
    edge.b = t[(k + 1) % 3];
    edge.triangle = tri;
    if (edge.kind == BoundaryKind::Clamped) has_clamped = true;
  }
  for (const auto& [key, idx] : boundary) {
    if (idx < 0) invalid("boundary edge " + edge_name(key.first, key.second) + " has no label");
  }
  if (!has_clamped && !options.allow_empty_clamped) {
    invalid("mesh has no clamped (label 3) boundary edge; pass the allow-empty-clamped override to accept it");
  }
}

double edge_length(const Mesh& mesh, const BoundaryEdge& edge) {
  return norm(mesh.nodes[edge.b] - mesh.nodes[edge.a]);
}

Vec2 edge_normal(const Mesh& mesh, const BoundaryEdge& edge) {
  const Vec2 d = mesh.nodes[edge.b] - mesh.nodes[edge.a];
  const double len = norm(d);
  if (!(len >= 1e-14)) throw Error(ErrorKind::DegenerateEdge, "boundary edge " + edge_name(edge.a, edge.b) + " is degenerate");
  return {d.y / len, -d.x / len};
}

Mesh rectangle_mesh(const RectangleSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1) throw Error(ErrorKind::InvalidArgument, "rectangle needs nx, ny >= 1");
  if (!(spec.width > 0.0) || !(spec.height > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "rectangle needs positive width and height");
  }
  Mesh mesh;
  const int nx = spec.nx;
  const int ny = spec.ny;
  auto grid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.nodes.push_back({spec.origin.x + spec.width * i / nx, spec.origin.y + spec.height * j / ny});
    }
  }
  const int centre0 = static_cast<int>(mesh.nodes.size());
  if (spec.crossed) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        mesh.nodes.push_back({spec.origin.x + spec.width * (i + 0.5) / nx, spec.origin.y + spec.height * (j + 0.5) / ny});
      }
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = grid(i, j);
      const int n10 = grid(i + 1, j);
      const int n11 = grid(i + 1, j + 1);
      const int n01 = grid(i, j + 1);
      if (spec.crossed) {
        const int c = centre0 + j * nx + i;
        mesh.triangles.push_back({n00, n10, c});
        mesh.triangles.push_back({n10, n11, c});
        mesh.triangles.push_back({n11, n01, c});
        mesh.triangles.push_back({n01, n00, c});
      } else {
        mesh.triangles.push_back({n00, n10, n11});
        mesh.triangles.push_back({n00, n11, n01});
      }
    }
  }
  for (int i = 0; i < nx; ++i) mesh.boundary_edges.push_back({grid(i, 0), grid(i + 1, 0), spec.bottom});
  for (int j = 0; j < ny; ++j) mesh.boundary_edges.push_back({grid(nx, j), grid(nx, j + 1), spec.right});
  for (int i = nx; i > 0; --i) mesh.boundary_edges.push_back({grid(i, ny), grid(i - 1, ny), spec.top});
  for (int j = ny; j > 0; --j) mesh.boundary_edges.push_back({grid(0, j), grid(0, j - 1), spec.left});
  validate_mesh(mesh, MeshOptions{.allow_empty_clamped = true}, nullptr, false);
  return mesh;
}

void write_vtk(const Mesh& mesh, const VtkFields& fields, std::ostream& out, const std::string& title) {
  const std::size_t n = mesh.nodes.size();
  const std::size_t m = mesh.triangles.size();
  for (const auto& [name, v] : fields.point_vectors) {
    if (v.size() != n) throw Error(ErrorKind::InvalidArgument, "point field '" + name + "' has wrong length");
  }
  for (const auto& [name, v] : fields.cell_tensors) {
    if (v.size() != m) throw Error(ErrorKind::InvalidArgument, "cell field '" + name + "' has wrong length");
  }
  for (const auto& [name, v] : fields.cell_scalars) {
    if (v.size() != m) throw Error(ErrorKind::InvalidArgument, "cell field '" + name + "' has wrong length");
  }

  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  for (const auto& p : mesh.nodes) out << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
  out << "CELLS " << m << ' ' << 4 * m << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << m << '\n';
  for (std::size_t t = 0; t < m; ++t) out << "5\n";

  if (!fields.point_vectors.empty()) {
    out << "POINT_DATA " << n << '\n';
    for (const auto& [name, v] : fields.point_vectors) {
      out << "VECTORS " << name << " double\n";
      for (const auto& u : v) out << format_double(u.x) << ' ' << format_double(u.y) << " 0\n";
    }
  }
  const std::size_t n_cell_arrays = fields.cell_tensors.size() + fields.cell_scalars.size();
  if (n_cell_arrays > 0) {
    out << "CELL_DATA " << m << '\n';
    out << "FIELD FieldData " << n_cell_arrays << '\n';
    for (const auto& [name, v] : fields.cell_tensors) {
      out << name << " 4 " << m << " double\n";
      for (const auto& t : v) {
        out << format_double(t.a[0]) << ' ' << format_double(t.a[1]) << ' ' << format_double(t.a[2]) << ' '
            << format_double(t.a[3]) << '\n';
      }
    }
    for (const auto& [name, v] : fields.cell_scalars) {
      out << name << " 1 " << m << " double\n";
      for (double s : v) out << format_double(s) << '\n';
    }
  }
}

void write_vtk(const Mesh& mesh, const VtkFields& fields, const std::filesystem::path& path, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_vtk(mesh, fields, out, title);
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void write_displacement_csv(const Mesh& mesh, const std::vector<Vec2>& displacement, std::ostream& out) {
  if (displacement.size() != mesh.nodes.size()) {
    throw Error(ErrorKind::InvalidArgument, "displacement length does not match node count");
  }
  out << "node_id,x,y,ux,uy\n";
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    out << i << ',' << format_double(mesh.nodes[i].x) << ',' << format_double(mesh.nodes[i].y) << ','
        << format_double(displacement[i].x) << ',' << format_double(displacement[i].y) << '\n';
  }
}

}  // namespace mrsla
