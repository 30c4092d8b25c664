#pragma once

#include <array>
#include <string>
#include <vector>

#include "mclab/domain.hpp"
#include "mclab/geom.hpp"

namespace mclab {

enum class VertexTag { Interior, Outer, Inner, Axis };

std::string to_string(VertexTag t);

/// Conforming triangulation of a planar domain. Triangles are positively
/// oriented; boundary vertices carry the label of the analytic component
/// they lie on. Axis vertices sit exactly on r = 0.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<VertexTag> boundary_tags;
  double h = 0.0;
  DomainSpec domain;

  // connectivity, built by finalize()
  std::vector<std::array<int, 3>> neighbors;        // neighbor opposite corner i, -1 at boundary
  std::vector<std::vector<int>> vertex_triangles;   // incident triangles per vertex

  void finalize();

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  bool is_boundary_vertex(int v) const { return boundary_tags[v] != VertexTag::Interior; }
  /// True Dirichlet boundary (axis excluded): where the PDE data lives.
  bool is_dirichlet_vertex(int v) const {
    return boundary_tags[v] == VertexTag::Outer || boundary_tags[v] == VertexTag::Inner;
  }
  double triangle_area(int t) const;
  Vec2 centroid(int t) const;

  /// One-ring vertex neighbors of v (sorted, unique).
  std::vector<int> ring1(int v) const;

  /// Walks the triangulation to the triangle containing p; returns -1 when p
  /// is outside the mesh. `hint` seeds the walk.
  int locate(Vec2 p, int hint = 0) const;
  /// Barycentric coordinates of p in triangle t.
  std::array<double, 3> barycentric(int t, Vec2 p) const;
};

struct MeshQuality {
  double min_angle_deg = 0.0;
  double max_aspect = 0.0;  // circumradius / (2 * inradius), 1 for equilateral
  double h_min = 0.0, h_max = 0.0, h_mean = 0.0;
  double max_circumradius = 0.0;
  int n_vertices = 0, n_triangles = 0;
};

/// Delaunay refinement over the analytic boundary; guarantees the Mesh
/// invariants (min angle >= 20 deg, circumradius <= 2h, exact boundary
/// vertices) or throws MeshQualityFailure.
Mesh triangulate(const DomainSpec& domain, double h);

MeshQuality mesh_quality(const Mesh& mesh);

/// Plain-text dump: vertex section (index, x, y, tag), triangle section.
void dump_mesh(const Mesh& mesh, const std::string& path);

}  // namespace mclab
