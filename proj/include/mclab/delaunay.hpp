#pragma once

#include <vector>

#include "mclab/geom.hpp"

namespace mclab::detail {

/// Incremental Bowyer-Watson triangulation over a super-triangle.
/// Vertices 0..2 are the synthetic super vertices. Cocircular ties break
/// toward "outside the circumcircle" so rings of exactly cocircular
/// boundary points triangulate stably.
class Delaunay {
public:
  struct Tri {
    int v[3];   // counterclockwise
    int nb[3];  // neighbor opposite v[i], -1 at the hull
    bool alive = true;
  };

  /// Bounding box the inserted points must stay inside.
  void init(Vec2 lo, Vec2 hi);

  /// Inserts p; returns the vertex id, or the id of an existing vertex
  /// within snap_tol of p (no insertion then).
  int insert(Vec2 p, double snap_tol = 1e-12);

  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<Tri>& triangles() const { return tris_; }
  bool is_super_vertex(int v) const { return v < 3; }

  /// Walks to a triangle containing p (alive). Returns -1 on failure.
  int locate(Vec2 p) const;

  Vec2 circumcenter(int t) const;
  double circumradius(int t) const;

private:
  bool in_circumcircle(int t, Vec2 p) const;

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  mutable int hint_ = 0;
  double scale_ = 1.0;
};

}  // namespace mclab::detail
