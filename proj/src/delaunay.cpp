#include "mclab/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "mclab/errors.hpp"

namespace mclab::detail {

namespace {

// incircle determinant in extended precision; positive = p strictly inside
// the circumcircle of (a, b, c) (ccw)
long double incircle_det(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
  long double ax = (long double)a.x - p.x, ay = (long double)a.y - p.y;
  long double bx = (long double)b.x - p.x, by = (long double)b.y - p.y;
  long double cx = (long double)c.x - p.x, cy = (long double)c.y - p.y;
  long double a2 = ax * ax + ay * ay;
  long double b2 = bx * bx + by * by;
  long double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

}  // namespace

void Delaunay::init(Vec2 lo, Vec2 hi) {
  pts_.clear();
  tris_.clear();
  Vec2 c = (lo + hi) * 0.5;
  double ext = std::max(hi.x - lo.x, hi.y - lo.y);
  scale_ = std::max(1.0, ext);
  double R = 16.0 * std::max(ext, 1e-6);
  for (int k = 0; k < 3; ++k) {
    double ang = 0.5 * M_PI + k * (2.0 * M_PI / 3.0);
    pts_.push_back(c + Vec2{2.0 * R * std::cos(ang), 2.0 * R * std::sin(ang)});
  }
  Tri t;
  t.v[0] = 0;
  t.v[1] = 1;
  t.v[2] = 2;
  t.nb[0] = t.nb[1] = t.nb[2] = -1;
  if (orient2d(pts_[0], pts_[1], pts_[2]) < 0) std::swap(t.v[1], t.v[2]);
  tris_.push_back(t);
  hint_ = 0;
}

bool Delaunay::in_circumcircle(int t, Vec2 p) const {
  const Tri& T = tris_[t];
  long double det = incircle_det(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]], p);
  // threshold scaled to the determinant's natural magnitude
  long double m = 0;
  for (int i = 0; i < 3; ++i) {
    Vec2 d = pts_[T.v[i]] - p;
    m = std::max(m, (long double)(d.x * d.x + d.y * d.y));
  }
  return det > 1e-14L * m * m;
}

int Delaunay::locate(Vec2 p) const {
  int t = hint_;
  if (t < 0 || t >= (int)tris_.size() || !tris_[t].alive) {
    t = -1;
    for (int i = (int)tris_.size() - 1; i >= 0; --i)
      if (tris_[i].alive) { t = i; break; }
    if (t < 0) return -1;
  }
  size_t guard = 4 * tris_.size() + 64;
  while (guard--) {
    const Tri& T = tris_[t];
    int next = -1;
    double worst = -1e-13 * scale_ * scale_;
    for (int i = 0; i < 3; ++i) {
      Vec2 a = pts_[T.v[(i + 1) % 3]];
      Vec2 b = pts_[T.v[(i + 2) % 3]];
      double o = orient2d(a, b, p);
      if (o < worst) {
        worst = o;
        next = T.nb[i];
      }
    }
    if (next == -1) {
      hint_ = t;
      return t;
    }
    t = next;
  }
  // fallback: exhaustive scan
  for (int i = 0; i < (int)tris_.size(); ++i) {
    if (!tris_[i].alive) continue;
    const Tri& T = tris_[i];
    bool inside = true;
    for (int k = 0; k < 3 && inside; ++k)
      inside = orient2d(pts_[T.v[(k + 1) % 3]], pts_[T.v[(k + 2) % 3]], p) >=
               -1e-12 * scale_ * scale_;
    if (inside) {
      hint_ = i;
      return i;
    }
  }
  return -1;
}

Vec2 Delaunay::circumcenter(int t) const {
  const Tri& T = tris_[t];
  Vec2 a = pts_[T.v[0]], b = pts_[T.v[1]], c = pts_[T.v[2]];
  Vec2 ab = b - a, ac = c - a;
  double d = 2.0 * cross(ab, ac);
  double ab2 = norm2(ab), ac2 = norm2(ac);
  Vec2 rel{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
  return a + rel;
}

double Delaunay::circumradius(int t) const {
  return dist(circumcenter(t), pts_[tris_[t].v[0]]);
}

int Delaunay::insert(Vec2 p, double snap_tol) {
  int t0 = locate(p);
  if (t0 < 0) throw Error("DelaunayFailure", "point location failed");

  // snap to an existing vertex
  for (int i = 0; i < 3; ++i) {
    int v = tris_[t0].v[i];
    if (dist(pts_[v], p) <= snap_tol * scale_) return v;
  }

  // cavity: BFS over triangles whose circumcircle strictly contains p
  std::vector<int> cavity;
  std::vector<int> stack{t0};
  std::vector<char> mark(tris_.size(), 0);
  mark[t0] = 1;
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    cavity.push_back(t);
    for (int i = 0; i < 3; ++i) {
      int nb = tris_[t].nb[i];
      if (nb < 0 || mark[nb] || !tris_[nb].alive) continue;
      if (in_circumcircle(nb, p)) {
        mark[nb] = 1;
        stack.push_back(nb);
      }
    }
  }

  // boundary edges of the cavity, with the outside neighbor; grow the cavity
  // if a boundary edge would make a degenerate fan triangle
  struct BEdge {
    int a, b, outside;
  };
  std::vector<BEdge> bed;
  for (int grow_pass = 0; grow_pass < 12; ++grow_pass) {
    bed.clear();
    bool grown = false;
    for (size_t ci = 0; ci < cavity.size() && !grown; ++ci) {
      int t = cavity[ci];
      for (int i = 0; i < 3; ++i) {
        int nb = tris_[t].nb[i];
        bool nb_in = nb >= 0 && nb < (int)mark.size() && mark[nb];
        if (nb_in) continue;
        int a = tris_[t].v[(i + 1) % 3];
        int b = tris_[t].v[(i + 2) % 3];
        if (orient2d(pts_[a], pts_[b], p) <= 1e-14 * scale_ * scale_) {
          if (nb >= 0) {
            mark[nb] = 1;
            cavity.push_back(nb);
            grown = true;
            break;
          }
          throw Error("DelaunayFailure", "degenerate cavity at the hull");
        }
        bed.push_back({a, b, nb});
      }
    }
    if (!grown) break;
  }

  int pid = (int)pts_.size();
  pts_.push_back(p);

  for (int t : cavity) tris_[t].alive = false;

  // fan: one triangle per boundary edge; link siblings around p
  std::unordered_map<int, int> by_first, by_second;  // edge endpoint -> new tri
  std::vector<int> fresh;
  fresh.reserve(bed.size());
  for (const BEdge& e : bed) {
    Tri nt;
    nt.v[0] = pid;
    nt.v[1] = e.a;
    nt.v[2] = e.b;
    nt.nb[0] = e.outside;
    nt.nb[1] = -2;
    nt.nb[2] = -2;
    int id = (int)tris_.size();
    tris_.push_back(nt);
    fresh.push_back(id);
    by_first[e.a] = id;
    by_second[e.b] = id;
    if (e.outside >= 0) {
      // relink the outside triangle across the shared edge (a, b)
      Tri& O = tris_[e.outside];
      for (int i = 0; i < 3; ++i) {
        int oa = O.v[(i + 1) % 3], ob = O.v[(i + 2) % 3];
        if ((oa == e.a && ob == e.b) || (oa == e.b && ob == e.a)) {
          O.nb[i] = id;
          break;
        }
      }
    }
  }
  for (int id : fresh) {
    Tri& T = tris_[id];
    // edge (p, v2) is shared with the tri whose v1 == v2
    auto it1 = by_first.find(T.v[2]);
    T.nb[1] = (it1 != by_first.end()) ? it1->second : -1;
    // edge (p, v1) is shared with the tri whose v2 == v1
    auto it2 = by_second.find(T.v[1]);
    T.nb[2] = (it2 != by_second.end()) ? it2->second : -1;
  }
  if (!fresh.empty()) hint_ = fresh.back();
  return pid;
}

}  // namespace mclab::detail
