#include "mclab/critical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "mclab/domain.hpp"
#include "mclab/errors.hpp"

namespace mclab {

namespace {

constexpr double kDegenerateGradient = 1e-10;

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// 0 in the closed convex hull of {g0, g1, g2}
bool gradients_span_origin(Vec2 g0, Vec2 g1, Vec2 g2) {
  double s0 = cross(g1 - g0, -g0);
  double s1 = cross(g2 - g1, -g1);
  double s2 = cross(g0 - g2, -g2);
  return (s0 >= 0 && s1 >= 0 && s2 >= 0) || (s0 <= 0 && s1 <= 0 && s2 <= 0);
}

// two refinement passes of the fitted quadratic model around `start`
struct Refined {
  Vec2 location;
  SymMat2 hessian;
  bool ok = false;
};

Refined refine_on_quadratic(const ScalarField& field, Vec2 start, double h) {
  Refined out;
  Vec2 x = start;
  for (int pass = 0; pass < 3; ++pass) {
    QuadFit fit;
    try {
      fit = local_quadratic_fit(field, x, 3.0 * h);
    } catch (const PatchRankFailure&) {
      return out;
    }
    Vec2 xe = fit.stationary_point();
    if (dist(xe, x) > 3.0 * h) xe = x + normalized(xe - x) * 3.0 * h;
    out.hessian = fit.hess();
    double move = dist(xe, x);
    x = xe;
    if (move < 1e-13) break;
  }
  out.location = x;
  out.ok = dist(x, start) <= 4.0 * h;
  return out;
}

CircleFit fit_circle(const std::vector<Vec2>& pts) {
  // algebraic (Kasa) fit: |p|^2 = 2 c . p + (R^2 - |c|^2)
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, sxz = 0, syz = 0, sz = 0;
  int n = (int)pts.size();
  for (auto& p : pts) {
    double z = norm2(p);
    sx += p.x;
    sy += p.y;
    sxx += p.x * p.x;
    syy += p.y * p.y;
    sxy += p.x * p.y;
    sxz += p.x * z;
    syz += p.y * z;
    sz += z;
  }
  // normal equations for [2cx, 2cy, k]
  double A[3][3] = {{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, (double)n}};
  double b[3] = {sxz, syz, sz};
  // Gaussian elimination
  for (int i = 0; i < 3; ++i) {
    int piv = i;
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(A[j][i]) > std::abs(A[piv][i])) piv = j;
    std::swap(A[i], A[piv]);
    std::swap(b[i], b[piv]);
    for (int j = i + 1; j < 3; ++j) {
      double f = A[j][i] / A[i][i];
      for (int k = i; k < 3; ++k) A[j][k] -= f * A[i][k];
      b[j] -= f * b[i];
    }
  }
  double z[3];
  for (int i = 2; i >= 0; --i) {
    z[i] = b[i];
    for (int k = i + 1; k < 3; ++k) z[i] -= A[i][k] * z[k];
    z[i] /= A[i][i];
  }
  CircleFit fit;
  fit.center = {0.5 * z[0], 0.5 * z[1]};
  fit.radius = std::sqrt(std::max(0.0, z[2] + norm2(fit.center)));
  for (auto& p : pts)
    fit.max_radial_deviation =
        std::max(fit.max_radial_deviation, std::abs(dist(p, fit.center) - fit.radius));
  return fit;
}

}  // namespace

std::string to_string(CriticalType t) {
  switch (t) {
    case CriticalType::Maximum: return "maximum";
    case CriticalType::Minimum: return "minimum";
    case CriticalType::Saddle: return "saddle";
    case CriticalType::Degenerate: return "degenerate";
  }
  return "?";
}

std::pair<CriticalType, int> classify(const SymMat2& H, double tau_deg) {
  double det = H.det();
  if (std::abs(det) <= tau_deg * H.frobenius2()) return {CriticalType::Degenerate, -1};
  auto ev = H.eigenvalues();
  int neg = (ev[0] < 0 ? 1 : 0) + (ev[1] < 0 ? 1 : 0);
  CriticalType t = neg == 2   ? CriticalType::Maximum
                   : neg == 0 ? CriticalType::Minimum
                              : CriticalType::Saddle;
  return {t, neg};
}

std::pair<std::vector<CriticalPoint>, std::vector<CriticalCurve>> detect_critical_set(
    const ScalarField& field, const GradientField& gradient, const HessianField& hessian,
    double tau_deg) {
  const Mesh& mesh = *field.mesh;
  const double h = mesh.h;
  (void)hessian;

  if (gradient.max_norm() < kDegenerateGradient)
    throw DegenerateField("critical-set analysis of a degenerate field");

  // vertices within one ring of the Dirichlet boundary are excluded
  std::vector<char> excluded(mesh.num_vertices(), 0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.is_dirichlet_vertex(v)) {
      excluded[v] = 1;
      for (int w : mesh.ring1(v)) excluded[w] = 1;
    }
  }

  std::vector<int> candidates;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& T = mesh.triangles[t];
    if (excluded[T[0]] || excluded[T[1]] || excluded[T[2]]) continue;
    if (gradients_span_origin(gradient.g[T[0]], gradient.g[T[1]], gradient.g[T[2]]))
      candidates.push_back(t);
  }

  // clusters: candidate triangles sharing a vertex
  std::map<int, std::vector<int>> by_vertex;
  for (int i = 0; i < (int)candidates.size(); ++i)
    for (int k = 0; k < 3; ++k) by_vertex[mesh.triangles[candidates[i]][k]].push_back(i);
  UnionFind uf((int)candidates.size());
  for (auto& [v, list] : by_vertex)
    for (size_t i = 1; i < list.size(); ++i) uf.unite(list[0], list[i]);

  std::map<int, std::vector<int>> clusters;
  for (int i = 0; i < (int)candidates.size(); ++i) clusters[uf.find(i)].push_back(i);

  std::vector<CriticalPoint> points;
  std::vector<CriticalCurve> curves;

  for (auto& [root, members] : clusters) {
    std::vector<Vec2> cents;
    for (int i : members) cents.push_back(mesh.centroid(candidates[i]));
    double diam = 0;
    for (size_t i = 0; i < cents.size(); ++i)
      for (size_t j = i + 1; j < cents.size(); ++j) diam = std::max(diam, dist(cents[i], cents[j]));

    if (diam <= 4.0 * h) {
      Vec2 mean{0, 0};
      for (auto& c : cents) mean += c;
      mean = mean / (double)cents.size();
      Refined r = refine_on_quadratic(field, mean, h);
      if (!r.ok) continue;
      CriticalPoint cp;
      cp.location = r.location;
      cp.hessian = r.hessian;
      int hint = 0;
      cp.gradient_residual = norm(gradient.evaluate(r.location, &hint));
      auto [type, idx] = classify(r.hessian, tau_deg);
      cp.type = type;
      cp.morse_index = idx;
      points.push_back(cp);
    } else {
      // 1-D locus: refine per candidate triangle, dedupe, chain
      std::vector<Vec2> loci;
      for (auto& c : cents) {
        Refined r = refine_on_quadratic(field, c, h);
        if (r.ok) loci.push_back(r.location);
      }
      // dedupe on a h/2 scale
      std::vector<Vec2> unique_pts;
      for (auto& p : loci) {
        bool dup = false;
        for (auto& q : unique_pts)
          if (dist(p, q) < 0.5 * h) {
            dup = true;
            break;
          }
        if (!dup) unique_pts.push_back(p);
      }
      if (unique_pts.size() < 4) {
        // too sparse for a curve: treat as a point cluster
        Vec2 mean{0, 0};
        for (auto& c : cents) mean += c;
        mean = mean / (double)cents.size();
        Refined r = refine_on_quadratic(field, mean, h);
        if (r.ok) {
          CriticalPoint cp;
          cp.location = r.location;
          cp.hessian = r.hessian;
          int hint = 0;
          cp.gradient_residual = norm(gradient.evaluate(r.location, &hint));
          auto [type, idx] = classify(r.hessian, tau_deg);
          cp.type = type;
          cp.morse_index = idx;
          points.push_back(cp);
        }
        continue;
      }

      CircleFit cf = fit_circle(unique_pts);
      // order by angle around the fitted center
      std::sort(unique_pts.begin(), unique_pts.end(), [&](Vec2 a, Vec2 b) {
        return std::atan2(a.y - cf.center.y, a.x - cf.center.x) <
               std::atan2(b.y - cf.center.y, b.x - cf.center.x);
      });
      // chain validity: sorted gaps; closed when the wrap gap is small too
      double max_gap = 0;
      for (size_t i = 1; i < unique_pts.size(); ++i)
        max_gap = std::max(max_gap, dist(unique_pts[i], unique_pts[i - 1]));
      double wrap_gap = dist(unique_pts.front(), unique_pts.back());
      bool chain = max_gap <= 2.0 * h;
      bool closed = chain && wrap_gap <= 2.0 * h;

      if (!chain) {
        // refined loci do not form a chain: report the deduped points
        for (auto& p : unique_pts) {
          Refined r = refine_on_quadratic(field, p, h);
          if (!r.ok) continue;
          CriticalPoint cp;
          cp.location = r.location;
          cp.hessian = r.hessian;
          int hint = 0;
          cp.gradient_residual = norm(gradient.evaluate(r.location, &hint));
          auto [type, idx] = classify(r.hessian, tau_deg);
          cp.type = type;
          cp.morse_index = idx;
          points.push_back(cp);
        }
        continue;
      }

      CriticalCurve curve;
      if (!closed) {
        // open arc: rotate the ordering so the big wrap gap splits the ends
        size_t cut = 0;
        double biggest = wrap_gap;
        for (size_t i = 1; i < unique_pts.size(); ++i) {
          double g = dist(unique_pts[i], unique_pts[i - 1]);
          if (g > biggest) {
            biggest = g;
            cut = i;
          }
        }
        std::rotate(unique_pts.begin(), unique_pts.begin() + cut, unique_pts.end());
      }
      curve.points = unique_pts;
      curve.closed = closed;
      curve.fitted_circle = cf;
      if (closed) {
        double total = 0;
        for (size_t i = 0; i < unique_pts.size(); ++i) {
          Vec2 a = unique_pts[i] - cf.center;
          Vec2 b = unique_pts[(i + 1) % unique_pts.size()] - cf.center;
          total += std::atan2(cross(a, b), dot(a, b));
        }
        curve.winding = (int)std::round(total / (2.0 * 3.14159265358979323846));
      }
      curves.push_back(std::move(curve));
    }
  }

  // merge points closer than 2h, keep the one with the smaller residual
  std::sort(points.begin(), points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) {
              return a.gradient_residual < b.gradient_residual;
            });
  std::vector<CriticalPoint> merged;
  for (auto& p : points) {
    bool close = false;
    for (auto& q : merged)
      if (dist(p.location, q.location) < 2.0 * h) {
        close = true;
        break;
      }
    if (!close) merged.push_back(p);
  }

  // interior-only guarantee: at least h/2 from the analytic boundary
  std::vector<CriticalPoint> kept;
  for (auto& p : merged) {
    if (contains(mesh.domain, p.location) &&
        boundary_distance(mesh.domain, p.location) >= 0.5 * h)
      kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    return a.location.x < b.location.x || (a.location.x == b.location.x && a.location.y < b.location.y);
  });
  return {kept, curves};
}

int index_sum(const std::vector<CriticalPoint>& points) {
  int sum = 0;
  for (auto& p : points) {
    if (p.type == CriticalType::Degenerate)
      throw DegeneratePresent("index sum undefined with degenerate critical points");
    sum += p.hessian.det() > 0 ? 1 : -1;
  }
  return sum;
}

CriticalSet3D sweep_to_3d(const std::vector<CriticalPoint>& pts,
                          const std::vector<CriticalCurve>& curves, double h) {
  CriticalSet3D out;
  for (auto& p : pts) {
    if (p.location.y <= 2.0 * h)
      out.axis_points.push_back(p.location.x);
    else
      out.circles.push_back(p.location);
  }
  std::sort(out.axis_points.begin(), out.axis_points.end());
  for (auto& c : curves) {
    CriticalSet3D::Surface s;
    s.meridian_points = c.points;
    bool ends_on_axis = !c.points.empty() && c.points.front().y <= 2.0 * h &&
                        c.points.back().y <= 2.0 * h;
    s.swept_closed = c.closed || ends_on_axis;
    // sphere fit: circle with center constrained to the axis
    double sx = 0, sxx = 0, sz = 0, sxz = 0;
    int n = (int)c.points.size();
    for (auto& p : c.points) {
      double z = norm2(p);
      sx += p.x;
      sxx += p.x * p.x;
      sz += z;
      sxz += p.x * z;
    }
    double det = sxx * n - sx * sx;
    if (std::abs(det) > 1e-30) {
      double a = (sxz * n - sx * sz) / det;       // 2 xc
      double k = (sz - a * sx) / n;               // R^2 - xc^2
      s.center_xn = 0.5 * a;
      s.sphere_radius = std::sqrt(std::max(0.0, k + s.center_xn * s.center_xn));
      for (auto& p : c.points)
        s.max_deviation = std::max(
            s.max_deviation, std::abs(dist(p, {s.center_xn, 0.0}) - s.sphere_radius));
      s.is_sphere = s.swept_closed && !c.closed && s.max_deviation <= 2.0 * h;
    }
    out.surfaces.push_back(std::move(s));
  }
  return out;
}

}  // namespace mclab
