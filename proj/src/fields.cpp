#include "mclab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "mclab/errors.hpp"

namespace mclab {

namespace {

// vertices within `rings` edge-hops of v, excluding v itself
std::vector<int> ring_k(const Mesh& mesh, int v, int rings) {
  std::set<int> seen{v};
  std::vector<int> frontier{v};
  std::vector<int> out;
  for (int k = 0; k < rings; ++k) {
    std::vector<int> next;
    for (int w : frontier)
      for (int u : mesh.ring1(w))
        if (seen.insert(u).second) {
          next.push_back(u);
          out.push_back(u);
        }
    frontier = std::move(next);
  }
  return out;
}

bool fit_linear(const Mesh& mesh, const std::vector<double>& vals, int v,
                const std::vector<int>& patch, Vec2& grad) {
  int n = (int)patch.size() + 1;
  if (n < 3) return false;
  // center and scale for conditioning
  Vec2 c = mesh.vertices[v];
  double scale = 0;
  for (int w : patch) scale = std::max(scale, dist(mesh.vertices[w], c));
  if (scale == 0) return false;
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  A(0, 0) = 1;
  A(0, 1) = 0;
  A(0, 2) = 0;
  b(0) = vals[v];
  for (int i = 0; i < (int)patch.size(); ++i) {
    Vec2 d = (mesh.vertices[patch[i]] - c) / scale;
    A(i + 1, 0) = 1;
    A(i + 1, 1) = d.x;
    A(i + 1, 2) = d.y;
    b(i + 1) = vals[patch[i]];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(2) < 1e-8 * svd.singularValues()(0)) return false;
  Eigen::Vector3d z = svd.solve(b);
  grad = Vec2{z(1), z(2)} / scale;
  return true;
}

bool fit_quadratic_points(const std::vector<Vec2>& pts, const std::vector<double>& vals,
                          Vec2 center, QuadFit& fit) {
  int n = (int)pts.size();
  if (n < 6) return false;
  double scale = 0;
  for (auto& p : pts) scale = std::max(scale, dist(p, center));
  if (scale == 0) return false;
  Eigen::MatrixXd A(n, 6);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    Vec2 d = (pts[i] - center) / scale;
    A(i, 0) = 1;
    A(i, 1) = d.x;
    A(i, 2) = d.y;
    A(i, 3) = d.x * d.x;
    A(i, 4) = d.x * d.y;
    A(i, 5) = d.y * d.y;
    b(i) = vals[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(5) < 1e-9 * svd.singularValues()(0)) return false;
  Eigen::VectorXd z = svd.solve(b);
  fit.center = center;
  fit.a0 = z(0);
  fit.ax = z(1) / scale;
  fit.ay = z(2) / scale;
  fit.axx = z(3) / (scale * scale);
  fit.axy = z(4) / (scale * scale);
  fit.ayy = z(5) / (scale * scale);
  return true;
}

bool fit_quadratic(const Mesh& mesh, const std::vector<double>& vals, int v,
                   const std::vector<int>& patch, QuadFit& fit) {
  std::vector<Vec2> pts{mesh.vertices[v]};
  std::vector<double> pv{vals[v]};
  for (int w : patch) {
    pts.push_back(mesh.vertices[w]);
    pv.push_back(vals[w]);
  }
  return fit_quadratic_points(pts, pv, mesh.vertices[v], fit);
}

}  // namespace

Vec2 QuadFit::stationary_point(double eig_cutoff) const {
  SymMat2 H = hess();
  auto ev = H.eigenvalues();
  double lmax = std::max(std::abs(ev[0]), std::abs(ev[1]));
  if (lmax == 0) return center;
  // eigenvectors of the symmetric 2x2
  auto eigvec = [&](double lam) -> Vec2 {
    Vec2 r1{H.xx - lam, H.xy}, r2{H.xy, H.yy - lam};
    Vec2 v = (norm2(r1) > norm2(r2)) ? perp(r1) : perp(r2);
    return normalized(v);
  };
  Vec2 g{ax, ay};
  Vec2 step{0, 0};
  for (double lam : ev) {
    if (std::abs(lam) <= eig_cutoff * lmax) continue;
    Vec2 e = eigvec(lam);
    step += e * (-dot(g, e) / lam);
  }
  return center + step;
}

Vec2 GradientField::evaluate(Vec2 p, int* hint) const {
  int h0 = hint ? *hint : 0;
  int t = mesh->locate(p, h0);
  if (t < 0) t = std::clamp(h0, 0, mesh->num_triangles() - 1);
  if (hint) *hint = t;
  auto b = mesh->barycentric(t, p);
  Vec2 out{0, 0};
  for (int i = 0; i < 3; ++i) out += g[mesh->triangles[t][i]] * std::max(b[i], 0.0);
  return out;
}

double GradientField::max_norm() const {
  double m = 0;
  for (auto& v : g) m = std::max(m, norm(v));
  return m;
}

SymMat2 HessianField::evaluate(Vec2 p, int* hint) const {
  int h0 = hint ? *hint : 0;
  int t = mesh->locate(p, h0);
  if (t < 0) t = std::clamp(h0, 0, mesh->num_triangles() - 1);
  if (hint) *hint = t;
  auto b = mesh->barycentric(t, p);
  SymMat2 out;
  for (int i = 0; i < 3; ++i) {
    double w = std::max(b[i], 0.0);
    out = out + H[mesh->triangles[t][i]] * w;
  }
  return out;
}

GradientField recover_gradient(const ScalarField& field) {
  const Mesh& mesh = *field.mesh;
  GradientField out;
  out.mesh = &mesh;
  out.g.resize(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    bool ok = false;
    for (int rings = 1; rings <= 3 && !ok; ++rings) {
      auto patch = ring_k(mesh, v, rings);
      ok = fit_linear(mesh, field.values, v, patch, out.g[v]);
    }
    if (!ok) throw PatchRankFailure(v, "linear patch fit failed at vertex " + std::to_string(v));
  }
  return out;
}

std::vector<QuadFit> quadratic_fits(const ScalarField& field) {
  const Mesh& mesh = *field.mesh;
  std::vector<QuadFit> fits(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    bool ok = false;
    for (int rings = 2; rings <= 4 && !ok; ++rings) {
      auto patch = ring_k(mesh, v, rings);
      ok = fit_quadratic(mesh, field.values, v, patch, fits[v]);
    }
    if (!ok)
      throw PatchRankFailure(v, "quadratic patch fit failed at vertex " + std::to_string(v));
  }
  return fits;
}

HessianField recover_hessian(const ScalarField& field) {
  const Mesh& mesh = *field.mesh;
  auto fits = quadratic_fits(field);
  HessianField out;
  out.mesh = &mesh;
  out.H.resize(mesh.num_vertices());
  out.low_confidence.assign(mesh.num_vertices(), 0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    out.H[v] = fits[v].hess();
    bool near_bdry = mesh.is_dirichlet_vertex(v);
    if (!near_bdry)
      for (int w : mesh.ring1(v))
        if (mesh.is_dirichlet_vertex(w)) near_bdry = true;
    out.low_confidence[v] = near_bdry ? 1 : 0;
  }
  return out;
}

QuadFit local_quadratic_fit(const ScalarField& field, Vec2 center, double radius) {
  const Mesh& mesh = *field.mesh;
  QuadFit fit;
  for (int attempt = 0; attempt < 5; ++attempt) {
    std::vector<Vec2> pts;
    std::vector<double> vals;
    double r2 = radius * radius;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (norm2(mesh.vertices[v] - center) <= r2) {
        pts.push_back(mesh.vertices[v]);
        vals.push_back(field.values[v]);
      }
    }
    if ((int)pts.size() >= 8 && fit_quadratic_points(pts, vals, center, fit)) return fit;
    radius *= 1.5;
  }
  throw PatchRankFailure(-1, "local quadratic fit found no well-posed patch");
}

ScalarField directional_derivative(const GradientField& gradient, Vec2 theta) {
  if (std::abs(norm(theta) - 1.0) > 1e-9)
    throw ConfigError("theta must be a unit direction");
  ScalarField out(*gradient.mesh, 0.0);
  for (size_t v = 0; v < gradient.g.size(); ++v) out.values[v] = dot(gradient.g[v], theta);
  return out;
}

}  // namespace mclab
