#pragma once

#include <vector>

#include "mclab/geom.hpp"
#include "mclab/solver.hpp"

namespace mclab {

struct GradientField {
  const Mesh* mesh = nullptr;
  std::vector<Vec2> g;

  Vec2 evaluate(Vec2 p, int* hint = nullptr) const;  // barycentric interpolation
  double max_norm() const;
};

struct HessianField {
  const Mesh* mesh = nullptr;
  std::vector<SymMat2> H;
  std::vector<uint8_t> low_confidence;  // within one ring of a Dirichlet boundary

  SymMat2 evaluate(Vec2 p, int* hint = nullptr) const;
};

/// Quadratic least-squares fit of a scalar field over a vertex patch,
/// centered at `center`.
struct QuadFit {
  Vec2 center;
  double a0 = 0, ax = 0, ay = 0, axx = 0, axy = 0, ayy = 0;

  double eval(Vec2 p) const {
    double dx = p.x - center.x, dy = p.y - center.y;
    return a0 + ax * dx + ay * dy + axx * dx * dx + axy * dx * dy + ayy * dy * dy;
  }
  Vec2 grad(Vec2 p) const {
    double dx = p.x - center.x, dy = p.y - center.y;
    return {ax + 2 * axx * dx + axy * dy, ay + axy * dx + 2 * ayy * dy};
  }
  SymMat2 hess() const { return {2 * axx, axy, 2 * ayy}; }
  /// Stationary point of the fit (pseudo-inverse when nearly singular).
  Vec2 stationary_point(double eig_cutoff = 1e-3) const;
};

/// Per-vertex linear least-squares gradient over the one-ring (extended when
/// rank-deficient). Exact on globally linear fields.
GradientField recover_gradient(const ScalarField& field);

/// Per-vertex quadratic fit over the two-ring; Hessian of the fit. Exact on
/// globally quadratic fields at interior vertices.
HessianField recover_hessian(const ScalarField& field);

/// The quadratic fits behind recover_hessian, reusable for evaluation.
std::vector<QuadFit> quadratic_fits(const ScalarField& field);

/// Quadratic fit of the field over vertices within `radius` of `center`
/// (grown until well-posed). Used for critical/branch point refinement.
QuadFit local_quadratic_fit(const ScalarField& field, Vec2 center, double radius);

/// Vertexwise dot product grad u . theta; |theta| must be 1.
ScalarField directional_derivative(const GradientField& gradient, Vec2 theta);

}  // namespace mclab
