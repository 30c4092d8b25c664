#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mclab/geom.hpp"
#include "mclab/mesh.hpp"

namespace mclab {

/// Right-hand side f(u) = slope * u + intercept; slope >= 0 keeps f
/// nondecreasing and the second variation positive definite.
struct SourceSpec {
  double slope = 0.0;
  double intercept = 0.0;

  static SourceSpec constant(double H) { return {0.0, H}; }
  static SourceSpec affine(double slope, double intercept);

  double f(double u) const { return slope * u + intercept; }
  double fprime() const { return slope; }
  double F(double u) const { return 0.5 * slope * u * u + intercept * u; }  // F' = f
};

/// Piecewise-linear nodal field on a triangulation.
struct ScalarField {
  const Mesh* mesh = nullptr;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(const Mesh& m, double fill = 0.0)
      : mesh(&m), values(m.num_vertices(), fill) {}

  /// Barycentric-linear evaluation; clamps to the nearest triangle when p is
  /// within round-off outside the mesh. `ok` reports genuine containment.
  double evaluate(Vec2 p, bool* ok = nullptr) const;
  double max_abs() const;
};

struct DirichletSpec {
  double outer = 0.0;
  double inner = 0.0;
  double value_for(VertexTag t) const { return t == VertexTag::Inner ? inner : outer; }
  bool trivial() const { return outer == 0.0 && inner == 0.0; }
};

/// Discrete problem: weak form of div(r^m grad u / sqrt(1+|grad u|^2)) = r^m f(u)
/// with Dirichlet data on Outer/Inner vertices; Axis vertices are free.
struct Problem {
  const Mesh* mesh = nullptr;
  SourceSpec source;
  int weight_exponent = 0;  // 0 planar, n-2 meridian
  DirichletSpec dirichlet;

  Problem() = default;
  Problem(const Mesh& m, SourceSpec s, int weight = 0, DirichletSpec bc = {});
  std::vector<int> free_vertices() const;
};

struct SolveReport {
  int newton_iterations = 0;
  double final_residual = 0.0;
  std::vector<double> damping_history;
  std::vector<double> energy_history;
  std::vector<double> residual_history;
  bool degenerate = false;   // max |grad u| below threshold everywhere
  bool homotopy_used = false;
};

/// Weak-form residual, one entry per free vertex, ordered as free_vertices().
Eigen::VectorXd assemble_residual(const Problem& problem, const ScalarField& field);

/// Second variation (Newton matrix), free x free; SPD for slope >= 0.
Eigen::SparseMatrix<double> assemble_hessian(const Problem& problem, const ScalarField& field);

/// Discrete energy  sum_T int r^m [sqrt(1+|grad u|^2) + F(u)].
double discrete_energy(const Problem& problem, const ScalarField& field);

/// Max over triangles of |grad u|.
double max_gradient(const ScalarField& field);

/// Damped Newton from the boundary-data lift until the residual norm drops
/// below tol. Throws NonConvergence / LinearSolveFailure.
std::pair<ScalarField, SolveReport> solve(const Problem& problem, double tol = 1e-10,
                                          int max_iter = 50);

/// Residual field of the linearized equation satisfied by v = u_theta,
/// evaluated from patch-recovered derivatives (diagnostic). Entries at
/// Dirichlet-boundary-adjacent vertices are set to zero (low confidence).
ScalarField linearized_residual(const ScalarField& field, Vec2 theta, const Problem& problem);

/// The transport right-hand side of the linearized meridian equation,
/// (n-2)/r^2 * v_r * theta_2 / sqrt(1+|grad v|^2), per vertex (r > 0 only).
ScalarField meridian_transport_rhs(const ScalarField& field, Vec2 theta, const Problem& problem);

}  // namespace mclab
