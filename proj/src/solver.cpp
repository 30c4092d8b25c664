#include "mclab/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/IterativeLinearSolvers>

#include "mclab/errors.hpp"
#include "mclab/fields.hpp"

namespace mclab {

namespace {

constexpr double kDegenerateGradient = 1e-10;

struct TriGeometry {
  Vec2 grad_phi[3];  // constant P1 basis gradients
  double area;
  Vec2 mid[3];       // mid-edge quadrature points (opposite each corner)
};

TriGeometry tri_geometry(const Mesh& mesh, int t) {
  const auto& T = mesh.triangles[t];
  Vec2 p0 = mesh.vertices[T[0]], p1 = mesh.vertices[T[1]], p2 = mesh.vertices[T[2]];
  TriGeometry g;
  g.area = triangle_area(p0, p1, p2);
  double inv = 1.0 / (2.0 * g.area);
  g.grad_phi[0] = perp(p2 - p1) * inv;
  g.grad_phi[1] = perp(p0 - p2) * inv;
  g.grad_phi[2] = perp(p1 - p0) * inv;
  g.mid[0] = (p1 + p2) * 0.5;
  g.mid[1] = (p2 + p0) * 0.5;
  g.mid[2] = (p0 + p1) * 0.5;
  return g;
}

// P1 basis value of corner i at the mid-edge point opposite corner q:
// 0 when i == q, 1/2 otherwise.
inline double phi_at_mid(int i, int q) { return i == q ? 0.0 : 0.5; }

double weight_at(const Problem& prob, Vec2 p) {
  if (prob.weight_exponent == 0) return 1.0;
  double r = std::max(p.y, 0.0);
  double w = r;
  for (int k = 1; k < prob.weight_exponent; ++k) w *= r;
  return w;
}

// coefficient matrix A(p) = (I - p p^T / (1+|p|^2)) / sqrt(1+|p|^2)
SymMat2 mc_coefficient(Vec2 g) {
  double w2 = 1.0 + norm2(g);
  double w = std::sqrt(w2);
  return {(1.0 - g.x * g.x / w2) / w, (-g.x * g.y / w2) / w, (1.0 - g.y * g.y / w2) / w};
}

// derivative of a_ij with respect to the gradient component k, contracted
// against a symmetric matrix M: sum_ij M_ij da_ij/dp_k
Vec2 coefficient_derivative_contraction(Vec2 p, const SymMat2& M) {
  double w2 = 1.0 + norm2(p);
  double w12 = std::sqrt(w2);
  double w32 = w2 * w12;
  double w52 = w2 * w32;
  double pm[2] = {p.x, p.y};
  double Mm[2][2] = {{M.xx, M.xy}, {M.xy, M.yy}};
  Vec2 out{0, 0};
  double* o = &out.x;
  for (int k = 0; k < 2; ++k) {
    double acc = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double dk = -((i == j) ? pm[k] : 0.0) / w32;
        dk -= (((i == k) ? pm[j] : 0.0) + ((j == k) ? pm[i] : 0.0)) / w32;
        dk += 3.0 * pm[i] * pm[j] * pm[k] / w52;
        acc += Mm[i][j] * dk;
      }
    o[k] = acc;
  }
  return out;
}

}  // namespace

SourceSpec SourceSpec::affine(double slope, double intercept) {
  if (slope < 0) throw ConfigError("source slope must be >= 0 (f nondecreasing)");
  return {slope, intercept};
}

double ScalarField::evaluate(Vec2 p, bool* ok) const {
  static thread_local int hint = 0;
  int t = mesh->locate(p, hint);
  bool inside = t >= 0;
  if (t < 0) {
    // nearest triangle by centroid (coarse), then clamped barycentric
    double best = 1e300;
    for (int i = 0; i < mesh->num_triangles(); ++i) {
      double d = norm2(mesh->centroid(i) - p);
      if (d < best) {
        best = d;
        t = i;
      }
    }
  }
  hint = t;
  auto b = mesh->barycentric(t, p);
  for (auto& w : b) w = std::max(w, 0.0);
  double s = b[0] + b[1] + b[2];
  double v = 0;
  for (int i = 0; i < 3; ++i) v += b[i] / s * values[mesh->triangles[t][i]];
  if (ok) *ok = inside;
  return v;
}

double ScalarField::max_abs() const {
  double m = 0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

Problem::Problem(const Mesh& m, SourceSpec s, int weight, DirichletSpec bc)
    : mesh(&m), source(s), weight_exponent(weight), dirichlet(bc) {
  if (weight < 0) throw ConfigError("weight exponent must be >= 0");
  if (s.slope < 0) throw ConfigError("source slope must be >= 0");
}

std::vector<int> Problem::free_vertices() const {
  std::vector<int> free;
  for (int v = 0; v < mesh->num_vertices(); ++v)
    if (!mesh->is_dirichlet_vertex(v)) free.push_back(v);
  return free;
}

Eigen::VectorXd assemble_residual(const Problem& prob, const ScalarField& field) {
  const Mesh& mesh = *prob.mesh;
  std::vector<int> index(mesh.num_vertices(), -1);
  auto free = prob.free_vertices();
  for (size_t i = 0; i < free.size(); ++i) index[free[i]] = (int)i;

  Eigen::VectorXd R = Eigen::VectorXd::Zero((Eigen::Index)free.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    auto geo = tri_geometry(mesh, t);
    const auto& T = mesh.triangles[t];
    Vec2 g{0, 0};
    for (int i = 0; i < 3; ++i) g += geo.grad_phi[i] * field.values[T[i]];
    double W = std::sqrt(1.0 + norm2(g));
    for (int q = 0; q < 3; ++q) {
      double wq = weight_at(prob, geo.mid[q]) * geo.area / 3.0;
      if (wq == 0.0) continue;
      double uq = 0;
      for (int i = 0; i < 3; ++i) uq += phi_at_mid(i, q) * field.values[T[i]];
      double fq = prob.source.f(uq);
      for (int i = 0; i < 3; ++i) {
        int row = index[T[i]];
        if (row < 0) continue;
        R[row] += wq * (dot(geo.grad_phi[i], g) / W + fq * phi_at_mid(i, q));
      }
    }
  }
  return R;
}

Eigen::SparseMatrix<double> assemble_hessian(const Problem& prob, const ScalarField& field) {
  const Mesh& mesh = *prob.mesh;
  std::vector<int> index(mesh.num_vertices(), -1);
  auto free = prob.free_vertices();
  for (size_t i = 0; i < free.size(); ++i) index[free[i]] = (int)i;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(12 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    auto geo = tri_geometry(mesh, t);
    const auto& T = mesh.triangles[t];
    Vec2 g{0, 0};
    for (int i = 0; i < 3; ++i) g += geo.grad_phi[i] * field.values[T[i]];
    SymMat2 A = mc_coefficient(g);
    double fp = prob.source.fprime();
    for (int q = 0; q < 3; ++q) {
      double wq = weight_at(prob, geo.mid[q]) * geo.area / 3.0;
      if (wq == 0.0) continue;
      for (int i = 0; i < 3; ++i) {
        int row = index[T[i]];
        if (row < 0) continue;
        Vec2 Agi = A.apply(geo.grad_phi[i]);
        for (int j = 0; j < 3; ++j) {
          int col = index[T[j]];
          if (col < 0) continue;
          double val = wq * (dot(Agi, geo.grad_phi[j]) + fp * phi_at_mid(i, q) * phi_at_mid(j, q));
          trips.emplace_back(row, col, val);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> M((Eigen::Index)free.size(), (Eigen::Index)free.size());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

double discrete_energy(const Problem& prob, const ScalarField& field) {
  const Mesh& mesh = *prob.mesh;
  double E = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    auto geo = tri_geometry(mesh, t);
    const auto& T = mesh.triangles[t];
    Vec2 g{0, 0};
    for (int i = 0; i < 3; ++i) g += geo.grad_phi[i] * field.values[T[i]];
    double W = std::sqrt(1.0 + norm2(g));
    for (int q = 0; q < 3; ++q) {
      double wq = weight_at(prob, geo.mid[q]) * geo.area / 3.0;
      double uq = 0;
      for (int i = 0; i < 3; ++i) uq += phi_at_mid(i, q) * field.values[T[i]];
      E += wq * (W + prob.source.F(uq));
    }
  }
  return E;
}

double max_gradient(const ScalarField& field) {
  const Mesh& mesh = *field.mesh;
  double m = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    auto geo = tri_geometry(mesh, t);
    const auto& T = mesh.triangles[t];
    Vec2 g{0, 0};
    for (int i = 0; i < 3; ++i) g += geo.grad_phi[i] * field.values[T[i]];
    m = std::max(m, norm(g));
  }
  return m;
}

namespace {

Eigen::VectorXd cg_solve(const Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& rhs,
                         double rel_tol) {
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg;
  cg.setTolerance(rel_tol);
  cg.setMaxIterations(20000);
  cg.compute(M);
  if (cg.info() == Eigen::Success) {
    Eigen::VectorXd x = cg.solve(rhs);
    if (cg.info() == Eigen::Success) return x;
  }
  // incomplete factorization failed or stagnated: diagonal preconditioner
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg2;
  cg2.setTolerance(rel_tol);
  cg2.setMaxIterations(40000);
  cg2.compute(M);
  Eigen::VectorXd x = cg2.solve(rhs);
  if (cg2.info() != Eigen::Success)
    throw LinearSolveFailure("conjugate gradient stagnated (error " +
                             std::to_string(cg2.error()) + ")");
  return x;
}

void apply_dirichlet(const Problem& prob, ScalarField& field) {
  const Mesh& mesh = *prob.mesh;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (mesh.is_dirichlet_vertex(v))
      field.values[v] = prob.dirichlet.value_for(mesh.boundary_tags[v]);
}

// linear weighted-Laplace lift of the boundary data as the initial iterate
void harmonic_lift(const Problem& prob, ScalarField& field) {
  Problem lin = prob;
  lin.source = SourceSpec::constant(0.0);
  // one Newton step on the Laplace problem from zero interior values is the
  // exact linear solve (A at grad u ~ 0 is not the plain stiffness, but the
  // mc coefficient at the lifted gradient is; iterate twice for safety)
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::VectorXd R = assemble_residual(lin, field);
    auto M = assemble_hessian(lin, field);
    Eigen::VectorXd delta = cg_solve(M, -R, 1e-10);
    auto free = lin.free_vertices();
    for (size_t i = 0; i < free.size(); ++i) field.values[free[i]] += delta[(Eigen::Index)i];
  }
}

bool newton(const Problem& prob, double tol, int max_iter, ScalarField& field,
            SolveReport& report) {
  auto free = prob.free_vertices();
  Eigen::VectorXd R = assemble_residual(prob, field);
  double rn = R.norm();
  report.residual_history.push_back(rn);
  report.energy_history.push_back(discrete_energy(prob, field));
  for (int it = 0; it < max_iter; ++it) {
    if (rn <= tol) {
      report.final_residual = rn;
      return true;
    }
    auto M = assemble_hessian(prob, field);
    Eigen::VectorXd delta = cg_solve(M, -R, tol / 10.0);

    double alpha = 1.0;
    ScalarField trial = field;
    bool accepted = false;
    Eigen::VectorXd R_trial;
    for (; alpha >= 1.0 / 1024.0; alpha *= 0.5) {
      for (size_t i = 0; i < free.size(); ++i)
        trial.values[free[i]] = field.values[free[i]] + alpha * delta[(Eigen::Index)i];
      R_trial = assemble_residual(prob, trial);
      if (R_trial.norm() < rn) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;
    field = trial;
    R.swap(R_trial);
    rn = R.norm();
    report.newton_iterations++;
    report.damping_history.push_back(alpha);
    report.residual_history.push_back(rn);
    report.energy_history.push_back(discrete_energy(prob, field));
  }
  report.final_residual = rn;
  return rn <= tol;
}

}  // namespace

std::pair<ScalarField, SolveReport> solve(const Problem& prob, double tol, int max_iter) {
  if (!(tol > 0)) throw ConfigError("tolerance must be positive");
  const Mesh& mesh = *prob.mesh;
  ScalarField field(mesh, 0.0);
  apply_dirichlet(prob, field);
  SolveReport report;
  if (!prob.dirichlet.trivial()) harmonic_lift(prob, field);

  if (!newton(prob, tol, max_iter, field, report)) {
    // homotopy in the source intercept, ten equal steps from zero
    report = SolveReport{};
    report.homotopy_used = true;
    field = ScalarField(mesh, 0.0);
    apply_dirichlet(prob, field);
    if (!prob.dirichlet.trivial()) harmonic_lift(prob, field);
    for (int k = 1; k <= 10; ++k) {
      Problem sub = prob;
      sub.source.intercept = prob.source.intercept * k / 10.0;
      SolveReport step;
      if (!newton(sub, tol, max_iter, field, step))
        throw NonConvergence("Newton failed at homotopy step " + std::to_string(k));
      report.newton_iterations += step.newton_iterations;
      report.final_residual = step.final_residual;
      for (double a : step.damping_history) report.damping_history.push_back(a);
      for (double e : step.energy_history) report.energy_history.push_back(e);
      for (double r : step.residual_history) report.residual_history.push_back(r);
    }
  }

  report.degenerate = max_gradient(field) < kDegenerateGradient;
  return {field, report};
}

ScalarField meridian_transport_rhs(const ScalarField& field, Vec2 theta, const Problem& prob) {
  const Mesh& mesh = *field.mesh;
  GradientField g = recover_gradient(field);
  ScalarField rhs(mesh, 0.0);
  int m = prob.weight_exponent;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    double r = mesh.vertices[v].y;
    if (r <= 0 || m == 0) continue;
    double W = std::sqrt(1.0 + norm2(g.g[v]));
    rhs.values[v] = (double)m / (r * r) * g.g[v].y * theta.y / W;
  }
  return rhs;
}

ScalarField linearized_residual(const ScalarField& field, Vec2 theta, const Problem& prob) {
  const Mesh& mesh = *field.mesh;
  if (std::abs(norm(theta) - 1.0) > 1e-9) throw ConfigError("theta must be a unit direction");

  GradientField gu = recover_gradient(field);
  HessianField Hu = recover_hessian(field);
  ScalarField v = directional_derivative(gu, theta);
  GradientField gv = recover_gradient(v);
  HessianField Hv = recover_hessian(v);

  int m = prob.weight_exponent;
  ScalarField res(mesh, 0.0);
  for (int w = 0; w < mesh.num_vertices(); ++w) {
    if (Hu.low_confidence[w] || Hv.low_confidence[w]) continue;
    if (m > 0 && mesh.vertices[w].y <= 0) continue;  // 1/r transport undefined on the axis
    Vec2 p = gu.g[w];
    SymMat2 A = mc_coefficient(p);
    const SymMat2& hv = Hv.H[w];
    double Lv = A.xx * hv.xx + 2.0 * A.xy * hv.xy + A.yy * hv.yy;
    Vec2 hcoef = coefficient_derivative_contraction(p, Hu.H[w]);
    double transport = dot(hcoef, gv.g[w]);
    double value = Lv + transport - prob.source.fprime() * v.values[w];
    double r = mesh.vertices[w].y;
    if (m > 0 && r > 0) {
      double w2 = 1.0 + norm2(p);
      double w32 = w2 * std::sqrt(w2);
      // (n-2)/r / (1+|grad|^2)^{3/2} * [(1+v_x^2) w_y - v_x v_y w_x]
      value += (double)m / r / w32 *
               ((1.0 + p.x * p.x) * gv.g[w].y - p.x * p.y * gv.g[w].x);
      double W = std::sqrt(w2);
      value -= (double)m / (r * r) * p.y * theta.y / W;
    }
    res.values[w] = value;
  }
  return res;
}

}  // namespace mclab
