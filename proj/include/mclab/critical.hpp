#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mclab/fields.hpp"

namespace mclab {

enum class CriticalType { Maximum, Minimum, Saddle, Degenerate };

std::string to_string(CriticalType t);

struct CriticalPoint {
  Vec2 location;
  double gradient_residual = 0.0;  // |grad u| interpolated at the location
  SymMat2 hessian;
  CriticalType type = CriticalType::Degenerate;
  int morse_index = -1;  // -1 for degenerate
};

struct CircleFit {
  Vec2 center;
  double radius = 0.0;
  double max_radial_deviation = 0.0;
};

struct CriticalCurve {
  std::vector<Vec2> points;  // chained; consecutive points within 2h
  bool closed = false;
  std::optional<CircleFit> fitted_circle;
  int winding = 0;  // +-1 for closed curves around the fitted center
};

/// 3-D description swept from meridian results (coordinates (x_n, r)).
struct CriticalSet3D {
  std::vector<double> axis_points;  // x_n of isolated points on the axis
  std::vector<Vec2> circles;        // (x_n, r) of swept critical circles
  struct Surface {
    std::vector<Vec2> meridian_points;
    bool swept_closed = false;  // closed loop or arc with both ends on the axis
    bool is_sphere = false;     // arc centered on the axis within tolerance
    double sphere_radius = 0.0;
    double center_xn = 0.0;
    double max_deviation = 0.0;
  };
  std::vector<Surface> surfaces;
};

/// Classification by Hessian eigenvalue signs; Degenerate when
/// |det| <= tau_deg * ||H||_F^2.
std::pair<CriticalType, int> classify(const SymMat2& hessian, double tau_deg = 1e-6);

/// Candidate triangles are those whose vertex gradients do not fit in an
/// open half-plane; clusters refine on local quadratic models. Clusters of
/// extent > 4h whose refined loci chain become curves.
std::pair<std::vector<CriticalPoint>, std::vector<CriticalCurve>> detect_critical_set(
    const ScalarField& field, const GradientField& gradient, const HessianField& hessian,
    double tau_deg = 1e-6);

/// Sum of Poincare indices, sign(det H) per point. Throws DegeneratePresent.
int index_sum(const std::vector<CriticalPoint>& points);

CriticalSet3D sweep_to_3d(const std::vector<CriticalPoint>& meridian_points,
                          const std::vector<CriticalCurve>& meridian_curves, double h);

}  // namespace mclab
