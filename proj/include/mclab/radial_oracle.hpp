#pragma once

#include <array>
#include <optional>
#include <vector>

namespace mclab {

/// Exact 1-D radial solution of the constant mean curvature equation,
/// obtained from the first integral
///     r^(n-1) u' / sqrt(1 + u'^2) = H r^n / n + c.
/// The independent ground truth for balls (c = 0) and concentric annuli.
struct RadialProfile {
  int n = 2;
  double R_I = 0.0;  // 0 for balls
  double R_E = 0.0;
  double H = 0.0;
  double c = 0.0;                                // flux constant
  std::vector<std::array<double, 3>> samples;    // (r, u, u')
  std::optional<double> r_star;                  // critical radius, if any

  /// Linear interpolation of u at radius r.
  double value(double r) const;
  /// Linear interpolation of u' at radius r.
  double derivative(double r) const;
  /// Max over samples of |r^(n-1) u'/sqrt(1+u'^2) - H r^n/n - c|.
  double first_integral_residual() const;
};

/// Closed-form profile on a ball of radius R; requires |H| R / n < 1.
RadialProfile radial_ball(double R, int n, double H);

/// Shooting on the flux constant for the annulus with Dirichlet data
/// u(R_I) = g_I, u(R_E) = g_E. `steps` is the RK4 grid size.
RadialProfile radial_annulus(double R_I, double R_E, int n, double H, double g_I, double g_E,
                             int steps = 4096);

/// The unique interior zero of u', when the flux term changes sign.
std::optional<double> critical_radius(const RadialProfile& profile);

}  // namespace mclab
